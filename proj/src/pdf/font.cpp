#include "pdf/font.hpp"

#include "aitrace/utf8.hpp"
#include "pdf/encoding_tables.hpp"

#include <algorithm>
#include <charconv>

namespace aitrace::pdf {

namespace {

std::span<const std::byte> as_span(std::string_view s) {
    return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

std::uint32_t code_value(std::string_view bytes) {
    std::uint32_t v = 0;
    for (const char c : bytes.substr(0, 4)) v = (v << 8) | static_cast<unsigned char>(c);
    return v;
}

// Destination strings in ToUnicode maps are UTF-16BE.
std::u32string utf16be_to_u32(std::string_view bytes) {
    std::u32string out;
    if (bytes.size() % 2 != 0) {
        for (const char c : bytes) out.push_back(static_cast<unsigned char>(c));
        return out;
    }
    for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
        char32_t unit = (static_cast<unsigned char>(bytes[i]) << 8) | static_cast<unsigned char>(bytes[i + 1]);
        if (unit >= 0xD800 && unit <= 0xDBFF && i + 3 < bytes.size()) {
            const char32_t low =
                (static_cast<unsigned char>(bytes[i + 2]) << 8) | static_cast<unsigned char>(bytes[i + 3]);
            if (low >= 0xDC00 && low <= 0xDFFF) {
                out.push_back(0x10000 + ((unit - 0xD800) << 10) + (low - 0xDC00));
                i += 2;
                continue;
            }
        }
        out.push_back(unit);
    }
    return out;
}

const std::array<char16_t, 256>* base_encoding(std::string_view name) {
    if (name == "WinAnsiEncoding") return &kWinAnsiEncoding;
    if (name == "MacRomanEncoding") return &kMacRomanEncoding;
    if (name == "StandardEncoding") return &kStandardEncoding;
    return nullptr;
}

}  // namespace

std::optional<char32_t> glyph_to_unicode(std::string_view name) {
    const auto it = std::lower_bound(kGlyphNames.begin(), kGlyphNames.end(), name,
                                     [](const GlyphName& g, std::string_view n) { return g.name < n; });
    if (it != kGlyphNames.end() && it->name == name) return it->unicode;

    auto hex = [](std::string_view digits) -> std::optional<char32_t> {
        std::uint32_t v = 0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v, 16);
        if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) return std::nullopt;
        if (v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) return std::nullopt;
        return static_cast<char32_t>(v);
    };
    if (name.size() >= 7 && name.starts_with("uni")) return hex(name.substr(3, 4));
    if (name.size() >= 5 && name.size() <= 7 && name.front() == 'u') return hex(name.substr(1));
    if (const auto dot = name.find('.'); dot != std::string_view::npos && dot > 0) {
        return glyph_to_unicode(name.substr(0, dot));
    }
    return std::nullopt;
}

CMap CMap::parse(std::string_view program) {
    CMap cmap;
    Parser p(as_span(program));
    std::vector<Object> operands;
    auto strings_of = [](const std::vector<Object>& ops) {
        std::vector<std::string> out;
        for (const auto& o : ops) {
            if (const auto* s = o.as<String>()) out.push_back(s->bytes);
        }
        return out;
    };
    enum class Section { None, Codespace, BfChar, BfRange } section = Section::None;
    std::vector<Object> section_items;

    while (true) {
        Object tok;
        try {
            if (p.at_end()) break;
            tok = p.parse_object(false);
        } catch (const PdfError&) {
            break;
        }
        const auto* kw = tok.as<Keyword>();
        if (!kw) {
            if (section != Section::None) {
                section_items.push_back(std::move(tok));
            }
            continue;
        }
        const std::string& op = kw->value;
        if (op == "begincodespacerange") {
            section = Section::Codespace;
            section_items.clear();
        } else if (op == "beginbfchar") {
            section = Section::BfChar;
            section_items.clear();
        } else if (op == "beginbfrange") {
            section = Section::BfRange;
            section_items.clear();
        } else if (op == "endcodespacerange") {
            const auto s = strings_of(section_items);
            for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
                if (s[i].empty() || s[i].size() > 4 || s[i].size() != s[i + 1].size()) continue;
                cmap.codespace_.push_back({s[i].size(), code_value(s[i]), code_value(s[i + 1])});
            }
            section = Section::None;
        } else if (op == "endbfchar") {
            for (std::size_t i = 0; i + 1 < section_items.size(); i += 2) {
                const auto* src = section_items[i].as<String>();
                if (!src || src->bytes.empty() || src->bytes.size() > 4) continue;
                std::u32string dst;
                if (const auto* d = section_items[i + 1].as<String>()) {
                    dst = utf16be_to_u32(d->bytes);
                } else if (const auto* n = section_items[i + 1].as<Name>()) {
                    if (auto u = glyph_to_unicode(n->value)) dst.push_back(*u);
                }
                if (!dst.empty()) cmap.map_[key(code_value(src->bytes), src->bytes.size())] = std::move(dst);
            }
            section = Section::None;
        } else if (op == "endbfrange") {
            for (std::size_t i = 0; i + 2 < section_items.size(); i += 3) {
                const auto* lo = section_items[i].as<String>();
                const auto* hi = section_items[i + 1].as<String>();
                if (!lo || !hi || lo->bytes.empty() || lo->bytes.size() > 4 || lo->bytes.size() != hi->bytes.size()) {
                    continue;
                }
                const std::size_t len = lo->bytes.size();
                const std::uint32_t low = code_value(lo->bytes);
                const std::uint32_t high = code_value(hi->bytes);
                if (high < low || high - low > 0xFFFF) continue;
                const Object& dst = section_items[i + 2];
                if (const auto* d = dst.as<String>()) {
                    std::u32string base = utf16be_to_u32(d->bytes);
                    if (base.empty()) continue;
                    for (std::uint32_t c = low; c <= high; ++c) {
                        std::u32string v = base;
                        v.back() += (c - low);
                        cmap.map_[key(c, len)] = std::move(v);
                    }
                } else if (const auto* arr = dst.as<Array>()) {
                    for (std::uint32_t c = low; c <= high && (c - low) < arr->size(); ++c) {
                        if (const auto* d = (*arr)[c - low].as<String>()) {
                            std::u32string v = utf16be_to_u32(d->bytes);
                            if (!v.empty()) cmap.map_[key(c, len)] = std::move(v);
                        }
                    }
                }
            }
            section = Section::None;
        } else if (section != Section::None) {
            section_items.push_back(std::move(tok));
        }
    }
    return cmap;
}

std::size_t CMap::code_length(std::string_view bytes, std::size_t pos, std::size_t fallback) const {
    for (std::size_t len = 1; len <= 4 && pos + len <= bytes.size(); ++len) {
        const std::uint32_t v = code_value(bytes.substr(pos, len));
        for (const auto& r : codespace_) {
            if (r.length == len && v >= r.low && v <= r.high) return len;
        }
    }
    return std::min(fallback, bytes.size() - pos);
}

const std::u32string* CMap::lookup(std::uint32_t code, std::size_t length) const {
    const auto it = map_.find(key(code, length));
    return it == map_.end() ? nullptr : &it->second;
}

Font Font::load(Document& doc, const Dict& font) {
    Font f;
    const std::string_view subtype = font.get("Subtype") ? doc.resolve(*font.get("Subtype")).name() : "";
    f.composite_ = subtype == "Type0";

    if (const Object* tu = font.get("ToUnicode")) {
        const Object& resolved = doc.resolve(*tu);
        if (const auto* s = resolved.as<Stream>()) {
            try {
                CMap cmap = CMap::parse(doc.decode(*s).data);
                if (cmap.size() > 0) f.to_unicode_ = std::move(cmap);
            } catch (const PdfError& e) {
                f.problem_ = std::string("ToUnicode map unreadable: ") + e.what();
            }
        }
    }

    if (f.composite_) {
        const Object* enc = font.get("Encoding");
        const Object& enc_obj = enc ? doc.resolve(*enc) : Object{};
        const std::string_view enc_name = enc_obj.name();
        if (const auto* s = enc_obj.as<Stream>()) {
            try {
                f.encoding_cmap_ = CMap::parse(doc.decode(*s).data);
            } catch (const PdfError&) {
            }
        }
        if (!f.to_unicode_ && (enc_name.find("UCS2") != std::string_view::npos ||
                               enc_name.find("UTF16") != std::string_view::npos)) {
            f.ucs2_ = true;
        }
        if (!f.to_unicode_ && !f.ucs2_) {
            f.usable_ = false;
            if (f.problem_.empty()) f.problem_ = "composite font without a ToUnicode map";
        }
        return f;
    }

    // Simple font: base encoding, then /Differences.
    const std::array<char16_t, 256>* base = &kStandardEncoding;
    const Array* differences = nullptr;
    if (const Object* enc = font.get("Encoding")) {
        const Object& e = doc.resolve(*enc);
        if (const auto* table = base_encoding(e.name())) {
            base = table;
        } else if (const auto* d = e.as<Dict>()) {
            if (const Object* be = d->get("BaseEncoding")) {
                if (const auto* table = base_encoding(doc.resolve(*be).name())) base = table;
            }
            if (const Object* diff = d->get("Differences")) differences = doc.resolve(*diff).as<Array>();
        }
    }
    for (std::size_t i = 0; i < 256; ++i) f.simple_[i] = (*base)[i];
    if (differences) {
        std::int64_t code = -1;
        for (const auto& item : *differences) {
            if (const auto n = item.integer()) {
                code = *n;
            } else if (const auto* name = item.as<Name>()) {
                if (code >= 0 && code < 256) {
                    f.simple_[static_cast<std::size_t>(code)] = glyph_to_unicode(name->value).value_or(0);
                }
                ++code;
            }
        }
    }
    return f;
}

std::size_t Font::decode(std::string_view codes, std::string& out) const {
    std::size_t unmapped = 0;
    if (!composite_) {
        for (const char c : codes) {
            const auto code = static_cast<unsigned char>(c);
            if (to_unicode_) {
                if (const auto* u = to_unicode_->lookup(code, 1)) {
                    for (const char32_t cp : *u) {
                        if (cp != 0) utf8::append(out, cp);
                    }
                    continue;
                }
            }
            if (simple_[code] != 0) {
                utf8::append(out, simple_[code]);
            } else {
                ++unmapped;
            }
        }
        return unmapped;
    }

    if (!usable_) return 0;
    std::size_t pos = 0;
    while (pos < codes.size()) {
        std::size_t len = 2;
        if (encoding_cmap_ && encoding_cmap_->has_codespace()) {
            len = encoding_cmap_->code_length(codes, pos, 2);
        } else if (to_unicode_ && to_unicode_->has_codespace()) {
            len = to_unicode_->code_length(codes, pos, 2);
        }
        len = std::max<std::size_t>(1, std::min(len, codes.size() - pos));
        const std::uint32_t code = code_value(codes.substr(pos, len));
        pos += len;
        if (to_unicode_) {
            if (const auto* u = to_unicode_->lookup(code, len)) {
                for (const char32_t cp : *u) {
                    if (cp != 0) utf8::append(out, cp);
                }
                continue;
            }
            ++unmapped;
        } else if (ucs2_) {
            if (code != 0) utf8::append(out, code);
        }
    }
    return unmapped;
}

}  // namespace aitrace::pdf
