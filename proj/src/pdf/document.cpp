#include "pdf/document.hpp"

#include <algorithm>
#include <cstring>
#include <string_view>

namespace aitrace::pdf {

namespace {

constexpr int kMaxPageTreeDepth = 64;
constexpr std::size_t kMaxXrefSections = 256;

std::string_view view(std::span<const std::byte> bytes) {
    return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::uint64_t read_be(std::string_view data, std::size_t pos, std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v = (v << 8) | static_cast<unsigned char>(data[pos + i]);
    return v;
}

}  // namespace

std::vector<std::string> filter_names(Document& doc, const Dict& stream_dict) {
    std::vector<std::string> out;
    const Object* f = stream_dict.get("Filter");
    if (!f) return out;
    const Object& resolved = doc.resolve(*f);
    if (const auto* n = resolved.as<Name>()) {
        out.push_back(n->value);
    } else if (const auto* arr = resolved.as<Array>()) {
        for (const auto& item : *arr) {
            const Object& r = doc.resolve(item);
            if (const auto* n = r.as<Name>()) out.push_back(n->value);
        }
    }
    return out;
}

Document::Document(std::span<const std::byte> bytes) : bytes_(bytes) {
    const std::string_view text = view(bytes);
    if (text.substr(0, 1024).find("%PDF-") == std::string_view::npos) throw PdfError("missing %PDF header");
    load_xref();
    if (const Object* enc = trailer_.get("Encrypt"); enc && !resolve(*enc).is_null()) {
        throw EncryptedPdf("document is encrypted");
    }
}

std::optional<std::size_t> Document::find_startxref() const {
    const std::string_view text = view(bytes_);
    const std::size_t window = std::min<std::size_t>(text.size(), 4096);
    const auto pos = text.substr(text.size() - window).rfind("startxref");
    if (pos == std::string_view::npos) return std::nullopt;
    Parser p(bytes_, text.size() - window + pos + 9);
    const Object off = p.parse_object(false);
    const auto v = off.integer();
    if (!v || *v < 0 || static_cast<std::uint64_t>(*v) >= text.size()) return std::nullopt;
    return static_cast<std::size_t>(*v);
}

void Document::load_xref() {
    bool ok = false;
    try {
        if (const auto start = find_startxref()) ok = read_xref_chain(*start);
    } catch (const PdfError&) {
        ok = false;
    }
    if (ok) {
        const Object* root = trailer_.get("Root");
        ok = root && resolve(*root).is<Dict>();
    }
    if (!ok) {
        warnings_.push_back("cross-reference data damaged; rebuilt by scanning the file");
        xref_.clear();
        cache_.clear();
        object_streams_.clear();
        trailer_ = Dict{};
        rebuild_xref();
        const Object* root = trailer_.get("Root");
        if (!root || !resolve(*root).is<Dict>()) throw PdfError("no document catalog found");
    }
}

bool Document::read_xref_chain(std::size_t offset) {
    std::set<std::size_t> seen;
    std::optional<std::size_t> next = offset;
    bool first = true;
    while (next) {
        if (!seen.insert(*next).second || seen.size() > kMaxXrefSections) break;
        Parser p(bytes_, *next);
        p.skip_space();
        Dict section_trailer;
        if (p.peek_keyword() == "xref") {
            read_xref_table(p.pos(), section_trailer);
            if (const Object* xs = section_trailer.get("XRefStm")) {
                if (const auto off = xs->integer(); off && *off > 0 && static_cast<std::size_t>(*off) < bytes_.size()) {
                    const Object obj = parse_indirect_at(static_cast<std::size_t>(*off), std::nullopt);
                    if (const auto* s = obj.as<Stream>()) read_xref_stream(*s);
                }
            }
        } else {
            const Object obj = parse_indirect_at(*next, std::nullopt);
            const auto* s = obj.as<Stream>();
            if (!s || s->dict.get("Type") == nullptr || s->dict.get("Type")->name() != "XRef") {
                if (first) return false;
                warnings_.push_back("unreadable older cross-reference section ignored");
                break;
            }
            read_xref_stream(*s);
            section_trailer = s->dict;
        }
        for (auto& [k, v] : section_trailer.entries) {
            if (!trailer_.get(k)) trailer_.set(k, v);
        }
        next.reset();
        if (const Object* prev = section_trailer.get("Prev")) {
            if (const auto off = prev->integer(); off && *off >= 0 && static_cast<std::size_t>(*off) < bytes_.size()) {
                next = static_cast<std::size_t>(*off);
            }
        }
        first = false;
    }
    return true;
}

std::size_t Document::read_xref_table(std::size_t offset, Dict& trailer) {
    Parser p(bytes_, offset);
    p.skip_space();
    p.parse_object(false);  // "xref"
    while (true) {
        if (p.at_end()) throw PdfError("cross-reference table without trailer");
        if (p.peek_keyword() == "trailer") {
            p.parse_object(false);
            Object t = p.parse_object(true);
            if (auto* d = std::get_if<Dict>(&t.value)) trailer = std::move(*d);
            else throw PdfError("malformed trailer");
            return p.pos();
        }
        const auto start = p.parse_object(false).integer();
        const auto count = p.parse_object(false).integer();
        if (!start || !count || *start < 0 || *count < 0 || *count > 10'000'000) {
            throw PdfError("malformed cross-reference subsection");
        }
        for (std::int64_t i = 0; i < *count; ++i) {
            const auto off = p.parse_object(false).integer();
            const auto gen = p.parse_object(false).integer();
            const Object flag = p.parse_object(false);
            const auto* kw = flag.as<Keyword>();
            if (!off || !gen || !kw || (kw->value != "n" && kw->value != "f")) {
                throw PdfError("malformed cross-reference entry");
            }
            const auto num = static_cast<std::uint32_t>(*start + i);
            if (xref_.count(num)) continue;
            XrefEntry e;
            if (kw->value == "n" && *off > 0) {
                e.kind = XrefEntry::Kind::InFile;
                e.offset = static_cast<std::uint64_t>(*off);
            }
            xref_[num] = e;
        }
    }
}

void Document::read_xref_stream(const Stream& stream) {
    const DecodeResult decoded = decode(stream);
    const std::string_view data = decoded.data;
    const Object* w_obj = stream.dict.get("W");
    const auto* w = w_obj ? w_obj->as<Array>() : nullptr;
    if (!w || w->size() < 3) throw PdfError("xref stream without /W");
    std::size_t widths[3];
    for (int i = 0; i < 3; ++i) {
        const auto v = (*w)[i].integer();
        if (!v || *v < 0 || *v > 8) throw PdfError("bad xref stream field width");
        widths[i] = static_cast<std::size_t>(*v);
    }
    const std::size_t row = widths[0] + widths[1] + widths[2];
    if (row == 0) throw PdfError("empty xref stream row");

    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    if (const Object* idx = stream.dict.get("Index"); idx && idx->is<Array>()) {
        const auto& arr = *idx->as<Array>();
        for (std::size_t i = 0; i + 1 < arr.size(); i += 2) {
            ranges.emplace_back(arr[i].integer().value_or(0), arr[i + 1].integer().value_or(0));
        }
    } else {
        const Object* size = stream.dict.get("Size");
        ranges.emplace_back(0, size ? size->integer().value_or(0) : 0);
    }

    std::size_t pos = 0;
    for (const auto& [start, count] : ranges) {
        for (std::int64_t i = 0; i < count && pos + row <= data.size(); ++i, pos += row) {
            const std::uint64_t type = widths[0] ? read_be(data, pos, widths[0]) : 1;
            const std::uint64_t f2 = read_be(data, pos + widths[0], widths[1]);
            const std::uint64_t f3 = read_be(data, pos + widths[0] + widths[1], widths[2]);
            const auto num = static_cast<std::uint32_t>(start + i);
            if (xref_.count(num)) continue;
            XrefEntry e;
            if (type == 1) {
                e.kind = XrefEntry::Kind::InFile;
                e.offset = f2;
            } else if (type == 2) {
                e.kind = XrefEntry::Kind::InObjectStream;
                e.offset = f2;
                e.index = static_cast<std::uint32_t>(f3);
            }
            xref_[num] = e;
        }
    }
}

void Document::rebuild_xref() {
    const std::string_view text = view(bytes_);
    std::vector<std::pair<std::uint32_t, std::size_t>> found;
    std::size_t pos = 0;
    while ((pos = text.find("obj", pos)) != std::string_view::npos) {
        const std::size_t obj_pos = pos;
        pos += 3;
        if (pos < text.size() && !is_pdf_space(static_cast<unsigned char>(text[pos])) &&
            !is_pdf_delimiter(static_cast<unsigned char>(text[pos]))) {
            continue;
        }
        std::size_t i = obj_pos;
        auto skip_back_space = [&] {
            while (i > 0 && is_pdf_space(static_cast<unsigned char>(text[i - 1]))) --i;
        };
        auto skip_back_digits = [&] {
            const std::size_t end = i;
            while (i > 0 && is_digit(text[i - 1])) --i;
            return end - i;
        };
        skip_back_space();
        if (i == obj_pos || skip_back_digits() == 0) continue;
        const std::size_t before_gen = i;
        skip_back_space();
        if (i == before_gen) continue;
        const std::size_t num_end = i;
        if (skip_back_digits() == 0) continue;
        if (i > 0 && !is_pdf_space(static_cast<unsigned char>(text[i - 1])) &&
            !is_pdf_delimiter(static_cast<unsigned char>(text[i - 1]))) {
            continue;
        }
        std::uint64_t num = 0;
        for (std::size_t k = i; k < num_end; ++k) num = num * 10 + static_cast<std::uint64_t>(text[k] - '0');
        if (num > 0xFFFFFFFFull) continue;
        found.emplace_back(static_cast<std::uint32_t>(num), i);
    }
    for (const auto& [num, off] : found) {
        XrefEntry e;
        e.kind = XrefEntry::Kind::InFile;
        e.offset = off;
        xref_[num] = e;  // later definitions win
    }

    // Trailer dictionaries, then xref-stream dictionaries that carry /Root.
    pos = 0;
    while ((pos = text.find("trailer", pos)) != std::string_view::npos) {
        pos += 7;
        try {
            Parser p(bytes_, pos);
            Object t = p.parse_object(true);
            if (const auto* d = t.as<Dict>()) {
                for (const auto& [k, v] : d->entries) trailer_.set(k, v);
            }
        } catch (const PdfError&) {
        }
    }
    std::vector<std::uint32_t> numbers;
    for (const auto& [num, e] : xref_) numbers.push_back(num);
    for (const std::uint32_t num : numbers) {
        const Object& obj = get(num);
        const auto* s = obj.as<Stream>();
        if (!s) continue;
        const auto type = s->dict.get("Type") ? s->dict.get("Type")->name() : std::string_view{};
        if (type == "XRef" && !trailer_.get("Root")) {
            for (const auto& [k, v] : s->dict.entries) {
                if (k == "Root" || k == "Info" || k == "Encrypt" || k == "ID") trailer_.set(k, v);
            }
        } else if (type == "ObjStm") {
            try {
                const DecodeResult decoded = decode(*s);
                const auto n = s->dict.get("N") ? s->dict.get("N")->integer().value_or(0) : 0;
                Parser p(std::span<const std::byte>(reinterpret_cast<const std::byte*>(decoded.data.data()),
                                                      decoded.data.size()));
                for (std::int64_t k = 0; k < n && k < 100000; ++k) {
                    const auto inner = p.parse_object(false).integer();
                    p.parse_object(false);
                    if (!inner || *inner < 0) break;
                    const auto inner_num = static_cast<std::uint32_t>(*inner);
                    if (xref_.count(inner_num)) continue;
                    XrefEntry e;
                    e.kind = XrefEntry::Kind::InObjectStream;
                    e.offset = num;
                    e.index = static_cast<std::uint32_t>(k);
                    xref_[inner_num] = e;
                }
            } catch (const PdfError&) {
            }
        }
    }
    if (!trailer_.get("Root")) {
        // Last resort: any catalog dictionary.
        for (const auto& [num, e] : xref_) {
            const Object& obj = get(num);
            const auto* d = obj.as<Dict>();
            if (d && d->get("Type") && d->get("Type")->name() == "Catalog") {
                trailer_.set("Root", Ref{num, 0});
                break;
            }
        }
    }
}

std::span<const std::byte> Document::stream_data(const Dict& dict, Parser& p, std::size_t start) {
    const std::string_view text = view(bytes_);
    std::optional<std::size_t> length;
    if (const Object* len = dict.get("Length")) {
        const Object& resolved = resolve(*len);
        if (const auto v = resolved.integer(); v && *v >= 0) length = static_cast<std::size_t>(*v);
    }
    if (length && start + *length <= text.size()) {
        Parser check(bytes_, start + *length);
        check.skip_space();
        if (text.substr(check.pos(), 9) == "endstream") {
            p.seek(check.pos() + 9);
            return bytes_.subspan(start, *length);
        }
    }
    const auto end = text.find("endstream", start);
    if (end == std::string_view::npos) throw PdfError("unterminated stream");
    std::size_t data_end = end;
    if (data_end > start && text[data_end - 1] == '\n') --data_end;
    if (data_end > start && text[data_end - 1] == '\r') --data_end;
    p.seek(end + 9);
    return bytes_.subspan(start, data_end - start);
}

Object Document::parse_indirect_at(std::size_t offset, std::optional<std::uint32_t> expected) {
    if (offset >= bytes_.size()) throw PdfError("object offset out of range");
    Parser p(bytes_, offset);
    const auto num = p.parse_object(false).integer();
    const auto gen = p.parse_object(false).integer();
    const Object kw = p.parse_object(false);
    if (!num || !gen || !kw.is<Keyword>() || kw.as<Keyword>()->value != "obj") {
        throw PdfError("no object at offset " + std::to_string(offset));
    }
    if (expected && static_cast<std::uint64_t>(*num) != *expected) {
        throw PdfError("object number mismatch at offset " + std::to_string(offset));
    }
    Object obj = p.parse_object(true);
    if (obj.is<Dict>() && p.peek_keyword() == "stream") {
        p.parse_object(false);
        std::size_t start = p.pos();
        const std::string_view text = view(bytes_);
        if (start < text.size() && text[start] == '\r') ++start;
        if (start < text.size() && text[start] == '\n') ++start;
        Stream s;
        s.dict = std::move(*std::get_if<Dict>(&obj.value));
        s.raw = stream_data(s.dict, p, start);
        return s;
    }
    return obj;
}

Object Document::load_from_object_stream(std::uint32_t container, std::uint32_t index, std::uint32_t num) {
    std::shared_ptr<std::string> data;
    std::int64_t first = 0;
    std::int64_t count = 0;
    const Object& holder = get(container);
    const auto* s = holder.as<Stream>();
    if (!s) throw PdfError("object stream " + std::to_string(container) + " missing");
    first = s->dict.get("First") ? s->dict.get("First")->integer().value_or(0) : 0;
    count = s->dict.get("N") ? s->dict.get("N")->integer().value_or(0) : 0;
    if (auto it = object_streams_.find(container); it != object_streams_.end()) {
        data = it->second;
    } else {
        DecodeResult decoded = decode(*s);
        data = std::make_shared<std::string>(std::move(decoded.data));
        object_streams_[container] = data;
    }
    const std::span<const std::byte> bytes(reinterpret_cast<const std::byte*>(data->data()), data->size());
    Parser header(bytes);
    std::optional<std::size_t> offset;
    for (std::int64_t k = 0; k < count; ++k) {
        const auto n = header.parse_object(false).integer();
        const auto off = header.parse_object(false).integer();
        if (!n || !off) break;
        if (static_cast<std::uint64_t>(*n) == num && (k == index || !offset)) {
            offset = static_cast<std::size_t>(*off);
            if (k == index) break;
        }
    }
    if (!offset || first < 0) throw PdfError("object " + std::to_string(num) + " not in its object stream");
    const std::size_t at = static_cast<std::size_t>(first) + *offset;
    if (at >= data->size()) throw PdfError("object stream offset out of range");
    Parser body(bytes, at);
    return body.parse_object(true);
}

const Object& Document::get(std::uint32_t num) {
    if (auto it = cache_.find(num); it != cache_.end()) return *it->second;
    if (loading_.count(num)) return null_;
    const auto xit = xref_.find(num);
    if (xit == xref_.end() || xit->second.kind == XrefEntry::Kind::Free) return null_;
    const XrefEntry entry = xit->second;

    loading_.insert(num);
    Object obj;
    try {
        if (entry.kind == XrefEntry::Kind::InFile) {
            obj = parse_indirect_at(static_cast<std::size_t>(entry.offset), num);
        } else {
            obj = load_from_object_stream(static_cast<std::uint32_t>(entry.offset), entry.index, num);
        }
    } catch (const UnsupportedFilter&) {
        loading_.erase(num);
        throw;
    } catch (const PdfError& e) {
        warnings_.push_back("object " + std::to_string(num) + " unreadable: " + e.what());
        obj = Null{};
    }
    loading_.erase(num);
    auto [it, inserted] = cache_.emplace(num, std::make_unique<Object>(std::move(obj)));
    return *it->second;
}

const Object& Document::resolve(const Object& obj) {
    const Object* cur = &obj;
    for (int i = 0; i < 16; ++i) {
        const auto* r = cur->as<Ref>();
        if (!r) return *cur;
        cur = &get(r->num);
    }
    return null_;
}

const Dict* Document::resolve_dict(const Object* obj) {
    if (!obj) return nullptr;
    const Object& r = resolve(*obj);
    if (const auto* d = r.as<Dict>()) return d;
    if (const auto* s = r.as<Stream>()) return &s->dict;
    return nullptr;
}

DecodeResult Document::decode(const Stream& stream) {
    if (stream.dict.get("F")) throw UnsupportedFilter("externally stored stream data");
    const std::vector<std::string> filters = filter_names(*this, stream.dict);
    std::vector<const Dict*> params;
    if (const Object* dp = stream.dict.get("DecodeParms")) {
        const Object& r = resolve(*dp);
        if (const auto* arr = r.as<Array>()) {
            for (const auto& item : *arr) params.push_back(resolve_dict(&item));
        } else {
            params.push_back(resolve_dict(&r));
        }
    }
    return decode_stream(stream.raw, filters, params);
}

void Document::collect_pages(const Object& node, const Dict* inherited, std::vector<Page>& out,
                             std::set<std::uint32_t>& visited, int depth) {
    if (depth > kMaxPageTreeDepth) return;
    if (const auto* r = node.as<Ref>()) {
        if (!visited.insert(r->num).second) return;
    }
    const Dict* dict = resolve_dict(&node);
    if (!dict) return;
    const Dict* resources = inherited;
    if (const Dict* own = resolve_dict(dict->get("Resources"))) resources = own;

    const Object* kids = dict->get("Kids");
    const auto type = dict->get("Type") ? dict->get("Type")->name() : std::string_view{};
    if (kids && type != "Page") {
        const Object& arr = resolve(*kids);
        if (const auto* a = arr.as<Array>()) {
            for (const auto& kid : *a) collect_pages(kid, resources, out, visited, depth + 1);
        }
        return;
    }
    out.push_back(Page{dict, resources});
}

std::vector<Page> Document::pages() {
    std::vector<Page> out;
    std::set<std::uint32_t> visited;
    const Dict* catalog = resolve_dict(trailer_.get("Root"));
    if (catalog) {
        if (const Object* root_pages = catalog->get("Pages")) collect_pages(*root_pages, nullptr, out, visited, 0);
    }
    if (out.empty()) {
        std::vector<std::uint32_t> numbers;
        for (const auto& [num, e] : xref_) numbers.push_back(num);
        for (const std::uint32_t num : numbers) {
            const Dict* d = resolve_dict(&get(num));
            if (d && d->get("Type") && d->get("Type")->name() == "Page") {
                out.push_back(Page{d, resolve_dict(d->get("Resources"))});
            }
        }
        if (!out.empty()) warnings_.push_back("page tree damaged; pages located by scanning");
    }
    return out;
}

}  // namespace aitrace::pdf
