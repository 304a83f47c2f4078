#include "aitrace/extract.hpp"

#include "aitrace/ole.hpp"
#include "aitrace/utf8.hpp"
#include "aitrace/xml.hpp"
#include "aitrace/zip.hpp"

#include <algorithm>
#include <optional>

namespace aitrace {

namespace {

constexpr std::string_view kWordNs = "http://schemas.openxmlformats.org/wordprocessingml/2006/main";
constexpr std::string_view kWordStrictNs = "http://purl.oclc.org/ooxml/wordprocessingml/main";
constexpr std::string_view kMarkupCompatNs = "http://schemas.openxmlformats.org/markup-compatibility/2006";
constexpr std::string_view kRelsNs = "http://schemas.openxmlformats.org/package/2006/relationships";

bool is_word(const xml::Event& e, std::string_view local) {
    return e.local == local && (e.ns == kWordNs || e.ns == kWordStrictNs);
}

// Parts are normally UTF-8; UTF-16 parts are legal and carry a BOM.
std::string to_utf8(std::string raw) {
    if (raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) return raw.substr(3);
    if (raw.size() >= 2) {
        const auto b0 = static_cast<unsigned char>(raw[0]);
        const auto b1 = static_cast<unsigned char>(raw[1]);
        const bool le = b0 == 0xFF && b1 == 0xFE;
        const bool be = b0 == 0xFE && b1 == 0xFF;
        if (le || be) {
            std::string out;
            auto unit = [&](std::size_t i) -> char32_t {
                const auto lo = static_cast<unsigned char>(raw[le ? i : i + 1]);
                const auto hi = static_cast<unsigned char>(raw[le ? i + 1 : i]);
                return static_cast<char32_t>((hi << 8) | lo);
            };
            for (std::size_t i = 2; i + 1 < raw.size(); i += 2) {
                char32_t u = unit(i);
                if (u >= 0xD800 && u <= 0xDBFF && i + 3 < raw.size()) {
                    const char32_t low = unit(i + 2);
                    if (low >= 0xDC00 && low <= 0xDFFF) {
                        u = 0x10000 + ((u - 0xD800) << 10) + (low - 0xDC00);
                        i += 2;
                    }
                }
                utf8::append(out, u);
            }
            // The XML declaration still says UTF-16; the parser ignores it.
            return out;
        }
    }
    return raw;
}

// Collects w:p paragraphs from one WordprocessingML part.
class ParagraphReader {
public:
    explicit ParagraphReader(std::vector<std::string>& out) : out_(out) {}

    void read(std::string_view part, bool notes) {
        xml::PullParser parser(part);
        std::vector<std::string> open;  // "ns|local" path, for parent checks
        std::size_t skip_depth = 0;     // >0 while inside a skipped subtree
        std::vector<std::string> paragraphs;  // open paragraph buffers (text boxes nest)

        auto parent_is_run = [&] {
            return open.size() >= 2 && (open[open.size() - 2] == "w|r");
        };

        while (true) {
            const xml::Event& e = parser.next();
            if (e.type == xml::EventType::EndDocument) break;
            if (e.type == xml::EventType::StartElement) {
                const bool word = e.ns == kWordNs || e.ns == kWordStrictNs;
                open.push_back((word ? "w|" : e.ns + "|") + e.local);
                if (skip_depth > 0) {
                    ++skip_depth;
                    continue;
                }
                if (e.ns == kMarkupCompatNs && e.local == "Fallback") {
                    skip_depth = 1;
                    continue;
                }
                if (notes && (is_word(e, "footnote") || is_word(e, "endnote"))) {
                    const xml::Attribute* type = e.attribute(e.ns, "type");
                    if (type && type->value != "normal") {
                        skip_depth = 1;
                        continue;
                    }
                }
                if (!word) continue;
                if (e.local == "p") {
                    paragraphs.emplace_back();
                } else if (!paragraphs.empty() && parent_is_run()) {
                    if (e.local == "tab") {
                        paragraphs.back().push_back('\t');
                    } else if (e.local == "br" || e.local == "cr") {
                        paragraphs.back().push_back('\n');
                    }
                }
            } else if (e.type == xml::EventType::EndElement) {
                const std::string top = open.empty() ? std::string() : open.back();
                if (!open.empty()) open.pop_back();
                if (skip_depth > 0) {
                    --skip_depth;
                    continue;
                }
                if (top == "w|p" && !paragraphs.empty()) {
                    out_.push_back(std::move(paragraphs.back()));
                    paragraphs.pop_back();
                }
            } else if (e.type == xml::EventType::Text) {
                if (skip_depth == 0 && !paragraphs.empty() && !open.empty() &&
                    open.back() == "w|t") {
                    paragraphs.back() += e.text;
                }
            }
        }
    }

private:
    std::vector<std::string>& out_;
};

std::string join_path(std::string_view base_dir, std::string_view target) {
    if (!target.empty() && target.front() == '/') return std::string(target.substr(1));
    std::vector<std::string> parts;
    auto push_segments = [&](std::string_view s) {
        std::size_t start = 0;
        while (start <= s.size()) {
            const std::size_t slash = std::min(s.find('/', start), s.size());
            const std::string_view seg = s.substr(start, slash - start);
            if (seg == "..") {
                if (!parts.empty()) parts.pop_back();
            } else if (!seg.empty() && seg != ".") {
                parts.emplace_back(seg);
            }
            start = slash + 1;
        }
    };
    push_segments(base_dir);
    push_segments(target);
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out.push_back('/');
        out += p;
    }
    return out;
}

struct Relationship {
    std::string type_suffix;  // last path segment of the Type URI
    std::string target;
};

std::vector<Relationship> read_relationships(std::string_view part) {
    std::vector<Relationship> rels;
    xml::PullParser parser(part);
    while (true) {
        const xml::Event& e = parser.next();
        if (e.type == xml::EventType::EndDocument) break;
        if (e.type != xml::EventType::StartElement || e.local != "Relationship" || e.ns != kRelsNs) continue;
        const xml::Attribute* type = e.attribute("", "Type");
        const xml::Attribute* target = e.attribute("", "Target");
        const xml::Attribute* mode = e.attribute("", "TargetMode");
        if (!type || !target || (mode && mode->value == "External")) continue;
        const auto slash = type->value.rfind('/');
        rels.push_back({slash == std::string::npos ? type->value : type->value.substr(slash + 1), target->value});
    }
    return rels;
}

class Package {
public:
    explicit Package(Bytes bytes) : zip_(bytes) {}

    std::optional<std::string> part(std::string_view name) const {
        const zip::Entry* entry = zip_.find(name);
        if (!entry) return std::nullopt;
        if (entry->encrypted()) {
            throw ExtractError(ExtractErrorKind::EncryptedDocument, "archive entry " + entry->name + " is encrypted");
        }
        return to_utf8(zip_.read(*entry));
    }

private:
    zip::Reader zip_;
};

std::string main_part_name(const Package& pkg, std::vector<std::string>& warnings) {
    try {
        if (auto rels = pkg.part("_rels/.rels")) {
            for (const auto& r : read_relationships(*rels)) {
                if (r.type_suffix == "officeDocument") return join_path("", r.target);
            }
        }
    } catch (const xml::XmlError& e) {
        warnings.push_back(std::string("package relationships unreadable: ") + e.what());
    }
    return "word/document.xml";
}

}  // namespace

ExtractedText extract_docx(Bytes bytes) {
    ExtractedText result;
    result.source_format = SourceFormat::Docx;

    if (ole::has_ole_magic(bytes)) {
        // Password-protected OOXML is stored as an OLE container holding an
        // EncryptedPackage stream.
        try {
            ole::CompoundFile cf(bytes);
            if (cf.read_stream("EncryptedPackage")) {
                throw ExtractError(ExtractErrorKind::EncryptedDocument, "document is password-protected");
            }
        } catch (const ole::OleError&) {
        }
        throw ExtractError(ExtractErrorKind::CorruptContainer, "OLE compound file, not an OOXML package");
    }

    try {
        Package pkg(bytes);
        const std::string main_name = main_part_name(pkg, result.warnings);
        const std::optional<std::string> main = pkg.part(main_name);
        if (!main) throw ExtractError(ExtractErrorKind::CorruptContainer, "missing " + main_name);

        std::vector<std::string> paragraphs;
        ParagraphReader reader(paragraphs);
        reader.read(*main, false);

        // Footnotes and endnotes follow the body.
        const auto slash = main_name.rfind('/');
        const std::string dir = slash == std::string::npos ? "" : main_name.substr(0, slash);
        const std::string rels_name = (dir.empty() ? "" : dir + "/") + "_rels/" +
                                      main_name.substr(slash == std::string::npos ? 0 : slash + 1) + ".rels";
        std::vector<std::string> note_parts;
        if (auto rels = pkg.part(rels_name)) {
            try {
                for (const auto& r : read_relationships(*rels)) {
                    if (r.type_suffix == "footnotes" || r.type_suffix == "endnotes") {
                        note_parts.push_back(join_path(dir, r.target));
                    }
                }
            } catch (const xml::XmlError& e) {
                result.warnings.push_back(std::string("document relationships unreadable: ") + e.what());
            }
        }
        std::stable_sort(note_parts.begin(), note_parts.end(), [](const std::string& a, const std::string& b) {
            return (a.find("endnotes") != std::string::npos) < (b.find("endnotes") != std::string::npos);
        });
        for (const auto& name : note_parts) {
            const std::optional<std::string> notes = pkg.part(name);
            if (!notes) {
                result.warnings.push_back("referenced part " + name + " is missing");
                continue;
            }
            try {
                std::vector<std::string> note_paragraphs;
                ParagraphReader note_reader(note_paragraphs);
                note_reader.read(*notes, true);
                std::move(note_paragraphs.begin(), note_paragraphs.end(), std::back_inserter(paragraphs));
            } catch (const xml::XmlError& e) {
                result.warnings.push_back(name + " skipped: " + e.what());
                result.all_text_recovered = false;
            }
        }

        for (std::size_t i = 0; i < paragraphs.size(); ++i) {
            if (i > 0) result.text.push_back('\n');
            result.text += paragraphs[i];
        }
        result.paragraph_count = paragraphs.size();
    } catch (const zip::ZipError& e) {
        throw ExtractError(ExtractErrorKind::CorruptContainer, e.what());
    } catch (const xml::XmlError& e) {
        throw ExtractError(ExtractErrorKind::CorruptContainer, std::string("malformed XML: ") + e.what());
    }
    return result;
}

}  // namespace aitrace
