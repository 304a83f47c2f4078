#include "aitrace/extract.hpp"

#include "aitrace/ole.hpp"
#include "aitrace/utf8.hpp"
#include "aitrace/zip.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace aitrace {

namespace {

constexpr std::string_view kBestEffort = "legacy .doc best-effort extraction";
constexpr std::size_t kMinRun = 8;

// CP-1252 upper half where it differs from Latin-1. 0 marks unassigned bytes.
constexpr std::array<char16_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0,      0x017D, 0,      0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178,
};

char32_t cp1252(unsigned char b) {
    if (b >= 0x80 && b < 0xA0) return kCp1252High[b - 0x80];
    return b;
}

std::uint16_t u16(std::string_view s, std::size_t off) {
    if (off + 2 > s.size()) return 0;
    return static_cast<std::uint16_t>(static_cast<unsigned char>(s[off]) |
                                      (static_cast<unsigned char>(s[off + 1]) << 8));
}

std::uint32_t u32(std::string_view s, std::size_t off) {
    if (off + 4 > s.size()) return 0;
    return static_cast<std::uint32_t>(u16(s, off)) | (static_cast<std::uint32_t>(u16(s, off + 2)) << 16);
}

// Turns Word's in-text control characters into plain text. Field
// instructions (between 0x13 and 0x14) are dropped; field results are kept.
class StoryWriter {
public:
    void put(char32_t c) {
        switch (c) {
            case 0x13:
                fields_.push_back(true);
                return;
            case 0x14:
                if (!fields_.empty()) fields_.back() = false;
                return;
            case 0x15:
                if (!fields_.empty()) fields_.pop_back();
                return;
            default:
                break;
        }
        for (const bool in_instruction : fields_) {
            if (in_instruction) return;
        }
        if (c == 0x0D || c == 0x07) {
            paragraphs_.push_back(std::move(current_));
            current_.clear();
            return;
        }
        if (c == 0x0B || c == 0x0C) {
            current_.push_back('\n');
            return;
        }
        if (c == '\t') {
            current_.push_back('\t');
            return;
        }
        if (c < 0x20 || c == 0x7F) return;  // object anchors, soft hyphens, footnote marks
        utf8::append(current_, c);
    }

    // Stories never share a paragraph, and a field left open does not leak
    // into the next story.
    void end_story() {
        fields_.clear();
        if (!current_.empty()) {
            paragraphs_.push_back(std::move(current_));
            current_.clear();
        }
    }

    std::vector<std::string> take() {
        if (!current_.empty()) paragraphs_.push_back(std::move(current_));
        return std::move(paragraphs_);
    }

private:
    std::vector<bool> fields_;
    std::vector<std::string> paragraphs_;
    std::string current_;
};

struct Piece {
    std::uint32_t cp_start;
    std::uint32_t cp_end;
    std::uint32_t fc;
    bool compressed;
};

// Reads the piece table from the Clx structure in the table stream.
std::optional<std::vector<Piece>> read_pieces(std::string_view table, std::uint32_t fc_clx, std::uint32_t lcb_clx) {
    if (lcb_clx == 0 || std::uint64_t{fc_clx} + lcb_clx > table.size()) return std::nullopt;
    const std::string_view clx = table.substr(fc_clx, lcb_clx);
    std::size_t pos = 0;
    while (pos < clx.size() && clx[pos] == 0x01) {  // Prc: property modifiers
        pos += 3 + u16(clx, pos + 1);
    }
    if (pos + 5 > clx.size() || clx[pos] != 0x02) return std::nullopt;
    const std::uint32_t lcb = u32(clx, pos + 1);
    pos += 5;
    if (lcb < 4 || pos + lcb > clx.size() || (lcb - 4) % 12 != 0) return std::nullopt;
    const std::string_view plc = clx.substr(pos, lcb);
    const std::size_t n = (lcb - 4) / 12;
    std::vector<Piece> pieces;
    pieces.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t start = u32(plc, 4 * i);
        const std::uint32_t end = u32(plc, 4 * (i + 1));
        const std::uint32_t fc_raw = u32(plc, 4 * (n + 1) + 8 * i + 2);
        if (end < start) return std::nullopt;
        const bool compressed = (fc_raw & 0x40000000u) != 0;
        const std::uint32_t fc = compressed ? (fc_raw & ~0x40000000u) / 2 : fc_raw;
        pieces.push_back({start, end, fc, compressed});
    }
    return pieces;
}

void emit_range(std::string_view word, const std::vector<Piece>& pieces, std::uint32_t from, std::uint32_t to,
                StoryWriter& out, bool& truncated) {
    for (const auto& p : pieces) {
        const std::uint32_t lo = std::max(from, p.cp_start);
        const std::uint32_t hi = std::min(to, p.cp_end);
        for (std::uint32_t cp = lo; cp < hi; ++cp) {
            const std::uint64_t offset = std::uint64_t{p.fc} + std::uint64_t{cp - p.cp_start} * (p.compressed ? 1 : 2);
            if (offset + (p.compressed ? 1 : 2) > word.size()) {
                truncated = true;
                break;
            }
            if (p.compressed) {
                const char32_t c = cp1252(static_cast<unsigned char>(word[offset]));
                if (c != 0) out.put(c);
            } else {
                char32_t c = u16(word, offset);
                if (c >= 0xD800 && c <= 0xDBFF && cp + 1 < hi) {
                    const char32_t low = u16(word, offset + 2);
                    if (low >= 0xDC00 && low <= 0xDFFF) {
                        c = 0x10000 + ((c - 0xD800) << 10) + (low - 0xDC00);
                        ++cp;
                    }
                }
                out.put(c);
            }
        }
    }
}

// Main text, footnotes, endnotes and text boxes through the piece table.
// Headers and comments are left out, as for .docx.
std::optional<std::vector<std::string>> piece_table_text(std::string_view word, const ole::CompoundFile& cf,
                                                         std::vector<std::string>& warnings) {
    if (word.size() < 0x40 || u16(word, 0) != 0xA5EC) return std::nullopt;
    const std::uint16_t flags = u16(word, 0x0A);
    const std::uint16_t csw = u16(word, 0x20);
    const std::size_t lw_count_at = 0x22 + 2 * std::size_t{csw};
    const std::uint16_t cslw = u16(word, lw_count_at);
    const std::size_t lw_at = lw_count_at + 2;
    if (cslw < 11) return std::nullopt;
    const std::size_t fclcb_count_at = lw_at + 4 * std::size_t{cslw};
    const std::uint16_t cb_fclcb = u16(word, fclcb_count_at);
    const std::size_t fclcb_at = fclcb_count_at + 2;
    if (cb_fclcb < 34 || fclcb_at + 34 * 8 > word.size()) return std::nullopt;

    const std::uint32_t fc_clx = u32(word, fclcb_at + 33 * 8);
    const std::uint32_t lcb_clx = u32(word, fclcb_at + 33 * 8 + 4);
    std::optional<std::string> table = cf.read_stream((flags & 0x0200) ? "1Table" : "0Table");
    if (!table) return std::nullopt;
    std::optional<std::vector<Piece>> pieces = read_pieces(*table, fc_clx, lcb_clx);
    if (!pieces) return std::nullopt;

    // ccpText, ccpFtn, ccpHdd, ccpMcr, ccpAtn, ccpEdn, ccpTxbx
    std::array<std::uint32_t, 7> ccp{};
    for (std::size_t i = 0; i < ccp.size(); ++i) ccp[i] = u32(word, lw_at + 4 * (3 + i));
    std::array<std::uint32_t, 8> story_start{};
    for (std::size_t i = 0; i < ccp.size(); ++i) story_start[i + 1] = story_start[i] + ccp[i];

    StoryWriter out;
    bool truncated = false;
    for (const std::size_t story : {0u, 1u, 5u, 6u}) {
        if (ccp[story] == 0) continue;
        emit_range(word, *pieces, story_start[story], story_start[story + 1], out, truncated);
        out.end_story();
    }
    if (truncated) warnings.push_back("piece table points past the end of the WordDocument stream");
    return out.take();
}

bool printable(char32_t c) {
    return c == '\t' || c == '\r' || (c >= 0x20 && c != 0x7F && !(c >= 0x80 && c < 0xA0));
}

// UTF-16 runs are limited to Latin script and general punctuation so that
// pairs of CP-1252 bytes are not read back as CJK ideographs.
bool plausible_utf16(char32_t c) {
    return printable(c) && (c < 0x0250 || (c >= 0x2000 && c <= 0x206F) || (c >= 0x20A0 && c <= 0x20CF) ||
                            c == 0x2122);
}

// Fallback when the FIB or piece table is unusable: maximal printable runs.
std::vector<std::string> scan_runs(std::string_view word) {
    std::vector<std::string> runs;
    auto flush = [&runs](std::u32string& run) {
        if (run.size() >= kMinRun) {
            std::string text;
            for (const char32_t c : run) {
                if (c == '\r') {
                    text.push_back('\n');
                } else {
                    utf8::append(text, c);
                }
            }
            runs.push_back(std::move(text));
        }
        run.clear();
    };

    std::u32string run;
    for (std::size_t align = 0; align < 2; ++align) {
        for (std::size_t i = align; i + 1 < word.size(); i += 2) {
            const char32_t c = u16(word, i);
            if (plausible_utf16(c)) {
                run.push_back(c);
            } else {
                flush(run);
            }
        }
        flush(run);
    }
    for (const char b : word) {
        const char32_t c = cp1252(static_cast<unsigned char>(b));
        if (c != 0 && printable(c)) {
            run.push_back(c);
        } else {
            flush(run);
        }
    }
    flush(run);
    return runs;
}

}  // namespace

ExtractedText extract_doc(Bytes bytes) {
    if (zip::looks_like_zip(bytes)) {
        // Renamed .docx files are common in student submissions.
        ExtractedText result = extract_docx(bytes);
        result.warnings.insert(result.warnings.begin(), "file has a .doc extension but is an OOXML package");
        return result;
    }
    if (!ole::has_ole_magic(bytes)) {
        throw ExtractError(ExtractErrorKind::CorruptContainer, "not an OLE compound file");
    }

    ExtractedText result;
    result.source_format = SourceFormat::Doc;
    result.all_text_recovered = false;
    result.warnings.emplace_back(kBestEffort);

    std::optional<ole::CompoundFile> cf;
    try {
        cf.emplace(bytes);
    } catch (const ole::OleError& e) {
        throw ExtractError(ExtractErrorKind::CorruptContainer, e.what());
    }

    const std::optional<std::string> word = cf->read_stream("WordDocument");
    if (!word) {
        result.warnings.emplace_back("no WordDocument stream found");
        return result;
    }
    if (word->size() >= 0x0C && u16(*word, 0) == 0xA5EC && (u16(*word, 0x0A) & 0x0100) != 0) {
        result.warnings.emplace_back("document is password-protected; its text is not readable");
        return result;
    }

    std::vector<std::string> paragraphs;
    try {
        if (auto from_pieces = piece_table_text(*word, *cf, result.warnings)) {
            paragraphs = std::move(*from_pieces);
        } else {
            result.warnings.emplace_back("piece table unusable; text recovered by scanning for printable runs");
            paragraphs = scan_runs(*word);
        }
    } catch (const ole::OleError& e) {
        result.warnings.emplace_back(std::string("table stream unreadable (") + e.what() +
                                     "); text recovered by scanning for printable runs");
        paragraphs = scan_runs(*word);
    }

    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        if (i > 0) result.text.push_back('\n');
        result.text += paragraphs[i];
    }
    result.paragraph_count = paragraphs.size();
    return result;
}

}  // namespace aitrace
