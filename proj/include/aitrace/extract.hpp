#pragma once

#include "aitrace/ingest.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aitrace {

enum class SourceFormat { Pdf, Docx, Doc };

std::string_view to_string(SourceFormat format);

/// Text recovered from a document. `text` is UTF-8 and holds exactly the
/// decoded codepoints; paragraph units are joined with '\n'.
struct ExtractedText {
    std::string text;
    std::size_t paragraph_count = 0;
    std::vector<std::string> warnings;
    SourceFormat source_format = SourceFormat::Docx;
    bool all_text_recovered = true;

    friend bool operator==(const ExtractedText&, const ExtractedText&) = default;
};

enum class ExtractErrorKind { CorruptContainer, UnsupportedFeature, EncryptedDocument };

std::string_view to_string(ExtractErrorKind kind);

class ExtractError : public std::runtime_error {
public:
    ExtractError(ExtractErrorKind kind, const std::string& detail)
        : std::runtime_error(detail), kind_(kind) {}

    ExtractErrorKind kind() const { return kind_; }

private:
    ExtractErrorKind kind_;
};

using Bytes = std::span<const std::byte>;

/// Body paragraphs of word/document.xml (tables, hyperlinks and text boxes
/// included) followed by footnotes and endnotes. Headers and footers are
/// not read.
ExtractedText extract_docx(Bytes bytes);

/// Text-showing operators of every page, decoded through each font's
/// ToUnicode map or simple encoding.
ExtractedText extract_pdf(Bytes bytes);

/// Best-effort recovery of legacy Word text from the WordDocument stream.
ExtractedText extract_doc(Bytes bytes);

/// Dispatches on the record's extension. Throws ExtractError.
ExtractedText extract(const DocumentRecord& record, Bytes bytes);

/// Bytes viewed as a span; convenient for std::string buffers.
inline Bytes as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

}  // namespace aitrace
