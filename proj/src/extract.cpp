#include "aitrace/extract.hpp"

namespace aitrace {

std::string_view to_string(SourceFormat format) {
    switch (format) {
        case SourceFormat::Pdf:
            return "pdf";
        case SourceFormat::Docx:
            return "docx";
        case SourceFormat::Doc:
            return "doc";
    }
    return "unknown";
}

std::string_view to_string(ExtractErrorKind kind) {
    switch (kind) {
        case ExtractErrorKind::CorruptContainer:
            return "CorruptContainer";
        case ExtractErrorKind::UnsupportedFeature:
            return "UnsupportedFeature";
        case ExtractErrorKind::EncryptedDocument:
            return "EncryptedDocument";
    }
    return "Unknown";
}

ExtractedText extract(const DocumentRecord& record, Bytes bytes) {
    if (record.extension == "pdf") return extract_pdf(bytes);
    if (record.extension == "docx") return extract_docx(bytes);
    if (record.extension == "doc") return extract_doc(bytes);
    throw ExtractError(ExtractErrorKind::UnsupportedFeature, "no extractor for ." + record.extension);
}

}  // namespace aitrace
