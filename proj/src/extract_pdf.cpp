#include "aitrace/extract.hpp"

#include "pdf/content.hpp"
#include "pdf/document.hpp"

namespace aitrace {

namespace {

void add_unique(std::vector<std::string>& out, const std::string& w) {
    for (const auto& existing : out) {
        if (existing == w) return;
    }
    out.push_back(w);
}

}  // namespace

ExtractedText extract_pdf(Bytes bytes) {
    ExtractedText result;
    result.source_format = SourceFormat::Pdf;

    std::optional<pdf::Document> doc;
    try {
        doc.emplace(bytes);
    } catch (const pdf::EncryptedPdf& e) {
        throw ExtractError(ExtractErrorKind::EncryptedDocument, e.what());
    } catch (const pdf::PdfError& e) {
        throw ExtractError(ExtractErrorKind::CorruptContainer, e.what());
    }

    pdf::LineCollector lines;
    pdf::ContentInterpreter interp(*doc, lines);
    std::vector<pdf::Page> pages;
    try {
        pages = doc->pages();
    } catch (const pdf::PdfError& e) {
        throw ExtractError(ExtractErrorKind::CorruptContainer, std::string("page tree unreadable: ") + e.what());
    }
    if (pages.empty()) {
        throw ExtractError(ExtractErrorKind::CorruptContainer, "document has no pages");
    }

    for (const auto& page : pages) {
        try {
            interp.run(interp.page_content(*page.dict), page.resources);
        } catch (const pdf::PdfError& e) {
            // A damaged page loses its own text only.
            add_unique(result.warnings, std::string("page skipped: ") + e.what());
            result.all_text_recovered = false;
        }
        lines.newline();
    }
    interp.finish();

    std::vector<std::string> collected = lines.take();
    for (std::size_t i = 0; i < collected.size(); ++i) {
        if (i > 0) result.text.push_back('\n');
        result.text += collected[i];
    }
    result.paragraph_count = collected.size();

    for (const auto& w : doc->warnings()) add_unique(result.warnings, w);
    for (const auto& w : interp.warnings()) add_unique(result.warnings, w);
    if (!interp.all_text_recovered()) result.all_text_recovered = false;

    if (result.text.empty()) {
        if (interp.painted_images()) {
            add_unique(result.warnings, "no text layer found; pages contain images only (scanned document?)");
        }
        if (!result.all_text_recovered) {
            std::string detail = "no page yielded text";
            if (!result.warnings.empty()) detail += ": " + result.warnings.front();
            throw ExtractError(ExtractErrorKind::UnsupportedFeature, detail);
        }
    }
    return result;
}

}  // namespace aitrace
