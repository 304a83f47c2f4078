#pragma once

// The 15-essay fixture corpus. Every essay is generated from planted
// character counts, so tests know exactly what extraction must recover.

#include "support/docx_writer.hpp"
#include "support/pdf_writer.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fixture {

struct Planted {
    std::size_t ascii_double = 0;
    std::size_t ascii_single = 0;
    std::size_t curly_double = 0;
    std::size_t curly_single = 0;
    std::size_t em_dash = 0;
    std::size_t en_dash = 0;
    std::size_t ellipsis = 0;
};

enum class EssayFormat { Docx, Pdf };

struct EssaySpec {
    std::string name;
    EssayFormat format = EssayFormat::Pdf;
    Planted planted;
    std::vector<std::string> mentions;  // sentences naming a tool
    bool mention_in_footnote = false;
    PdfOptions pdf;
    DocxOptions docx;
    std::uint32_t seed = 1;
};

/// Mirrors the shape of the sample report: traces between 0 and 30, some
/// essays acknowledging ChatGPT and Claude, one all-ASCII essay, one essay
/// with no quotes at all.
const std::vector<EssaySpec>& essay_corpus();

/// Plain paragraphs carrying exactly the planted characters and mentions
/// (footnote sentences excluded).
std::vector<std::string> essay_paragraphs(const EssaySpec& spec);

/// File bytes in the essay's format.
std::string render_essay(const EssaySpec& spec);

/// Writes every essay into `dir`.
void write_corpus(const std::filesystem::path& dir);

/// Random small essay for bulk tests; `planted` receives what went in.
std::vector<std::string> random_paragraphs(std::uint32_t seed, Planted& planted, bool& mentions_chatgpt);

void write_bytes(const std::filesystem::path& file, const std::string& data);
std::string read_bytes(const std::filesystem::path& file);

}  // namespace fixture
