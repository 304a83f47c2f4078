#pragma once

#include "aitrace/extract.hpp"
#include "aitrace/ingest.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aitrace {

enum class AuxPunct { EmDash, EnDash, Ellipsis, Nbsp };

inline constexpr std::array<AuxPunct, 4> kAuxPuncts = {AuxPunct::EmDash, AuxPunct::EnDash, AuxPunct::Ellipsis,
                                                       AuxPunct::Nbsp};

char32_t codepoint_of(AuxPunct p);
std::string_view to_string(AuxPunct p);  // "em_dash", "en_dash", "ellipsis", "nbsp"

struct CharCensus {
    std::size_t ascii_double = 0;  // U+0022
    std::size_t ascii_single = 0;  // U+0027
    std::size_t curly_double = 0;  // U+201C, U+201D
    std::size_t curly_single = 0;  // U+2018, U+2019
    std::array<std::size_t, kAuxPuncts.size()> aux{};

    std::size_t aux_count(AuxPunct p) const { return aux[static_cast<std::size_t>(p)]; }
    std::size_t ascii_total() const { return ascii_double + ascii_single; }
    std::size_t curly_total() const { return curly_double + curly_single; }

    CharCensus& operator+=(const CharCensus& other);
    friend CharCensus operator+(CharCensus a, const CharCensus& b) { return a += b; }
    friend bool operator==(const CharCensus&, const CharCensus&) = default;
};

/// Codepoint counts over UTF-8 text. Malformed bytes count as nothing.
CharCensus census_characters(std::string_view text);

/// Straight ASCII quotes and apostrophes; curly and auxiliary punctuation
/// are not traces.
std::size_t count_traces(const CharCensus& census);

enum class MatchKind { Word, Regex };

enum class MatchMode {
    WordBoundary,  // word patterns must be delimited by non-letters
    Naive,         // word patterns match anywhere, as plain substrings
};

struct ToolPattern {
    std::string id;     // "llama_meta"
    std::string label;  // "Llama/Meta", used for the report column
    MatchKind kind = MatchKind::Word;
    std::string source;              // pattern text as configured
    std::vector<std::string> words;  // Word: lowercase alternatives
    std::optional<std::regex> regex;  // Regex: compiled, case-insensitive
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered list of tools to look for. Order fixes report column order.
class ToolSet {
public:
    /// ChatGPT, Grammarly, Claude, Gemini, Llama/Meta, Copilot, Grok, DeepSeek.
    static ToolSet defaults();

    /// One tool per line, `Label = word:a|b` or `Label = regex:...`. Blank
    /// lines and lines starting with '#' are ignored. Throws ConfigError.
    static ToolSet parse(std::string_view config);
    static ToolSet load(const std::filesystem::path& file);

    void add(std::string label, MatchKind kind, std::string pattern);

    const std::vector<ToolPattern>& tools() const { return tools_; }
    std::size_t size() const { return tools_.size(); }

private:
    std::vector<ToolPattern> tools_;
};

/// "Llama/Meta" -> "llama_meta".
std::string tool_id(std::string_view label);

struct MentionFlags {
    struct Entry {
        std::string id;
        bool found = false;
        friend bool operator==(const Entry&, const Entry&) = default;
    };
    std::vector<Entry> entries;  // same order as the ToolSet

    /// False for ids that are not configured.
    bool operator[](std::string_view id) const;
    bool any() const;

    static MentionFlags none(const ToolSet& tools);
    friend bool operator==(const MentionFlags&, const MentionFlags&) = default;
};

MentionFlags detect_mentions(std::string_view text, const ToolSet& tools,
                             MatchMode mode = MatchMode::WordBoundary);

enum class Verdict { NoTraces, Acknowledged, Unacknowledged, AllAscii };

std::string_view to_string(Verdict v);

enum class Color { Green, Red, Grey };

Color color_of(Verdict v);

Verdict classify(const CharCensus& census, const MentionFlags& mentions);

struct ScanError {
    std::variant<GateErrorKind, ExtractErrorKind> kind;
    std::string detail;

    std::string_view kind_name() const;
};

struct ScanResult {
    std::filesystem::path path;
    std::string file_name;
    std::optional<std::size_t> ai_traces;  // set iff no error
    MentionFlags mentions;
    std::optional<Verdict> verdict;  // set iff no error
    std::optional<ScanError> error;
    std::vector<std::string> warnings;
    CharCensus census;
};

struct ScanOptions {
    Timestamp threshold = default_threshold();
    const ToolSet* tools = nullptr;  // defaults when null
    MatchMode mode = MatchMode::WordBoundary;
};

/// Gate, extract, census, mentions, classify. Never throws.
ScanResult scan_document(const DocumentRecord& record, Bytes bytes, const ScanOptions& options = {});

/// Like scan_document, reading the file only after the gates pass.
ScanResult scan_file(const DocumentRecord& record, const ScanOptions& options = {});

/// Result row for a file that never became a record (missing path).
ScanResult error_result(const std::filesystem::path& path, const GateError& error, const ToolSet& tools);

/// Files larger than this are reported as Unreadable instead of loaded.
inline constexpr std::uintmax_t kMaxFileSize = std::uintmax_t{256} << 20;

}  // namespace aitrace
