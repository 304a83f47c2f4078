#pragma once

#include "aitrace/detect.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aitrace {

inline constexpr std::string_view kFillGreen = "FFC6EFCE";
inline constexpr std::string_view kFillRed = "FFFFC7CE";
inline constexpr std::string_view kFillGrey = "FFD9D9D9";

inline constexpr std::string_view kSheetName = "AI Detection Results";

struct ReportRow {
    std::vector<std::string> cells;
    std::optional<Verdict> verdict;  // unset for errored files
    std::optional<std::size_t> ai_traces;
};

struct ReportTable {
    std::vector<std::string> columns;
    std::vector<ReportRow> rows;
    std::size_t first_mention_column = 2;
    std::size_t mention_columns = 0;

    bool is_mention_column(std::size_t col) const {
        return col >= first_mention_column && col < first_mention_column + mention_columns;
    }
};

class ExportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File Name, AI Traces, one "<Label> Mentioned" column per tool, Verdict,
/// Warnings. Rows are sorted by file name (then path).
ReportTable build_table(std::span<const ScanResult> results, const ToolSet& tools);

/// Sorts results into report order: file name, then full path.
void sort_results(std::vector<ScanResult>& results);

std::string to_csv(const ReportTable& table);
std::vector<std::byte> to_xlsx(const ReportTable& table);

/// Write the serialized table, returning the byte count. Throw ExportError.
std::size_t write_csv(const ReportTable& table, const std::filesystem::path& out);
std::size_t write_xlsx(const ReportTable& table, const std::filesystem::path& out);

struct TerminalOptions {
    bool color = false;
};

/// One line per result plus a final tally line.
std::string render_terminal_summary(std::span<const ScanResult> results, const ToolSet& tools,
                                    const TerminalOptions& options = {});

/// "ai_detection_results-YYYYMMDD-HHMMSS" for the given UTC time.
std::string default_report_stem(Timestamp now);

/// Spreadsheet column letters for a zero-based index: 0 -> "A", 26 -> "AA".
std::string column_letters(std::size_t index);

}  // namespace aitrace
