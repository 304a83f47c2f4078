#pragma once

#include "aitrace/ingest.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aitrace {

enum class OutputFormat { Csv, Xlsx, Terminal };

struct ScanConfig {
    std::vector<std::filesystem::path> inputs;
    bool recursive = false;
    Timestamp threshold_date = default_threshold();
    bool naive_match = false;
    std::optional<std::filesystem::path> tools_file;
    std::filesystem::path out_dir = ".";
    std::vector<OutputFormat> formats = {OutputFormat::Csv, OutputFormat::Xlsx, OutputFormat::Terminal};
    std::size_t jobs = 1;
    bool no_color = false;
    std::optional<std::string> report_name;  // file stem; default is timestamped

    bool wants(OutputFormat f) const;
};

inline constexpr int kExitClean = 0;
inline constexpr int kExitUnacknowledged = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFailed = 3;

struct ParseOutcome {
    std::optional<ScanConfig> config;  // unset when the program should exit
    int exit_code = kExitClean;
    std::string message;  // usage, help or version text
};

std::size_t default_jobs();

ParseOutcome parse_args(int argc, const char* const* argv);
ParseOutcome parse_args(const std::vector<std::string>& args);  // without argv[0]

struct RunEnvironment {
    bool stdout_is_tty = false;
    bool no_color_env = false;  // NO_COLOR set to a non-empty value
    std::optional<Timestamp> now;  // report timestamp; the clock when unset
};

/// Discover, scan, report. Returns the process exit code.
int run_scan(const ScanConfig& config, std::ostream& out, std::ostream& err, const RunEnvironment& env = {});

}  // namespace aitrace
