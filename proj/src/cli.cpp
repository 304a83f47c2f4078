#include "aitrace/cli.hpp"

#include "aitrace/detect.hpp"
#include "aitrace/report.hpp"
#include "aitrace/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <ostream>
#include <sstream>
#include <thread>

namespace aitrace {

namespace {

std::optional<OutputFormat> parse_format(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "xlsx") return OutputFormat::Xlsx;
    if (s == "terminal") return OutputFormat::Terminal;
    return std::nullopt;
}

std::vector<ScanResult> scan_all(const std::vector<DocumentRecord>& records, const ScanOptions& options,
                                 std::size_t jobs) {
    std::vector<ScanResult> results(records.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= records.size()) return;
            try {
                results[i] = scan_file(records[i], options);
            } catch (const std::exception& e) {
                // Only allocation failure gets here; keep the row.
                results[i] = error_result(records[i].path, GateError{GateErrorKind::Unreadable, e.what()},
                                          options.tools ? *options.tools : ToolSet::defaults());
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(jobs, records.size()));
    if (n == 1) {
        worker();
        return results;
    }
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    pool.clear();  // joins
    return results;
}

}  // namespace

bool ScanConfig::wants(OutputFormat f) const { return std::find(formats.begin(), formats.end(), f) != formats.end(); }

std::size_t default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

ParseOutcome parse_args(int argc, const char* const* argv) {
    ParseOutcome outcome;
    ScanConfig config;
    config.jobs = default_jobs();

    CLI::App app{"Scan student documents for straight-quote AI traces and AI tool mentions.", "aitrace"};
    app.set_version_flag("--version", std::string(kVersion));

    std::vector<std::string> inputs;
    std::string threshold;
    std::string tools_file;
    std::string out_dir = ".";
    std::vector<std::string> formats;
    std::string report_name;
    std::size_t jobs = config.jobs;

    app.add_option("inputs", inputs, "Files or directories to scan")->required();
    app.add_flag("-r,--recursive", config.recursive, "Walk directories recursively");
    app.add_option("--threshold-date", threshold,
                   "Ignore files last modified before this UTC date (YYYY-MM-DD, default 2022-11-22)");
    app.add_flag("--naive-match", config.naive_match,
                 "Match tool names as plain substrings instead of whole words");
    app.add_option("--tools-file", tools_file, "Tool pattern list replacing the built-in one");
    app.add_option("-o,--out-dir", out_dir, "Directory for CSV/XLSX reports")->capture_default_str();
    app.add_option("--formats", formats, "Comma-separated subset of csv,xlsx,terminal (default: all)")
        ->delimiter(',');
    app.add_option("-j,--jobs", jobs, "Files scanned in parallel (default: logical CPUs)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--no-color", config.no_color, "Plain terminal output");
    app.add_option("--report-name", report_name,
                   "Report file name without extension (default: ai_detection_results-<UTC timestamp>)");

    std::ostringstream out, err;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        outcome.message = out.str() + err.str();
        outcome.exit_code = code == 0 ? kExitClean : kExitUsage;
        return outcome;
    }

    auto usage_error = [&](const std::string& what) {
        outcome.exit_code = kExitUsage;
        outcome.message = "error: " + what + "\nRun with --help for more information.\n";
        return outcome;
    };

    for (const auto& in : inputs) config.inputs.emplace_back(in);
    if (!threshold.empty()) {
        const auto ts = parse_date(threshold);
        if (!ts) return usage_error("--threshold-date expects YYYY-MM-DD, got '" + threshold + "'");
        config.threshold_date = *ts;
    }
    if (!tools_file.empty()) config.tools_file = tools_file;
    config.out_dir = out_dir;
    if (!formats.empty()) {
        config.formats.clear();
        for (const auto& f : formats) {
            const auto parsed = parse_format(f);
            if (!parsed) return usage_error("unknown format '" + f + "' (use csv, xlsx, terminal)");
            if (!config.wants(*parsed)) config.formats.push_back(*parsed);
        }
        if (config.formats.empty()) return usage_error("--formats needs at least one format");
    }
    config.jobs = jobs;
    if (!report_name.empty()) {
        if (report_name.find_first_of("/\\") != std::string::npos || report_name == "." || report_name == "..") {
            return usage_error("--report-name must be a plain file name");
        }
        config.report_name = report_name;
    }
    outcome.config = std::move(config);
    return outcome;
}

ParseOutcome parse_args(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("aitrace");
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_args(static_cast<int>(argv.size()), argv.data());
}

int run_scan(const ScanConfig& config, std::ostream& out, std::ostream& err, const RunEnvironment& env) {
    ToolSet tools;
    try {
        tools = config.tools_file ? ToolSet::load(*config.tools_file) : ToolSet::defaults();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const Discovery discovery = discover_files(config.inputs, config.recursive);
    ScanOptions options;
    options.threshold = config.threshold_date;
    options.tools = &tools;
    options.mode = config.naive_match ? MatchMode::Naive : MatchMode::WordBoundary;

    std::vector<ScanResult> results = scan_all(discovery.records, options, std::max<std::size_t>(1, config.jobs));
    for (const auto& issue : discovery.issues) {
        if (issue.error) {
            results.push_back(error_result(issue.path, *issue.error, tools));
        } else {
            err << "warning: " << issue.message << "\n";
        }
    }
    sort_results(results);

    int code = kExitClean;
    const bool any_red = std::any_of(results.begin(), results.end(), [](const ScanResult& r) {
        return !r.error && r.verdict == Verdict::Unacknowledged;
    });
    const bool all_failed =
        !results.empty() && std::all_of(results.begin(), results.end(), [](const ScanResult& r) { return r.error; });
    if (any_red) {
        code = kExitUnacknowledged;
    } else if (all_failed) {
        code = kExitFailed;
    }

    if (config.wants(OutputFormat::Terminal)) {
        TerminalOptions topts;
        topts.color = env.stdout_is_tty && !env.no_color_env && !config.no_color;
        out << render_terminal_summary(results, tools, topts);
        out.flush();
    }

    if (config.wants(OutputFormat::Csv) || config.wants(OutputFormat::Xlsx)) {
        const ReportTable table = build_table(results, tools);
        const Timestamp now =
            env.now.value_or(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
        const std::string stem = config.report_name.value_or(default_report_stem(now));
        try {
            std::error_code ec;
            std::filesystem::create_directories(config.out_dir, ec);
            if (ec) throw ExportError("cannot create " + config.out_dir.string() + ": " + ec.message());
            if (config.wants(OutputFormat::Csv)) {
                const auto path = config.out_dir / (stem + ".csv");
                write_csv(table, path);
                err << "wrote " << path.string() << "\n";
            }
            if (config.wants(OutputFormat::Xlsx)) {
                const auto path = config.out_dir / (stem + ".xlsx");
                write_xlsx(table, path);
                err << "wrote " << path.string() << "\n";
            }
        } catch (const ExportError& e) {
            err << "error: " << e.what() << "\n";
            return kExitFailed;
        }
    }
    return code;
}

}  // namespace aitrace
