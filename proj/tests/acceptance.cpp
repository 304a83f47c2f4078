// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero when any criterion fails.

#include "aitrace/cli.hpp"
#include "aitrace/detect.hpp"
#include "aitrace/extract.hpp"
#include "aitrace/ingest.hpp"
#include "aitrace/report.hpp"
#include "support/corpus.hpp"
#include "support/sheet_reader.hpp"

#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

extern char** environ;

namespace fs = std::filesystem;
using aitrace::Verdict;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f s", s);
    return buf;
}

fs::path scratch_root() {
    static const fs::path root = [] {
        fs::path p = fs::temp_directory_path() / ("aitrace_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

std::string repeat(std::string_view unit, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += unit;
    return s;
}

// --- AC1 -------------------------------------------------------------------

Outcome ac1_truth_table() {
    // Expected verdicts, enumerated by hand from the rules: no straight
    // quotes is green; straight quotes without any curly quote is grey even
    // when acknowledged; a mixture is green when a tool is named, else red.
    struct Case {
        std::size_t ascii, curly;
        bool chatgpt;
        Verdict expected;
    };
    const std::vector<Case> cases = {
        {0, 0, false, Verdict::NoTraces},       {0, 0, true, Verdict::NoTraces},
        {0, 1, false, Verdict::NoTraces},       {0, 1, true, Verdict::NoTraces},
        {0, 5, false, Verdict::NoTraces},       {0, 5, true, Verdict::NoTraces},
        {1, 0, false, Verdict::AllAscii},       {1, 0, true, Verdict::AllAscii},
        {1, 1, false, Verdict::Unacknowledged}, {1, 1, true, Verdict::Acknowledged},
        {1, 5, false, Verdict::Unacknowledged}, {1, 5, true, Verdict::Acknowledged},
        {5, 0, false, Verdict::AllAscii},       {5, 0, true, Verdict::AllAscii},
        {5, 1, false, Verdict::Unacknowledged}, {5, 1, true, Verdict::Acknowledged},
        {5, 5, false, Verdict::Unacknowledged}, {5, 5, true, Verdict::Acknowledged},
    };
    const aitrace::ToolSet tools = aitrace::ToolSet::defaults();
    std::size_t ok = 0;
    std::string first_bad;
    for (const auto& c : cases) {
        // Alternate double and single forms so both census fields are used.
        std::string text = "Essay text. ";
        for (std::size_t i = 0; i < c.ascii; ++i) text += i % 2 ? "it's " : "a \" mark ";
        for (std::size_t i = 0; i < c.curly; ++i) text += i % 2 ? "it’s " : "a “ mark ";
        if (c.chatgpt) text += "Drafted with ChatGPT.";
        const auto census = aitrace::census_characters(text);
        const auto mentions = aitrace::detect_mentions(text, tools);
        const Verdict v = aitrace::classify(census, mentions);
        if (v == c.expected && census.ascii_total() == c.ascii && census.curly_total() == c.curly) {
            ++ok;
        } else if (first_bad.empty()) {
            first_bad = " first mismatch ascii=" + std::to_string(c.ascii) + " curly=" + std::to_string(c.curly) +
                        " chatgpt=" + std::to_string(c.chatgpt) + " got " + std::string(aitrace::to_string(v));
        }
    }
    return {ok == cases.size(), std::to_string(ok) + "/" + std::to_string(cases.size()) + " cases" + first_bad};
}

// --- AC2 -------------------------------------------------------------------

Outcome ac2_census_oracle() {
    const std::vector<char32_t> alphabet = {
        U'a', U'Z', U' ', U'\n', U'.', U'"', U'\'', 0x201C, 0x201D, 0x2018, 0x2019, 0x2014, 0x2013, 0x2026,
        0x00A0, 0x00E9, 0x4E2D, 0x1F600, 0x201A, 0x201E, 0x00AB, 0x00BB, 0x2032, 0x2033, U'`', 0x00B4,
    };
    std::mt19937 gen(20221122);
    std::size_t ok = 0;
    const std::size_t trials = 1000;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t len = gen() % 10001;
        std::u32string s;
        s.reserve(len);
        for (std::size_t i = 0; i < len; ++i) {
            // Half the draws come from the tracked characters.
            s.push_back(gen() % 2 ? alphabet[5 + gen() % 10] : alphabet[gen() % alphabet.size()]);
        }
        std::size_t ad = 0, as = 0, cd = 0, cs = 0, em = 0, en = 0, el = 0, nb = 0;
        for (const char32_t c : s) {
            ad += c == U'"';
            as += c == U'\'';
            cd += c == 0x201C || c == 0x201D;
            cs += c == 0x2018 || c == 0x2019;
            em += c == 0x2014;
            en += c == 0x2013;
            el += c == 0x2026;
            nb += c == 0x00A0;
        }
        std::string utf8;
        for (const char32_t c : s) {
            if (c < 0x80) {
                utf8.push_back(static_cast<char>(c));
            } else if (c < 0x800) {
                utf8.push_back(static_cast<char>(0xC0 | (c >> 6)));
                utf8.push_back(static_cast<char>(0x80 | (c & 0x3F)));
            } else if (c < 0x10000) {
                utf8.push_back(static_cast<char>(0xE0 | (c >> 12)));
                utf8.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
                utf8.push_back(static_cast<char>(0x80 | (c & 0x3F)));
            } else {
                utf8.push_back(static_cast<char>(0xF0 | (c >> 18)));
                utf8.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
                utf8.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
                utf8.push_back(static_cast<char>(0x80 | (c & 0x3F)));
            }
        }
        const auto c = aitrace::census_characters(utf8);
        using P = aitrace::AuxPunct;
        if (c.ascii_double == ad && c.ascii_single == as && c.curly_double == cd && c.curly_single == cs &&
            c.aux_count(P::EmDash) == em && c.aux_count(P::EnDash) == en && c.aux_count(P::Ellipsis) == el &&
            c.aux_count(P::Nbsp) == nb) {
            ++ok;
        }
    }
    return {ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " random strings match"};
}

// --- AC3 -------------------------------------------------------------------

Outcome ac3_mention_matrix() {
    const aitrace::ToolSet tools = aitrace::ToolSet::defaults();
    const std::vector<std::string> ids = {"chatgpt", "grammarly", "claude",  "gemini",
                                          "llama_meta", "copilot", "grok", "deepseek"};
    struct Case {
        std::string text;
        aitrace::MatchMode mode;
        std::vector<std::string> expected_true;
    };
    using M = aitrace::MatchMode;
    const std::vector<Case> cases = {
        {"Chat gpt", M::WordBoundary, {"chatgpt"}},
        {"CHATGPT", M::WordBoundary, {"chatgpt"}},
        {"chat   GPT", M::WordBoundary, {"chatgpt"}},
        {"Grammarly", M::WordBoundary, {"grammarly"}},
        {"claude", M::WordBoundary, {"claude"}},
        {"metaphor", M::WordBoundary, {}},
        {"category", M::WordBoundary, {}},
        {"metaphor", M::Naive, {"llama_meta"}},
        {"category", M::Naive, {}},
    };
    std::size_t ok = 0;
    std::string first_bad;
    for (const auto& c : cases) {
        const auto flags = aitrace::detect_mentions(c.text, tools, c.mode);
        bool good = flags.entries.size() == ids.size();
        for (std::size_t i = 0; good && i < ids.size(); ++i) {
            const bool want = std::find(c.expected_true.begin(), c.expected_true.end(), ids[i]) != c.expected_true.end();
            good = flags.entries[i].id == ids[i] && flags.entries[i].found == want;
        }
        if (good) {
            ++ok;
        } else if (first_bad.empty()) {
            first_bad = " first mismatch: '" + c.text + "'";
        }
    }
    return {ok == cases.size(), std::to_string(ok) + "/" + std::to_string(cases.size()) + " inputs" + first_bad};
}

// --- AC4 -------------------------------------------------------------------

fs::path corpus_dir() {
    static const fs::path dir = [] {
        const fs::path d = scratch_root() / "corpus";
        fixture::write_corpus(d);
        return d;
    }();
    return dir;
}

int scan_to(const fs::path& input, const fs::path& out_dir, std::size_t jobs, std::string& log) {
    aitrace::ScanConfig config;
    config.inputs = {input};
    config.recursive = true;
    config.out_dir = out_dir;
    config.jobs = jobs;
    config.formats = {aitrace::OutputFormat::Csv, aitrace::OutputFormat::Xlsx};
    config.report_name = "report";
    std::ostringstream out, err;
    const int code = aitrace::run_scan(config, out, err);
    log = err.str();
    return code;
}

Outcome ac4_corpus_reports() {
    const fs::path out = scratch_root() / "ac4";
    std::string log;
    const int code = scan_to(corpus_dir(), out, 2, log);
    if (code != aitrace::kExitUnacknowledged) return {false, "unexpected exit code " + std::to_string(code)};

    const std::string csv = fixture::read_bytes(out / "report.csv");
    const std::string golden = fixture::read_bytes(fs::path(AITRACE_GOLDEN_DIR) / "fixture_corpus.csv");
    if (csv != golden) return {false, "CSV differs from tests/golden/fixture_corpus.csv"};

    const fixture::Matrix rows = fixture::parse_csv(csv);
    const fixture::Sheet sheet = fixture::read_xlsx(fixture::read_bytes(out / "report.xlsx"));
    fixture::Matrix cells = sheet.cells;
    for (auto& r : cells) r.resize(rows.front().size());
    if (cells != rows) return {false, "XLSX cell matrix differs from CSV"};

    const std::size_t verdict_col = rows.front().size() - 2;
    std::size_t grey_rows = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r][verdict_col] != "AllAscii") continue;
        if (sheet.fills[r][0] != aitrace::kFillGrey) {
            return {false, "AllAscii row " + rows[r][0] + " has fill '" + sheet.fills[r][0] + "'"};
        }
        ++grey_rows;
    }
    if (grey_rows != 1) return {false, "expected one AllAscii row, found " + std::to_string(grey_rows)};
    return {true, std::to_string(rows.size() - 1) + " rows; CSV == golden, XLSX == CSV, AllAscii row grey"};
}

// --- AC5 -------------------------------------------------------------------

Outcome ac5_extraction_fidelity() {
    std::size_t ok = 0;
    std::string first_bad;
    const auto& corpus = fixture::essay_corpus();
    for (const auto& e : corpus) {
        const std::string bytes = fixture::render_essay(e);
        aitrace::DocumentRecord rec;
        rec.file_name = e.name;
        rec.extension = aitrace::extension_of(e.name);
        const auto text = aitrace::extract(rec, aitrace::as_bytes(bytes));
        const auto c = aitrace::census_characters(text.text);
        using P = aitrace::AuxPunct;
        const auto& p = e.planted;
        const bool good = c.ascii_double == p.ascii_double && c.ascii_single == p.ascii_single &&
                          c.curly_double == p.curly_double && c.curly_single == p.curly_single &&
                          c.aux_count(P::EmDash) == p.em_dash && c.aux_count(P::EnDash) == p.en_dash &&
                          c.aux_count(P::Ellipsis) == p.ellipsis && c.aux_count(P::Nbsp) == 0;
        if (good) {
            ++ok;
        } else if (first_bad.empty()) {
            first_bad = " first mismatch: " + e.name;
        }
    }
    return {ok == corpus.size(),
            std::to_string(ok) + "/" + std::to_string(corpus.size()) + " fixtures exact" + first_bad};
}

// --- AC6 -------------------------------------------------------------------

Outcome ac6_gates() {
    const fs::path dir = scratch_root() / "ac6";
    fs::create_directories(dir);
    const std::string docx = fixture::make_docx({"A “curly” essay."});
    auto stamp = [&](const std::string& name, const std::string& date, int h, int m, int s) {
        const fs::path p = dir / name;
        fixture::write_bytes(p, docx);
        const auto day = *aitrace::parse_date(date);
        const auto t = day + std::chrono::hours(h) + std::chrono::minutes(m) + std::chrono::seconds(s);
        fs::last_write_time(p, std::chrono::file_clock::from_sys(t));
        return aitrace::DocumentRecord::from_path(p);
    };
    const auto before = stamp("before.docx", "2022-11-21", 23, 59, 59);
    const auto early_day = stamp("early.docx", "2022-11-21", 0, 0, 0);
    const auto on = stamp("on.docx", "2022-11-22", 0, 0, 0);
    const auto later = stamp("later.docx", "2022-11-22", 15, 30, 0);
    fixture::write_bytes(dir / "notes.txt", "plain \"text\"");
    const auto txt = aitrace::DocumentRecord::from_path(dir / "notes.txt");

    std::vector<std::string> problems;
    auto expect_error = [&](const aitrace::DocumentRecord& r, aitrace::GateErrorKind kind) {
        const auto res = aitrace::scan_file(r);
        const auto* got = res.error ? std::get_if<aitrace::GateErrorKind>(&res.error->kind) : nullptr;
        if (!got || *got != kind || res.verdict) problems.push_back(r.file_name + " not rejected as expected");
    };
    auto expect_pass = [&](const aitrace::DocumentRecord& r) {
        const auto res = aitrace::scan_file(r);
        if (res.error || res.verdict != Verdict::NoTraces) problems.push_back(r.file_name + " not accepted");
    };
    expect_error(before, aitrace::GateErrorKind::PreChatGPTDate);
    expect_error(early_day, aitrace::GateErrorKind::PreChatGPTDate);
    expect_pass(on);
    expect_pass(later);
    expect_error(txt, aitrace::GateErrorKind::UnsupportedExtension);
    if (!problems.empty()) return {false, problems.front()};
    return {true, "2022-11-21 rejected (PreChatGPTDate), 2022-11-22 accepted, .txt rejected (UnsupportedExtension)"};
}

// --- AC7 -------------------------------------------------------------------

Outcome ac7_bulk() {
    const fs::path dir = scratch_root() / "bulk";
    fs::create_directories(dir);
    std::size_t expected_red = 0;
    for (std::uint32_t i = 0; i < 1000; ++i) {
        fixture::Planted planted;
        bool chatgpt = false;
        const auto paragraphs = fixture::random_paragraphs(7000 + i, planted, chatgpt);
        const bool red = planted.ascii_double + planted.ascii_single > 0 &&
                         planted.curly_double + planted.curly_single > 0 && !chatgpt;
        expected_red += red;
        char name[32];
        std::snprintf(name, sizeof name, "essay_%04u.docx", i);
        fixture::write_bytes(dir / name, fixture::make_docx(paragraphs));
    }
    const fs::path out = scratch_root() / "bulk_out";
    fs::create_directories(out);

    const std::string cli = AITRACE_CLI_PATH;
    const std::string out_arg = out.string();
    const std::string dir_arg = dir.string();
    std::vector<const char*> argv = {cli.c_str(), dir_arg.c_str(), "--recursive", "--formats", "csv",
                                     "--report-name", "bulk", "-o", out_arg.c_str(), "--no-color", nullptr};
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
    pid_t pid = 0;
    const auto start = Clock::now();
    const int rc = posix_spawn(&pid, cli.c_str(), &actions, nullptr, const_cast<char* const*>(argv.data()), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) return {false, "cannot start " + cli};
    int status = 0;
    rusage usage{};
    if (::wait4(pid, &status, 0, &usage) != pid) return {false, "wait4 failed"};
    const double elapsed = seconds_since(start);
    const double peak_mb = static_cast<double>(usage.ru_maxrss) / 1024.0;  // ru_maxrss is KiB on Linux

    if (!WIFEXITED(status)) return {false, "scanner did not exit normally"};
    const int code = WEXITSTATUS(status);
    const fixture::Matrix rows = fixture::parse_csv(fixture::read_bytes(out / "bulk.csv"));
    std::size_t red = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) red += rows[r][rows[r].size() - 2] == "Unacknowledged";

    char detail[256];
    std::snprintf(detail, sizeof detail, "1000 docx in %.2f s (limit 60), peak RSS %.1f MB (limit 512), %zu red rows",
                  elapsed, peak_mb, red);
    const bool ok = rows.size() == 1001 && red == expected_red && code == (red ? 1 : 0) && elapsed < 60.0 &&
                    peak_mb < 512.0;
    std::string extra;
    if (rows.size() != 1001) extra = "; expected 1000 rows, got " + std::to_string(rows.size() - 1);
    if (red != expected_red) extra += "; expected " + std::to_string(expected_red) + " red";
    return {ok, detail + extra};
}

// --- AC8 -------------------------------------------------------------------

Outcome ac8_determinism() {
    std::string log;
    const fs::path a = scratch_root() / "ac8_j1";
    const fs::path b = scratch_root() / "ac8_j8";
    const int ca = scan_to(corpus_dir(), a, 1, log);
    const int cb = scan_to(corpus_dir(), b, 8, log);
    const bool same_csv = fixture::read_bytes(a / "report.csv") == fixture::read_bytes(b / "report.csv");
    const bool same_xlsx = fixture::read_bytes(a / "report.xlsx") == fixture::read_bytes(b / "report.xlsx");
    const bool ok = ca == cb && same_csv && same_xlsx;
    return {ok, std::string("jobs=1 vs jobs=8: CSV ") + (same_csv ? "identical" : "DIFFERS") + ", XLSX " +
                    (same_xlsx ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* title;
        double limit_s;  // 0 = no time bound
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"AC1", "classification truth table", 1.0, ac1_truth_table},
        {"AC2", "census oracle equivalence", 10.0, ac2_census_oracle},
        {"AC3", "mention matrix", 1.0, ac3_mention_matrix},
        {"AC4", "fixture corpus reports", 5.0, ac4_corpus_reports},
        {"AC5", "extraction fidelity", 0.0, ac5_extraction_fidelity},
        {"AC6", "date and extension gates", 0.0, ac6_gates},
        {"AC7", "bulk scalability", 0.0, ac7_bulk},
        {"AC8", "determinism across job counts", 0.0, ac8_determinism},
    };

    // The corpus is shared by AC4 and AC8; write it outside the timed region.
    corpus_dir();

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = seconds_since(start);
        if (c.limit_s > 0 && s >= c.limit_s) {
            o.pass = false;
            o.detail += "; took " + fmt_seconds(s) + ", limit " + fmt_seconds(c.limit_s);
        }
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": " << o.detail << " ("
                  << fmt_seconds(s) << ")\n";
        failed += !o.pass;
    }
    std::error_code ec;
    fs::remove_all(scratch_root(), ec);
    std::cout << (failed ? "acceptance FAILED: " : "acceptance passed: ") << (criteria.size() - failed) << "/"
              << criteria.size() << " criteria\n";
    return failed ? 1 : 0;
}
