#include "aitrace/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <system_error>
#include <tuple>

namespace aitrace {

namespace fs = std::filesystem;

namespace {

Timestamp to_timestamp(fs::file_time_type ft) {
    return std::chrono::floor<std::chrono::seconds>(fs::file_time_type::clock::to_sys(ft));
}

}  // namespace

DocumentRecord DocumentRecord::from_path(const fs::path& path) {
    DocumentRecord record;
    record.path = path;
    record.file_name = path.filename().string();
    record.extension = extension_of(record.file_name);
    record.last_modified = to_timestamp(fs::last_write_time(path));
    return record;
}

std::string extension_of(std::string_view file_name) {
    const auto dot = file_name.rfind('.');
    if (dot == std::string_view::npos) return {};
    std::string ext(file_name.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    });
    return ext;
}

std::string_view to_string(GateErrorKind kind) {
    switch (kind) {
        case GateErrorKind::UnsupportedExtension: return "UnsupportedExtension";
        case GateErrorKind::PreChatGPTDate: return "PreChatGPTDate";
        case GateErrorKind::Unreadable: return "Unreadable";
    }
    return "Unknown";
}

Timestamp default_threshold() {
    using namespace std::chrono;
    return sys_seconds{sys_days{year{2022} / November / 22}};
}

std::optional<Timestamp> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len, int& out) {
        const char* first = text.data() + pos;
        const auto res = std::from_chars(first, first + len, out);
        return res.ec == std::errc{} && res.ptr == first + len;
    };
    int y = 0, m = 0, d = 0;
    if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_seconds{sys_days{ymd}};
}

std::string format_date(Timestamp ts) {
    using namespace std::chrono;
    const auto days = floor<std::chrono::days>(ts);
    const year_month_day ymd{days};
    const hh_mm_ss hms{ts - days};
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u %02ld:%02ld:%02ld UTC",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<long>(hms.hours().count()),
                  static_cast<long>(hms.minutes().count()), static_cast<long>(hms.seconds().count()));
    return buf.data();
}

bool is_supported_extension(std::string_view extension) {
    return extension == "pdf" || extension == "docx" || extension == "doc";
}

std::optional<GateError> gate_file(const DocumentRecord& record, Timestamp threshold) {
    if (!is_supported_extension(record.extension)) {
        const std::string shown = record.extension.empty() ? "(none)" : "." + record.extension;
        return GateError{GateErrorKind::UnsupportedExtension,
                         "unsupported extension " + shown + "; only .pdf, .docx and .doc are scanned"};
    }
    if (record.last_modified < threshold) {
        return GateError{GateErrorKind::PreChatGPTDate,
                         "last modified " + format_date(record.last_modified) + ", before " +
                             format_date(threshold)};
    }
    return std::nullopt;
}

Discovery discover_files(std::span<const fs::path> inputs, bool recursive) {
    Discovery out;
    auto add_file = [&](const fs::path& p) {
        std::error_code ec;
        const auto mtime = fs::last_write_time(p, ec);
        if (ec) {
            out.issues.push_back({p, GateError{GateErrorKind::Unreadable, ec.message()}, ec.message()});
            return;
        }
        DocumentRecord record;
        record.path = p;
        record.file_name = p.filename().string();
        record.extension = extension_of(record.file_name);
        record.last_modified = to_timestamp(mtime);
        out.records.push_back(std::move(record));
    };

    for (const auto& input : inputs) {
        std::error_code ec;
        const auto status = fs::status(input, ec);
        if (ec || !fs::exists(status)) {
            const std::string msg = ec ? ec.message() : "no such file or directory";
            out.issues.push_back({input, GateError{GateErrorKind::Unreadable, msg}, msg});
            continue;
        }
        if (fs::is_directory(status)) {
            if (!recursive) {
                out.issues.push_back({input, std::nullopt, "directory skipped (use --recursive)"});
                continue;
            }
            fs::recursive_directory_iterator it(input, fs::directory_options::skip_permission_denied, ec);
            if (ec) {
                out.issues.push_back({input, GateError{GateErrorKind::Unreadable, ec.message()}, ec.message()});
                continue;
            }
            for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
                if (ec) {
                    out.issues.push_back({it->path(), GateError{GateErrorKind::Unreadable, ec.message()},
                                          ec.message()});
                    ec.clear();
                    continue;
                }
                std::error_code entry_ec;
                if (it->is_regular_file(entry_ec)) add_file(it->path());
            }
            continue;
        }
        if (fs::is_regular_file(status)) {
            add_file(input);
        } else {
            out.issues.push_back({input, GateError{GateErrorKind::Unreadable, "not a regular file"},
                                  "not a regular file"});
        }
    }

    std::sort(out.records.begin(), out.records.end(),
              [](const DocumentRecord& a, const DocumentRecord& b) { return a.path < b.path; });
    out.records.erase(std::unique(out.records.begin(), out.records.end(),
                                  [](const DocumentRecord& a, const DocumentRecord& b) { return a.path == b.path; }),
                      out.records.end());
    std::sort(out.issues.begin(), out.issues.end(), [](const DiscoveryIssue& a, const DiscoveryIssue& b) {
        return std::tie(a.path, a.message) < std::tie(b.path, b.message);
    });
    out.issues.erase(std::unique(out.issues.begin(), out.issues.end(),
                                 [](const DiscoveryIssue& a, const DiscoveryIssue& b) {
                                     return a.path == b.path && a.message == b.message;
                                 }),
                     out.issues.end());
    return out;
}

}  // namespace aitrace
