#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aitrace {

using Timestamp = std::chrono::sys_seconds;

/// A discovered file. Metadata comes from the filesystem, never from the
/// document itself.
struct DocumentRecord {
    std::filesystem::path path;
    std::string file_name;
    std::string extension;  // lowercase, no dot; empty when the name has none
    Timestamp last_modified{};

    /// Builds a record from filesystem metadata. Throws filesystem_error.
    static DocumentRecord from_path(const std::filesystem::path& path);
};

/// Final dot-suffix of `file_name`, lowercased. "archive.tar.gz" -> "gz".
std::string extension_of(std::string_view file_name);

enum class GateErrorKind { UnsupportedExtension, PreChatGPTDate, Unreadable };

std::string_view to_string(GateErrorKind kind);

struct GateError {
    GateErrorKind kind;
    std::string detail;
};

/// 2022-11-22 00:00:00 UTC, the public release of ChatGPT.
Timestamp default_threshold();

/// Parses YYYY-MM-DD as midnight UTC.
std::optional<Timestamp> parse_date(std::string_view text);

std::string format_date(Timestamp ts);

bool is_supported_extension(std::string_view extension);

/// Extension gate first, then date gate (inclusive of the threshold).
/// Returns nullopt when the record passes.
std::optional<GateError> gate_file(const DocumentRecord& record,
                                   Timestamp threshold = default_threshold());

struct DiscoveryIssue {
    std::filesystem::path path;
    /// Set for entries that must appear in the report (missing or
    /// inaccessible paths). Unset for informational warnings.
    std::optional<GateError> error;
    std::string message;
};

struct Discovery {
    std::vector<DocumentRecord> records;  // sorted by path, unique
    std::vector<DiscoveryIssue> issues;   // sorted by path
};

/// Expands inputs into file records. Directories are walked only when
/// `recursive` is set; otherwise each one yields a warning issue.
Discovery discover_files(std::span<const std::filesystem::path> inputs, bool recursive);

}  // namespace aitrace
