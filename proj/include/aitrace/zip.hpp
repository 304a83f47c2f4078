#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aitrace::zip {

class ZipError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Entry {
    std::string name;
    std::uint16_t flags = 0;
    std::uint16_t method = 0;
    std::uint32_t crc32 = 0;
    std::uint64_t compressed_size = 0;
    std::uint64_t uncompressed_size = 0;
    std::uint64_t local_header_offset = 0;

    bool encrypted() const { return (flags & 0x1) != 0; }
};

/// Read-only view over a ZIP archive held in memory. Supports stored and
/// deflated entries; the central directory is authoritative.
class Reader {
public:
    /// Throws ZipError when no valid central directory is found.
    explicit Reader(std::span<const std::byte> archive);

    const std::vector<Entry>& entries() const { return entries_; }
    const Entry* find(std::string_view name) const;

    /// Inflates and CRC-checks an entry. Throws ZipError on damage, on
    /// encrypted entries, and when the output would exceed `max_size`.
    std::string read(const Entry& entry, std::size_t max_size = kDefaultMaxEntrySize) const;

    static constexpr std::size_t kDefaultMaxEntrySize = std::size_t{512} << 20;

private:
    std::span<const std::byte> archive_;
    std::vector<Entry> entries_;
};

bool looks_like_zip(std::span<const std::byte> bytes);

/// Builds an archive in memory. Timestamps are fixed at 1980-01-01 00:00 so
/// identical input produces identical bytes.
class Writer {
public:
    void add(std::string name, std::string_view data, bool deflate = true);
    std::vector<std::byte> finish();

private:
    struct Pending {
        std::string name;
        std::uint32_t crc = 0;
        std::uint16_t method = 0;
        std::uint32_t compressed_size = 0;
        std::uint32_t uncompressed_size = 0;
        std::uint32_t offset = 0;
    };
    std::vector<std::byte> out_;
    std::vector<Pending> entries_;
};

}  // namespace aitrace::zip
