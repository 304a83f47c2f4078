#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aitrace::ole {

class OleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool has_ole_magic(std::span<const std::byte> bytes);

/// Reader for OLE2 compound files (the container of legacy Office
/// documents and of encrypted OOXML packages).
class CompoundFile {
public:
    /// Throws OleError when the header or allocation tables are damaged.
    explicit CompoundFile(std::span<const std::byte> bytes);

    /// Stream names, in directory order. Storages are not listed.
    std::vector<std::string> stream_names() const;

    /// Reads a stream by (ASCII case-insensitive) name, or nullopt.
    std::optional<std::string> read_stream(std::string_view name) const;

private:
    struct DirEntry {
        std::string name;  // UTF-8
        std::uint8_t type = 0;
        std::uint32_t start = 0;
        std::uint64_t size = 0;
    };

    std::string read_chain(std::uint32_t start, std::uint64_t size) const;
    std::string read_mini_chain(std::uint32_t start, std::uint64_t size) const;
    std::span<const std::byte> sector(std::uint32_t index) const;
    std::vector<std::uint32_t> follow(const std::vector<std::uint32_t>& table, std::uint32_t start) const;

    std::span<const std::byte> bytes_;
    std::size_t sector_size_ = 512;
    std::size_t mini_sector_size_ = 64;
    std::uint32_t mini_cutoff_ = 4096;
    std::vector<std::uint32_t> fat_;
    std::vector<std::uint32_t> mini_fat_;
    std::vector<DirEntry> entries_;
    std::string mini_stream_;
};

}  // namespace aitrace::ole
