#include "aitrace/ole.hpp"

#include "aitrace/utf8.hpp"

#include <algorithm>
#include <array>
#include <cstring>

namespace aitrace::ole {

namespace {

constexpr std::array<unsigned char, 8> kMagic = {0xD0, 0xCF, 0x11, 0xE0, 0xA1, 0xB1, 0x1A, 0xE1};
constexpr std::uint32_t kEndOfChain = 0xFFFFFFFE;
constexpr std::uint32_t kFreeSect = 0xFFFFFFFF;
constexpr std::uint32_t kMaxRegSect = 0xFFFFFFFA;

std::uint16_t le16(std::span<const std::byte> b, std::size_t off) {
    return static_cast<std::uint16_t>(std::to_integer<unsigned>(b[off]) | (std::to_integer<unsigned>(b[off + 1]) << 8));
}
std::uint32_t le32(std::span<const std::byte> b, std::size_t off) {
    return std::to_integer<std::uint32_t>(b[off]) | (std::to_integer<std::uint32_t>(b[off + 1]) << 8) |
           (std::to_integer<std::uint32_t>(b[off + 2]) << 16) | (std::to_integer<std::uint32_t>(b[off + 3]) << 24);
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; };
               return lower(x) == lower(y);
           });
}

}  // namespace

bool has_ole_magic(std::span<const std::byte> bytes) {
    if (bytes.size() < kMagic.size()) return false;
    for (std::size_t i = 0; i < kMagic.size(); ++i) {
        if (std::to_integer<unsigned char>(bytes[i]) != kMagic[i]) return false;
    }
    return true;
}

CompoundFile::CompoundFile(std::span<const std::byte> bytes) : bytes_(bytes) {
    if (!has_ole_magic(bytes)) throw OleError("missing compound file signature");
    if (bytes.size() < 512) throw OleError("truncated compound file header");
    const std::uint16_t sector_shift = le16(bytes, 0x1E);
    const std::uint16_t mini_shift = le16(bytes, 0x20);
    if (sector_shift != 9 && sector_shift != 12) throw OleError("unsupported sector size");
    if (mini_shift != 6) throw OleError("unsupported mini sector size");
    sector_size_ = std::size_t{1} << sector_shift;
    mini_sector_size_ = std::size_t{1} << mini_shift;

    const std::uint32_t num_fat = le32(bytes, 0x2C);
    const std::uint32_t first_dir = le32(bytes, 0x30);
    mini_cutoff_ = le32(bytes, 0x38);
    const std::uint32_t first_mini_fat = le32(bytes, 0x3C);
    std::uint32_t difat_sector = le32(bytes, 0x44);
    const std::uint32_t num_difat = le32(bytes, 0x48);

    const std::size_t total_sectors = (bytes.size() - 512 + sector_size_ - 1) / sector_size_;
    if (num_fat > total_sectors + 1) throw OleError("FAT sector count out of range");

    std::vector<std::uint32_t> fat_sectors;
    for (std::size_t i = 0; i < 109 && fat_sectors.size() < num_fat; ++i) {
        const std::uint32_t s = le32(bytes, 0x4C + 4 * i);
        if (s > kMaxRegSect) break;
        fat_sectors.push_back(s);
    }
    const std::size_t per_sector = sector_size_ / 4;
    for (std::uint32_t n = 0; n < num_difat && difat_sector <= kMaxRegSect && fat_sectors.size() < num_fat; ++n) {
        const auto sec = sector(difat_sector);
        if (sec.size() < sector_size_) throw OleError("truncated DIFAT sector");
        for (std::size_t i = 0; i + 1 < per_sector && fat_sectors.size() < num_fat; ++i) {
            const std::uint32_t s = le32(sec, 4 * i);
            if (s > kMaxRegSect) continue;
            fat_sectors.push_back(s);
        }
        difat_sector = le32(sec, 4 * (per_sector - 1));
    }

    fat_.reserve(fat_sectors.size() * per_sector);
    for (const std::uint32_t s : fat_sectors) {
        const auto sec = sector(s);
        for (std::size_t i = 0; i + 4 <= sec.size(); i += 4) fat_.push_back(le32(sec, i));
    }

    for (const std::uint32_t s : follow(fat_, first_dir)) {
        const auto sec = sector(s);
        for (std::size_t off = 0; off + 128 <= sec.size(); off += 128) {
            DirEntry e;
            const std::uint16_t name_bytes = std::min<std::uint16_t>(le16(sec, off + 64), 64);
            for (std::size_t i = 0; i + 1 < name_bytes; i += 2) {
                const char16_t unit = le16(sec, off + i);
                if (unit == 0) break;
                utf8::append(e.name, unit);
            }
            e.type = std::to_integer<std::uint8_t>(sec[off + 66]);
            e.start = le32(sec, off + 116);
            e.size = le32(sec, off + 120);
            if (sector_size_ == 4096) e.size |= std::uint64_t{le32(sec, off + 124)} << 32;
            entries_.push_back(std::move(e));
        }
    }
    if (entries_.empty() || entries_.front().type != 5) throw OleError("missing root directory entry");

    if (first_mini_fat <= kMaxRegSect) {
        for (const std::uint32_t s : follow(fat_, first_mini_fat)) {
            const auto sec = sector(s);
            for (std::size_t i = 0; i + 4 <= sec.size(); i += 4) mini_fat_.push_back(le32(sec, i));
        }
    }
    const DirEntry& root = entries_.front();
    if (root.size > 0 && root.start <= kMaxRegSect) mini_stream_ = read_chain(root.start, root.size);
}

std::span<const std::byte> CompoundFile::sector(std::uint32_t index) const {
    const std::uint64_t offset = (std::uint64_t{index} + 1) * sector_size_;
    if (offset >= bytes_.size()) throw OleError("sector index out of range");
    const std::size_t len = std::min<std::size_t>(sector_size_, bytes_.size() - static_cast<std::size_t>(offset));
    return bytes_.subspan(static_cast<std::size_t>(offset), len);
}

std::vector<std::uint32_t> CompoundFile::follow(const std::vector<std::uint32_t>& table, std::uint32_t start) const {
    std::vector<std::uint32_t> chain;
    std::uint32_t cur = start;
    while (cur != kEndOfChain && cur != kFreeSect) {
        if (cur >= table.size()) throw OleError("sector chain leaves the allocation table");
        if (chain.size() > table.size()) throw OleError("cyclic sector chain");
        chain.push_back(cur);
        cur = table[cur];
    }
    return chain;
}

std::string CompoundFile::read_chain(std::uint32_t start, std::uint64_t size) const {
    std::string out;
    for (const std::uint32_t s : follow(fat_, start)) {
        if (out.size() >= size) break;
        const auto sec = sector(s);
        out.append(reinterpret_cast<const char*>(sec.data()), sec.size());
    }
    if (out.size() < size) throw OleError("stream shorter than its directory size");
    out.resize(static_cast<std::size_t>(size));
    return out;
}

std::string CompoundFile::read_mini_chain(std::uint32_t start, std::uint64_t size) const {
    std::string out;
    for (const std::uint32_t s : follow(mini_fat_, start)) {
        if (out.size() >= size) break;
        const std::size_t off = std::size_t{s} * mini_sector_size_;
        if (off + mini_sector_size_ > mini_stream_.size()) throw OleError("mini sector out of range");
        out.append(mini_stream_, off, mini_sector_size_);
    }
    if (out.size() < size) throw OleError("mini stream shorter than its directory size");
    out.resize(static_cast<std::size_t>(size));
    return out;
}

std::vector<std::string> CompoundFile::stream_names() const {
    std::vector<std::string> names;
    for (const auto& e : entries_) {
        if (e.type == 2) names.push_back(e.name);
    }
    return names;
}

std::optional<std::string> CompoundFile::read_stream(std::string_view name) const {
    for (const auto& e : entries_) {
        if (e.type != 2 || !iequals(e.name, name)) continue;
        if (e.size == 0) return std::string{};
        if (e.size < mini_cutoff_) return read_mini_chain(e.start, e.size);
        return read_chain(e.start, e.size);
    }
    return std::nullopt;
}

}  // namespace aitrace::ole
