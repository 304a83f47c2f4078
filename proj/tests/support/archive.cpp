#include "support/archive.hpp"

#include <zlib.h>

#include <array>
#include <stdexcept>

namespace fixture {

namespace {

void put16(std::string& s, unsigned v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put32(std::string& s, std::uint32_t v) {
    put16(s, v & 0xFFFF);
    put16(s, v >> 16);
}

unsigned get16(std::string_view s, std::size_t at) {
    if (at + 2 > s.size()) throw std::runtime_error("zip: truncated");
    return static_cast<unsigned char>(s[at]) | (static_cast<unsigned char>(s[at + 1]) << 8);
}

std::uint32_t get32(std::string_view s, std::size_t at) { return get16(s, at) | (std::uint32_t{get16(s, at + 2)} << 16); }

std::string inflate_raw(std::string_view in, std::size_t expected) {
    std::string out(expected, '\0');
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw std::runtime_error("zip: inflateInit2");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected) throw std::runtime_error("zip: inflate failed");
    return out;
}

}  // namespace

std::uint32_t crc32(std::string_view data) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (const char ch : data) {
        crc ^= static_cast<unsigned char>(ch);
        for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
    }
    return ~crc;
}

void StoredZip::add(std::string name, std::string data) { entries_.emplace_back(std::move(name), std::move(data)); }

std::string StoredZip::bytes() const {
    std::string out, central;
    for (const auto& [name, data] : entries_) {
        const std::uint32_t offset = static_cast<std::uint32_t>(out.size());
        const std::uint32_t crc = crc32(data);
        // local header
        put32(out, 0x04034b50);
        put16(out, 20);
        put16(out, 0);
        put16(out, 0);  // stored
        put16(out, 0x6000);  // 12:00
        put16(out, 0x5721);  // 2023-09-01
        put32(out, crc);
        put32(out, static_cast<std::uint32_t>(data.size()));
        put32(out, static_cast<std::uint32_t>(data.size()));
        put16(out, static_cast<unsigned>(name.size()));
        put16(out, 0);
        out += name;
        out += data;
        // central entry
        put32(central, 0x02014b50);
        put16(central, 20);
        put16(central, 20);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0x6000);
        put16(central, 0x5721);
        put32(central, crc);
        put32(central, static_cast<std::uint32_t>(data.size()));
        put32(central, static_cast<std::uint32_t>(data.size()));
        put16(central, static_cast<unsigned>(name.size()));
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0);
        put32(central, offset);
        central += name;
    }
    const std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
    out += central;
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<unsigned>(entries_.size()));
    put16(out, static_cast<unsigned>(entries_.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, cd_offset);
    put16(out, 0);
    return out;
}

std::map<std::string, std::string> read_zip(std::string_view archive) {
    std::map<std::string, std::string> files;
    std::size_t pos = 0;
    while (pos + 4 <= archive.size() && get32(archive, pos) == 0x04034b50) {
        const unsigned flags = get16(archive, pos + 6);
        const unsigned method = get16(archive, pos + 8);
        const std::uint32_t crc = get32(archive, pos + 14);
        const std::uint32_t csize = get32(archive, pos + 18);
        const std::uint32_t usize = get32(archive, pos + 22);
        const unsigned name_len = get16(archive, pos + 26);
        const unsigned extra_len = get16(archive, pos + 28);
        if (flags & 0x0008) throw std::runtime_error("zip: data descriptors not supported by the test reader");
        const std::size_t data_at = pos + 30 + name_len + extra_len;
        if (data_at + csize > archive.size()) throw std::runtime_error("zip: entry past end");
        const std::string name(archive.substr(pos + 30, name_len));
        const std::string_view raw = archive.substr(data_at, csize);
        std::string data;
        if (method == 0) {
            data = std::string(raw);
        } else if (method == 8) {
            data = inflate_raw(raw, usize);
        } else {
            throw std::runtime_error("zip: unsupported method");
        }
        if (crc32(data) != crc) throw std::runtime_error("zip: CRC mismatch in " + name);
        files[name] = std::move(data);
        pos = data_at + csize;
    }
    if (files.empty()) throw std::runtime_error("zip: no local headers");
    return files;
}

}  // namespace fixture
