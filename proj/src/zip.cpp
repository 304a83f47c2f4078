#include "aitrace/zip.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

namespace aitrace::zip {

namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr std::uint32_t kZip64LocatorSig = 0x07064b50;
constexpr std::uint32_t kZip64EndSig = 0x06064b50;

class Cursor {
public:
    Cursor(std::span<const std::byte> data, std::size_t pos) : data_(data), pos_(pos) {}

    bool has(std::size_t n) const { return pos_ <= data_.size() && data_.size() - pos_ >= n; }

    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>(byte(0) | (byte(1) << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        const std::uint32_t v = byte(0) | (byte(1) << 8) | (byte(2) << 16) | (std::uint32_t{byte(3)} << 24);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        const std::uint64_t lo = u32();
        const std::uint64_t hi = u32();
        return lo | (hi << 32);
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }
    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (!has(n)) throw ZipError("truncated zip structure");
    }
    std::uint32_t byte(std::size_t i) const { return std::to_integer<std::uint32_t>(data_[pos_ + i]); }

    std::span<const std::byte> data_;
    std::size_t pos_;
};

std::optional<std::size_t> find_end_of_central_dir(std::span<const std::byte> data) {
    if (data.size() < 22) return std::nullopt;
    const std::size_t lowest = data.size() > 22 + 0xFFFF ? data.size() - 22 - 0xFFFF : 0;
    for (std::size_t pos = data.size() - 22;; --pos) {
        if (Cursor(data, pos).u32() == kEndOfCentralDirSig) return pos;
        if (pos == lowest) break;
    }
    return std::nullopt;
}

// Applies ZIP64 extended information to fields that overflowed.
void apply_zip64_extra(Entry& e, std::string_view extra, bool size_full, bool csize_full, bool offset_full) {
    std::size_t pos = 0;
    while (pos + 4 <= extra.size()) {
        const auto id = static_cast<std::uint16_t>(static_cast<unsigned char>(extra[pos]) |
                                                   (static_cast<unsigned char>(extra[pos + 1]) << 8));
        const auto len = static_cast<std::uint16_t>(static_cast<unsigned char>(extra[pos + 2]) |
                                                    (static_cast<unsigned char>(extra[pos + 3]) << 8));
        pos += 4;
        if (pos + len > extra.size()) return;
        if (id == 0x0001) {
            std::span<const std::byte> field(reinterpret_cast<const std::byte*>(extra.data() + pos), len);
            Cursor c(field, 0);
            if (size_full && c.has(8)) e.uncompressed_size = c.u64();
            if (csize_full && c.has(8)) e.compressed_size = c.u64();
            if (offset_full && c.has(8)) e.local_header_offset = c.u64();
            return;
        }
        pos += len;
    }
}

std::uint32_t crc_of(std::string_view data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t pos = 0;
    while (pos < data.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
        crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + pos), chunk);
        pos += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

std::string inflate_raw(std::span<const std::byte> in, std::size_t expected, std::size_t max_size) {
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ZipError("inflateInit failed");
    std::string out;
    out.resize(std::min(std::max<std::size_t>(expected, 1024), max_size));
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    std::size_t produced = 0;
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        if (produced == out.size()) {
            if (out.size() >= max_size) {
                inflateEnd(&zs);
                throw ZipError("entry exceeds size limit");
            }
            out.resize(std::min(out.size() * 2, max_size));
        }
        zs.next_out = reinterpret_cast<Bytef*>(out.data() + produced);
        zs.avail_out = static_cast<uInt>(out.size() - produced);
        rc = inflate(&zs, Z_NO_FLUSH);
        produced = out.size() - zs.avail_out;
        if (rc == Z_BUF_ERROR && zs.avail_in == 0) break;
        if (rc != Z_OK && rc != Z_STREAM_END && rc != Z_BUF_ERROR) {
            inflateEnd(&zs);
            throw ZipError("corrupt deflate data");
        }
    }
    inflateEnd(&zs);
    if (rc != Z_STREAM_END) throw ZipError("truncated deflate data");
    out.resize(produced);
    return out;
}

void put16(std::vector<std::byte>& out, std::uint16_t v) {
    out.push_back(static_cast<std::byte>(v & 0xFF));
    out.push_back(static_cast<std::byte>(v >> 8));
}
void put32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}
void put_bytes(std::vector<std::byte>& out, std::string_view s) {
    const auto* p = reinterpret_cast<const std::byte*>(s.data());
    out.insert(out.end(), p, p + s.size());
}

std::string deflate_raw(std::string_view data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw ZipError("deflateInit failed");
    }
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw ZipError("deflate failed");
    out.resize(zs.total_out);
    return out;
}

// 1980-01-01 00:00:00 in MS-DOS format.
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;

}  // namespace

bool looks_like_zip(std::span<const std::byte> bytes) {
    return bytes.size() >= 4 && Cursor(bytes, 0).u32() == kLocalHeaderSig;
}

Reader::Reader(std::span<const std::byte> archive) : archive_(archive) {
    const auto eocd = find_end_of_central_dir(archive);
    if (!eocd) throw ZipError("end of central directory not found");

    Cursor c(archive, *eocd + 4);
    c.skip(4);  // disk numbers
    c.skip(2);
    std::uint64_t count = c.u16();
    std::uint64_t cd_size = c.u32();
    std::uint64_t cd_offset = c.u32();

    if ((count == 0xFFFF || cd_offset == 0xFFFFFFFF) && *eocd >= 20) {
        Cursor loc(archive, *eocd - 20);
        if (loc.u32() == kZip64LocatorSig) {
            loc.skip(4);
            const std::uint64_t z64 = loc.u64();
            if (z64 > archive.size()) throw ZipError("bad zip64 locator");
            Cursor end(archive, static_cast<std::size_t>(z64));
            if (end.u32() != kZip64EndSig) throw ZipError("bad zip64 end record");
            end.skip(8 + 2 + 2 + 4 + 4 + 8);
            count = end.u64();
            cd_size = end.u64();
            cd_offset = end.u64();
        }
    }
    if (cd_offset > archive.size() || cd_size > archive.size() - cd_offset) {
        throw ZipError("central directory out of range");
    }

    Cursor cd(archive, static_cast<std::size_t>(cd_offset));
    entries_.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 65536)));
    for (std::uint64_t i = 0; i < count; ++i) {
        if (cd.u32() != kCentralHeaderSig) throw ZipError("bad central directory header");
        Entry e;
        cd.skip(4);  // versions
        e.flags = cd.u16();
        e.method = cd.u16();
        cd.skip(4);  // time, date
        e.crc32 = cd.u32();
        e.compressed_size = cd.u32();
        e.uncompressed_size = cd.u32();
        const std::uint16_t name_len = cd.u16();
        const std::uint16_t extra_len = cd.u16();
        const std::uint16_t comment_len = cd.u16();
        cd.skip(2 + 2 + 4);  // disk, internal attrs, external attrs
        e.local_header_offset = cd.u32();
        e.name = cd.str(name_len);
        const std::string extra = cd.str(extra_len);
        cd.skip(comment_len);
        apply_zip64_extra(e, extra, e.uncompressed_size == 0xFFFFFFFF, e.compressed_size == 0xFFFFFFFF,
                          e.local_header_offset == 0xFFFFFFFF);
        entries_.push_back(std::move(e));
    }
}

const Entry* Reader::find(std::string_view name) const {
    for (const auto& e : entries_) {
        if (e.name == name) return &e;
    }
    // Some producers write backslash separators or a leading slash.
    for (const auto& e : entries_) {
        std::string normalized = e.name;
        std::replace(normalized.begin(), normalized.end(), '\\', '/');
        if (!normalized.empty() && normalized.front() == '/') normalized.erase(0, 1);
        if (normalized == name) return &e;
    }
    return nullptr;
}

std::string Reader::read(const Entry& entry, std::size_t max_size) const {
    if (entry.encrypted()) throw ZipError("entry '" + entry.name + "' is encrypted");
    if (entry.local_header_offset > archive_.size()) throw ZipError("local header out of range");
    Cursor local(archive_, static_cast<std::size_t>(entry.local_header_offset));
    if (local.u32() != kLocalHeaderSig) throw ZipError("bad local header for '" + entry.name + "'");
    local.skip(2 + 2 + 2 + 4 + 4 + 4 + 4);
    const std::uint16_t name_len = local.u16();
    const std::uint16_t extra_len = local.u16();
    local.skip(name_len);
    local.skip(extra_len);
    const std::size_t start = local.pos();
    if (entry.compressed_size > archive_.size() - start) throw ZipError("entry data out of range");
    const auto payload = archive_.subspan(start, static_cast<std::size_t>(entry.compressed_size));

    std::string data;
    if (entry.method == 0) {
        if (payload.size() > max_size) throw ZipError("entry exceeds size limit");
        data.assign(reinterpret_cast<const char*>(payload.data()), payload.size());
    } else if (entry.method == 8) {
        data = inflate_raw(payload, static_cast<std::size_t>(std::min<std::uint64_t>(entry.uncompressed_size, max_size)),
                           max_size);
    } else {
        throw ZipError("unsupported compression method " + std::to_string(entry.method));
    }
    if (crc_of(data) != entry.crc32) throw ZipError("CRC mismatch in '" + entry.name + "'");
    return data;
}

void Writer::add(std::string name, std::string_view data, bool deflate) {
    Pending p;
    p.name = std::move(name);
    p.crc = crc_of(data);
    p.uncompressed_size = static_cast<std::uint32_t>(data.size());
    std::string payload = deflate ? deflate_raw(data) : std::string(data);
    p.method = deflate ? 8 : 0;
    p.compressed_size = static_cast<std::uint32_t>(payload.size());
    p.offset = static_cast<std::uint32_t>(out_.size());

    put32(out_, kLocalHeaderSig);
    put16(out_, 20);
    put16(out_, 0x0800);  // UTF-8 names
    put16(out_, p.method);
    put16(out_, kDosTime);
    put16(out_, kDosDate);
    put32(out_, p.crc);
    put32(out_, p.compressed_size);
    put32(out_, p.uncompressed_size);
    put16(out_, static_cast<std::uint16_t>(p.name.size()));
    put16(out_, 0);
    put_bytes(out_, p.name);
    put_bytes(out_, payload);
    entries_.push_back(std::move(p));
}

std::vector<std::byte> Writer::finish() {
    const auto cd_offset = static_cast<std::uint32_t>(out_.size());
    for (const auto& p : entries_) {
        put32(out_, kCentralHeaderSig);
        put16(out_, 20);
        put16(out_, 20);
        put16(out_, 0x0800);
        put16(out_, p.method);
        put16(out_, kDosTime);
        put16(out_, kDosDate);
        put32(out_, p.crc);
        put32(out_, p.compressed_size);
        put32(out_, p.uncompressed_size);
        put16(out_, static_cast<std::uint16_t>(p.name.size()));
        put16(out_, 0);
        put16(out_, 0);
        put16(out_, 0);
        put16(out_, 0);
        put32(out_, 0);
        put32(out_, p.offset);
        put_bytes(out_, p.name);
    }
    const auto cd_size = static_cast<std::uint32_t>(out_.size() - cd_offset);
    put32(out_, kEndOfCentralDirSig);
    put16(out_, 0);
    put16(out_, 0);
    put16(out_, static_cast<std::uint16_t>(entries_.size()));
    put16(out_, static_cast<std::uint16_t>(entries_.size()));
    put32(out_, cd_size);
    put32(out_, cd_offset);
    put16(out_, 0);
    entries_.clear();
    return std::move(out_);
}

}  // namespace aitrace::zip
