#include "pdf/filters.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdlib>

namespace aitrace::pdf {

namespace {

std::int64_t int_param(const Dict* params, std::string_view key, std::int64_t fallback) {
    if (!params) return fallback;
    const Object* v = params->get(key);
    if (!v) return fallback;
    return v->integer().value_or(fallback);
}

std::span<const std::byte> as_span(const std::string& s) {
    return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

}  // namespace

std::string flate_decode(std::span<const std::byte> in, std::vector<std::string>& warnings) {
    z_stream zs{};
    // 15 + 32: accept zlib or gzip headers.
    if (inflateInit2(&zs, 15 + 32) != Z_OK) throw PdfError("inflateInit failed");
    std::string out;
    out.resize(std::max<std::size_t>(in.size() * 4, 4096));
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    std::size_t produced = 0;
    int rc = Z_OK;
    while (true) {
        if (produced == out.size()) {
            if (out.size() >= kMaxDecodedStream) {
                warnings.push_back("stream exceeds decode limit; truncated");
                break;
            }
            out.resize(std::min(out.size() * 2, kMaxDecodedStream));
        }
        zs.next_out = reinterpret_cast<Bytef*>(out.data() + produced);
        zs.avail_out = static_cast<uInt>(out.size() - produced);
        rc = inflate(&zs, Z_NO_FLUSH);
        produced = out.size() - zs.avail_out;
        if (rc == Z_STREAM_END) break;
        if (rc == Z_OK) continue;
        if (rc == Z_BUF_ERROR && zs.avail_out > 0) {
            // Input exhausted before the end marker; keep what was produced.
            warnings.push_back("truncated compressed stream");
            break;
        }
        if (rc != Z_BUF_ERROR) {
            if (produced == 0) {
                inflateEnd(&zs);
                throw PdfError("corrupt compressed stream");
            }
            warnings.push_back("damaged compressed stream; partial data kept");
            break;
        }
    }
    inflateEnd(&zs);
    out.resize(produced);
    return out;
}

std::string apply_predictor(std::string data, const Dict* params) {
    const std::int64_t predictor = int_param(params, "Predictor", 1);
    if (predictor <= 1) return data;
    const std::int64_t colors = std::clamp<std::int64_t>(int_param(params, "Colors", 1), 1, 32);
    const std::int64_t bpc = std::clamp<std::int64_t>(int_param(params, "BitsPerComponent", 8), 1, 16);
    const std::int64_t columns = std::clamp<std::int64_t>(int_param(params, "Columns", 1), 1, 1 << 20);
    const auto bpp = static_cast<std::size_t>(std::max<std::int64_t>(1, (colors * bpc + 7) / 8));
    const auto row_len = static_cast<std::size_t>((colors * bpc * columns + 7) / 8);

    if (predictor == 2) {
        if (bpc != 8) throw UnsupportedFilter("TIFF predictor with BitsPerComponent != 8");
        for (std::size_t row = 0; row + row_len <= data.size(); row += row_len) {
            for (std::size_t i = bpp; i < row_len; ++i) {
                data[row + i] = static_cast<char>(data[row + i] + data[row + i - bpp]);
            }
        }
        return data;
    }

    // PNG predictors: each row is prefixed with its filter type byte.
    std::string out;
    out.reserve(data.size());
    std::string prev(row_len, '\0');
    std::string cur(row_len, '\0');
    std::size_t pos = 0;
    while (pos < data.size()) {
        const auto type = static_cast<unsigned char>(data[pos++]);
        const std::size_t n = std::min(row_len, data.size() - pos);
        std::fill(cur.begin(), cur.end(), '\0');
        std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(pos), n, cur.begin());
        pos += n;
        for (std::size_t i = 0; i < row_len; ++i) {
            const auto left = i >= bpp ? static_cast<unsigned char>(cur[i - bpp]) : 0u;
            const auto up = static_cast<unsigned char>(prev[i]);
            const auto up_left = i >= bpp ? static_cast<unsigned char>(prev[i - bpp]) : 0u;
            auto x = static_cast<unsigned char>(cur[i]);
            switch (type) {
                case 0: break;
                case 1: x = static_cast<unsigned char>(x + left); break;
                case 2: x = static_cast<unsigned char>(x + up); break;
                case 3: x = static_cast<unsigned char>(x + ((left + up) / 2)); break;
                case 4: {
                    const int p = static_cast<int>(left) + static_cast<int>(up) - static_cast<int>(up_left);
                    const int pa = std::abs(p - static_cast<int>(left));
                    const int pb = std::abs(p - static_cast<int>(up));
                    const int pc = std::abs(p - static_cast<int>(up_left));
                    const unsigned pred = (pa <= pb && pa <= pc) ? left : (pb <= pc ? up : up_left);
                    x = static_cast<unsigned char>(x + pred);
                    break;
                }
                default: throw PdfError("invalid PNG predictor row type");
            }
            cur[i] = static_cast<char>(x);
        }
        out.append(cur, 0, n);
        std::swap(prev, cur);
    }
    return out;
}

std::string ascii_hex_decode(std::span<const std::byte> in) {
    std::string out;
    int pending = -1;
    for (const std::byte b : in) {
        const auto c = std::to_integer<unsigned char>(b);
        if (c == '>') break;
        if (is_pdf_space(c)) continue;
        int v = -1;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        if (v < 0) throw PdfError("invalid ASCIIHex data");
        if (pending < 0) {
            pending = v;
        } else {
            out.push_back(static_cast<char>((pending << 4) | v));
            pending = -1;
        }
    }
    if (pending >= 0) out.push_back(static_cast<char>(pending << 4));
    return out;
}

std::string ascii85_decode(std::span<const std::byte> in) {
    std::string out;
    std::uint32_t tuple = 0;
    int count = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const auto c = std::to_integer<unsigned char>(in[i]);
        if (is_pdf_space(c)) continue;
        if (c == '~') break;
        if (c == 'z' && count == 0) {
            out.append(4, '\0');
            continue;
        }
        if (c < '!' || c > 'u') throw PdfError("invalid ASCII85 data");
        tuple = tuple * 85 + static_cast<std::uint32_t>(c - '!');
        if (++count == 5) {
            for (int k = 3; k >= 0; --k) out.push_back(static_cast<char>((tuple >> (8 * k)) & 0xFF));
            tuple = 0;
            count = 0;
        }
    }
    if (count > 1) {
        for (int k = count; k < 5; ++k) tuple = tuple * 85 + 84;
        for (int k = 0; k < count - 1; ++k) out.push_back(static_cast<char>((tuple >> (8 * (3 - k))) & 0xFF));
    }
    return out;
}

DecodeResult decode_stream(std::span<const std::byte> raw, const std::vector<std::string>& filters,
                           const std::vector<const Dict*>& params) {
    DecodeResult result;
    std::string current(reinterpret_cast<const char*>(raw.data()), raw.size());
    for (std::size_t i = 0; i < filters.size(); ++i) {
        const std::string& f = filters[i];
        const Dict* p = i < params.size() ? params[i] : nullptr;
        if (f == "FlateDecode" || f == "Fl") {
            current = apply_predictor(flate_decode(as_span(current), result.warnings), p);
        } else if (f == "ASCIIHexDecode" || f == "AHx") {
            current = ascii_hex_decode(as_span(current));
        } else if (f == "ASCII85Decode" || f == "A85") {
            current = ascii85_decode(as_span(current));
        } else {
            throw UnsupportedFilter("unsupported stream filter /" + f);
        }
    }
    result.data = std::move(current);
    return result;
}

}  // namespace aitrace::pdf
