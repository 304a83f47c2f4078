#pragma once

#include "pdf/objects.hpp"

#include <string>
#include <vector>

namespace aitrace::pdf {

/// Thrown when a stream uses a filter outside the supported set.
class UnsupportedFilter : public PdfError {
public:
    using PdfError::PdfError;
};

struct DecodeResult {
    std::string data;
    std::vector<std::string> warnings;  // recoverable damage
};

inline constexpr std::size_t kMaxDecodedStream = std::size_t{256} << 20;

/// Applies the stream's /Filter chain. `params` are the resolved
/// /DecodeParms entries, one per filter (Null when absent).
DecodeResult decode_stream(std::span<const std::byte> raw, const std::vector<std::string>& filters,
                           const std::vector<const Dict*>& params);

std::string flate_decode(std::span<const std::byte> in, std::vector<std::string>& warnings);
std::string apply_predictor(std::string data, const Dict* params);
std::string ascii_hex_decode(std::span<const std::byte> in);
std::string ascii85_decode(std::span<const std::byte> in);

}  // namespace aitrace::pdf
