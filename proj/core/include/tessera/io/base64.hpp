#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tessera::io {

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Encode a double array as base64 of little-endian IEEE-754 bytes.
std::string encode_f64_le(const double* values, std::size_t count);
std::vector<double> decode_f64_le(const std::string& text);

}  // namespace tessera::io
