#pragma once

#include <cstdint>
#include <vector>

#include "mipp/common.hpp"

namespace mipp {

/// 8-bit grayscale image, row-major.
struct GrayImage {
  std::uint32_t width = 0;   // N
  std::uint32_t height = 0;  // M
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::uint32_t width, std::uint32_t height, std::uint8_t fill = 0);
  GrayImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> pixels);

  std::size_t pixel_count() const { return pixels.size(); }
  std::uint8_t at(std::uint32_t row, std::uint32_t col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t& at(std::uint32_t row, std::uint32_t col) {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }

  bool operator==(const GrayImage&) const = default;
};

/// Secret byte stream XORed over image pixels.
struct KeyStream {
  Bytes bytes;

  std::size_t size() const { return bytes.size(); }
  bool operator==(const KeyStream&) const = default;
};

/// Deterministic under (security_k, seed). required_len must be >= 1.
KeyStream keygen(unsigned security_k, std::size_t required_len, ByteView seed);

/// EW[j][k] = SK[j*N + k] ^ W[j][k]. The stream is always indexed from 0.
GrayImage image_enc(const KeyStream& sk, const GrayImage& w);
GrayImage image_dec(const KeyStream& sk, const GrayImage& ew);

}  // namespace mipp
