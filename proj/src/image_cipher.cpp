#include "mipp/image_cipher.hpp"

#include <string>

#include "mipp/kernels.hpp"
#include "mipp/rng.hpp"

namespace mipp {

GrayImage::GrayImage(std::uint32_t w, std::uint32_t h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

GrayImage::GrayImage(std::uint32_t w, std::uint32_t h, std::vector<std::uint8_t> px)
    : width(w), height(h), pixels(std::move(px)) {
  if (pixels.size() != static_cast<std::size_t>(w) * h) {
    fail(ErrorCode::kInvalidImage, "pixel count != width * height");
  }
}

KeyStream keygen(unsigned security_k, std::size_t required_len, ByteView seed) {
  if (required_len == 0) fail(ErrorCode::kInvalidLength, "keystream length 0");
  Bytes material(seed.begin(), seed.end());
  const std::string domain = "mipp/keygen/k=" + std::to_string(security_k);
  material.insert(material.end(), domain.begin(), domain.end());
  Drbg rng{ByteView(material)};
  return KeyStream{rng.bytes(required_len)};
}

namespace {

GrayImage apply_keystream(const KeyStream& sk, const GrayImage& in) {
  if (in.pixels.size() != static_cast<std::size_t>(in.width) * in.height) {
    fail(ErrorCode::kInvalidImage, "pixel count != width * height");
  }
  if (sk.size() < in.pixel_count()) {
    fail(ErrorCode::kKeyLength, "keystream has " + std::to_string(sk.size()) +
                                    " bytes, image needs " +
                                    std::to_string(in.pixel_count()));
  }
  GrayImage out;
  out.width = in.width;
  out.height = in.height;
  out.pixels.resize(in.pixel_count());
  kernels::active().xor_bytes(in.pixels.data(), sk.bytes.data(), out.pixels.data(),
                              in.pixel_count());
  return out;
}

}  // namespace

GrayImage image_enc(const KeyStream& sk, const GrayImage& w) {
  return apply_keystream(sk, w);
}

GrayImage image_dec(const KeyStream& sk, const GrayImage& ew) {
  return apply_keystream(sk, ew);
}

}  // namespace mipp
