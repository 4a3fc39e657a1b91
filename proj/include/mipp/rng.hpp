#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include <gmpxx.h>

#include "mipp/common.hpp"

namespace mipp {

/// Deterministic byte generator: the seed is hashed to a 256-bit key and the
/// output is the ChaCha20 keystream under that key, one nonce per refill.
///
/// Reproducible across runs for a given seed. Production key material must be
/// seeded from `os_entropy`.
class Drbg {
 public:
  explicit Drbg(ByteView seed);
  explicit Drbg(std::string_view seed) : Drbg(as_bytes(seed)) {}
  Drbg(std::uint64_t seed, std::string_view label);

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  std::uint64_t next_u64();

  /// Uniform integer in [0, bound), rejection-sampled. bound must be positive.
  std::uint64_t uniform(std::uint64_t bound);
  mpz_class uniform(const mpz_class& bound);

  /// Child generator whose stream is independent of this one's.
  Drbg fork(std::string_view label);

 private:
  void refill();

  std::array<std::uint8_t, 32> key_{};
  std::uint64_t block_counter_ = 0;
  std::array<std::uint8_t, 512> buffer_{};
  std::size_t pos_ = buffer_.size();
};

Bytes os_entropy(std::size_t n);

/// BLAKE2b digest of `data`, `out_len` bytes (16..64).
Bytes digest(ByteView data, std::size_t out_len = 32);

}  // namespace mipp
