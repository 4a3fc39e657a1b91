#include "mipp/rng.hpp"

#include <cstring>

#include <sodium.h>

namespace mipp {

namespace {

void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) throw std::runtime_error("libsodium initialization failed");
}

}  // namespace

Drbg::Drbg(ByteView seed) {
  ensure_sodium();
  crypto_generichash(key_.data(), key_.size(), seed.data(), seed.size(),
                     nullptr, 0);
}

Drbg::Drbg(std::uint64_t seed, std::string_view label) {
  ensure_sodium();
  Bytes material(8 + label.size());
  for (int i = 0; i < 8; ++i) material[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  std::memcpy(material.data() + 8, label.data(), label.size());
  crypto_generichash(key_.data(), key_.size(), material.data(), material.size(),
                     nullptr, 0);
}

void Drbg::refill() {
  std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
  for (std::size_t i = 0; i < nonce.size(); ++i) {
    nonce[i] = static_cast<std::uint8_t>(block_counter_ >> (8 * i));
  }
  ++block_counter_;
  crypto_stream_chacha20(buffer_.data(), buffer_.size(), nonce.data(), key_.data());
  pos_ = 0;
}

void Drbg::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buffer_.size()) refill();
    std::size_t n = std::min(out.size() - done, buffer_.size() - pos_);
    std::memcpy(out.data() + done, buffer_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

Bytes Drbg::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Drbg::next_u64() {
  std::array<std::uint8_t, 8> raw;
  fill(raw);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = v << 8 | raw[i];
  return v;
}

std::uint64_t Drbg::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform: zero bound");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  while (true) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

mpz_class Drbg::uniform(const mpz_class& bound) {
  if (bound <= 0) throw std::invalid_argument("uniform: non-positive bound");
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t nbytes = (bits + 7) / 8;
  const unsigned excess = static_cast<unsigned>(nbytes * 8 - bits);
  Bytes raw(nbytes);
  mpz_class v;
  while (true) {
    fill(raw);
    raw[0] &= static_cast<std::uint8_t>(0xffu >> excess);
    mpz_import(v.get_mpz_t(), raw.size(), 1, 1, 1, 0, raw.data());
    if (v < bound) return v;
  }
}

Drbg Drbg::fork(std::string_view label) {
  Bytes material = bytes(32);
  material.insert(material.end(), label.begin(), label.end());
  return Drbg(ByteView(material));
}

Bytes os_entropy(std::size_t n) {
  ensure_sodium();
  Bytes out(n);
  randombytes_buf(out.data(), out.size());
  return out;
}

Bytes digest(ByteView data, std::size_t out_len) {
  ensure_sodium();
  if (out_len < crypto_generichash_BYTES_MIN || out_len > crypto_generichash_BYTES_MAX) {
    throw std::invalid_argument("digest: unsupported output length");
  }
  Bytes out(out_len);
  crypto_generichash(out.data(), out.size(), data.data(), data.size(), nullptr, 0);
  return out;
}

}  // namespace mipp
