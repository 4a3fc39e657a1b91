#pragma once

// Ring-blinded secure-sum encryption over Z*_{p^2}.
//
// A vector x_1..x_l is encrypted element-wise as c_i = (1 + x_i p) R_i mod p^2
// with R_i = (g2^{r_{i+1}} / g2^{r_{i-1}})^{r_i}. The blinding exponents
// telescope around the ring, so the product of all c_i is 1 + p * sum(x) and
// the sum is recovered without any single x_i being exposed.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "mipp/common.hpp"
#include "mipp/rng.hpp"

namespace mipp {

using BigInt = mpz_class;

enum class ParamProfile {
  kTest,        // >= 16-bit primes; fast, insecure
  kProduction,  // >= 1024-bit primes
};

inline constexpr unsigned kMinTestBits = 16;
inline constexpr unsigned kMinProductionBits = 1024;

/// Public group parameters. All elements are canonical representatives.
///
/// `q` is one bit shorter than `p`: q | p-1 forces p > 2q, so equal lengths
/// are unattainable and p = 2q + 1 is the tightest fit.
struct GroupParams {
  BigInt p;
  BigInt q;
  BigInt g1;
  BigInt g2;
  BigInt p_squared;
  unsigned security_bits = 0;

  /// Throws kInvalidParams when any structural invariant fails.
  void validate() const;

  bool operator==(const GroupParams& other) const {
    return p == other.p && q == other.q && g1 == other.g1 && g2 == other.g2 &&
           security_bits == other.security_bits;
  }
};

/// Derives g1 = h^((p-1)/q) mod p and g2 = g1^p mod p^2 from given primes.
/// Rejects h producing g1 = 1. Does not test primality of p, q.
GroupParams params_from_primes(const BigInt& p, const BigInt& q, const BigInt& h);

/// Samples q (prime, security_bits - 1 bits) with p = 2q + 1 prime, then
/// resamples h until g1 != 1.
GroupParams gen_group_params(unsigned security_bits, ByteView seed,
                             ParamProfile profile = ParamProfile::kTest);

/// Miller-Rabin with `rounds` random bases drawn from `rng`.
bool is_probable_prime(const BigInt& n, unsigned rounds, Drbg& rng);

inline constexpr unsigned kMillerRabinRounds = 40;

std::string serialize_params(const GroupParams& params);
GroupParams parse_params(std::string_view text);

/// Short stable identifier (hex) of the canonical serialization.
std::string params_id(const GroupParams& params);

/// Cyclic exponent sequence r_1..r_l, each in [1, q-1].
class RingRandomness {
 public:
  static RingRandomness sample(const BigInt& q, std::size_t length, Drbg& rng);
  explicit RingRandomness(std::vector<BigInt> r);

  std::size_t size() const { return r_.size(); }
  /// Cyclic access: at(-1) is the last element, at(size()) the first.
  const BigInt& at(std::ptrdiff_t i) const;

  /// sum_i r_i (r_{i+1} - r_{i-1}); zero for every ring.
  BigInt telescoping_exponent() const;

 private:
  std::vector<BigInt> r_;
};

struct SumCiphertext {
  std::vector<BigInt> c;

  std::size_t size() const { return c.size(); }
  bool operator==(const SumCiphertext&) const = default;
};

/// R_i for every ring position; their product is 1 mod p^2.
std::vector<BigInt> blinding_factors(const GroupParams& params,
                                     const RingRandomness& ring);

SumCiphertext encrypt_vector(const GroupParams& params,
                             std::span<const std::uint64_t> values, Drbg& rng);
SumCiphertext encrypt_vector(const GroupParams& params,
                             std::span<const std::uint64_t> values,
                             ByteView rng_seed);

/// Product of all ciphertext elements mod p^2.
BigInt aggregate(const GroupParams& params, const SumCiphertext& ct);

/// ((prod c_i mod p^2) - 1) / p. Throws kMalformedCiphertext on a remainder.
BigInt aggregate_and_recover(const GroupParams& params, const SumCiphertext& ct);

}  // namespace mipp
