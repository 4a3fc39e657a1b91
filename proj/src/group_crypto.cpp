#include "mipp/group_crypto.hpp"

#include <array>
#include <sstream>

namespace mipp {

namespace {

constexpr std::array<unsigned, 54> kSmallPrimes = {
    3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,
    53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109,
    113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257};

std::size_t bit_length(const BigInt& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

BigInt invert(const BigInt& v, const BigInt& mod) {
  BigInt out;
  if (mpz_invert(out.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t()) == 0) {
    fail(ErrorCode::kInvalidParams, "element is not a unit");
  }
  return out;
}

// Cheap sieve for the pair (q, 2q + 1): rejects when either has a small factor.
bool survives_small_primes(const BigInt& q) {
  for (unsigned s : kSmallPrimes) {
    unsigned long rem = mpz_fdiv_ui(q.get_mpz_t(), s);
    if (rem == 0 && q != s) return false;
    // 2q + 1 == 0 (mod s)  <=>  q == (s - 1) / 2 (mod s)
    if (rem == (s - 1) / 2) return false;
  }
  return true;
}

BigInt random_with_bits(std::size_t bits, Drbg& rng) {
  BigInt top = BigInt(1) << static_cast<mp_bitcnt_t>(bits - 1);
  BigInt v = rng.uniform(top) + top;
  return v;
}

std::string dec(const BigInt& v) { return v.get_str(10); }

}  // namespace

bool is_probable_prime(const BigInt& n, unsigned rounds, Drbg& rng) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (mpz_even_p(n.get_mpz_t())) return false;
  for (unsigned s : kSmallPrimes) {
    if (n == s) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), s)) return false;
  }

  const BigInt n_minus_1 = n - 1;
  BigInt d = n_minus_1;
  unsigned s = 0;
  while (mpz_even_p(d.get_mpz_t())) {
    d >>= 1;
    ++s;
  }

  const BigInt base_span = n - 3;  // bases in [2, n-2]
  for (unsigned round = 0; round < rounds; ++round) {
    BigInt a = rng.uniform(base_span) + 2;
    BigInt x = powm(a, d, n);
    if (x == 1 || x == n_minus_1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = x * x % n;
      if (x == n_minus_1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

void GroupParams::validate() const {
  auto bad = [](const std::string& why) { fail(ErrorCode::kInvalidParams, why); };
  if (p < 5 || q < 2) bad("p, q too small");
  if (p_squared != p * p) bad("cached p^2 inconsistent");
  if ((p - 1) % q != 0) bad("q does not divide p-1");
  if (bit_length(q) + 1 != bit_length(p)) bad("q must be exactly one bit shorter than p");
  if (security_bits != bit_length(p)) bad("security_bits disagrees with p");
  if (g1 <= 1 || g1 >= p) bad("g1 out of range or trivial");
  if (powm(g1, q, p) != 1) bad("g1 does not lie in the q-order subgroup");
  if (g2 != powm(g1, p, p_squared)) bad("g2 != g1^p mod p^2");
  BigInt g;
  mpz_gcd(g.get_mpz_t(), g2.get_mpz_t(), p_squared.get_mpz_t());
  if (g != 1) bad("g2 is not a unit mod p^2");
}

GroupParams params_from_primes(const BigInt& p, const BigInt& q, const BigInt& h) {
  if (p < 5 || q < 2 || (p - 1) % q != 0) {
    fail(ErrorCode::kInvalidParams, "require primes with q | p-1");
  }
  if (h <= 1 || h >= p) fail(ErrorCode::kInvalidParams, "h must lie in (1, p)");
  GroupParams params;
  params.p = p;
  params.q = q;
  params.p_squared = p * p;
  params.g1 = powm(h, (p - 1) / q, p);
  if (params.g1 == 1) fail(ErrorCode::kInvalidParams, "h yields g1 = 1");
  params.g2 = powm(params.g1, p, params.p_squared);
  params.security_bits = static_cast<unsigned>(bit_length(p));
  params.validate();
  return params;
}

GroupParams gen_group_params(unsigned security_bits, ByteView seed,
                             ParamProfile profile) {
  const unsigned min_bits =
      profile == ParamProfile::kProduction ? kMinProductionBits : kMinTestBits;
  if (security_bits < min_bits) {
    fail(ErrorCode::kParamGeneration,
         "security_bits " + std::to_string(security_bits) + " below minimum " +
             std::to_string(min_bits));
  }

  Drbg rng(seed);
  const std::size_t q_bits = security_bits - 1;
  const std::uint64_t max_attempts =
      64ull * security_bits * security_bits + 100000;

  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    BigInt q = random_with_bits(q_bits, rng);
    if (mpz_even_p(q.get_mpz_t())) q += 1;
    if (bit_length(q) != q_bits) continue;
    if (!survives_small_primes(q)) continue;
    // One round each as a filter before the full test.
    if (!is_probable_prime(q, 1, rng)) continue;
    const BigInt p = 2 * q + 1;
    if (!is_probable_prime(p, 1, rng)) continue;
    if (!is_probable_prime(q, kMillerRabinRounds, rng) ||
        !is_probable_prime(p, kMillerRabinRounds, rng)) {
      continue;
    }

    GroupParams params;
    params.p = p;
    params.q = q;
    params.p_squared = p * p;
    params.security_bits = security_bits;
    const BigInt cofactor = (p - 1) / q;
    do {
      BigInt h = rng.uniform(p - 2) + 2;  // h in [2, p-1]
      params.g1 = powm(h, cofactor, p);
    } while (params.g1 == 1);
    params.g2 = powm(params.g1, p, params.p_squared);
    params.validate();
    return params;
  }
  fail(ErrorCode::kParamGeneration,
       "no prime pair found after " + std::to_string(max_attempts) + " attempts");
}

std::string serialize_params(const GroupParams& params) {
  std::ostringstream out;
  out << "MIPP-PARAMS-1\n"
      << "p=" << dec(params.p) << '\n'
      << "q=" << dec(params.q) << '\n'
      << "g1=" << dec(params.g1) << '\n'
      << "g2=" << dec(params.g2) << '\n'
      << "security_bits=" << params.security_bits << '\n';
  return out.str();
}

GroupParams parse_params(std::string_view text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() != 6 || lines[0] != "MIPP-PARAMS-1") {
    fail(ErrorCode::kParse, "expected MIPP-PARAMS-1 header and five fields");
  }
  static constexpr std::array<std::string_view, 5> kKeys = {"p", "q", "g1", "g2",
                                                            "security_bits"};
  std::array<BigInt, 5> values;
  for (std::size_t i = 0; i < kKeys.size(); ++i) {
    auto line = lines[i + 1];
    if (!line.starts_with(kKeys[i]) || line.size() <= kKeys[i].size() ||
        line[kKeys[i].size()] != '=') {
      fail(ErrorCode::kParse, "expected field '" + std::string(kKeys[i]) + "'");
    }
    std::string digits(line.substr(kKeys[i].size() + 1));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos ||
        values[i].set_str(digits, 10) != 0) {
      fail(ErrorCode::kParse, "field '" + std::string(kKeys[i]) + "' is not decimal");
    }
  }
  GroupParams params;
  params.p = values[0];
  params.q = values[1];
  params.g1 = values[2];
  params.g2 = values[3];
  if (!values[4].fits_uint_p()) fail(ErrorCode::kParse, "security_bits too large");
  params.security_bits = static_cast<unsigned>(values[4].get_ui());
  params.p_squared = params.p * params.p;
  params.validate();
  return params;
}

std::string params_id(const GroupParams& params) {
  return to_hex(digest(as_bytes(serialize_params(params)), 16)).substr(0, 16);
}

RingRandomness RingRandomness::sample(const BigInt& q, std::size_t length, Drbg& rng) {
  if (length < 3) {
    fail(ErrorCode::kDegenerateRing,
         "ring length " + std::to_string(length) + " < 3 leaves R_i = 1");
  }
  std::vector<BigInt> r;
  r.reserve(length);
  for (std::size_t i = 0; i < length; ++i) r.push_back(rng.uniform(q - 1) + 1);
  return RingRandomness(std::move(r));
}

RingRandomness::RingRandomness(std::vector<BigInt> r) : r_(std::move(r)) {
  if (r_.size() < 3) {
    fail(ErrorCode::kDegenerateRing, "ring length " + std::to_string(r_.size()) + " < 3");
  }
}

const BigInt& RingRandomness::at(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(r_.size());
  return r_[static_cast<std::size_t>(((i % n) + n) % n)];
}

BigInt RingRandomness::telescoping_exponent() const {
  BigInt total = 0;
  const auto n = static_cast<std::ptrdiff_t>(r_.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    total += at(i) * (at(i + 1) - at(i - 1));
  }
  return total;
}

std::vector<BigInt> blinding_factors(const GroupParams& params,
                                     const RingRandomness& ring) {
  const auto n = static_cast<std::ptrdiff_t>(ring.size());
  const BigInt& mod = params.p_squared;
  std::vector<BigInt> pub(ring.size());
  std::vector<BigInt> pub_inv(ring.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    pub[i] = powm(params.g2, ring.at(i), mod);
    pub_inv[i] = invert(pub[i], mod);
  }
  std::vector<BigInt> factors(ring.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto next = static_cast<std::size_t>((i + 1) % n);
    const auto prev = static_cast<std::size_t>((i + n - 1) % n);
    BigInt ratio = pub[next] * pub_inv[prev] % mod;
    factors[i] = powm(ratio, ring.at(i), mod);
  }
  return factors;
}

SumCiphertext encrypt_vector(const GroupParams& params,
                             std::span<const std::uint64_t> values, Drbg& rng) {
  if (values.size() < 3) {
    fail(ErrorCode::kDegenerateRing,
         "vector length " + std::to_string(values.size()) + " < 3");
  }
  BigInt total = 0;
  for (auto v : values) {
    BigInt bv(static_cast<unsigned long>(v));
    if (bv >= params.p) fail(ErrorCode::kOverflow, "value >= p");
    total += bv;
  }
  if (total >= params.p) fail(ErrorCode::kOverflow, "sum of values >= p");

  const auto ring = RingRandomness::sample(params.q, values.size(), rng);
  const auto factors = blinding_factors(params, ring);
  SumCiphertext ct;
  ct.c.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    BigInt m = params.p * static_cast<unsigned long>(values[i]) + 1;
    ct.c[i] = m * factors[i] % params.p_squared;
  }
  return ct;
}

SumCiphertext encrypt_vector(const GroupParams& params,
                             std::span<const std::uint64_t> values,
                             ByteView rng_seed) {
  Drbg rng(rng_seed);
  return encrypt_vector(params, values, rng);
}

BigInt aggregate(const GroupParams& params, const SumCiphertext& ct) {
  if (ct.size() < 3) fail(ErrorCode::kMalformedCiphertext, "fewer than 3 elements");
  BigInt product = 1;
  for (const auto& c : ct.c) {
    if (c <= 0 || c >= params.p_squared) {
      fail(ErrorCode::kMalformedCiphertext, "element outside [1, p^2)");
    }
    product = product * c % params.p_squared;
  }
  return product;
}

BigInt aggregate_and_recover(const GroupParams& params, const SumCiphertext& ct) {
  const BigInt shifted = aggregate(params, ct) - 1;
  if (shifted < 0 || !mpz_divisible_p(shifted.get_mpz_t(), params.p.get_mpz_t())) {
    fail(ErrorCode::kMalformedCiphertext,
         "aggregate - 1 not divisible by p (wrong params or corrupted ciphertext)");
  }
  BigInt sum;
  mpz_divexact(sum.get_mpz_t(), shifted.get_mpz_t(), params.p.get_mpz_t());
  return sum;
}

}  // namespace mipp
