#pragma once

// Independent reference arithmetic for small moduli (p^2 < 2^63), written
// without GMP so that tests do not check the library against itself.

#include <cstdint>
#include <span>
#include <vector>

#include "mipp/group_crypto.hpp"

namespace oracle {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline u64 inverse(u64 a, u64 m) {
  __int128 t = 0, new_t = 1, r = m, new_r = a % m;
  while (new_r != 0) {
    const __int128 q = r / new_r;
    t -= q * new_t;
    std::swap(t, new_t);
    r -= q * new_r;
    std::swap(r, new_r);
  }
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

inline u64 to_u64(const mpz_class& v) { return static_cast<u64>(v.get_ui()); }

// c_i = (1 + x_i p) * (g2^{r_{i+1}} * g2^{-r_{i-1}})^{r_i} mod p^2
inline std::vector<u64> encrypt(u64 p, u64 g2, std::span<const u64> x, std::span<const u64> r) {
  const u64 n = p * p;
  const std::size_t l = x.size();
  std::vector<u64> c(l);
  for (std::size_t i = 0; i < l; ++i) {
    const u64 next = powmod(g2, r[(i + 1) % l], n);
    const u64 prev = powmod(g2, r[(i + l - 1) % l], n);
    const u64 blind = powmod(mulmod(next, inverse(prev, n), n), r[i], n);
    c[i] = mulmod((1 + mulmod(x[i], p, n)) % n, blind, n);
  }
  return c;
}

inline u64 recover(u64 p, std::span<const u64> c) {
  const u64 n = p * p;
  u64 prod = 1;
  for (u64 v : c) prod = mulmod(prod, v, n);
  return (prod + n - 1) % n / p;
}

}  // namespace oracle
