#pragma once

#include <cstdint>
#include <span>

#include "mipp/ehd.hpp"

namespace mipp {

/// Sum and sum of squares of one l-dimensional vector.
struct SumPair {
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;
  std::size_t l = 0;

  bool operator==(const SumPair&) const = default;
};

SumPair sums_of(std::span<const std::uint32_t> x);
inline SumPair sums_of(const FeatureVector& f) { return sums_of(f.a); }

/// True when s2 >= s1^2 / l (Cauchy-Schwarz), which every genuine pair meets.
bool plausible(const SumPair& s);

double euc_dis(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y);
double euc_dis(const FeatureVector& x, const FeatureVector& y);

/// sqrt(sum x^2 + sum y^2 - 2 (sum x)(sum y) / u). Not a metric: the
/// self-distance is zero only for constant vectors.
double new_dis(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y);
double new_dis(const FeatureVector& x, const FeatureVector& y);

/// new_dis evaluated from the four sums alone.
double sim_from_sums(const SumPair& a, const SumPair& b);

/// l * Sim^2 = l (a.s2 + b.s2) - 2 a.s1 b.s1, exact. Ranking uses this value so
/// that ties are decided on integers rather than rounded square roots.
__int128 scaled_radicand(const SumPair& a, const SumPair& b);

}  // namespace mipp
