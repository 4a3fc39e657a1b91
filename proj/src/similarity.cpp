#include "mipp/similarity.hpp"

#include <cmath>
#include <string>

#include "mipp/kernels.hpp"

namespace mipp {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorCode::kLengthMismatch,
         "lengths " + std::to_string(a) + " and " + std::to_string(b));
  }
}

}  // namespace

SumPair sums_of(std::span<const std::uint32_t> x) {
  SumPair s;
  s.l = x.size();
  kernels::active().sum_and_squares(x.data(), x.size(), &s.s1, &s.s2);
  return s;
}

bool plausible(const SumPair& s) {
  if (s.l == 0) return s.s1 == 0 && s.s2 == 0;
  return static_cast<unsigned __int128>(s.s2) * s.l >=
         static_cast<unsigned __int128>(s.s1) * s.s1;
}

double euc_dis(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y) {
  require_same_length(x.size(), y.size());
  const std::uint64_t sq = kernels::active().squared_distance(x.data(), y.data(), x.size());
  return std::sqrt(static_cast<double>(sq));
}

double euc_dis(const FeatureVector& x, const FeatureVector& y) { return euc_dis(x.a, y.a); }

double new_dis(std::span<const std::uint32_t> x, std::span<const std::uint32_t> y) {
  require_same_length(x.size(), y.size());
  if (x.empty()) return 0.0;
  return sim_from_sums(sums_of(x), sums_of(y));
}

double new_dis(const FeatureVector& x, const FeatureVector& y) { return new_dis(x.a, y.a); }

__int128 scaled_radicand(const SumPair& a, const SumPair& b) {
  if (a.l != b.l) {
    fail(ErrorCode::kLengthMismatch,
         "dimensions " + std::to_string(a.l) + " and " + std::to_string(b.l));
  }
  const auto l = static_cast<__int128>(a.l);
  return l * (static_cast<__int128>(a.s2) + b.s2) -
         2 * static_cast<__int128>(a.s1) * static_cast<__int128>(b.s1);
}

double sim_from_sums(const SumPair& a, const SumPair& b) {
  const __int128 scaled = scaled_radicand(a, b);
  if (a.l == 0) return 0.0;
  if (scaled < 0) {
    fail(ErrorCode::kCorruptedSums, "negative radicand");
  }
  return std::sqrt(static_cast<double>(scaled) / static_cast<double>(a.l));
}

}  // namespace mipp
