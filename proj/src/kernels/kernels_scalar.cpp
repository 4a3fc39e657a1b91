#include "mipp/kernels.hpp"

namespace mipp::kernels::scalar {

void xor_bytes(const std::uint8_t* in, const std::uint8_t* key, std::uint8_t* out,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] ^ key[i];
}

void classify_blocks(const std::uint8_t* row0, const std::uint8_t* row1,
                     std::size_t blocks, std::uint32_t threshold_sq,
                     std::uint8_t* out) {
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::int32_t a0 = row0[2 * b];
    const std::int32_t a1 = row0[2 * b + 1];
    const std::int32_t a2 = row1[2 * b];
    const std::int32_t a3 = row1[2 * b + 1];

    // Squared responses; the diagonal filters carry a sqrt(2) weight and the
    // non-directional filter a weight of 2.
    const std::int32_t v = a0 - a1 + a2 - a3;
    const std::int32_t h = a0 + a1 - a2 - a3;
    const std::int32_t d45 = a0 - a3;
    const std::int32_t d135 = a1 - a2;
    const std::int32_t nd = a0 - a1 - a2 + a3;
    const std::int32_t responses[5] = {v * v, h * h, 2 * d45 * d45, 2 * d135 * d135,
                                       4 * nd * nd};

    std::int32_t best = responses[0];
    std::uint8_t cls = kVertical;
    for (std::uint8_t k = 1; k < 5; ++k) {
      if (responses[k] > best) {
        best = responses[k];
        cls = static_cast<std::uint8_t>(k + 1);
      }
    }
    out[b] = best > static_cast<std::int32_t>(threshold_sq) ? cls : static_cast<std::uint8_t>(kNoEdge);
  }
}

std::uint64_t squared_distance(const std::uint32_t* a, const std::uint32_t* b,
                               std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t d = static_cast<std::int64_t>(a[i]) - b[i];
    total += static_cast<std::uint64_t>(d * d);
  }
  return total;
}

void sum_and_squares(const std::uint32_t* a, std::size_t n, std::uint64_t* sum,
                     std::uint64_t* sum_sq) {
  std::uint64_t s = 0;
  std::uint64_t s2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += a[i];
    s2 += static_cast<std::uint64_t>(a[i]) * a[i];
  }
  *sum = s;
  *sum_sq = s2;
}

}  // namespace mipp::kernels::scalar
