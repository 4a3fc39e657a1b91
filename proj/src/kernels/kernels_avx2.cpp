// Compiled with -mavx2; only reached after a CPUID check.
#include <immintrin.h>

#include <cstring>

#include "mipp/kernels.hpp"

namespace mipp::kernels::avx2 {

void xor_bytes(const std::uint8_t* in, const std::uint8_t* key, std::uint8_t* out,
               std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i));
    __m256i k = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(key + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_xor_si256(x, k));
  }
  scalar::xor_bytes(in + i, key + i, out + i, n - i);
}

void classify_blocks(const std::uint8_t* row0, const std::uint8_t* row1,
                     std::size_t blocks, std::uint32_t threshold_sq,
                     std::uint8_t* out) {
  const __m128i split_even_odd =
      _mm_setr_epi8(0, 2, 4, 6, 8, 10, 12, 14, 1, 3, 5, 7, 9, 11, 13, 15);
  const __m256i thr = _mm256_set1_epi32(static_cast<int>(threshold_sq));
  const __m256i two = _mm256_set1_epi32(2);
  const __m256i four = _mm256_set1_epi32(4);

  std::size_t b = 0;
  for (; b + 8 <= blocks; b += 8) {
    __m128i top = _mm_shuffle_epi8(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(row0 + 2 * b)), split_even_odd);
    __m128i bot = _mm_shuffle_epi8(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(row1 + 2 * b)), split_even_odd);
    const __m256i a0 = _mm256_cvtepu8_epi32(top);
    const __m256i a1 = _mm256_cvtepu8_epi32(_mm_srli_si128(top, 8));
    const __m256i a2 = _mm256_cvtepu8_epi32(bot);
    const __m256i a3 = _mm256_cvtepu8_epi32(_mm_srli_si128(bot, 8));

    const __m256i v = _mm256_sub_epi32(_mm256_add_epi32(a0, a2), _mm256_add_epi32(a1, a3));
    const __m256i h = _mm256_sub_epi32(_mm256_add_epi32(a0, a1), _mm256_add_epi32(a2, a3));
    const __m256i d45 = _mm256_sub_epi32(a0, a3);
    const __m256i d135 = _mm256_sub_epi32(a1, a2);
    const __m256i nd = _mm256_sub_epi32(_mm256_add_epi32(a0, a3), _mm256_add_epi32(a1, a2));

    const __m256i responses[5] = {
        _mm256_mullo_epi32(v, v),
        _mm256_mullo_epi32(h, h),
        _mm256_mullo_epi32(two, _mm256_mullo_epi32(d45, d45)),
        _mm256_mullo_epi32(two, _mm256_mullo_epi32(d135, d135)),
        _mm256_mullo_epi32(four, _mm256_mullo_epi32(nd, nd)),
    };

    __m256i best = responses[0];
    __m256i cls = _mm256_set1_epi32(kVertical);
    for (int k = 1; k < 5; ++k) {
      const __m256i gt = _mm256_cmpgt_epi32(responses[k], best);
      best = _mm256_max_epi32(best, responses[k]);
      cls = _mm256_blendv_epi8(cls, _mm256_set1_epi32(k + 1), gt);
    }
    cls = _mm256_and_si256(cls, _mm256_cmpgt_epi32(best, thr));

    const __m256i packed16 = _mm256_packs_epi32(cls, cls);
    const __m256i packed8 = _mm256_packus_epi16(packed16, packed16);
    const std::uint32_t lo = static_cast<std::uint32_t>(
        _mm_cvtsi128_si32(_mm256_castsi256_si128(packed8)));
    const std::uint32_t hi = static_cast<std::uint32_t>(
        _mm_cvtsi128_si32(_mm256_extracti128_si256(packed8, 1)));
    std::memcpy(out + b, &lo, 4);
    std::memcpy(out + b + 4, &hi, 4);
  }
  scalar::classify_blocks(row0 + 2 * b, row1 + 2 * b, blocks - b, threshold_sq, out + b);
}

namespace {
std::uint64_t horizontal_sum(__m256i acc) {
  __m128i s = _mm_add_epi64(_mm256_castsi256_si128(acc), _mm256_extracti128_si256(acc, 1));
  return static_cast<std::uint64_t>(_mm_cvtsi128_si64(s)) +
         static_cast<std::uint64_t>(_mm_extract_epi64(s, 1));
}
}  // namespace

std::uint64_t squared_distance(const std::uint32_t* a, const std::uint32_t* b,
                               std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i d = _mm256_sub_epi32(x, y);
    const __m256i d_odd = _mm256_srli_epi64(d, 32);
    acc = _mm256_add_epi64(acc, _mm256_mul_epi32(d, d));
    acc = _mm256_add_epi64(acc, _mm256_mul_epi32(d_odd, d_odd));
  }
  return horizontal_sum(acc) + scalar::squared_distance(a + i, b + i, n - i);
}

void sum_and_squares(const std::uint32_t* a, std::size_t n, std::uint64_t* sum,
                     std::uint64_t* sum_sq) {
  const __m256i low_mask = _mm256_set1_epi64x(0xffffffff);
  __m256i acc = _mm256_setzero_si256();
  __m256i acc_sq = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i x_odd = _mm256_srli_epi64(x, 32);
    acc = _mm256_add_epi64(acc, _mm256_and_si256(x, low_mask));
    acc = _mm256_add_epi64(acc, x_odd);
    acc_sq = _mm256_add_epi64(acc_sq, _mm256_mul_epu32(x, x));
    acc_sq = _mm256_add_epi64(acc_sq, _mm256_mul_epu32(x_odd, x_odd));
  }
  std::uint64_t tail = 0;
  std::uint64_t tail_sq = 0;
  scalar::sum_and_squares(a + i, n - i, &tail, &tail_sq);
  *sum = horizontal_sum(acc) + tail;
  *sum_sq = horizontal_sum(acc_sq) + tail_sq;
}

}  // namespace mipp::kernels::avx2
