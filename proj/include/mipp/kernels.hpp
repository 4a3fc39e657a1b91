#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The variant is chosen once at startup from CPUID; every variant must agree
// with the scalar reference bit-for-bit.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace mipp::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view name(Isa isa);

// Edge classes for one 2x2 macro-block. Values 1..5 index the five filters.
enum EdgeClass : std::uint8_t {
  kNoEdge = 0,
  kVertical = 1,
  kHorizontal = 2,
  kDiagonal45 = 3,
  kDiagonal135 = 4,
  kNonDirectional = 5,
};

struct KernelTable {
  Isa isa;

  // out[i] = in[i] ^ key[i]
  void (*xor_bytes)(const std::uint8_t* in, const std::uint8_t* key,
                    std::uint8_t* out, std::size_t n);

  // Classifies `blocks` consecutive 2x2 blocks whose top-left pixels are
  // row0[2b], bottom-left row1[2b]. Squared filter responses are compared
  // against `threshold_sq`; first maximum wins on ties.
  void (*classify_blocks)(const std::uint8_t* row0, const std::uint8_t* row1,
                          std::size_t blocks, std::uint32_t threshold_sq,
                          std::uint8_t* out);

  // sum (a[i] - b[i])^2 over 32-bit entries; entries must be < 2^31 and the
  // result must fit in 64 bits.
  std::uint64_t (*squared_distance)(const std::uint32_t* a, const std::uint32_t* b,
                                    std::size_t n);

  // sum a[i] and sum a[i]^2 (entries < 2^31).
  void (*sum_and_squares)(const std::uint32_t* a, std::size_t n,
                          std::uint64_t* sum, std::uint64_t* sum_sq);
};

bool supported(Isa isa);
const KernelTable& table(Isa isa);

/// Best supported table, unless MIPP_ISA=scalar is set in the environment.
const KernelTable& active();

// Scalar references, also used for tails by the vector variants.
namespace scalar {
void xor_bytes(const std::uint8_t* in, const std::uint8_t* key, std::uint8_t* out,
               std::size_t n);
void classify_blocks(const std::uint8_t* row0, const std::uint8_t* row1,
                     std::size_t blocks, std::uint32_t threshold_sq,
                     std::uint8_t* out);
std::uint64_t squared_distance(const std::uint32_t* a, const std::uint32_t* b,
                               std::size_t n);
void sum_and_squares(const std::uint32_t* a, std::size_t n, std::uint64_t* sum,
                     std::uint64_t* sum_sq);
}  // namespace scalar

}  // namespace mipp::kernels
