#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mipp/kernels.hpp"

namespace mipp::kernels {

#if defined(MIPP_HAVE_AVX2_TU)
namespace avx2 {
void xor_bytes(const std::uint8_t*, const std::uint8_t*, std::uint8_t*, std::size_t);
void classify_blocks(const std::uint8_t*, const std::uint8_t*, std::size_t,
                     std::uint32_t, std::uint8_t*);
std::uint64_t squared_distance(const std::uint32_t*, const std::uint32_t*, std::size_t);
void sum_and_squares(const std::uint32_t*, std::size_t, std::uint64_t*, std::uint64_t*);
}  // namespace avx2
#endif

namespace {

constexpr KernelTable kScalarTable = {
    Isa::kScalar,
    &scalar::xor_bytes,
    &scalar::classify_blocks,
    &scalar::squared_distance,
    &scalar::sum_and_squares,
};

#if defined(MIPP_HAVE_AVX2_TU)
constexpr KernelTable kAvx2Table = {
    Isa::kAvx2,
    &avx2::xor_bytes,
    &avx2::classify_blocks,
    &avx2::squared_distance,
    &avx2::sum_and_squares,
};
#endif

const KernelTable& select() {
  if (const char* forced = std::getenv("MIPP_ISA")) {
    if (std::string(forced) == "scalar") return kScalarTable;
  }
  if (supported(Isa::kAvx2)) return table(Isa::kAvx2);
  return kScalarTable;
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(MIPP_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw std::runtime_error("kernel set '" + std::string(name(isa)) +
                             "' not supported on this CPU");
  }
#if defined(MIPP_HAVE_AVX2_TU)
  if (isa == Isa::kAvx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace mipp::kernels
