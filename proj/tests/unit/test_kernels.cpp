#include <doctest.h>

#include <cstdlib>
#include <vector>

#include "mipp/kernels.hpp"
#include "mipp/rng.hpp"

using namespace mipp;
using namespace mipp::kernels;

namespace {

std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2}) {
    if (supported(isa)) out.push_back(&table(isa));
  }
  return out;
}

std::vector<std::uint32_t> words(Drbg& rng, std::size_t n, std::uint64_t bound) {
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = static_cast<std::uint32_t>(rng.uniform(bound));
  return v;
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(supported(Isa::kScalar));
  CHECK(table(Isa::kScalar).isa == Isa::kScalar);
  CHECK(name(Isa::kAvx2) == "avx2");
  MESSAGE("active kernels: " << name(active().isa));
}

TEST_CASE("vector kernels agree with the scalar reference") {
  Drbg rng("kernels");
  const std::size_t lengths[] = {0, 1, 3, 7, 8, 15, 16, 17, 31, 32, 33, 63, 64, 65, 80, 127, 1000, 4099};
  for (const KernelTable* k : variants()) {
    CAPTURE(name(k->isa));
    for (std::size_t n : lengths) {
      CAPTURE(n);
      for (int trial = 0; trial < 5; ++trial) {
        const Bytes in = rng.bytes(n);
        const Bytes key = rng.bytes(n);
        Bytes want(n), got(n);
        scalar::xor_bytes(in.data(), key.data(), want.data(), n);
        k->xor_bytes(in.data(), key.data(), got.data(), n);
        CHECK(got == want);

        // Low-contrast rows exercise threshold and tie handling.
        Bytes row0 = rng.bytes(2 * n), row1 = rng.bytes(2 * n);
        if (trial % 2) {
          for (auto& b : row0) b = static_cast<std::uint8_t>(120 + b % 12);
          for (auto& b : row1) b = static_cast<std::uint8_t>(120 + b % 12);
        }
        Bytes cw(n), cg(n);
        for (std::uint32_t th : {0u, 121u, 2000u}) {
          scalar::classify_blocks(row0.data(), row1.data(), n, th, cw.data());
          k->classify_blocks(row0.data(), row1.data(), n, th, cg.data());
          CHECK(cg == cw);
        }

        const std::uint64_t bound = trial == 4 ? (1ull << 20) : 256;
        const auto a = words(rng, n, bound);
        const auto b = words(rng, n, bound);
        CHECK(k->squared_distance(a.data(), b.data(), n) == scalar::squared_distance(a.data(), b.data(), n));
        std::uint64_t s1 = 0, s2 = 0, r1 = 1, r2 = 1;
        scalar::sum_and_squares(a.data(), n, &s1, &s2);
        k->sum_and_squares(a.data(), n, &r1, &r2);
        CHECK(r1 == s1);
        CHECK(r2 == s2);
      }
    }
  }
}

TEST_CASE("classification examples") {
  // Vertical edge: left column bright.
  const std::uint8_t v0[] = {200, 0}, v1[] = {200, 0};
  // Ties between vertical and horizontal resolve to the first filter.
  const std::uint8_t t0[] = {200, 0}, t1[] = {0, 0};
  const std::uint8_t flat[] = {9, 9};
  for (const KernelTable* k : variants()) {
    std::uint8_t out = 99;
    k->classify_blocks(v0, v1, 1, 121, &out);
    CHECK(out == kVertical);
    k->classify_blocks(t0, t1, 1, 121, &out);
    CHECK(out == kNonDirectional);  // 4*200^2 beats v^2 = h^2 = 200^2
    k->classify_blocks(flat, flat, 1, 0, &out);
    CHECK(out == kNoEdge);
  }
}

TEST_CASE("MIPP_ISA=scalar is honoured by active()") {
  // active() caches its choice, so this checks only the documented override
  // when it was already set for the process.
  const char* env = std::getenv("MIPP_ISA");
  if (env && std::string_view(env) == "scalar") CHECK(active().isa == Isa::kScalar);
  if (!env && supported(Isa::kAvx2)) CHECK(active().isa == Isa::kAvx2);
}
