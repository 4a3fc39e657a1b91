#include <doctest.h>

#include <array>
#include <set>

#include "mipp/rng.hpp"

using namespace mipp;

TEST_CASE("same seed, same stream") {
  Drbg a("seed"), b("seed"), c("seed!");
  const Bytes x = a.bytes(1000);
  CHECK(x == b.bytes(1000));
  CHECK(x != c.bytes(1000));
  CHECK(Drbg(7, "label").bytes(64) == Drbg(7, "label").bytes(64));
  CHECK(Drbg(7, "label").bytes(64) != Drbg(8, "label").bytes(64));
  CHECK(Drbg(7, "label").bytes(64) != Drbg(7, "other").bytes(64));
}

TEST_CASE("reads are position independent") {
  Drbg a("chunks"), b("chunks");
  Bytes joined;
  for (std::size_t n : {1, 7, 100, 513, 3}) {
    Bytes part = a.bytes(n);
    joined.insert(joined.end(), part.begin(), part.end());
  }
  CHECK(joined == b.bytes(joined.size()));
}

TEST_CASE("forks are independent of the parent") {
  Drbg parent("p");
  Drbg child = parent.fork("x");
  Drbg child2 = Drbg("p").fork("y");
  CHECK(child.bytes(32) != parent.bytes(32));
  CHECK(Drbg("p").fork("x").bytes(32) != child2.bytes(32));
}

TEST_CASE("uniform stays in range and hits every value") {
  Drbg rng("uniform");
  std::array<int, 7> counts{};
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.uniform(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) {
    CHECK(c > 850);
    CHECK(c < 1150);
  }
  CHECK(rng.uniform(1) == 0);
  CHECK_THROWS(rng.uniform(std::uint64_t{0}));

  const mpz_class bound("340282366920938463463374607431768211297");
  for (int i = 0; i < 200; ++i) {
    const mpz_class v = rng.uniform(bound);
    REQUIRE(v >= 0);
    REQUIRE(v < bound);
  }
}

TEST_CASE("digest sizes and OS entropy") {
  CHECK(digest(as_bytes("abc")).size() == 32);
  CHECK(digest(as_bytes("abc"), 16).size() == 16);
  CHECK(digest(as_bytes("abc"), 64).size() == 64);
  CHECK(digest(as_bytes("abc")) != digest(as_bytes("abd")));
  CHECK_THROWS(digest(as_bytes("abc"), 8));
  std::set<Bytes> seen;
  for (int i = 0; i < 20; ++i) seen.insert(os_entropy(32));
  CHECK(seen.size() == 20);
}
