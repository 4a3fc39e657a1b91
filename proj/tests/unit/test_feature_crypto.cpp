#include <doctest.h>

#include "../support/fixtures.hpp"
#include "mipp/feature_crypto.hpp"

using namespace mipp;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kConsistency;
}

FeatureVector random_feature(Drbg& rng, std::size_t l) {
  FeatureVector f;
  for (std::size_t i = 0; i < l; ++i) f.a.push_back(static_cast<std::uint32_t>(rng.uniform(256)));
  return f;
}

}  // namespace

TEST_CASE("recovered sums match direct summation") {
  const GroupParams& params = fixtures::params64();
  CHECK(recover_sums(params, encrypt_feature_pair(params, FeatureVector{{2, 3, 4}}, as_bytes("a"))) ==
        SumPair{9, 29, 3});
  CHECK(recover_sums(params, encrypt_feature_pair(params, FeatureVector{{0, 0, 0}}, as_bytes("a"))) ==
        SumPair{0, 0, 3});
  CHECK(recover_sums(params, encrypt_feature_pair(params, FeatureVector{{5, 5, 5}}, as_bytes("a"))) ==
        SumPair{15, 75, 3});
  CHECK(code_of([&] { encrypt_feature_pair(params, FeatureVector{{1, 2}}, as_bytes("a")); }) ==
        ErrorCode::kDegenerateRing);
}

TEST_CASE("recovery is invariant under re-encryption") {
  const GroupParams& params = fixtures::params64();
  Drbg rng("reencrypt");
  for (int trial = 0; trial < 100; ++trial) {
    const FeatureVector f = random_feature(rng, 80);
    const EncryptedFeature a = encrypt_feature_pair(params, f, rng);
    const EncryptedFeature b = encrypt_feature_pair(params, f, rng);
    for (std::size_t i = 0; i < f.size(); ++i) {
      REQUIRE(a.ef.c[i] != b.ef.c[i]);
      REQUIRE(a.eff.c[i] != b.eff.c[i]);
    }
    const SumPair sa = recover_sums(params, a);
    CHECK(sa == recover_sums(params, b));
    CHECK(sa == sums_of(f));
    CHECK(plausible(sa));
  }
}

TEST_CASE("ef and eff are blinded independently") {
  const GroupParams& params = fixtures::params64();
  // With all-ones features both halves encrypt the same plaintext vector.
  const EncryptedFeature e = encrypt_feature_pair(params, FeatureVector{{1, 1, 1, 1}}, as_bytes("i"));
  for (std::size_t i = 0; i < 4; ++i) CHECK(e.ef.c[i] != e.eff.c[i]);
}

TEST_CASE("squared sums must stay below p") {
  const GroupParams small = params_from_primes(23, 11, 2);
  CHECK(code_of([&] { encrypt_feature_pair(small, FeatureVector{{3, 3, 3}}, as_bytes("o")); }) ==
        ErrorCode::kOverflow);
  CHECK(recover_sums(small, encrypt_feature_pair(small, FeatureVector{{2, 2, 2}}, as_bytes("o"))) ==
        SumPair{6, 12, 3});
}

TEST_CASE("mismatched parameters and corrupted pairs are detected") {
  const GroupParams& params = fixtures::params64();
  const EncryptedFeature e = encrypt_feature_pair(params, FeatureVector{{1, 2, 3}}, as_bytes("m"));
  CHECK(code_of([&] { recover_sums(fixtures::params31(), e); }) == ErrorCode::kParamsMismatch);

  EncryptedFeature swapped = e;
  const std::vector<std::uint64_t> big{10, 10, 10}, zero{0, 0, 0};
  swapped.ef = encrypt_vector(params, big, as_bytes("x"));
  swapped.eff = encrypt_vector(params, zero, as_bytes("y"));
  CHECK(code_of([&] { recover_sums(params, swapped); }) == ErrorCode::kCorruptedSums);

  EncryptedFeature ragged = e;
  ragged.eff.c.pop_back();
  CHECK(code_of([&] { recover_sums(params, ragged); }) == ErrorCode::kMalformedCiphertext);
}

TEST_CASE("eft text round trip") {
  const GroupParams& params = fixtures::params64();
  const EncryptedFeature e = encrypt_feature_pair(params, FeatureVector{{7, 0, 255, 3}}, as_bytes("t"));
  const std::string text = serialize_encrypted_feature(e);
  CHECK(text.starts_with("MIPP-EFT-1 params_id=" + params_id(params) + " l=4\n"));
  CHECK(parse_encrypted_feature(text) == e);
  CHECK(code_of([] { parse_encrypted_feature("MIPP-EFT-1 params_id=x l=2\n1,2\n3\n"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_encrypted_feature("MIPP-EFT-1 params_id=x l=1\n-1\n3\n"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_encrypted_feature("EFT\n1\n1\n"); }) == ErrorCode::kParse);
}
