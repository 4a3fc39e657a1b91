#include <doctest.h>

#include "mipp/kmc_node.hpp"
#include "mipp/pgm.hpp"
#include "mipp/rng.hpp"

using namespace mipp;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

SessionId sid(std::uint8_t b) {
  SessionId s{};
  s.fill(b);
  return s;
}

GrayImage random_image(Drbg& rng, std::uint32_t w, std::uint32_t h) {
  GrayImage img(w, h);
  rng.fill(img.pixels);
  return img;
}

}  // namespace

TEST_CASE("owner keys are stored once unless rotated") {
  KmcNode kmc;
  const KeyStream sk = keygen(128, 64, as_bytes("a"));
  CHECK(code_of([&] { kmc.store_owner_key("alice", sk); }) == ErrorCode::kUnknownParty);
  kmc.enroll_owner("alice");
  kmc.store_owner_key("alice", sk);
  CHECK(kmc.owner_key("alice") == sk);
  CHECK_FALSE(kmc.owner_key("bob").has_value());

  const KeyStream other = keygen(128, 64, as_bytes("b"));
  CHECK(code_of([&] { kmc.store_owner_key("alice", other); }) == ErrorCode::kKeyOverwrite);
  CHECK(kmc.owner_key("alice") == sk);
  kmc.store_owner_key("alice", other, true);
  CHECK(kmc.owner_key("alice") == other);
  CHECK(code_of([&] { kmc.store_owner_key("alice", KeyStream{}, true); }) == ErrorCode::kInvalidLength);
}

TEST_CASE("user keys live for exactly one session") {
  KmcNode kmc;
  kmc.enroll_user("u");
  const KeyStream usk = keygen(128, 16, as_bytes("u1"));
  CHECK(code_of([&] { kmc.store_user_key("v", usk, sid(1)); }) == ErrorCode::kUnknownParty);

  CHECK_FALSE(kmc.store_user_key("u", usk, sid(1)).key_reused);
  CHECK(kmc.user_key("u", sid(1)) == usk);
  CHECK_FALSE(kmc.user_key("u", sid(2)).has_value());
  CHECK(code_of([&] { kmc.store_user_key("u", usk, sid(1)); }) == ErrorCode::kSession);
  CHECK(kmc.live_sessions() == 1);

  kmc.reencrypt_results({}, "u", sid(1));
  CHECK_FALSE(kmc.user_key("u", sid(1)).has_value());
  CHECK(kmc.live_sessions() == 0);
  CHECK(code_of([&] { kmc.reencrypt_results({}, "u", sid(1)); }) == ErrorCode::kSession);

  // The same key in a later session is accepted but flagged.
  CHECK(kmc.store_user_key("u", usk, sid(2)).key_reused);
  CHECK_FALSE(kmc.store_user_key("u", keygen(128, 16, as_bytes("u2")), sid(3)).key_reused);
  kmc.end_session("u", sid(2));
  kmc.end_session("u", sid(3));
  CHECK(kmc.live_sessions() == 0);
}

TEST_CASE("re-encryption moves results from owner keys to the session key") {
  Drbg rng("reenc");
  KmcNode kmc;
  kmc.enroll_user("u");
  std::map<OwnerId, KeyStream> keys;
  for (const char* oid : {"a", "b", "c"}) {
    kmc.enroll_owner(oid);
    keys[oid] = keygen(128, 40 * 40, rng.bytes(32));
    kmc.store_owner_key(oid, keys[oid]);
  }

  std::vector<RetrievedImage> er;
  std::vector<GrayImage> plain;
  const OwnerId order[] = {"b", "a", "c", "b", "a"};
  for (int i = 0; i < 5; ++i) {
    plain.push_back(random_image(rng, 10 + i * 7, 40 - i * 3));
    er.push_back({order[i], "img" + std::to_string(i), image_enc(keys[order[i]], plain.back())});
  }
  const KeyStream usk = keygen(128, 40 * 40, rng.bytes(32));
  kmc.store_user_key("u", usk, sid(9));
  const auto ner = kmc.reencrypt_results(er, "u", sid(9));
  REQUIRE(ner.size() == er.size());
  for (std::size_t i = 0; i < ner.size(); ++i) {
    CHECK(ner[i].owner_id == er[i].owner_id);
    CHECK(ner[i].image_id == er[i].image_id);
    CHECK(ner[i].image == image_enc(usk, plain[i]));
    CHECK(image_dec(usk, ner[i].image) == plain[i]);
  }

  SUBCASE("user key equal to the owner key leaves images unchanged") {
    kmc.store_user_key("u", keys["a"], sid(10));
    const std::vector<RetrievedImage> one{er[1]};
    CHECK(kmc.reencrypt_results(one, "u", sid(10))[0].image == er[1].image);
  }
  SUBCASE("empty result sets") {
    kmc.store_user_key("u", usk, sid(11));
    CHECK(kmc.reencrypt_results({}, "u", sid(11)).empty());
  }
  SUBCASE("results from an owner without a key") {
    kmc.store_user_key("u", usk, sid(12));
    std::vector<RetrievedImage> bad{{"ghost", "x", plain[0]}};
    CHECK(code_of([&] { kmc.reencrypt_results(bad, "u", sid(12)); }) == ErrorCode::kVault);
  }
}

TEST_CASE("vault holds owner keys only, with owner-only permissions") {
  KmcNode kmc;
  kmc.enroll_user("u");
  kmc.enroll_owner("alice");
  kmc.enroll_owner("keyless");
  const KeyStream sk = keygen(128, 100, as_bytes("vault"));
  kmc.store_owner_key("alice", sk);
  const KeyStream usk = keygen(128, 100, as_bytes("session"));
  kmc.store_user_key("u", usk, sid(1));

  const fs::path file = fs::temp_directory_path() / "mipp-test.vault";
  fs::remove(file);
  kmc.save(file);
  const auto perms = fs::status(file).permissions();
  CHECK((perms & (fs::perms::group_all | fs::perms::others_all)) == fs::perms::none);
  const std::string text = read_text(file);
  CHECK(text.find(to_hex(usk.bytes)) == std::string::npos);
  CHECK(text.find(to_hex(sk.bytes)) != std::string::npos);

  auto loaded = KmcNode::load(file);
  CHECK(loaded->owner_key("alice") == sk);
  CHECK_FALSE(loaded->owner_key("keyless").has_value());
  CHECK(loaded->live_sessions() == 0);
  loaded->store_user_key("u", usk, sid(2));
  loaded->store_owner_key("keyless", sk);

  write_text(file, "MIPP-VAULT-0\n");
  CHECK(code_of([&] { KmcNode::load(file); }) == ErrorCode::kParse);
  write_text(file, "MIPP-VAULT-1\nowner\n");
  CHECK(code_of([&] { KmcNode::load(file); }) == ErrorCode::kParse);
  fs::remove(file);
}
