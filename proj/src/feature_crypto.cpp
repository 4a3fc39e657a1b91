#include "mipp/feature_crypto.hpp"

#include <charconv>
#include <sstream>

namespace mipp {

namespace {

std::vector<std::uint64_t> widen(const FeatureVector& f) {
  return std::vector<std::uint64_t>(f.a.begin(), f.a.end());
}

std::uint64_t to_u64(const BigInt& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) {
    fail(ErrorCode::kSumOutOfRange, "recovered sum exceeds 64 bits");
  }
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

std::string join_decimal(const SumCiphertext& ct) {
  std::string out;
  for (std::size_t i = 0; i < ct.c.size(); ++i) {
    if (i) out += ',';
    out += ct.c[i].get_str(10);
  }
  return out;
}

SumCiphertext parse_decimal_list(std::string_view line, std::size_t expected) {
  SumCiphertext ct;
  for (auto field : split(line, ',')) {
    std::string digits(field);
    BigInt v;
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos ||
        v.set_str(digits, 10) != 0) {
      fail(ErrorCode::kParse, "ciphertext element is not a decimal integer");
    }
    ct.c.push_back(std::move(v));
  }
  if (ct.c.size() != expected) {
    fail(ErrorCode::kParse, "expected " + std::to_string(expected) + " ciphertext elements");
  }
  return ct;
}

}  // namespace

EncryptedFeature encrypt_feature_pair(const GroupParams& params, const FeatureVector& f,
                                      Drbg& rng) {
  if (f.size() < 3) {
    fail(ErrorCode::kDegenerateRing, "feature length " + std::to_string(f.size()) + " < 3");
  }
  const auto squared = square_feature(f);
  BigInt total_sq = 0;
  for (auto v : squared.a2) total_sq += static_cast<unsigned long>(v);
  if (total_sq >= params.p) fail(ErrorCode::kOverflow, "sum of squared entries >= p");

  EncryptedFeature out;
  out.ef = encrypt_vector(params, widen(f), rng);
  out.eff = encrypt_vector(params, squared.a2, rng);
  out.params_id = params_id(params);
  return out;
}

EncryptedFeature encrypt_feature_pair(const GroupParams& params, const FeatureVector& f,
                                      ByteView seed) {
  Drbg rng(seed);
  return encrypt_feature_pair(params, f, rng);
}

SumPair recover_sums(const GroupParams& params, const EncryptedFeature& ef) {
  if (ef.ef.size() != ef.eff.size()) {
    fail(ErrorCode::kMalformedCiphertext, "ef and eff lengths differ");
  }
  if (!ef.params_id.empty() && ef.params_id != params_id(params)) {
    fail(ErrorCode::kParamsMismatch, "feature encrypted under params " + ef.params_id);
  }
  SumPair s;
  s.l = ef.ef.size();
  s.s1 = to_u64(aggregate_and_recover(params, ef.ef));
  s.s2 = to_u64(aggregate_and_recover(params, ef.eff));
  if (!plausible(s)) fail(ErrorCode::kCorruptedSums, "S2 < S1^2 / l");
  return s;
}

std::string serialize_encrypted_feature(const EncryptedFeature& ef) {
  std::ostringstream out;
  out << "MIPP-EFT-1 params_id=" << ef.params_id << " l=" << ef.ef.size() << '\n'
      << join_decimal(ef.ef) << '\n'
      << join_decimal(ef.eff) << '\n';
  return out.str();
}

EncryptedFeature parse_encrypted_feature(std::string_view text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() != 3) fail(ErrorCode::kParse, "expected header plus two ciphertext lines");

  auto header = split(lines[0], ' ');
  if (header.size() != 3 || header[0] != "MIPP-EFT-1" ||
      !header[1].starts_with("params_id=") || !header[2].starts_with("l=")) {
    fail(ErrorCode::kParse, "malformed MIPP-EFT-1 header");
  }
  EncryptedFeature out;
  out.params_id = std::string(header[1].substr(10));
  std::size_t l = 0;
  auto len = header[2].substr(2);
  auto [ptr, ec] = std::from_chars(len.data(), len.data() + len.size(), l);
  if (ec != std::errc() || ptr != len.data() + len.size()) {
    fail(ErrorCode::kParse, "bad dimension in EFT header");
  }
  out.ef = parse_decimal_list(lines[1], l);
  out.eff = parse_decimal_list(lines[2], l);
  return out;
}

}  // namespace mipp
