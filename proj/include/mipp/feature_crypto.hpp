#pragma once

#include <string>
#include <string_view>

#include "mipp/ehd.hpp"
#include "mipp/group_crypto.hpp"
#include "mipp/similarity.hpp"

namespace mipp {

/// A feature vector and its element-wise square, each under its own ring
/// randomness. The randomness is never retained.
struct EncryptedFeature {
  SumCiphertext ef;
  SumCiphertext eff;
  std::string params_id;

  std::size_t dimension() const { return ef.size(); }
  bool operator==(const EncryptedFeature&) const = default;
};

EncryptedFeature encrypt_feature_pair(const GroupParams& params, const FeatureVector& f,
                                      Drbg& rng);
EncryptedFeature encrypt_feature_pair(const GroupParams& params, const FeatureVector& f,
                                      ByteView seed);

/// (S1, S2) = (sum a_j, sum a_j^2), recovered by aggregation.
SumPair recover_sums(const GroupParams& params, const EncryptedFeature& ef);

/// `.eft` text: `MIPP-EFT-1 params_id=<id> l=<l>`, then the ef and eff lines.
std::string serialize_encrypted_feature(const EncryptedFeature& ef);
EncryptedFeature parse_encrypted_feature(std::string_view text);

}  // namespace mipp
