#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mipp/feature_crypto.hpp"
#include "mipp/image_cipher.hpp"

namespace mipp {

using OwnerId = std::string;
using UserId = std::string;
using ImageId = std::string;

/// Opaque authentication token minted for an authorized user.
struct AccessToken {
  std::array<std::uint8_t, 32> bytes{};

  static AccessToken random(Drbg& rng);
  std::string hex() const { return to_hex(bytes); }
  static AccessToken from_hex(std::string_view hex);
  auto operator<=>(const AccessToken&) const = default;
};

struct AulEntry {
  UserId uid;
  AccessToken ak;

  auto operator<=>(const AulEntry&) const = default;
};

struct ImageUpload {
  ImageId image_id;
  GrayImage encrypted;
  EncryptedFeature feature;

  bool operator==(const ImageUpload&) const = default;
};

/// One row of the retrieval index: recovered (sum a, sum a^2) per image.
/// These two sums per image are what the cloud learns about features.
struct IndexEntry {
  OwnerId owner_id;
  ImageId image_id;
  std::uint64_t s1 = 0;
  std::uint64_t s2 = 0;

  bool operator==(const IndexEntry&) const = default;
};

struct QueryEnvelope {
  EncryptedFeature eq;
  UserId uid;
  AccessToken ak;
  std::uint32_t h = 100;

  bool operator==(const QueryEnvelope&) const = default;
};

struct RetrievedImage {
  OwnerId owner_id;
  ImageId image_id;
  GrayImage image;

  bool operator==(const RetrievedImage&) const = default;
};

/// Ranked result without the payload image.
struct RankedHit {
  OwnerId owner_id;
  ImageId image_id;
  __int128 scaled_radicand = 0;  // l * Sim^2

  double sim(std::size_t l) const;
  bool operator==(const RankedHit&) const = default;
};

enum class RetrievalPath {
  kIndex,    // scores precomputed (S1, S2) rows
  kNoIndex,  // re-aggregates every stored ciphertext per query
};

struct AddImages {
  std::vector<ImageUpload> images;
};
struct DeleteImages {
  std::vector<ImageId> image_ids;
};
/// Replaces ciphertexts; the index rows are left as they are.
struct UpdateImages {
  std::vector<ImageUpload> images;
};
using UpdateCommand = std::variant<AddImages, DeleteImages, UpdateImages>;

struct StoredImage {
  GrayImage encrypted;
  EncryptedFeature feature;
};

struct OwnerRecord {
  OwnerId owner_id;
  std::set<AulEntry> aul;
  std::map<ImageId, std::shared_ptr<const StoredImage>> images;
};

/// Honest-but-curious storage and retrieval server.
///
/// Readers work on an immutable snapshot; updates build a new snapshot under
/// an exclusive lock and publish it in one pointer swap.
class CloudNode {
 public:
  explicit CloudNode(GroupParams params);

  const GroupParams& params() const { return params_; }

  void register_owner(const OwnerId& owner_id, std::vector<AulEntry> aul,
                      std::vector<ImageUpload> images);

  /// Owners whose AUL holds (uid, ak); empty means unauthorized.
  std::set<OwnerId> verify_user(const UserId& uid, const AccessToken& ak) const;

  /// Top-h over all authorizing owners, ascending by Sim, ties by
  /// (owner_id, image_id). Throws kUnauthorized before scoring anything.
  std::vector<RankedHit> rank(const QueryEnvelope& q,
                              RetrievalPath path = RetrievalPath::kIndex) const;
  std::vector<RetrievedImage> retrieve_top_h(const QueryEnvelope& q,
                                             RetrievalPath path = RetrievalPath::kIndex) const;

  void apply_update(const OwnerId& owner_id, UpdateCommand command);

  std::vector<IndexEntry> index_rows() const;
  std::size_t index_size() const;
  std::size_t image_count() const;
  std::vector<OwnerId> owner_ids() const;
  std::shared_ptr<const StoredImage> stored_image(const OwnerId& owner_id,
                                                  const ImageId& image_id) const;

  /// Every byte the cloud holds, concatenated; used to audit what it can see.
  Bytes observable_state() const;

  /// `owners/<OID>/manifest`, `owners/<OID>/img/<ID>.pgm`,
  /// `owners/<OID>/feat/<ID>.eft`, `index.tsv`, plus `params.txt`.
  void save(const std::filesystem::path& root) const;
  static std::unique_ptr<CloudNode> load(const std::filesystem::path& root);

  /// Tab-separated OID, image_id, s1, s2 with a header row.
  std::string index_tsv() const;

  /// Bijection check between index rows and stored images.
  bool consistent() const;

 private:
  struct Snapshot {
    std::map<OwnerId, OwnerRecord> owners;
    std::map<std::pair<OwnerId, ImageId>, IndexEntry> index;
  };

  std::shared_ptr<const Snapshot> snapshot() const;
  void publish(std::shared_ptr<const Snapshot> next);
  IndexEntry index_row(const OwnerId& owner_id, const ImageUpload& upload) const;
  void check_upload(const ImageUpload& upload) const;

  GroupParams params_;
  std::string params_id_;
  mutable std::mutex snapshot_mu_;
  std::mutex write_mu_;
  std::shared_ptr<const Snapshot> current_;
};

}  // namespace mipp
