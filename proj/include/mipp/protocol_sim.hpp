#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mipp/cloud_node.hpp"
#include "mipp/ehd.hpp"
#include "mipp/kmc_node.hpp"
#include "mipp/message.hpp"

namespace mipp {

struct SimConfig {
  std::uint64_t seed = 1;
  EhdConfig ehd;
  unsigned security_k = 128;
  /// Length of each per-session user key; must cover the largest stored image.
  std::size_t user_key_len = 256 * 256;
};

/// One hop on the bus, or an event (step 0) such as a failed verification.
struct TranscriptEntry {
  int step = 0;
  std::optional<MessageKind> kind;
  std::string from;
  std::string to;
  std::size_t bytes = 0;
  std::string digest;  // hex, over the encoded frame
  std::string note;

  std::string to_line() const;
};

struct UserRankedResult {
  OwnerId owner_id;
  ImageId image_id;
  double distance = 0.0;  // plaintext EucDis to the query feature
};

struct SessionTranscript {
  SessionId session{};
  bool authorized = false;
  std::vector<TranscriptEntry> entries;
  /// Results as the user decrypted them, in the cloud's order.
  std::vector<RetrievedImage> decrypted;
  /// The user's own re-ranking of `decrypted`.
  std::vector<UserRankedResult> ranked;

  std::string to_text() const;
};

struct OwnerSetup {
  OwnerId owner_id;
  std::vector<std::pair<ImageId, GrayImage>> images;
  std::vector<UserId> authorized_users;
};

/// Single-threaded, seeded run of the full workflow. Every hop goes through
/// encode_message / decode_message, so the byte format is exercised end to end.
class Simulation {
 public:
  explicit Simulation(GroupParams params, SimConfig cfg = {});
  /// Continues from existing nodes, e.g. a cloud store and KMC vault loaded from disk.
  Simulation(std::unique_ptr<CloudNode> cloud, std::unique_ptr<KmcNode> kmc, SimConfig cfg = {});

  /// Mints the user's access token and registers the user with the KMC.
  void add_user(const UserId& uid);
  /// Registers a user holding a token minted earlier.
  void add_user(const UserId& uid, const AccessToken& ak);

  /// Steps (1) and (2): encrypted upload to the cloud, key deposit at the KMC.
  void add_owner(const OwnerSetup& setup);

  /// Steps (3)-(7) for one query.
  SessionTranscript run_session(const UserId& uid, const GrayImage& query,
                                std::uint32_t h = 100);

  const CloudNode& cloud() const { return *cloud_; }
  const KmcNode& kmc() const { return *kmc_; }
  const std::vector<TranscriptEntry>& setup_log() const { return setup_log_; }
  std::string setup_text() const;

  /// Test hook: owner-side plaintext images and features.
  struct OwnerPlaintext {
    OwnerId owner_id;
    ImageId image_id;
    GrayImage image;
    FeatureVector feature;
  };
  std::vector<OwnerPlaintext> owner_plaintexts() const;

  /// Forces the next session of `uid` to reuse its previous key (tests only).
  void replay_user_key_next_session(const UserId& uid);

 private:
  struct UserActor {
    UserId uid;
    AccessToken ak;
    Drbg rng;
    std::optional<KeyStream> last_key;
    bool replay_key = false;
  };
  struct OwnerActor {
    OwnerId owner_id;
    KeyStream sk;
    std::vector<OwnerPlaintext> plaintexts;
  };

  Message hop(std::vector<TranscriptEntry>& log, int step, const std::string& from,
              const std::string& to, const Message& m);

  GroupParams params_;
  SimConfig cfg_;
  std::unique_ptr<CloudNode> cloud_;
  std::unique_ptr<KmcNode> kmc_;
  std::map<UserId, UserActor> users_;
  std::map<OwnerId, OwnerActor> owners_;
  std::vector<TranscriptEntry> setup_log_;
};

}  // namespace mipp
