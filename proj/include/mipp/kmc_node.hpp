#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>

#include "mipp/cloud_node.hpp"

namespace mipp {

using SessionId = std::array<std::uint8_t, 16>;

struct UserKeyAck {
  bool key_reused = false;  // same USK as an earlier session of this user
};

/// Key management center: long-lived owner keys, one-session user keys, and
/// re-encryption of result images from owner keys to the querying user's key.
class KmcNode {
 public:
  void enroll_owner(const OwnerId& oid);
  void enroll_user(const UserId& uid);

  /// Replacing an existing owner key requires rotate = true.
  void store_owner_key(const OwnerId& oid, KeyStream sk, bool rotate = false);
  std::optional<KeyStream> owner_key(const OwnerId& oid) const;

  /// Binds `usk` to exactly one session. Reuse of an earlier key is accepted
  /// but reported in the ack.
  UserKeyAck store_user_key(const UserId& uid, KeyStream usk, const SessionId& session);
  std::optional<KeyStream> user_key(const UserId& uid, const SessionId& session) const;

  /// Drops the session's user key without re-encrypting anything.
  void end_session(const UserId& uid, const SessionId& session);

  /// Decrypts each result under its owner's key, encrypts under the session's
  /// user key, and discards that key. Order and count are preserved.
  std::vector<RetrievedImage> reencrypt_results(const std::vector<RetrievedImage>& er,
                                                const UserId& uid, const SessionId& session);

  std::size_t live_sessions() const;

  /// Owner keys only, hex-encoded; file mode 0600. User keys never touch disk.
  void save(const std::filesystem::path& file) const;
  static std::unique_ptr<KmcNode> load(const std::filesystem::path& file);

 private:
  mutable std::mutex mu_;
  std::set<OwnerId> owners_;
  std::set<UserId> users_;
  std::map<OwnerId, KeyStream> owner_keys_;
  std::map<std::pair<UserId, SessionId>, KeyStream> user_keys_;
  std::map<UserId, std::set<std::string>> user_key_history_;  // digests
};

}  // namespace mipp
