#include "mipp/kmc_node.hpp"

#include "mipp/pgm.hpp"
#include "mipp/rng.hpp"

namespace mipp {

void KmcNode::enroll_owner(const OwnerId& oid) {
  require_identifier(oid, "owner id");
  std::lock_guard lock(mu_);
  owners_.insert(oid);
}

void KmcNode::enroll_user(const UserId& uid) {
  require_identifier(uid, "user id");
  std::lock_guard lock(mu_);
  users_.insert(uid);
}

void KmcNode::store_owner_key(const OwnerId& oid, KeyStream sk, bool rotate) {
  std::lock_guard lock(mu_);
  if (!owners_.contains(oid)) fail(ErrorCode::kUnknownParty, "owner " + oid);
  if (sk.size() == 0) fail(ErrorCode::kInvalidLength, "empty owner key");
  auto it = owner_keys_.find(oid);
  if (it != owner_keys_.end()) {
    if (!rotate) fail(ErrorCode::kKeyOverwrite, "owner " + oid);
    it->second = std::move(sk);
    return;
  }
  owner_keys_.emplace(oid, std::move(sk));
}

std::optional<KeyStream> KmcNode::owner_key(const OwnerId& oid) const {
  std::lock_guard lock(mu_);
  auto it = owner_keys_.find(oid);
  if (it == owner_keys_.end()) return std::nullopt;
  return it->second;
}

UserKeyAck KmcNode::store_user_key(const UserId& uid, KeyStream usk,
                                   const SessionId& session) {
  std::lock_guard lock(mu_);
  if (!users_.contains(uid)) fail(ErrorCode::kUnknownParty, "user " + uid);
  if (usk.size() == 0) fail(ErrorCode::kInvalidLength, "empty user key");
  const auto key = std::make_pair(uid, session);
  if (user_keys_.contains(key)) {
    fail(ErrorCode::kSession, "session already holds a key for " + uid);
  }
  UserKeyAck ack;
  const std::string fingerprint = to_hex(digest(usk.bytes, 32));
  ack.key_reused = !user_key_history_[uid].insert(fingerprint).second;
  user_keys_.emplace(key, std::move(usk));
  return ack;
}

std::optional<KeyStream> KmcNode::user_key(const UserId& uid, const SessionId& session) const {
  std::lock_guard lock(mu_);
  auto it = user_keys_.find({uid, session});
  if (it == user_keys_.end()) return std::nullopt;
  return it->second;
}

void KmcNode::end_session(const UserId& uid, const SessionId& session) {
  std::lock_guard lock(mu_);
  user_keys_.erase({uid, session});
}

std::vector<RetrievedImage> KmcNode::reencrypt_results(const std::vector<RetrievedImage>& er,
                                                       const UserId& uid,
                                                       const SessionId& session) {
  KeyStream usk;
  std::map<OwnerId, KeyStream> keys;
  {
    std::lock_guard lock(mu_);
    auto it = user_keys_.find({uid, session});
    if (it == user_keys_.end()) {
      fail(ErrorCode::kSession, "no key for user " + uid + " in session " + to_hex(session));
    }
    for (const auto& item : er) {
      if (keys.contains(item.owner_id)) continue;
      auto owner = owner_keys_.find(item.owner_id);
      if (owner == owner_keys_.end()) fail(ErrorCode::kVault, "no key for owner " + item.owner_id);
      keys.emplace(item.owner_id, owner->second);
    }
    // One query, one key.
    usk = std::move(it->second);
    user_keys_.erase(it);
  }

  std::vector<RetrievedImage> ner;
  ner.reserve(er.size());
  for (const auto& item : er) {
    GrayImage plain = image_dec(keys.at(item.owner_id), item.image);
    ner.push_back({item.owner_id, item.image_id, image_enc(usk, plain)});
  }
  return ner;
}

std::size_t KmcNode::live_sessions() const {
  std::lock_guard lock(mu_);
  return user_keys_.size();
}

void KmcNode::save(const std::filesystem::path& file) const {
  std::string text = "MIPP-VAULT-1\n";
  {
    std::lock_guard lock(mu_);
    for (const auto& uid : users_) text += "user\t" + uid + "\n";
    for (const auto& oid : owners_) {
      text += "owner\t" + oid;
      auto it = owner_keys_.find(oid);
      if (it != owner_keys_.end()) text += "\t" + to_hex(it->second.bytes);
      text += "\n";
    }
  }
  write_text(file, text);
  std::filesystem::permissions(file,
                               std::filesystem::perms::owner_read |
                                   std::filesystem::perms::owner_write,
                               std::filesystem::perm_options::replace);
}

std::unique_ptr<KmcNode> KmcNode::load(const std::filesystem::path& file) {
  auto node = std::make_unique<KmcNode>();
  const std::string text = read_text(file);
  auto lines = split(text, '\n');
  if (lines.empty() || lines[0] != "MIPP-VAULT-1") {
    fail(ErrorCode::kParse, "missing MIPP-VAULT-1 header");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cols = split(lines[i], '\t');
    if (cols[0] == "user" && cols.size() == 2) {
      node->enroll_user(std::string(cols[1]));
    } else if (cols[0] == "owner" && (cols.size() == 2 || cols.size() == 3)) {
      const std::string oid(cols[1]);
      node->enroll_owner(oid);
      if (cols.size() == 3) node->store_owner_key(oid, KeyStream{from_hex(cols[2])});
    } else {
      fail(ErrorCode::kParse, "vault line " + std::to_string(i + 1));
    }
  }
  return node;
}

}  // namespace mipp
