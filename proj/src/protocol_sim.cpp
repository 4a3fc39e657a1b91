#include "mipp/protocol_sim.hpp"

#include <algorithm>
#include <sstream>

#include "mipp/similarity.hpp"

namespace mipp {

std::string TranscriptEntry::to_line() const {
  std::ostringstream out;
  if (kind) {
    out << "step=" << step << " kind=" << to_string(*kind) << " from=" << from
        << " to=" << to << " bytes=" << bytes << " digest=" << digest;
  } else {
    out << "event from=" << from;
  }
  if (!note.empty()) out << " note=" << note;
  return out.str();
}

std::string SessionTranscript::to_text() const {
  std::string out = "session=" + to_hex(session) +
                    (authorized ? " authorized" : " unauthorized") + "\n";
  for (const auto& e : entries) out += e.to_line() + "\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    std::ostringstream line;
    line.precision(6);
    line << "rank=" << i + 1 << " owner=" << ranked[i].owner_id
         << " image=" << ranked[i].image_id << " eucdis=" << std::fixed << ranked[i].distance;
    out += line.str() + "\n";
  }
  return out;
}

Simulation::Simulation(GroupParams params, SimConfig cfg)
    : params_(std::move(params)),
      cfg_(cfg),
      cloud_(std::make_unique<CloudNode>(params_)),
      kmc_(std::make_unique<KmcNode>()) {}

Message Simulation::hop(std::vector<TranscriptEntry>& log, int step, const std::string& from,
                        const std::string& to, const Message& m) {
  const Bytes wire = encode_message(m);
  TranscriptEntry entry;
  entry.step = step;
  entry.kind = m.kind();
  entry.from = from;
  entry.to = to;
  entry.bytes = wire.size();
  entry.digest = to_hex(digest(wire, 16));
  log.push_back(std::move(entry));
  return decode_message(wire);
}

Simulation::Simulation(std::unique_ptr<CloudNode> cloud, std::unique_ptr<KmcNode> kmc,
                       SimConfig cfg)
    : params_(cloud->params()), cfg_(cfg), cloud_(std::move(cloud)), kmc_(std::move(kmc)) {}

void Simulation::add_user(const UserId& uid) {
  Drbg rng(cfg_.seed, "user/" + uid);
  AccessToken ak = AccessToken::random(rng);
  add_user(uid, ak);
}

void Simulation::add_user(const UserId& uid, const AccessToken& ak) {
  require_identifier(uid, "user id");
  if (users_.contains(uid)) fail(ErrorCode::kConsistency, "user " + uid + " already exists");
  // The session stream is separate from the one that minted the token.
  users_.emplace(uid, UserActor{uid, ak, Drbg(cfg_.seed, "user-session/" + uid), std::nullopt, false});
  kmc_->enroll_user(uid);
}

void Simulation::add_owner(const OwnerSetup& setup) {
  require_identifier(setup.owner_id, "owner id");
  if (owners_.contains(setup.owner_id)) fail(ErrorCode::kDuplicateOwner, setup.owner_id);

  Drbg rng(cfg_.seed, "owner/" + setup.owner_id);
  std::size_t key_len = 1;
  for (const auto& [_, img] : setup.images) key_len = std::max(key_len, img.pixel_count());

  OwnerActor owner;
  owner.owner_id = setup.owner_id;
  owner.sk = keygen(cfg_.security_k, key_len, rng.bytes(32));

  OwnerUploadBody upload;
  upload.owner_id = setup.owner_id;
  for (const auto& uid : setup.authorized_users) {
    auto it = users_.find(uid);
    if (it == users_.end()) fail(ErrorCode::kUnknownParty, "user " + uid);
    upload.aul.push_back({uid, it->second.ak});
  }
  for (const auto& [iid, img] : setup.images) {
    FeatureVector f = extract_ehd(img, cfg_.ehd);
    upload.images.push_back({iid, image_enc(owner.sk, img), encrypt_feature_pair(params_, f, rng)});
    owner.plaintexts.push_back({setup.owner_id, iid, img, std::move(f)});
  }

  const std::string who = "owner:" + setup.owner_id;
  SessionId setup_session{};
  {
    Message m = hop(setup_log_, 1, who, "cloud", Message{setup_session, std::move(upload)});
    auto& body = std::get<OwnerUploadBody>(m.payload);
    cloud_->register_owner(body.owner_id, std::move(body.aul), std::move(body.images));
  }
  {
    kmc_->enroll_owner(setup.owner_id);
    Message m = hop(setup_log_, 2, who, "kmc",
                    Message{setup_session, OwnerKeyDepositBody{setup.owner_id, owner.sk}});
    auto& body = std::get<OwnerKeyDepositBody>(m.payload);
    kmc_->store_owner_key(body.owner_id, std::move(body.sk));
  }
  owners_.emplace(setup.owner_id, std::move(owner));
}

SessionTranscript Simulation::run_session(const UserId& uid, const GrayImage& query,
                                          std::uint32_t h) {
  auto user_it = users_.find(uid);
  if (user_it == users_.end()) fail(ErrorCode::kUnknownParty, "user " + uid);
  UserActor& user = user_it->second;
  const std::string who = "user:" + uid;

  SessionTranscript tr;
  user.rng.fill(tr.session);

  // (3) encrypted query to the cloud.
  const FeatureVector query_feature = extract_ehd(query, cfg_.ehd);
  QueryEnvelope envelope{encrypt_feature_pair(params_, query_feature, user.rng), uid, user.ak, h};
  Message q = hop(tr.entries, 3, who, "cloud", Message{tr.session, UserQueryBody{envelope}});
  const QueryEnvelope& received = std::get<UserQueryBody>(q.payload).query;

  if (cloud_->verify_user(received.uid, received.ak).empty()) {
    TranscriptEntry event;
    event.from = "cloud";
    event.note = "authorization-failed uid=" + received.uid;
    tr.entries.push_back(std::move(event));
    tr.authorized = false;
    return tr;
  }
  tr.authorized = true;

  // (4) fresh per-session image key to the KMC.
  KeyStream usk = user.replay_key && user.last_key
                      ? *user.last_key
                      : keygen(cfg_.security_k, cfg_.user_key_len, user.rng.bytes(32));
  user.replay_key = false;
  user.last_key = usk;
  {
    Message m = hop(tr.entries, 4, who, "kmc", Message{tr.session, UserKeyDepositBody{uid, usk}});
    auto& body = std::get<UserKeyDepositBody>(m.payload);
    UserKeyAck ack = kmc_->store_user_key(body.uid, std::move(body.usk), m.session);
    if (ack.key_reused) tr.entries.back().note = "user-key-reused";
  }

  // (5) the cloud retrieves and forwards encrypted results with the user identity.
  std::vector<RetrievedImage> er = cloud_->retrieve_top_h(received);
  Message to_kmc = hop(tr.entries, 5, "cloud", "kmc",
                       Message{tr.session, CloudToKmcBody{received.uid, received.ak, std::move(er)}});

  // (6) re-encryption from owner keys to the session key.
  const auto& kmc_in = std::get<CloudToKmcBody>(to_kmc.payload);
  auto ner = kmc_->reencrypt_results(kmc_in.results, kmc_in.uid, to_kmc.session);
  Message back = hop(tr.entries, 6, "kmc", "cloud",
                     Message{tr.session, KmcToCloudBody{kmc_in.uid, std::move(ner)}});

  // (7) delivery to the user.
  auto& cloud_in = std::get<KmcToCloudBody>(back.payload);
  Message delivered = hop(tr.entries, 7, "cloud", who,
                          Message{tr.session, CloudToUserBody{std::move(cloud_in.results)}});

  for (const auto& item : std::get<CloudToUserBody>(delivered.payload).results) {
    tr.decrypted.push_back({item.owner_id, item.image_id, image_dec(usk, item.image)});
  }
  for (const auto& item : tr.decrypted) {
    const double d = euc_dis(extract_ehd(item.image, cfg_.ehd), query_feature);
    tr.ranked.push_back({item.owner_id, item.image_id, d});
  }
  std::stable_sort(tr.ranked.begin(), tr.ranked.end(), [](const auto& a, const auto& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.owner_id != b.owner_id) return a.owner_id < b.owner_id;
    return a.image_id < b.image_id;
  });
  if (tr.ranked.size() > h) tr.ranked.resize(h);
  return tr;
}

std::string Simulation::setup_text() const {
  std::string out;
  for (const auto& e : setup_log_) out += e.to_line() + "\n";
  return out;
}

std::vector<Simulation::OwnerPlaintext> Simulation::owner_plaintexts() const {
  std::vector<OwnerPlaintext> out;
  for (const auto& [_, owner] : owners_) {
    out.insert(out.end(), owner.plaintexts.begin(), owner.plaintexts.end());
  }
  return out;
}

void Simulation::replay_user_key_next_session(const UserId& uid) {
  users_.at(uid).replay_key = true;
}

}  // namespace mipp
