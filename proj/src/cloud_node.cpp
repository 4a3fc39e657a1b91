#include "mipp/cloud_node.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mipp/pgm.hpp"

namespace mipp {

namespace fs = std::filesystem;

AccessToken AccessToken::random(Drbg& rng) {
  AccessToken t;
  rng.fill(t.bytes);
  return t;
}

AccessToken AccessToken::from_hex(std::string_view hex) {
  Bytes raw = mipp::from_hex(hex);
  if (raw.size() != 32) fail(ErrorCode::kParse, "access token must be 32 bytes");
  AccessToken t;
  std::copy(raw.begin(), raw.end(), t.bytes.begin());
  return t;
}

double RankedHit::sim(std::size_t l) const {
  if (l == 0) return 0.0;
  return std::sqrt(static_cast<double>(scaled_radicand) / static_cast<double>(l));
}

CloudNode::CloudNode(GroupParams params)
    : params_(std::move(params)),
      params_id_(params_id(params_)),
      current_(std::make_shared<const Snapshot>()) {}

std::shared_ptr<const CloudNode::Snapshot> CloudNode::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return current_;
}

void CloudNode::publish(std::shared_ptr<const Snapshot> next) {
  std::lock_guard lock(snapshot_mu_);
  current_ = std::move(next);
}

void CloudNode::check_upload(const ImageUpload& upload) const {
  require_identifier(upload.image_id, "image id");
  if (upload.feature.params_id != params_id_) {
    fail(ErrorCode::kParamsMismatch, "image " + upload.image_id +
                                         " encrypted under params '" +
                                         upload.feature.params_id + "'");
  }
  if (upload.encrypted.pixels.size() !=
      static_cast<std::size_t>(upload.encrypted.width) * upload.encrypted.height) {
    fail(ErrorCode::kInvalidImage, "image " + upload.image_id);
  }
}

IndexEntry CloudNode::index_row(const OwnerId& owner_id, const ImageUpload& upload) const {
  const SumPair sums = recover_sums(params_, upload.feature);
  return IndexEntry{owner_id, upload.image_id, sums.s1, sums.s2};
}

namespace {

void check_dimension(std::size_t expected, std::size_t got, const ImageId& id) {
  if (expected != 0 && got != expected) {
    fail(ErrorCode::kLengthMismatch, "image " + id + " has feature dimension " +
                                         std::to_string(got) + ", index uses " +
                                         std::to_string(expected));
  }
}

std::size_t snapshot_dimension(const std::map<OwnerId, OwnerRecord>& owners) {
  for (const auto& [_, rec] : owners) {
    for (const auto& [_, img] : rec.images) return img->feature.dimension();
  }
  return 0;
}

}  // namespace

void CloudNode::register_owner(const OwnerId& owner_id, std::vector<AulEntry> aul,
                               std::vector<ImageUpload> images) {
  require_identifier(owner_id, "owner id");
  for (const auto& entry : aul) require_identifier(entry.uid, "user id");

  std::lock_guard write_lock(write_mu_);
  auto base = snapshot();
  if (base->owners.contains(owner_id)) {
    fail(ErrorCode::kDuplicateOwner, owner_id);
  }

  std::size_t dimension = snapshot_dimension(base->owners);
  OwnerRecord record;
  record.owner_id = owner_id;
  record.aul = std::set<AulEntry>(aul.begin(), aul.end());
  std::vector<IndexEntry> rows;
  for (auto& upload : images) {
    check_upload(upload);
    check_dimension(dimension, upload.feature.dimension(), upload.image_id);
    dimension = upload.feature.dimension();
    if (record.images.contains(upload.image_id)) {
      fail(ErrorCode::kDuplicateImage, owner_id + "/" + upload.image_id);
    }
    rows.push_back(index_row(owner_id, upload));
    record.images.emplace(upload.image_id,
                          std::make_shared<const StoredImage>(
                              StoredImage{std::move(upload.encrypted), std::move(upload.feature)}));
  }

  auto next = std::make_shared<Snapshot>(*base);
  for (auto& row : rows) {
    auto key = std::make_pair(row.owner_id, row.image_id);
    next->index.emplace(std::move(key), std::move(row));
  }
  next->owners.emplace(owner_id, std::move(record));
  publish(std::move(next));
}

std::set<OwnerId> CloudNode::verify_user(const UserId& uid, const AccessToken& ak) const {
  auto snap = snapshot();
  std::set<OwnerId> owners;
  const AulEntry probe{uid, ak};
  for (const auto& [oid, record] : snap->owners) {
    if (record.aul.contains(probe)) owners.insert(oid);
  }
  return owners;
}

std::vector<RankedHit> CloudNode::rank(const QueryEnvelope& q, RetrievalPath path) const {
  auto snap = snapshot();
  std::set<OwnerId> authorized;
  {
    const AulEntry probe{q.uid, q.ak};
    for (const auto& [oid, record] : snap->owners) {
      if (record.aul.contains(probe)) authorized.insert(oid);
    }
  }
  if (authorized.empty()) fail(ErrorCode::kUnauthorized, "user " + q.uid);
  if (q.h == 0) fail(ErrorCode::kInvalidLength, "h must be >= 1");

  const SumPair query = recover_sums(params_, q.eq);
  const std::size_t dimension = snapshot_dimension(snap->owners);
  if (dimension != 0 && dimension != query.l) {
    fail(ErrorCode::kLengthMismatch, "query dimension " + std::to_string(query.l) +
                                         ", index uses " + std::to_string(dimension));
  }
  std::vector<RankedHit> hits;

  if (path == RetrievalPath::kIndex) {
    for (const auto& oid : authorized) {
      auto it = snap->index.lower_bound({oid, ImageId{}});
      for (; it != snap->index.end() && it->first.first == oid; ++it) {
        const IndexEntry& row = it->second;
        const SumPair stored{row.s1, row.s2, query.l};
        hits.push_back({row.owner_id, row.image_id, scaled_radicand(query, stored)});
      }
    }
  } else {
    for (const auto& oid : authorized) {
      for (const auto& [iid, img] : snap->owners.at(oid).images) {
        // Recomputes what the index would hold, straight from ciphertexts.
        const SumPair stored = recover_sums(params_, img->feature);
        hits.push_back({oid, iid, scaled_radicand(query, stored)});
      }
    }
  }

  auto before = [](const RankedHit& a, const RankedHit& b) {
    if (a.scaled_radicand != b.scaled_radicand) return a.scaled_radicand < b.scaled_radicand;
    if (a.owner_id != b.owner_id) return a.owner_id < b.owner_id;
    return a.image_id < b.image_id;
  };
  const std::size_t keep = std::min<std::size_t>(q.h, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    before);
  hits.resize(keep);
  return hits;
}

std::vector<RetrievedImage> CloudNode::retrieve_top_h(const QueryEnvelope& q,
                                                      RetrievalPath path) const {
  auto snap = snapshot();
  std::vector<RetrievedImage> out;
  for (auto& hit : rank(q, path)) {
    const auto& record = snap->owners.at(hit.owner_id);
    auto it = record.images.find(hit.image_id);
    if (it == record.images.end()) {
      // An update landed between ranking and fetching.
      continue;
    }
    out.push_back({hit.owner_id, hit.image_id, it->second->encrypted});
  }
  return out;
}

void CloudNode::apply_update(const OwnerId& owner_id, UpdateCommand command) {
  std::lock_guard write_lock(write_mu_);
  auto base = snapshot();
  auto owner_it = base->owners.find(owner_id);
  if (owner_it == base->owners.end()) fail(ErrorCode::kUnknownOwner, owner_id);

  auto next = std::make_shared<Snapshot>(*base);
  OwnerRecord& record = next->owners.at(owner_id);

  auto require_owned = [&](const ImageId& iid) {
    if (!record.images.contains(iid)) {
      fail(ErrorCode::kOwnership, "image '" + iid + "' does not belong to " + owner_id);
    }
  };

  std::visit(
      [&](auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, AddImages>) {
          std::size_t dimension = snapshot_dimension(next->owners);
          for (auto& upload : cmd.images) {
            check_upload(upload);
            check_dimension(dimension, upload.feature.dimension(), upload.image_id);
            dimension = upload.feature.dimension();
            if (record.images.contains(upload.image_id)) {
              fail(ErrorCode::kDuplicateImage, owner_id + "/" + upload.image_id);
            }
            IndexEntry row = index_row(owner_id, upload);
            next->index.emplace(std::make_pair(owner_id, upload.image_id), std::move(row));
            record.images.emplace(upload.image_id,
                                  std::make_shared<const StoredImage>(StoredImage{
                                      std::move(upload.encrypted), std::move(upload.feature)}));
          }
        } else if constexpr (std::is_same_v<T, DeleteImages>) {
          for (const auto& iid : cmd.image_ids) {
            require_owned(iid);
            record.images.erase(iid);
            next->index.erase({owner_id, iid});
          }
        } else {
          for (auto& upload : cmd.images) {
            check_upload(upload);
            require_owned(upload.image_id);
            const IndexEntry& row = next->index.at({owner_id, upload.image_id});
            const SumPair sums = recover_sums(params_, upload.feature);
            if (sums.s1 != row.s1 || sums.s2 != row.s2) {
              fail(ErrorCode::kConsistency,
                   "update of " + upload.image_id +
                       " changes the plaintext feature; delete and add instead");
            }
            record.images[upload.image_id] = std::make_shared<const StoredImage>(
                StoredImage{std::move(upload.encrypted), std::move(upload.feature)});
          }
        }
      },
      command);

  publish(std::move(next));
}

std::vector<IndexEntry> CloudNode::index_rows() const {
  auto snap = snapshot();
  std::vector<IndexEntry> rows;
  rows.reserve(snap->index.size());
  for (const auto& [_, row] : snap->index) rows.push_back(row);
  return rows;
}

std::size_t CloudNode::index_size() const { return snapshot()->index.size(); }

std::size_t CloudNode::image_count() const {
  std::size_t n = 0;
  for (const auto& [_, rec] : snapshot()->owners) n += rec.images.size();
  return n;
}

std::vector<OwnerId> CloudNode::owner_ids() const {
  std::vector<OwnerId> ids;
  for (const auto& [oid, _] : snapshot()->owners) ids.push_back(oid);
  return ids;
}

std::shared_ptr<const StoredImage> CloudNode::stored_image(const OwnerId& owner_id,
                                                           const ImageId& image_id) const {
  auto snap = snapshot();
  auto it = snap->owners.find(owner_id);
  if (it == snap->owners.end()) return nullptr;
  auto img = it->second.images.find(image_id);
  return img == it->second.images.end() ? nullptr : img->second;
}

bool CloudNode::consistent() const {
  auto snap = snapshot();
  std::size_t images = 0;
  for (const auto& [oid, rec] : snap->owners) {
    for (const auto& [iid, _] : rec.images) {
      if (!snap->index.contains({oid, iid})) return false;
      ++images;
    }
  }
  return images == snap->index.size();
}

std::string CloudNode::index_tsv() const {
  std::string out = "owner_id\timage_id\ts1\ts2\n";
  for (const auto& [_, row] : snapshot()->index) {
    out += row.owner_id + '\t' + row.image_id + '\t' + std::to_string(row.s1) + '\t' +
           std::to_string(row.s2) + '\n';
  }
  return out;
}

Bytes CloudNode::observable_state() const {
  auto snap = snapshot();
  Bytes out;
  auto append = [&out](ByteView b) { out.insert(out.end(), b.begin(), b.end()); };
  append(as_bytes(serialize_params(params_)));
  for (const auto& [oid, rec] : snap->owners) {
    append(as_bytes(oid));
    for (const auto& entry : rec.aul) {
      append(as_bytes(entry.uid));
      append(entry.ak.bytes);
    }
    for (const auto& [iid, img] : rec.images) {
      append(as_bytes(iid));
      append(encode_pgm(img->encrypted, true));
      append(as_bytes(serialize_encrypted_feature(img->feature)));
    }
  }
  append(as_bytes(index_tsv()));
  return out;
}

void CloudNode::save(const fs::path& root) const {
  auto snap = snapshot();
  // Rewritten from scratch so deleted images leave no stale files behind.
  fs::remove_all(root / "owners");
  fs::create_directories(root / "owners");
  write_text(root / "params.txt", serialize_params(params_));
  for (const auto& [oid, rec] : snap->owners) {
    const fs::path dir = root / "owners" / oid;
    std::string manifest = "MIPP-OWNER-1\nowner=" + oid + "\n";
    for (const auto& entry : rec.aul) {
      manifest += "aul=" + entry.uid + "\t" + entry.ak.hex() + "\n";
    }
    for (const auto& [iid, img] : rec.images) {
      manifest += "image=" + iid + "\n";
      write_pgm(dir / "img" / (iid + ".pgm"), img->encrypted, true);
      write_text(dir / "feat" / (iid + ".eft"), serialize_encrypted_feature(img->feature));
    }
    write_text(dir / "manifest", manifest);
  }
  write_text(root / "index.tsv", index_tsv());
}

std::unique_ptr<CloudNode> CloudNode::load(const fs::path& root) {
  auto node = std::make_unique<CloudNode>(parse_params(read_text(root / "params.txt")));
  auto snap = std::make_shared<Snapshot>();

  if (fs::exists(root / "owners")) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root / "owners")) {
      if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
      const std::string manifest = read_text(dir / "manifest");
      auto lines = split(manifest, '\n');
      if (lines.empty() || lines[0] != "MIPP-OWNER-1") {
        fail(ErrorCode::kParse, "bad manifest in " + dir.string());
      }
      OwnerRecord rec;
      for (std::size_t i = 1; i < lines.size(); ++i) {
        auto line = lines[i];
        if (line.empty()) continue;
        if (line.starts_with("owner=")) {
          rec.owner_id = std::string(line.substr(6));
        } else if (line.starts_with("aul=")) {
          auto parts = split(line.substr(4), '\t');
          if (parts.size() != 2) fail(ErrorCode::kParse, "bad AUL line");
          rec.aul.insert(AulEntry{std::string(parts[0]), AccessToken::from_hex(parts[1])});
        } else if (line.starts_with("image=")) {
          const std::string iid(line.substr(6));
          require_identifier(iid, "image id");
          auto pgm = read_pgm(dir / "img" / (iid + ".pgm"));
          auto feat = parse_encrypted_feature(read_text(dir / "feat" / (iid + ".eft")));
          rec.images.emplace(iid, std::make_shared<const StoredImage>(
                                      StoredImage{std::move(pgm.image), std::move(feat)}));
        } else {
          fail(ErrorCode::kParse, "unknown manifest line in " + dir.string());
        }
      }
      require_identifier(rec.owner_id, "owner id");
      snap->owners.emplace(rec.owner_id, std::move(rec));
    }
  }

  const std::string tsv = read_text(root / "index.tsv");
  auto lines = split(tsv, '\n');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cols = split(lines[i], '\t');
    if (cols.size() != 4) fail(ErrorCode::kParse, "index.tsv line " + std::to_string(i + 1));
    IndexEntry row{std::string(cols[0]), std::string(cols[1]), 0, 0};
    auto parse_u64 = [&](std::string_view s, std::uint64_t& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        fail(ErrorCode::kParse, "index.tsv line " + std::to_string(i + 1));
      }
    };
    parse_u64(cols[2], row.s1);
    parse_u64(cols[3], row.s2);
    snap->index.emplace(std::make_pair(row.owner_id, row.image_id), std::move(row));
  }

  node->publish(std::move(snap));
  if (!node->consistent()) {
    fail(ErrorCode::kConsistency, "index.tsv does not match stored images");
  }
  return node;
}

}  // namespace mipp
