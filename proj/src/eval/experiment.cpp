#include "mipp/eval/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <thread>

#include "mipp/kernels.hpp"

namespace mipp::eval {

EncryptedCorpus encrypt_corpus(const GroupParams& params, const std::vector<LabeledImage>& images,
                               std::size_t owners, std::uint64_t seed, const EhdConfig& ehd) {
  if (owners == 0) fail(ErrorCode::kInvalidLength, "owner count must be positive");
  EncryptedCorpus ec;
  ec.cloud = std::make_unique<CloudNode>(params);
  ec.kmc = std::make_unique<KmcNode>();
  ec.user = std::string(kEvalUser);
  Drbg user_rng(seed, "eval/user");
  ec.ak = AccessToken::random(user_rng);
  ec.kmc->enroll_user(ec.user);

  std::size_t key_len = 1;
  for (const auto& img : images) key_len = std::max(key_len, img.image.pixel_count());

  std::vector<std::vector<ImageUpload>> uploads(owners);
  std::vector<KeyStream> keys;
  std::vector<Drbg> rngs;
  for (std::size_t o = 0; o < owners; ++o) {
    rngs.emplace_back(seed, "eval/" + owner_name(o));
    keys.push_back(keygen(128, key_len, rngs.back().bytes(32)));
  }
  ec.features.reserve(images.size());
  for (const auto& img : images) {
    if (img.owner >= owners) fail(ErrorCode::kUnknownOwner, "owner index out of range");
    ec.features.push_back(extract_ehd(img.image, ehd));
    uploads[img.owner].push_back({img.image_id, image_enc(keys[img.owner], img.image),
                                  encrypt_feature_pair(params, ec.features.back(), rngs[img.owner])});
  }
  for (std::size_t o = 0; o < owners; ++o) {
    const OwnerId oid = owner_name(o);
    ec.cloud->register_owner(oid, {{ec.user, ec.ak}}, std::move(uploads[o]));
    ec.kmc->enroll_owner(oid);
    ec.kmc->store_owner_key(oid, std::move(keys[o]));
  }
  return ec;
}

std::vector<std::size_t> euc_top_h(const std::vector<FeatureVector>& features,
                                   const std::vector<LabeledImage>& items,
                                   const FeatureVector& query, std::size_t h) {
  const auto& k = kernels::active();
  std::vector<std::uint64_t> d(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != query.size()) fail(ErrorCode::kLengthMismatch, "feature length");
    d[i] = k.squared_distance(features[i].a.data(), query.a.data(), query.size());
  }
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n = std::min(h, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (d[a] != d[b]) return d[a] < d[b];
                      if (items[a].owner != items[b].owner) {
                        return owner_name(items[a].owner) < owner_name(items[b].owner);
                      }
                      return items[a].image_id < items[b].image_id;
                    });
  order.resize(n);
  return order;
}

namespace {

void finish(MethodResult& m, const std::vector<std::string>& query_labels,
            const std::map<std::string, std::string>& labels, const ExperimentConfig& cfg) {
  for (std::size_t cutoff : cfg.cutoffs) {
    std::vector<QueryMetrics> per_query;
    bool fits = true;
    for (std::size_t q = 0; q < m.ranked.size(); ++q) {
      if (cutoff > m.ranked[q].size()) {
        fits = false;
        break;
      }
      per_query.push_back(compute_metrics(m.ranked[q], labels, query_labels[q], cutoff));
    }
    if (fits) m.metrics[cutoff] = summarize(std::move(per_query));
  }
  std::vector<std::vector<bool>> hits;
  for (std::size_t q = 0; q < m.ranked.size(); ++q) {
    std::vector<bool> row;
    for (const auto& id : m.ranked[q]) row.push_back(labels.at(id) == query_labels[q]);
    hits.push_back(std::move(row));
  }
  if (!hits.empty() && hits.front().size() >= 10) m.leakage = leakage_histogram(hits);
}

}  // namespace

ExperimentResult run_experiment(const GroupParams& params, const std::vector<LabeledImage>& corpus,
                                const std::vector<LabeledImage>& queries,
                                const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<LabeledImage> items = corpus;
  for (std::size_t i = 0; i < items.size(); ++i) items[i].owner = i % cfg.owners;
  EncryptedCorpus ec = encrypt_corpus(params, items, cfg.owners, cfg.seed, cfg.ehd);

  std::map<std::string, std::string> labels;
  for (const auto& item : items) {
    if (!labels.emplace(item.image_id, item.label).second) {
      fail(ErrorCode::kDuplicateImage, item.image_id);
    }
  }

  ExperimentResult r;
  const std::size_t nq = queries.size();
  r.euc.ranked.resize(nq);
  r.newdis.ranked.resize(nq);
  for (const auto& q : queries) {
    r.query_ids.push_back(q.image_id);
    r.query_labels.push_back(q.label);
  }

  auto run_query = [&](std::size_t i) {
    const FeatureVector f = extract_ehd(queries[i].image, cfg.ehd);
    Drbg rng(cfg.seed, "eval/query/" + std::to_string(i));
    QueryEnvelope env{encrypt_feature_pair(params, f, rng), ec.user, ec.ak, cfg.top_h};
    for (const auto& hit : ec.cloud->rank(env)) r.newdis.ranked[i].push_back(hit.image_id);
    for (std::size_t idx : euc_top_h(ec.features, items, f, cfg.top_h)) {
      r.euc.ranked[i].push_back(items[idx].image_id);
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, nq));
  if (threads == 1) {
    for (std::size_t i = 0; i < nq; ++i) run_query(i);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < nq; i += threads) run_query(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  finish(r.euc, r.query_labels, labels, cfg);
  finish(r.newdis, r.query_labels, labels, cfg);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string metrics_tsv(const ExperimentResult& r) {
  std::string out = "method\tcutoff\tprecision\trecall\tf1\n";
  char line[128];
  for (const auto* m : {&r.euc, &r.newdis}) {
    const char* name = m == &r.euc ? "eucdis" : "newdis";
    for (const auto& [cutoff, rep] : m->metrics) {
      std::snprintf(line, sizeof line, "%s\t%zu\t%.4f\t%.4f\t%.4f\n", name, cutoff, rep.precision,
                    rep.recall, rep.f1);
      out += line;
    }
  }
  return out;
}

std::string leakage_tsv(const ExperimentResult& r) {
  std::string out = "decile\teucdis\tnewdis\n";
  char line[96];
  const std::size_t bins = std::max(r.euc.leakage.fractions.size(), r.newdis.leakage.fractions.size());
  for (std::size_t b = 0; b < bins; ++b) {
    auto at = [b](const LeakageHistogram& h) { return b < h.fractions.size() ? h.fractions[b] : 0.0; };
    std::snprintf(line, sizeof line, "%zu\t%.4f\t%.4f\n", b + 1, at(r.euc.leakage), at(r.newdis.leakage));
    out += line;
  }
  return out;
}

}  // namespace mipp::eval
