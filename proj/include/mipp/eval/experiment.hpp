#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mipp/cloud_node.hpp"
#include "mipp/eval/corpus.hpp"
#include "mipp/eval/metrics.hpp"
#include "mipp/kmc_node.hpp"

namespace mipp::eval {

/// A corpus uploaded to a cloud, with owner keys deposited at a KMC and a
/// single user authorized by every owner.
struct EncryptedCorpus {
  std::unique_ptr<CloudNode> cloud;
  std::unique_ptr<KmcNode> kmc;
  UserId user;
  AccessToken ak;
  std::vector<FeatureVector> features;  // plaintext, in corpus order
};

inline constexpr std::string_view kEvalUser = "evaluator";

EncryptedCorpus encrypt_corpus(const GroupParams& params, const std::vector<LabeledImage>& images,
                               std::size_t owners, std::uint64_t seed, const EhdConfig& ehd = {});

struct ExperimentConfig {
  std::size_t owners = 3;
  std::uint32_t top_h = 100;
  std::vector<std::size_t> cutoffs{10, 20, 50, 100};
  std::uint64_t seed = 1;
  std::size_t threads = 1;  // concurrent query sessions
  EhdConfig ehd;
};

struct MethodResult {
  std::vector<std::vector<std::string>> ranked;  // image ids per query
  std::map<std::size_t, MetricsReport> metrics;  // by cutoff
  LeakageHistogram leakage;                      // over the top_h ranks
};

struct ExperimentResult {
  std::vector<std::string> query_ids;
  std::vector<std::string> query_labels;
  MethodResult euc;     // plaintext EucDis
  MethodResult newdis;  // NewDis evaluated by the cloud on encrypted features
  double seconds = 0;
};

/// Every query is ranked twice: by the cloud over the encrypted corpus
/// (NewDis from the index) and by plaintext EucDis over the same features.
/// Both rankings break ties by (owner id, image id).
ExperimentResult run_experiment(const GroupParams& params, const std::vector<LabeledImage>& corpus,
                                const std::vector<LabeledImage>& queries,
                                const ExperimentConfig& cfg);

/// Plaintext EucDis top-h over `features`, ties by (owner, image id).
std::vector<std::size_t> euc_top_h(const std::vector<FeatureVector>& features,
                                   const std::vector<LabeledImage>& items,
                                   const FeatureVector& query, std::size_t h);

/// `method  cutoff  precision  recall  f1`
std::string metrics_tsv(const ExperimentResult& r);
/// `decile  eucdis  newdis`
std::string leakage_tsv(const ExperimentResult& r);

}  // namespace mipp::eval
