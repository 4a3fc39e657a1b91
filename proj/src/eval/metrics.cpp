#include "mipp/eval/metrics.hpp"

#include <algorithm>

#include "mipp/common.hpp"

namespace mipp::eval {

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0 ? 2 * precision * recall / denom : 0.0;
}

QueryMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  QueryMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

QueryMetrics compute_metrics(std::span<const std::string> results,
                             const std::map<std::string, std::string>& labels,
                             const std::string& query_label, std::size_t cutoff) {
  if (cutoff > results.size()) {
    fail(ErrorCode::kInvalidLength, "cutoff " + std::to_string(cutoff) + " exceeds " +
                                        std::to_string(results.size()) + " results");
  }
  std::size_t tp = 0;
  for (std::size_t i = 0; i < cutoff; ++i) {
    auto it = labels.find(results[i]);
    if (it == labels.end()) fail(ErrorCode::kConsistency, "unknown result id " + results[i]);
    if (it->second == query_label) ++tp;
  }
  const auto relevant = static_cast<std::size_t>(std::count_if(
      labels.begin(), labels.end(), [&](const auto& kv) { return kv.second == query_label; }));
  return metrics_from_counts(tp, cutoff - tp, relevant - std::min(relevant, tp));
}

MetricsReport summarize(std::vector<QueryMetrics> per_query) {
  MetricsReport r;
  if (!per_query.empty()) {
    for (const auto& q : per_query) {
      r.precision += q.precision;
      r.recall += q.recall;
    }
    r.precision /= static_cast<double>(per_query.size());
    r.recall /= static_cast<double>(per_query.size());
    r.f1 = f1_score(r.precision, r.recall);
  }
  r.per_query = std::move(per_query);
  return r;
}

std::size_t LeakageHistogram::peak() const {
  return static_cast<std::size_t>(std::max_element(fractions.begin(), fractions.end()) -
                                  fractions.begin());
}

LeakageHistogram leakage_histogram(const std::vector<std::vector<bool>>& hits,
                                   std::size_t bins) {
  if (bins == 0) fail(ErrorCode::kInvalidLength, "need at least one bin");
  LeakageHistogram h;
  h.fractions.assign(bins, 0.0);
  h.queries = hits.size();
  if (hits.empty()) {
    h.warning = "no queries";
    return h;
  }
  const std::size_t len = hits.front().size();
  if (len < bins) fail(ErrorCode::kInvalidLength, "fewer ranks than bins");

  std::vector<std::size_t> counts(bins, 0);
  for (const auto& q : hits) {
    if (q.size() != len) fail(ErrorCode::kLengthMismatch, "ranked lists differ in length");
    for (std::size_t r = 0; r < len; ++r) {
      if (q[r]) ++counts[r * bins / len];
    }
  }
  for (auto c : counts) h.matches += c;
  if (h.matches > 0) {
    for (std::size_t b = 0; b < bins; ++b) {
      h.fractions[b] = static_cast<double>(counts[b]) / static_cast<double>(h.matches);
    }
  }
  if (h.queries < kMinLeakageQueries) {
    h.warning = "only " + std::to_string(h.queries) + " queries; at least " +
                std::to_string(kMinLeakageQueries) + " are needed for stable decile estimates";
  } else if (h.matches == 0) {
    h.warning = "no true matches in any ranking";
  }
  return h;
}

}  // namespace mipp::eval
