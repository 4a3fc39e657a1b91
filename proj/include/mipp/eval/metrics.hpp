#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mipp::eval {

struct QueryMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Means over queries. f1 is recomputed from the mean P and R.
struct MetricsReport {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::vector<QueryMetrics> per_query;
};

/// 2PR / (P + R), or 0 when P + R = 0.
double f1_score(double precision, double recall);

/// Counts the confusion table from raw numbers.
QueryMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

/// TP = results within `cutoff` whose label equals `query_label`; the number
/// of relevant items is every id in `labels` carrying that label. Throws
/// kConsistency on an id missing from `labels` and kInvalidLength when
/// cutoff exceeds the result count.
QueryMetrics compute_metrics(std::span<const std::string> results,
                             const std::map<std::string, std::string>& labels,
                             const std::string& query_label, std::size_t cutoff);

MetricsReport summarize(std::vector<QueryMetrics> per_query);

inline constexpr std::size_t kMinLeakageQueries = 30;

struct LeakageHistogram {
  std::vector<double> fractions;  // per decile, summing to 1 when matches > 0
  std::size_t queries = 0;
  std::size_t matches = 0;
  std::optional<std::string> warning;

  /// Index of the largest fraction (first on ties).
  std::size_t peak() const;
};

/// `hits[q][r]` is true when the item at rank r for query q shares the
/// query's category. Every list must have the same length, at least `bins`.
LeakageHistogram leakage_histogram(const std::vector<std::vector<bool>>& hits,
                                   std::size_t bins = 10);

}  // namespace mipp::eval
