#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mipp/group_crypto.hpp"

namespace mipp::eval {

enum class BenchMode {
  kPlain,         // plaintext EucDis scan over the features
  kEncNoIndex,    // cloud ranking, sums re-aggregated from ciphertexts per query
  kEncWithIndex,  // cloud ranking from the (S1, S2) index
  kIndexBuild,    // building the index for a whole upload
};

std::string_view to_string(BenchMode mode);
BenchMode parse_bench_mode(std::string_view name);
inline constexpr BenchMode kAllBenchModes[] = {BenchMode::kPlain, BenchMode::kEncNoIndex,
                                               BenchMode::kEncWithIndex, BenchMode::kIndexBuild};

struct BenchConfig {
  std::vector<std::size_t> sizes{1000, 2000, 5000, 10000};  // ascending
  std::vector<BenchMode> modes{std::begin(kAllBenchModes), std::end(kAllBenchModes)};
  std::size_t repetitions = 5;
  std::uint32_t top_h = 100;
  std::size_t dimension = 80;
  std::uint64_t seed = 1;
  const std::atomic<bool>* stop = nullptr;  // checked between measurements
};

struct BenchRow {
  BenchMode mode;
  std::size_t size = 0;
  double median_seconds = 0;
  std::vector<double> samples;
};

/// Bytes the cloud store writes for `features` images.
struct StorageReport {
  std::size_t features = 0;
  std::size_t index_bytes = 0;    // index.tsv
  std::size_t feature_bytes = 0;  // all .eft files
  std::size_t image_bytes = 0;    // all encrypted .pgm files

  double index_to_feature_ratio() const {
    return feature_bytes == 0 ? 0.0
                              : static_cast<double>(index_bytes) / static_cast<double>(feature_bytes);
  }
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<StorageReport> storage;  // one per size
  bool rankings_identical = true;      // index vs no-index, every query
  bool interrupted = false;

  const BenchRow* find(BenchMode mode, std::size_t size) const;
};

double median(std::vector<double> samples);

/// Random features with entries in [0, 255] stand in for image features;
/// each repetition issues a different query.
BenchResult run_bench(const GroupParams& params, const BenchConfig& cfg,
                      const std::function<void(const BenchRow&)>& on_row = {});

/// `mode  size  median_s  reps`
std::string bench_tsv(const BenchResult& r);
/// `features  index_bytes  feature_bytes  image_bytes  index/feature`
std::string storage_tsv(const BenchResult& r);

}  // namespace mipp::eval
