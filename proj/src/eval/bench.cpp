#include "mipp/eval/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "mipp/cloud_node.hpp"
#include "mipp/pgm.hpp"

namespace mipp::eval {

std::string_view to_string(BenchMode mode) {
  switch (mode) {
    case BenchMode::kPlain: return "plain";
    case BenchMode::kEncNoIndex: return "enc_no_index";
    case BenchMode::kEncWithIndex: return "enc_with_index";
    case BenchMode::kIndexBuild: return "index_build";
  }
  return "unknown";
}

BenchMode parse_bench_mode(std::string_view name) {
  for (BenchMode m : kAllBenchModes) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorCode::kParse, "unknown bench mode " + std::string(name));
}

const BenchRow* BenchResult::find(BenchMode mode, std::size_t size) const {
  for (const auto& row : rows) {
    if (row.mode == mode && row.size == size) return &row;
  }
  return nullptr;
}

double median(std::vector<double> samples) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2;
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_once(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

FeatureVector random_feature(Drbg& rng, std::size_t l) {
  FeatureVector f;
  f.a.resize(l);
  for (auto& v : f.a) v = static_cast<std::uint32_t>(rng.uniform(256));
  return f;
}

std::string image_id(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "f%06zu", i);
  return buf;
}

const OwnerId kOwner = "bench-owner";
const UserId kUser = "bench-user";

}  // namespace

BenchResult run_bench(const GroupParams& params, const BenchConfig& cfg,
                      const std::function<void(const BenchRow&)>& on_row) {
  if (cfg.sizes.empty()) return {};
  if (!std::is_sorted(cfg.sizes.begin(), cfg.sizes.end())) {
    fail(ErrorCode::kInvalidLength, "bench sizes must be ascending");
  }
  if (cfg.repetitions == 0) fail(ErrorCode::kInvalidLength, "need at least one repetition");

  BenchResult result;
  auto stopped = [&] { return cfg.stop && cfg.stop->load(); };

  const std::size_t max_n = cfg.sizes.back();
  Drbg rng(cfg.seed, "bench/features");
  Drbg user_rng(cfg.seed, "bench/user");
  const AccessToken ak = AccessToken::random(user_rng);
  const KeyStream key = keygen(128, 64, rng.bytes(32));

  std::vector<FeatureVector> features;
  std::vector<ImageUpload> uploads;
  features.reserve(max_n);
  uploads.reserve(max_n);
  for (std::size_t i = 0; i < max_n; ++i) {
    if (stopped()) {
      result.interrupted = true;
      return result;
    }
    features.push_back(random_feature(rng, cfg.dimension));
    GrayImage thumb(8, 8);
    for (auto& px : thumb.pixels) px = static_cast<std::uint8_t>(rng.uniform(256));
    uploads.push_back({image_id(i), image_enc(key, thumb),
                       encrypt_feature_pair(params, features.back(), rng)});
  }

  std::vector<QueryEnvelope> queries;
  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    queries.push_back({encrypt_feature_pair(params, random_feature(rng, cfg.dimension), rng), kUser,
                       ak, cfg.top_h});
  }
  std::vector<FeatureVector> plain_queries;
  {
    Drbg qrng(cfg.seed, "bench/plain-queries");
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
      plain_queries.push_back(random_feature(qrng, cfg.dimension));
    }
  }

  for (std::size_t n : cfg.sizes) {
    std::vector<ImageUpload> subset(uploads.begin(), uploads.begin() + static_cast<std::ptrdiff_t>(n));
    CloudNode cloud(params);
    cloud.register_owner(kOwner, {{kUser, ak}}, subset);

    StorageReport storage;
    storage.features = n;
    storage.index_bytes = cloud.index_tsv().size();
    for (const auto& up : subset) {
      storage.feature_bytes += serialize_encrypted_feature(up.feature).size();
      storage.image_bytes += encode_pgm(up.encrypted, true).size();
    }
    result.storage.push_back(storage);

    for (BenchMode mode : cfg.modes) {
      BenchRow row{mode, n, 0, {}};
      for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        if (stopped()) {
          result.interrupted = true;
          return result;
        }
        switch (mode) {
          case BenchMode::kPlain: {
            const auto& q = plain_queries[r];
            row.samples.push_back(time_once([&] {
              std::vector<std::pair<std::uint64_t, std::size_t>> d;
              d.reserve(n);
              for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t s = 0;
                for (std::size_t j = 0; j < q.size(); ++j) {
                  const std::int64_t diff = static_cast<std::int64_t>(features[i].a[j]) - q.a[j];
                  s += static_cast<std::uint64_t>(diff * diff);
                }
                d.emplace_back(s, i);
              }
              const std::size_t keep = std::min<std::size_t>(cfg.top_h, n);
              std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(keep), d.end());
            }));
            break;
          }
          case BenchMode::kEncNoIndex:
          case BenchMode::kEncWithIndex: {
            const auto path =
                mode == BenchMode::kEncWithIndex ? RetrievalPath::kIndex : RetrievalPath::kNoIndex;
            std::vector<RankedHit> hits;
            row.samples.push_back(time_once([&] { hits = cloud.rank(queries[r], path); }));
            const auto other = mode == BenchMode::kEncWithIndex ? RetrievalPath::kNoIndex
                                                                : RetrievalPath::kIndex;
            if (hits != cloud.rank(queries[r], other)) result.rankings_identical = false;
            break;
          }
          case BenchMode::kIndexBuild: {
            std::vector<ImageUpload> copy = subset;
            CloudNode fresh(params);
            row.samples.push_back(
                time_once([&] { fresh.register_owner(kOwner, {{kUser, ak}}, std::move(copy)); }));
            break;
          }
        }
      }
      row.median_seconds = median(row.samples);
      if (on_row) on_row(row);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::string bench_tsv(const BenchResult& r) {
  std::string out = "mode\tsize\tmedian_s\treps\n";
  char line[128];
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%s\t%zu\t%.9f\t%zu\n", std::string(to_string(row.mode)).c_str(),
                  row.size, row.median_seconds, row.samples.size());
    out += line;
  }
  return out;
}

std::string storage_tsv(const BenchResult& r) {
  std::string out = "features\tindex_bytes\tfeature_bytes\timage_bytes\tindex_over_feature\n";
  char line[160];
  for (const auto& s : r.storage) {
    std::snprintf(line, sizeof line, "%zu\t%zu\t%zu\t%zu\t%.6f\n", s.features, s.index_bytes,
                  s.feature_bytes, s.image_bytes, s.index_to_feature_ratio());
    out += line;
  }
  return out;
}

}  // namespace mipp::eval
