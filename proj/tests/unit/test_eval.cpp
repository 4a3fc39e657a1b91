#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../support/fixtures.hpp"
#include "mipp/eval/bench.hpp"
#include "mipp/eval/corpus.hpp"
#include "mipp/eval/experiment.hpp"
#include "mipp/eval/metrics.hpp"
#include "mipp/pgm.hpp"
#include "mipp/similarity.hpp"

using namespace mipp;
using namespace mipp::eval;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mipp-eval-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TextureSpec tiny_spec() {
  TextureSpec spec;
  spec.side = 16;
  spec.per_category = 100;
  return spec;
}

}  // namespace

TEST_CASE("corpus loading and owner assignment") {
  const fs::path root = scratch("corpus");
  write_synthetic_corpus(root, tiny_spec());

  const LabeledCorpus one = load_corpus(root);
  CHECK(one.items.size() == 1000);
  CHECK(one.categories.size() == 10);
  CHECK(one.errors.empty());
  CHECK(one.warnings.empty());
  CHECK(one.items[0].image_id == "cat00-img000");

  const LabeledCorpus three = load_corpus(root, 3);
  CHECK(three.owner_sizes() == std::vector<std::size_t>{334, 333, 333});

  // Images on disk match the generator.
  const auto generated = synthetic_images(tiny_spec(), 100, "corpus");
  const auto loaded = load_images(one);
  REQUIRE(loaded.size() == generated.size());
  for (std::size_t i = 0; i < loaded.size(); i += 97) {
    CHECK(loaded[i].image_id == generated[i].image_id);
    CHECK(loaded[i].image == generated[i].image);
  }

  SUBCASE("bad entries are itemized, empty categories warned about") {
    fs::create_directories(root / "empty");
    write_text(root / "stray.txt", "x");
    write_text(root / "cat03" / "broken.pgm", "P5\n9 9\n255\nshort");
    const LabeledCorpus c = load_corpus(root);
    CHECK(c.items.size() == 1000);
    CHECK(c.errors.size() == 2);
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("empty") != std::string::npos);
  }
  fs::remove_all(root);
}

TEST_CASE("empty and missing corpora") {
  const fs::path root = scratch("empty");
  const LabeledCorpus c = load_corpus(root);
  CHECK(c.items.empty());
  CHECK_FALSE(c.warnings.empty());
  CHECK(code_of([&] { load_corpus(root / "missing"); }) == ErrorCode::kIo);
  fs::remove_all(root);
}

TEST_CASE("synthetic draws are seeded and stream-separated") {
  TextureSpec spec = tiny_spec();
  const auto a = synthetic_images(spec, 3, "queries");
  const auto b = synthetic_images(spec, 3, "queries");
  const auto c = synthetic_images(spec, 3, "corpus");
  REQUIRE(a.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].image == b[i].image);
    CHECK(a[i].image != c[i].image);
  }
  CHECK(category_density(spec, 0) < category_density(spec, 9));
  CHECK(category_label(7) == "cat07");
}

TEST_CASE("metric examples") {
  const QueryMetrics m = metrics_from_counts(30, 70, 70);
  CHECK(m.precision == doctest::Approx(0.3));
  CHECK(m.recall == doctest::Approx(0.3));
  CHECK(m.f1 == doctest::Approx(0.3));
  CHECK(f1_score(0, 0) == 0);
  CHECK(f1_score(1, 0.5) == doctest::Approx(2.0 / 3.0));

  std::map<std::string, std::string> labels;
  std::vector<std::string> results;
  for (int i = 0; i < 4; ++i) {
    labels["a" + std::to_string(i)] = "A";
    labels["b" + std::to_string(i)] = "B";
  }
  results = {"a0", "a1", "b0", "a2"};
  const QueryMetrics q = compute_metrics(results, labels, "A", 4);
  CHECK(q.tp == 3);
  CHECK(q.fp == 1);
  CHECK(q.fn == 1);
  const QueryMetrics top2 = compute_metrics(results, labels, "A", 2);
  CHECK(top2.precision == 1.0);
  CHECK(top2.recall == 0.5);
  results = {"a0", "a1", "a2", "a3"};
  CHECK(compute_metrics(results, labels, "A", 4).f1 == 1.0);
  CHECK(code_of([&] { compute_metrics(results, labels, "A", 5); }) == ErrorCode::kInvalidLength);
  results = {"zz"};
  CHECK(code_of([&] { compute_metrics(results, labels, "A", 1); }) == ErrorCode::kConsistency);

  const MetricsReport r = summarize({metrics_from_counts(1, 0, 1), metrics_from_counts(0, 1, 1)});
  CHECK(r.precision == doctest::Approx(0.5));
  CHECK(r.recall == doctest::Approx(0.25));
  CHECK(r.f1 == doctest::Approx(f1_score(0.5, 0.25)));
}

TEST_CASE("leakage histogram") {
  std::vector<std::vector<bool>> hits(40, std::vector<bool>(100, false));
  for (auto& h : hits) {
    h[0] = true;
    h[55] = true;
  }
  const LeakageHistogram lh = leakage_histogram(hits);
  CHECK(lh.queries == 40);
  CHECK(lh.matches == 80);
  CHECK(lh.fractions[0] == doctest::Approx(0.5));
  CHECK(lh.fractions[5] == doctest::Approx(0.5));
  CHECK(std::accumulate(lh.fractions.begin(), lh.fractions.end(), 0.0) == doctest::Approx(1.0));
  CHECK(lh.peak() == 0);
  CHECK_FALSE(lh.warning.has_value());

  hits.resize(10);
  CHECK(leakage_histogram(hits).warning.has_value());
  CHECK(leakage_histogram(std::vector<std::vector<bool>>(40, std::vector<bool>(100))).warning.has_value());
}

TEST_CASE("random rankings spread matches evenly over deciles") {
  Drbg rng("leakage-mc");
  std::vector<std::vector<bool>> hits;
  for (int q = 0; q < 2000; ++q) {
    std::vector<bool> h(100);
    for (std::size_t r = 0; r < 100; ++r) h[r] = rng.uniform(10) == 0;
    hits.push_back(std::move(h));
  }
  const LeakageHistogram lh = leakage_histogram(hits);
  for (double f : lh.fractions) CHECK(f == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("plaintext EucDis top-h against a brute-force oracle") {
  const auto items = synthetic_images(tiny_spec(), 5, "corpus", 2);
  std::vector<FeatureVector> feats;
  for (const auto& it : items) feats.push_back(extract_ehd(it.image));
  Drbg rng("euc-oracle");
  for (int trial = 0; trial < 10; ++trial) {
    const FeatureVector& q = feats[rng.uniform(feats.size())];
    std::vector<std::size_t> order(feats.size());
    std::iota(order.begin(), order.end(), 0);
    auto dist = [&](std::size_t i) {
      long double s = 0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        const long double d = static_cast<long double>(feats[i].a[k]) - q.a[k];
        s += d * d;
      }
      return s;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (dist(x) != dist(y)) return dist(x) < dist(y);
      if (items[x].owner != items[y].owner) return items[x].owner < items[y].owner;
      return items[x].image_id < items[y].image_id;
    });
    order.resize(12);
    CHECK(euc_top_h(feats, items, q, 12) == order);
  }
}

TEST_CASE("small experiment end to end") {
  TextureSpec spec = tiny_spec();
  spec.side = 32;
  const auto corpus = synthetic_images(spec, 10, "corpus");
  const auto queries = synthetic_images(spec, 1, "queries");
  ExperimentConfig cfg;
  cfg.top_h = 10;
  cfg.cutoffs = {5, 10};
  const ExperimentResult r = run_experiment(fixtures::params64(), corpus, queries, cfg);
  REQUIRE(r.query_ids.size() == 10);
  REQUIRE(r.newdis.ranked.size() == 10);

  std::map<std::string, FeatureVector> feats;
  for (const auto& it : corpus) feats[it.image_id] = extract_ehd(it.image);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const FeatureVector qf = extract_ehd(queries[q].image);
    const auto& ranked = r.newdis.ranked[q];
    CHECK(ranked.size() == 10);
    for (std::size_t i = 1; i < ranked.size(); ++i) {
      CHECK(new_dis(feats[ranked[i - 1]], qf) <= new_dis(feats[ranked[i]], qf) + 1e-9);
    }
  }
  CHECK(r.euc.metrics.count(5) == 1);
  CHECK(r.newdis.metrics.at(10).per_query.size() == 10);

  cfg.threads = 3;
  const ExperimentResult parallel = run_experiment(fixtures::params64(), corpus, queries, cfg);
  CHECK(parallel.newdis.ranked == r.newdis.ranked);
  CHECK(parallel.euc.ranked == r.euc.ranked);
  CHECK(metrics_tsv(parallel) == metrics_tsv(r));
  CHECK(leakage_tsv(r).starts_with("decile\teucdis\tnewdis\n"));
}

TEST_CASE("small benchmark") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(parse_bench_mode(to_string(BenchMode::kEncWithIndex)) == BenchMode::kEncWithIndex);

  BenchConfig cfg;
  cfg.sizes = {50, 100};
  cfg.repetitions = 5;
  cfg.top_h = 20;
  const BenchResult r = run_bench(fixtures::params64(), cfg);
  CHECK(r.rankings_identical);
  CHECK_FALSE(r.interrupted);
  for (BenchMode mode : kAllBenchModes) {
    for (std::size_t n : cfg.sizes) {
      const BenchRow* row = r.find(mode, n);
      REQUIRE(row != nullptr);
      CHECK(row->samples.size() == 5);
      CHECK(row->median_seconds >= 0);
    }
  }
  REQUIRE(r.storage.size() == 2);
  CHECK(r.storage[1].features == 100);
  CHECK(r.storage[1].index_to_feature_ratio() < 0.05);
  CHECK(bench_tsv(r).starts_with("mode\tsize\tmedian_s\treps\n"));
}
