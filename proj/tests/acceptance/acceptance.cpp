// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "mipp/eval/bench.hpp"
#include "mipp/eval/corpus.hpp"
#include "mipp/eval/experiment.hpp"
#include "mipp/feature_crypto.hpp"
#include "mipp/pgm.hpp"
#include "mipp/protocol_sim.hpp"
#include "mipp/similarity.hpp"

using namespace mipp;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!out.pass) ++failures;
  std::printf("criterion %d %s: %s (%s; %.2f s)\n", id, out.pass ? "PASS" : "FAIL", title.c_str(),
              out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

GrayImage random_image(Drbg& rng, std::uint32_t w, std::uint32_t h) {
  GrayImage img(w, h);
  rng.fill(img.pixels);
  return img;
}

FeatureVector random_feature(Drbg& rng, std::size_t l) {
  FeatureVector f;
  for (std::size_t i = 0; i < l; ++i) f.a.push_back(static_cast<std::uint32_t>(rng.uniform(256)));
  return f;
}

// sqrt(l (var_x + var_y + (mean_x - mean_y)^2)) computed straight from the entries.
long double direct_new_dis(const FeatureVector& x, const FeatureVector& y) {
  const long double l = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x.a[i];
    my += y.a[i];
  }
  mx /= l;
  my /= l;
  long double vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (x.a[i] - mx) * (x.a[i] - mx);
    vy += (y.a[i] - my) * (y.a[i] - my);
  }
  vx /= l;
  vy /= l;
  return std::sqrt(l * (vx + vy + (mx - my) * (mx - my)));
}

bool contains(const Bytes& hay, ByteView needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

int main() {
  const GroupParams params = gen_group_params(64, as_bytes("acceptance-64"));
  std::printf("params: p has %zu bits\n", mpz_sizeinbase(params.p.get_mpz_t(), 2));

  report(1, "secure-sum exactness", [&] {
    Drbg rng("acceptance/sum");
    int bad = 0;
    const auto t0 = Clock::now();
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t l = 3 + rng.uniform(126);
      std::vector<std::uint64_t> v(l);
      std::uint64_t direct = 0;
      for (auto& x : v) {
        x = rng.uniform(256);
        direct += x;
      }
      if (aggregate_and_recover(params, encrypt_vector(params, v, rng)) != direct) ++bad;
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    return Outcome{bad == 0 && secs < 10.0, fmt("%d/500 mismatches, %.2f s of 10 s", bad, secs)};
  });

  report(2, "image cipher roundtrip", [&] {
    Drbg rng("acceptance/cipher");
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto w = static_cast<std::uint32_t>(1 + rng.uniform(256));
      const auto h = static_cast<std::uint32_t>(1 + rng.uniform(256));
      const GrayImage img = random_image(rng, w, h);
      const KeyStream sk = keygen(128, img.pixel_count(), rng.bytes(32));
      if (image_dec(sk, image_enc(sk, img)) != img) ++bad;
    }
    return Outcome{bad == 0, fmt("%d/100 mismatches", bad)};
  });

  report(3, "encrypted vs plaintext distance", [&] {
    Drbg rng("acceptance/distance");
    long double worst = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t l = 3 + rng.uniform(126);
      const FeatureVector x = random_feature(rng, l);
      const FeatureVector y = random_feature(rng, l);
      const SumPair sx = recover_sums(params, encrypt_feature_pair(params, x, rng));
      const SumPair sy = recover_sums(params, encrypt_feature_pair(params, y, rng));
      const long double got = sim_from_sums(sx, sy);
      const long double want = direct_new_dis(x, y);
      const long double rel = want == 0 ? std::fabs(got) : std::fabs(got - want) / want;
      worst = std::max(worst, rel);
    }
    return Outcome{worst <= 1e-9L, fmt("max relative error %.3Le", worst)};
  });

  report(4, "index rows survive re-encryption", [&] {
    Drbg rng("acceptance/update");
    CloudNode cloud(params);
    const KeyStream sk = keygen(128, 64, rng.bytes(32));
    std::vector<FeatureVector> feats;
    std::vector<ImageUpload> ups;
    for (int i = 0; i < 20; ++i) {
      feats.push_back(random_feature(rng, 80));
      ups.push_back({"i" + std::to_string(i), image_enc(sk, random_image(rng, 8, 8)),
                     encrypt_feature_pair(params, feats.back(), rng)});
    }
    cloud.register_owner("o", {}, ups);
    const auto before = cloud.index_rows();
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t k = rng.uniform(feats.size());
      ImageUpload up{"i" + std::to_string(k), image_enc(sk, random_image(rng, 8, 8)),
                     encrypt_feature_pair(params, feats[k], rng)};
      const EncryptedFeature fresh = up.feature;
      cloud.apply_update("o", UpdateImages{{std::move(up)}});
      if (cloud.index_rows() != before) ++bad;
      if (cloud.stored_image("o", "i" + std::to_string(k))->feature != fresh) ++bad;
    }
    return Outcome{bad == 0, fmt("%d/200 trials changed the index", bad)};
  });

  eval::TextureSpec spec;
  eval::ExperimentResult experiment;
  bool experiment_ok = false;
  report(5, "retrieval quality", [&] {
    const auto corpus = eval::synthetic_images(spec, 100, "corpus");
    const auto queries = eval::synthetic_images(spec, 5, "queries");
    eval::ExperimentConfig cfg;
    cfg.top_h = 100;
    cfg.cutoffs = {100};
    cfg.threads = 4;
    experiment = eval::run_experiment(params, corpus, queries, cfg);
    experiment_ok = true;
    const double euc = experiment.euc.metrics.at(100).f1;
    const double nd = experiment.newdis.metrics.at(100).f1;
    const bool pass = queries.size() == 50 && nd >= euc - 0.15 && experiment.seconds < 300;
    return Outcome{pass, fmt("F1 NewDis %.4f, EucDis %.4f, %zu queries, %.1f s of 300 s", nd, euc,
                             queries.size(), experiment.seconds)};
  });

  report(6, "leakage distribution", [&] {
    if (!experiment_ok) return Outcome{false, "experiment did not run"};
    const auto& e = experiment.euc.leakage.fractions;
    const auto& n = experiment.newdis.leakage.fractions;
    const bool euc_ok = experiment.euc.leakage.peak() == 0 && e[0] > 0.20;
    bool nd_ok = n.size() == 10;
    for (double f : n) nd_ok = nd_ok && f >= 0.03 && f <= 0.17;
    const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
    return Outcome{euc_ok && nd_ok, fmt("EucDis top decile %.3f (peak decile %zu); NewDis deciles in [%.3f, %.3f]",
                                        e[0], experiment.euc.leakage.peak() + 1, *lo, *hi)};
  });

  eval::BenchResult bench;
  bool bench_ok = false;
  report(7, "index speedup at 10000 features", [&] {
    eval::BenchConfig cfg;
    cfg.sizes = {10000};
    cfg.modes = {eval::BenchMode::kEncNoIndex, eval::BenchMode::kEncWithIndex};
    cfg.repetitions = 5;
    bench = eval::run_bench(params, cfg);
    bench_ok = true;
    const double slow = bench.find(eval::BenchMode::kEncNoIndex, 10000)->median_seconds;
    const double fast = bench.find(eval::BenchMode::kEncWithIndex, 10000)->median_seconds;
    const double speedup = fast > 0 ? slow / fast : INFINITY;
    return Outcome{speedup >= 10.0 && bench.rankings_identical,
                   fmt("no index %.4f s, index %.5f s, %.1fx, rankings %s", slow, fast, speedup,
                       bench.rankings_identical ? "identical" : "DIFFER")};
  });

  report(8, "end-to-end fidelity and cloud plaintext scan", [&] {
    SimConfig cfg;
    cfg.seed = 8;
    cfg.user_key_len = 64 * 64;
    Simulation sim(params, cfg);
    sim.add_user("alice");
    eval::TextureSpec small = spec;
    small.side = 64;
    const auto images = eval::synthetic_images(small, 6, "e2e", 3);
    std::map<std::string, OwnerSetup> setups;
    for (const auto& it : images) {
      auto& s = setups[eval::owner_name(it.owner)];
      s.owner_id = eval::owner_name(it.owner);
      s.authorized_users = {"alice"};
      s.images.emplace_back(it.image_id, it.image);
    }
    for (const auto& [_, s] : setups) sim.add_owner(s);

    std::map<std::pair<OwnerId, ImageId>, GrayImage> truth;
    for (const auto& p : sim.owner_plaintexts()) truth[{p.owner_id, p.image_id}] = p.image;
    const auto queries = eval::synthetic_images(small, 5, "e2e-queries");
    int bad_sessions = 0;
    std::size_t delivered = 0;
    for (int s = 0; s < 50; ++s) {
      const auto tr = sim.run_session("alice", queries[s].image, 10);
      bool ok = tr.authorized && tr.decrypted.size() == 10;
      for (const auto& item : tr.decrypted) ok = ok && item.image == truth.at({item.owner_id, item.image_id});
      delivered += tr.decrypted.size();
      if (!ok) ++bad_sessions;
    }
    const Bytes state = sim.cloud().observable_state();
    int leaks = 0;
    for (const auto& p : sim.owner_plaintexts()) {
      if (contains(state, p.image.pixels)) ++leaks;
      std::vector<std::uint8_t> raw(p.feature.a.begin(), p.feature.a.end());
      if (contains(state, raw)) ++leaks;
      std::string text = serialize_ehd({p.feature});
      text.pop_back();
      if (contains(state, as_bytes(text))) ++leaks;
    }
    return Outcome{bad_sessions == 0 && leaks == 0,
                   fmt("%d/50 sessions wrong, %zu images delivered, %d plaintext hits in %zu state bytes",
                       bad_sessions, delivered, leaks, state.size())};
  });

  report(9, "index to feature storage at 10000 features", [&] {
    if (!bench_ok || bench.storage.empty()) return Outcome{false, "benchmark did not run"};
    const auto& s = bench.storage.back();
    const double ratio = s.index_to_feature_ratio();
    return Outcome{s.features == 10000 && ratio < 0.01,
                   fmt("%zu index bytes / %zu feature bytes = %.5f (1/%.0f)", s.index_bytes,
                       s.feature_bytes, ratio, 1.0 / ratio)};
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
