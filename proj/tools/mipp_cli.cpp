// mipp: parameter generation, encrypted ingestion, retrieval sessions,
// owner updates, and the evaluation / benchmark harness.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mipp/eval/bench.hpp"
#include "mipp/eval/corpus.hpp"
#include "mipp/eval/experiment.hpp"
#include "mipp/pgm.hpp"
#include "mipp/protocol_sim.hpp"

namespace fs = std::filesystem;
using namespace mipp;

namespace {

std::atomic<bool> g_stop{false};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

GroupParams params_for(const std::string& file, unsigned bits, std::uint64_t seed) {
  if (!file.empty()) {
    GroupParams p = parse_params(read_text(file));
    p.validate();
    return p;
  }
  return gen_group_params(bits, as_bytes("mipp-params/" + std::to_string(seed)));
}

// Store layout: cloud/ (the cloud node), kmc.vault, user.cred, labels.tsv.
struct StorePaths {
  fs::path root;
  fs::path cloud() const { return root / "cloud"; }
  fs::path vault() const { return root / "kmc.vault"; }
  fs::path cred() const { return root / "user.cred"; }
  fs::path labels() const { return root / "labels.tsv"; }
};

void write_credential(const fs::path& file, const UserId& uid, const AccessToken& ak) {
  write_text(file, "MIPP-USER-1\n" + uid + "\t" + ak.hex() + "\n");
  fs::permissions(file, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
}

std::pair<UserId, AccessToken> read_credential(const fs::path& file) {
  const std::string text = read_text(file);
  auto lines = split(text, '\n');
  if (lines.size() < 2 || lines[0] != "MIPP-USER-1") fail(ErrorCode::kParse, "bad credential file");
  auto cols = split(lines[1], '\t');
  if (cols.size() != 2) fail(ErrorCode::kParse, "bad credential line");
  return {std::string(cols[0]), AccessToken::from_hex(cols[1])};
}

struct Common {
  std::size_t owners = 3;
  std::uint32_t top_h = 100;
  std::uint64_t seed = 1;
  std::string params;
  std::string corpus;
  std::string out;
  unsigned bits = 64;
};

void add_common(CLI::App* app, Common& c, bool owners, bool top_h) {
  app->add_option("--seed", c.seed, "Deterministic seed")->capture_default_str();
  app->add_option("--params", c.params, "Group parameter file (from gen-params)");
  app->add_option("--out", c.out, "Output file or directory");
  if (owners) app->add_option("--owners", c.owners, "Number of data owners")->capture_default_str();
  if (top_h) app->add_option("--top-h", c.top_h, "Results returned per query")->capture_default_str();
}

std::vector<eval::LabeledImage> corpus_images(const Common& c, std::size_t per_category,
                                              std::vector<eval::LabeledImage>* queries,
                                              const std::string& query_dir) {
  if (c.corpus.empty()) {
    eval::TextureSpec spec;
    spec.seed = c.seed;
    spec.per_category = per_category;
    if (queries) *queries = eval::synthetic_images(spec, 5, "queries");
    return eval::synthetic_images(spec, per_category, "corpus", c.owners);
  }
  eval::LabeledCorpus corpus = eval::load_corpus(c.corpus, c.owners);
  for (const auto& e : corpus.errors) std::cerr << "ingest error: " << e.path.string() << ": " << e.message << "\n";
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
  auto images = eval::load_images(corpus);
  if (queries) {
    if (!query_dir.empty()) {
      *queries = eval::load_images(eval::load_corpus(query_dir));
    } else {
      // First five images of each category, which stay in the corpus.
      std::map<std::string, std::size_t> taken;
      for (const auto& img : images) {
        if (taken[img.label]++ < 5) queries->push_back(img);
      }
    }
  }
  return images;
}

int cmd_gen_params(const Common& c, const std::string& profile) {
  const ParamProfile prof = profile == "production" ? ParamProfile::kProduction : ParamProfile::kTest;
  GroupParams p = gen_group_params(c.bits, as_bytes("mipp-params/" + std::to_string(c.seed)), prof);
  emit(c.out, serialize_params(p));
  std::cerr << "params_id=" << params_id(p) << " bits=" << c.bits << "\n";
  return 0;
}

int cmd_gen_corpus(const Common& c, std::size_t per_category) {
  if (c.out.empty()) fail(ErrorCode::kIo, "--out DIR is required");
  eval::TextureSpec spec;
  spec.seed = c.seed;
  spec.per_category = per_category;
  eval::write_synthetic_corpus(c.out, spec);
  std::cerr << "wrote " << spec.categories * per_category << " images to " << c.out << "\n";
  return 0;
}

int cmd_ingest(const Common& c) {
  if (c.corpus.empty() || c.out.empty()) fail(ErrorCode::kIo, "--corpus and --out are required");
  const GroupParams params = params_for(c.params, c.bits, c.seed);
  eval::LabeledCorpus corpus = eval::load_corpus(c.corpus, c.owners);
  for (const auto& e : corpus.errors) std::cerr << "ingest error: " << e.path.string() << ": " << e.message << "\n";
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
  auto images = eval::load_images(corpus);

  eval::EncryptedCorpus ec = eval::encrypt_corpus(params, images, c.owners, c.seed);
  const StorePaths store{c.out};
  ec.cloud->save(store.cloud());
  ec.kmc->save(store.vault());
  write_credential(store.cred(), ec.user, ec.ak);

  std::string labels = "image_id\tlabel\towner\n";
  for (const auto& img : images) labels += img.image_id + "\t" + img.label + "\t" + eval::owner_name(img.owner) + "\n";
  write_text(store.labels(), labels);

  std::cout << "owner\timages\n";
  const auto sizes = corpus.owner_sizes();
  for (std::size_t o = 0; o < sizes.size(); ++o) std::cout << eval::owner_name(o) << "\t" << sizes[o] << "\n";
  std::cerr << "store " << c.out << ": " << ec.cloud->image_count() << " images, "
            << corpus.errors.size() << " ingestion errors\n";
  return corpus.errors.empty() ? 0 : 2;
}

int cmd_query(const Common& c, const std::string& store_dir, const std::string& image,
              const std::string& results_dir, const std::string& transcript) {
  if (store_dir.empty() || image.empty()) fail(ErrorCode::kIo, "--store and --image are required");
  const StorePaths store{store_dir};
  auto [uid, ak] = read_credential(store.cred());
  SimConfig cfg;
  cfg.seed = c.seed;
  Simulation sim(CloudNode::load(store.cloud()), KmcNode::load(store.vault()), cfg);
  sim.add_user(uid, ak);

  const SessionTranscript tr = sim.run_session(uid, read_pgm(image).image, c.top_h);
  if (!transcript.empty()) write_text(transcript, tr.to_text());
  if (!tr.authorized) {
    std::cerr << "authorization failed for " << uid << "\n";
    return 3;
  }
  std::ostringstream out;
  out << "rank\towner\timage\teucdis\n";
  for (std::size_t i = 0; i < tr.ranked.size(); ++i) {
    out << i + 1 << "\t" << tr.ranked[i].owner_id << "\t" << tr.ranked[i].image_id << "\t"
        << tr.ranked[i].distance << "\n";
  }
  emit(c.out, out.str());
  if (!results_dir.empty()) {
    for (const auto& item : tr.decrypted) {
      write_pgm(fs::path(results_dir) / (item.owner_id + "__" + item.image_id + ".pgm"), item.image);
    }
  }
  return 0;
}

int cmd_update(const Common& c, const std::string& store_dir, const std::string& owner,
               const std::vector<std::string>& add, const std::vector<std::string>& replace,
               const std::vector<std::string>& remove) {
  if (store_dir.empty() || owner.empty()) fail(ErrorCode::kIo, "--store and --owner are required");
  const StorePaths store{store_dir};
  auto cloud = CloudNode::load(store.cloud());
  auto kmc = KmcNode::load(store.vault());
  auto key = kmc->owner_key(owner);
  if (!key) fail(ErrorCode::kUnknownOwner, owner);
  Drbg rng(c.seed, "update/" + owner);

  auto uploads = [&](const std::vector<std::string>& files) {
    std::vector<ImageUpload> out;
    for (const auto& arg : files) {
      // ID=FILE, or FILE alone with the stem as id.
      const auto eq = arg.find('=');
      const std::string f = eq == std::string::npos ? arg : arg.substr(eq + 1);
      const std::string id = eq == std::string::npos ? fs::path(f).stem().string() : arg.substr(0, eq);
      const GrayImage img = read_pgm(f).image;
      out.push_back({id, image_enc(*key, img),
                     encrypt_feature_pair(cloud->params(), extract_ehd(img), rng)});
    }
    return out;
  };
  if (!remove.empty()) cloud->apply_update(owner, DeleteImages{remove});
  if (!replace.empty()) cloud->apply_update(owner, UpdateImages{uploads(replace)});
  if (!add.empty()) cloud->apply_update(owner, AddImages{uploads(add)});
  if (!cloud->consistent()) fail(ErrorCode::kConsistency, "index and store disagree after update");
  cloud->save(store.cloud());
  std::cerr << "owner " << owner << ": +" << add.size() << " ~" << replace.size() << " -"
            << remove.size() << "; " << cloud->image_count() << " images stored\n";
  return 0;
}

eval::ExperimentResult experiment(const Common& c, std::size_t per_category, std::size_t threads,
                                  const std::string& query_dir) {
  const GroupParams params = params_for(c.params, c.bits, c.seed);
  std::vector<eval::LabeledImage> queries;
  auto images = corpus_images(c, per_category, &queries, query_dir);
  eval::ExperimentConfig cfg;
  cfg.owners = c.owners;
  cfg.top_h = c.top_h;
  cfg.seed = c.seed;
  cfg.threads = threads;
  std::erase_if(cfg.cutoffs, [&](std::size_t k) { return k > c.top_h; });
  return eval::run_experiment(params, images, queries, cfg);
}

int cmd_eval(const Common& c, std::size_t per_category, std::size_t threads, const std::string& query_dir) {
  auto r = experiment(c, per_category, threads, query_dir);
  emit(c.out, eval::metrics_tsv(r));
  std::cerr << r.query_ids.size() << " queries in " << r.seconds << " s\n";
  return 0;
}

int cmd_leakage(const Common& c, std::size_t per_category, std::size_t threads, const std::string& query_dir) {
  auto r = experiment(c, per_category, threads, query_dir);
  emit(c.out, eval::leakage_tsv(r));
  for (const auto* h : {&r.euc.leakage, &r.newdis.leakage}) {
    if (h->warning) std::cerr << "warning: " << *h->warning << "\n";
  }
  return 0;
}

int cmd_bench(const Common& c, const std::vector<std::size_t>& sizes,
              const std::vector<std::string>& modes, std::size_t reps, const std::string& storage_out) {
  const GroupParams params = params_for(c.params, c.bits, c.seed);
  eval::BenchConfig cfg;
  cfg.sizes = sizes;
  cfg.repetitions = reps;
  cfg.seed = c.seed;
  cfg.top_h = c.top_h;
  cfg.stop = &g_stop;
  if (!modes.empty()) {
    cfg.modes.clear();
    for (const auto& m : modes) cfg.modes.push_back(eval::parse_bench_mode(m));
  }
  std::signal(SIGINT, [](int) { g_stop = true; });
  auto r = eval::run_bench(params, cfg, [](const eval::BenchRow& row) {
    std::cerr << eval::to_string(row.mode) << " n=" << row.size << " median=" << row.median_seconds << " s\n";
  });
  emit(c.out, eval::bench_tsv(r));
  emit(storage_out.empty() ? "-" : storage_out, eval::storage_tsv(r));
  if (r.interrupted) std::cerr << "interrupted; partial table written\n";
  std::cerr << "index and no-index rankings " << (r.rankings_identical ? "identical" : "DIFFER") << "\n";
  return r.rankings_identical ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-owner encrypted image retrieval toolkit"};
  app.require_subcommand(1);
  Common c;
  std::size_t per_category = 100;
  std::size_t threads = 1;
  std::string profile = "test";
  std::string store_dir, image, results_dir, transcript, owner, query_dir, storage_out;
  std::vector<std::string> add, replace, remove, modes;
  std::vector<std::size_t> sizes{1000, 2000, 5000, 10000};
  std::size_t reps = 5;

  auto* gen = app.add_subcommand("gen-params", "Generate group parameters");
  add_common(gen, c, false, false);
  gen->add_option("--bits", c.bits, "Bit length of p")->capture_default_str();
  gen->add_option("--profile", profile, "test or production")
      ->check(CLI::IsMember({"test", "production"}))->capture_default_str();

  auto* corpus = app.add_subcommand("gen-corpus", "Write the synthetic labelled corpus");
  add_common(corpus, c, false, false);
  corpus->add_option("--per-category", per_category)->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Encrypt a corpus into a cloud store");
  add_common(ingest, c, true, false);
  ingest->add_option("--corpus", c.corpus, "Directory of category subdirectories")->required();
  ingest->add_option("--bits", c.bits, "Bit length of p when --params is absent");

  auto* query = app.add_subcommand("query", "Run one retrieval session against a store");
  add_common(query, c, false, true);
  query->add_option("--store", store_dir, "Store written by ingest")->required();
  query->add_option("--image", image, "Query image (PGM)")->required();
  query->add_option("--results-dir", results_dir, "Write decrypted results here");
  query->add_option("--transcript", transcript, "Write the message transcript here");

  auto* update = app.add_subcommand("update", "Add, replace or delete an owner's images");
  add_common(update, c, false, false);
  update->add_option("--store", store_dir)->required();
  update->add_option("--owner", owner)->required();
  update->add_option("--add", add, "[ID=]FILE.pgm; the id defaults to the file stem");
  update->add_option("--replace", replace, "[ID=]FILE.pgm re-encrypting an existing image");
  update->add_option("--delete", remove, "Image ids");

  auto* ev = app.add_subcommand("eval", "Precision / recall / F1 of NewDis and EucDis");
  auto* leak = app.add_subcommand("leakage", "Decile distribution of true matches");
  for (auto* sub : {ev, leak}) {
    add_common(sub, c, true, true);
    sub->add_option("--corpus", c.corpus, "Labelled corpus (default: synthetic)");
    sub->add_option("--queries", query_dir, "Labelled query images");
    sub->add_option("--per-category", per_category, "Synthetic images per category");
    sub->add_option("--parallel", threads, "Concurrent query sessions")->capture_default_str();
    sub->add_option("--bits", c.bits, "Bit length of p when --params is absent");
  }

  auto* bench = app.add_subcommand("bench", "Retrieval timing and storage");
  add_common(bench, c, false, true);
  bench->add_option("--sizes", sizes, "Corpus sizes, ascending")->delimiter(',')->capture_default_str();
  bench->add_option("--modes", modes, "plain,enc_no_index,enc_with_index,index_build")->delimiter(',');
  bench->add_option("--reps", reps, "Repetitions per size")->check(CLI::Range(5, 1000))->capture_default_str();
  bench->add_option("--storage-out", storage_out, "Storage report file");
  bench->add_option("--bits", c.bits, "Bit length of p when --params is absent");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen_params(c, profile);
    if (*corpus) return cmd_gen_corpus(c, per_category);
    if (*ingest) return cmd_ingest(c);
    if (*query) return cmd_query(c, store_dir, image, results_dir, transcript);
    if (*update) return cmd_update(c, store_dir, owner, add, replace, remove);
    if (*ev) return cmd_eval(c, per_category, threads, query_dir);
    if (*leak) return cmd_leakage(c, per_category, threads, query_dir);
    if (*bench) return cmd_bench(c, sizes, modes, reps, storage_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
