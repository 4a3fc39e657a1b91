#include "mipp/eval/corpus.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "mipp/pgm.hpp"

namespace mipp::eval {

namespace fs = std::filesystem;

std::vector<std::size_t> LabeledCorpus::owner_sizes() const {
  std::vector<std::size_t> sizes(owner_count, 0);
  for (const auto& item : items) ++sizes[item.owner];
  return sizes;
}

std::string owner_name(std::size_t index) { return "owner-" + std::to_string(index + 1); }

LabeledCorpus load_corpus(const fs::path& root, std::size_t owners) {
  if (owners == 0) fail(ErrorCode::kInvalidLength, "owner count must be positive");
  LabeledCorpus corpus;
  corpus.owner_count = owners;

  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorCode::kIo, "not a directory: " + root.string());

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) {
      dirs.push_back(entry.path());
    } else {
      corpus.errors.push_back({entry.path(), "file outside a category directory"});
    }
  }
  std::sort(dirs.begin(), dirs.end());

  for (const auto& dir : dirs) {
    const std::string label = dir.filename().string();
    if (!is_valid_identifier(label)) {
      corpus.errors.push_back({dir, "category name is not a valid identifier"});
      continue;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    bool any = false;
    for (const auto& file : files) {
      const std::string id = label + "-" + file.stem().string();
      if (!is_valid_identifier(id)) {
        corpus.errors.push_back({file, "file name does not give a valid image id"});
        continue;
      }
      try {
        const PgmFile pgm = read_pgm(file);
        if (pgm.encrypted) {
          corpus.errors.push_back({file, "image is marked encrypted"});
          continue;
        }
      } catch (const Error& e) {
        corpus.errors.push_back({file, e.what()});
        continue;
      }
      corpus.items.push_back({file, label, id, corpus.items.size() % owners});
      any = true;
    }
    if (any) {
      corpus.categories.push_back(label);
    } else {
      corpus.warnings.push_back("category " + label + " has no readable images");
    }
  }
  if (corpus.items.empty()) corpus.warnings.push_back("corpus is empty: " + root.string());
  return corpus;
}

std::vector<LabeledImage> load_images(const LabeledCorpus& corpus) {
  std::vector<LabeledImage> out;
  out.reserve(corpus.items.size());
  for (const auto& item : corpus.items) {
    out.push_back({item.label, item.image_id, read_pgm(item.path).image, item.owner});
  }
  return out;
}

namespace {

// 2x2 patterns (top-left, top-right, bottom-left, bottom-right) that the
// classifier maps to vertical, horizontal, 45, 135 and non-directional.
constexpr std::array<std::array<int, 4>, 5> kPrimitive = {{
    {1, -1, 1, -1},
    {1, 1, -1, -1},
    {1, 0, 0, -1},
    {0, 1, -1, 0},
    {1, -1, -1, 1},
}};

double unit(Drbg& rng) { return static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53; }

using Layout = std::array<std::uint8_t, 16>;

std::vector<Layout> layout_modes(const TextureSpec& spec) {
  Drbg rng(spec.seed, "texture/layout-modes");
  std::vector<Layout> modes(spec.layout_modes);
  for (auto& m : modes) {
    for (auto& cell : m) cell = static_cast<std::uint8_t>(rng.uniform(5));
  }
  return modes;
}

}  // namespace

double category_density(const TextureSpec& spec, std::size_t category) {
  if (spec.categories <= 1) return 1.0;
  return 0.1 + 0.9 * static_cast<double>(category) / static_cast<double>(spec.categories - 1);
}

std::string category_label(std::size_t category) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "cat%02zu", category);
  return buf;
}

GrayImage render_texture(const TextureSpec& spec, std::size_t category, Drbg& rng) {
  if (spec.side < 8 || spec.side % 8 != 0) {
    fail(ErrorCode::kInvalidLength, "texture side must be a positive multiple of 8");
  }
  if (spec.layout_modes == 0) fail(ErrorCode::kInvalidLength, "need at least one layout mode");

  const std::vector<Layout> modes = layout_modes(spec);
  const Layout& layout = modes[rng.uniform(modes.size())];
  double density = category_density(spec, category) + spec.density_jitter * (2 * unit(rng) - 1);
  density = std::clamp(density, spec.mode_bias, 1.0);
  const double base = (density - spec.mode_bias) / 5;

  const std::uint32_t n = spec.side;
  const std::uint32_t cell = n / 4;
  const int half = spec.contrast / 2;
  GrayImage img(n, n);
  for (std::uint32_t by = 0; by < n; by += 2) {
    for (std::uint32_t bx = 0; bx < n; bx += 2) {
      const std::uint8_t dominant = layout[(by / cell) * 4 + bx / cell];
      const double u = unit(rng);
      int type = -1;
      double acc = 0;
      for (int t = 0; t < 5 && type < 0; ++t) {
        acc += base + (t == dominant ? spec.mode_bias : 0.0);
        if (u < acc) type = t;
      }
      for (int k = 0; k < 4; ++k) {
        int v = 128 + static_cast<int>(rng.uniform(2 * spec.noise + 1)) - spec.noise;
        if (type >= 0) v += half * kPrimitive[type][k];
        img.at(by + k / 2, bx + k % 2) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
      }
    }
  }
  return img;
}

std::vector<LabeledImage> synthetic_images(const TextureSpec& spec, std::size_t per_category,
                                           std::string_view stream, std::size_t owners) {
  if (owners == 0) fail(ErrorCode::kInvalidLength, "owner count must be positive");
  std::vector<LabeledImage> out;
  out.reserve(spec.categories * per_category);
  for (std::size_t c = 0; c < spec.categories; ++c) {
    const std::string label = category_label(c);
    Drbg rng(spec.seed, std::string(stream) + "/" + label);
    for (std::size_t i = 0; i < per_category; ++i) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "img%03zu", i);
      out.push_back({label, label + "-" + stem, render_texture(spec, c, rng), out.size() % owners});
    }
  }
  return out;
}

void write_synthetic_corpus(const fs::path& root, const TextureSpec& spec) {
  for (const auto& item : synthetic_images(spec, spec.per_category, "corpus")) {
    const std::string stem = item.image_id.substr(item.label.size() + 1);
    write_pgm(root / item.label / (stem + ".pgm"), item.image);
  }
}

}  // namespace mipp::eval
