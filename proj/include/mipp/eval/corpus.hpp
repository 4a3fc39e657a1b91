#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mipp/image_cipher.hpp"
#include "mipp/rng.hpp"

namespace mipp::eval {

/// One image of a category-per-directory corpus.
struct CorpusItem {
  std::filesystem::path path;
  std::string label;
  std::string image_id;  // "<label>-<file stem>", unique across the corpus
  std::size_t owner = 0;
};

struct IngestError {
  std::filesystem::path path;
  std::string message;
};

struct LabeledCorpus {
  std::vector<CorpusItem> items;
  std::vector<std::string> categories;
  std::size_t owner_count = 1;
  std::vector<IngestError> errors;
  std::vector<std::string> warnings;

  std::vector<std::size_t> owner_sizes() const;
};

/// Owner names used for round-robin assignment: owner-1, owner-2, ...
std::string owner_name(std::size_t index);

/// Reads `root/<label>/*.pgm`. Items are ordered by label, then file name,
/// and item i goes to owner i mod `owners`. Unreadable files are listed in
/// `errors` and skipped.
LabeledCorpus load_corpus(const std::filesystem::path& root, std::size_t owners = 1);

struct LabeledImage {
  std::string label;
  std::string image_id;
  GrayImage image;
  std::size_t owner = 0;
};

std::vector<LabeledImage> load_images(const LabeledCorpus& corpus);

/// Block textures built from the five 2x2 edge primitives. A category fixes
/// the overall edge density; each image additionally picks one of a few
/// layout modes (which primitive dominates each grid cell), and those modes
/// are shared by every category.
struct TextureSpec {
  std::size_t categories = 10;
  std::size_t per_category = 100;
  std::uint32_t side = 128;       // multiple of 8
  std::size_t layout_modes = 4;
  double mode_bias = 0.08;        // extra density of the dominant primitive
  double density_jitter = 0.035;  // per-image, uniform +-
  int contrast = 80;
  int noise = 2;                  // per-pixel, uniform +-
  std::uint64_t seed = 1;
};

double category_density(const TextureSpec& spec, std::size_t category);
std::string category_label(std::size_t category);

GrayImage render_texture(const TextureSpec& spec, std::size_t category, Drbg& rng);

/// `per_category` images for every category. Different `stream` names give
/// independent draws, so corpus and query images never coincide.
std::vector<LabeledImage> synthetic_images(const TextureSpec& spec, std::size_t per_category,
                                           std::string_view stream, std::size_t owners = 1);

/// Writes `root/catNN/imgNNN.pgm`; load_corpus reads it back with the same
/// labels and image ids.
void write_synthetic_corpus(const std::filesystem::path& root, const TextureSpec& spec);

}  // namespace mipp::eval
