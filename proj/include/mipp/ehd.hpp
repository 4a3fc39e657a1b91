#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mipp/image_cipher.hpp"

namespace mipp {

inline constexpr std::size_t kEdgeTypes = 5;

/// Edge histogram layout: the image is cut into grid_rows x grid_cols
/// sub-images, each tiled with 2x2-pixel macro-blocks.
struct EhdConfig {
  std::uint32_t grid_rows = 4;
  std::uint32_t grid_cols = 4;
  std::uint32_t edge_threshold = 11;

  std::size_t dimension() const {
    return static_cast<std::size_t>(grid_rows) * grid_cols * kEdgeTypes;
  }
};

/// Histogram bins; with the default layout bin 5*s + t counts edge type t
/// (vertical, horizontal, 45, 135, non-directional) in sub-image s.
struct FeatureVector {
  std::vector<std::uint32_t> a;

  std::size_t size() const { return a.size(); }
  bool operator==(const FeatureVector&) const = default;
};

struct SquaredFeature {
  std::vector<std::uint64_t> a2;

  bool operator==(const SquaredFeature&) const = default;
};

/// Requires at least 2*grid_rows x 2*grid_cols pixels (8x8 by default).
FeatureVector extract_ehd(const GrayImage& img, const EhdConfig& cfg = {});

SquaredFeature square_feature(const FeatureVector& f);

/// `.ehd` text: header `MIPP-EHD-1 l=<l>`, then one comma-separated vector per line.
std::string serialize_ehd(const std::vector<FeatureVector>& features);
std::vector<FeatureVector> parse_ehd(std::string_view text);

}  // namespace mipp
