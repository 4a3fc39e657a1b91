#include "mipp/ehd.hpp"

#include <charconv>

#include "mipp/kernels.hpp"

namespace mipp {

namespace {

struct Span1D {
  std::uint32_t begin;
  std::uint32_t end;
};

// Integer split; the remainder goes to the last cell.
Span1D cell_range(std::uint32_t extent, std::uint32_t cells, std::uint32_t i) {
  const std::uint32_t step = extent / cells;
  return {i * step, i + 1 == cells ? extent : (i + 1) * step};
}

}  // namespace

FeatureVector extract_ehd(const GrayImage& img, const EhdConfig& cfg) {
  if (cfg.grid_rows == 0 || cfg.grid_cols == 0) {
    fail(ErrorCode::kInvalidLength, "empty EHD grid");
  }
  if (img.height < 2 * cfg.grid_rows || img.width < 2 * cfg.grid_cols) {
    fail(ErrorCode::kImageTooSmall,
         std::to_string(img.width) + "x" + std::to_string(img.height) +
             " is smaller than " + std::to_string(2 * cfg.grid_cols) + "x" +
             std::to_string(2 * cfg.grid_rows));
  }
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height) {
    fail(ErrorCode::kInvalidImage, "pixel count != width * height");
  }

  const auto& k = kernels::active();
  const std::uint32_t threshold_sq = cfg.edge_threshold * cfg.edge_threshold;
  FeatureVector f;
  f.a.assign(cfg.dimension(), 0);
  std::vector<std::uint8_t> classes;

  for (std::uint32_t gr = 0; gr < cfg.grid_rows; ++gr) {
    const Span1D rows = cell_range(img.height, cfg.grid_rows, gr);
    for (std::uint32_t gc = 0; gc < cfg.grid_cols; ++gc) {
      const Span1D cols = cell_range(img.width, cfg.grid_cols, gc);
      const std::uint32_t blocks_across = (cols.end - cols.begin) / 2;
      const std::uint32_t blocks_down = (rows.end - rows.begin) / 2;
      classes.resize(blocks_across);

      std::uint32_t counts[kEdgeTypes + 1] = {};
      for (std::uint32_t by = 0; by < blocks_down; ++by) {
        const std::uint32_t y = rows.begin + 2 * by;
        const std::uint8_t* row0 = &img.pixels[static_cast<std::size_t>(y) * img.width + cols.begin];
        const std::uint8_t* row1 = row0 + img.width;
        k.classify_blocks(row0, row1, blocks_across, threshold_sq, classes.data());
        for (auto c : classes) ++counts[c];
      }

      const std::uint64_t total = static_cast<std::uint64_t>(blocks_across) * blocks_down;
      const std::size_t base = (static_cast<std::size_t>(gr) * cfg.grid_cols + gc) * kEdgeTypes;
      for (std::size_t t = 0; t < kEdgeTypes; ++t) {
        f.a[base + t] = static_cast<std::uint32_t>(255u * counts[t + 1] / total);
      }
    }
  }
  return f;
}

SquaredFeature square_feature(const FeatureVector& f) {
  SquaredFeature out;
  out.a2.reserve(f.size());
  for (auto v : f.a) out.a2.push_back(static_cast<std::uint64_t>(v) * v);
  return out;
}

std::string serialize_ehd(const std::vector<FeatureVector>& features) {
  const std::size_t l = features.empty() ? 0 : features.front().size();
  std::string out = "MIPP-EHD-1 l=" + std::to_string(l) + "\n";
  for (const auto& f : features) {
    if (f.size() != l) fail(ErrorCode::kLengthMismatch, "mixed feature lengths");
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(f.a[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> parse_ehd(std::string_view text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  constexpr std::string_view kHeader = "MIPP-EHD-1 l=";
  if (lines.empty() || !lines[0].starts_with(kHeader)) {
    fail(ErrorCode::kParse, "missing MIPP-EHD-1 header");
  }
  std::size_t l = 0;
  auto len_text = lines[0].substr(kHeader.size());
  auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), l);
  if (ec != std::errc() || ptr != len_text.data() + len_text.size()) {
    fail(ErrorCode::kParse, "bad dimension in EHD header");
  }
  std::vector<FeatureVector> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    FeatureVector f;
    for (auto field : split(lines[li], ',')) {
      std::uint32_t v = 0;
      auto [p, e] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (e != std::errc() || p != field.data() + field.size()) {
        fail(ErrorCode::kParse, "bad EHD value on line " + std::to_string(li + 1));
      }
      f.a.push_back(v);
    }
    if (f.size() != l) {
      fail(ErrorCode::kParse, "line " + std::to_string(li + 1) + " has " +
                                  std::to_string(f.size()) + " fields, expected " +
                                  std::to_string(l));
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace mipp
