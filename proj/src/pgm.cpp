#include "mipp/pgm.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

namespace mipp {

namespace {

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

class HeaderReader {
 public:
  explicit HeaderReader(ByteView bytes) : bytes_(bytes) {}

  // Skips whitespace and comments, remembering whether the MIPP marker was seen.
  void skip_filler() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        std::size_t end = pos_;
        while (end < bytes_.size() && bytes_[end] != '\n') ++end;
        std::string_view comment(reinterpret_cast<const char*>(bytes_.data() + pos_),
                                 end - pos_);
        while (!comment.empty() && comment.back() == '\r') comment.remove_suffix(1);
        if (comment == kEncryptedPgmComment) encrypted_ = true;
        pos_ = end;
      } else {
        return;
      }
    }
  }

  std::uint32_t number() {
    skip_filler();
    std::uint64_t v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > UINT32_MAX) fail(ErrorCode::kInvalidImage, "PGM header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail(ErrorCode::kInvalidImage, "malformed PGM header");
    return static_cast<std::uint32_t>(v);
  }

  // Returns the channel count: 1 for P5, 3 for P6.
  unsigned magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || (bytes_[1] != '5' && bytes_[1] != '6')) {
      fail(ErrorCode::kInvalidImage, "not a binary PGM/PPM (missing P5 or P6 magic)");
    }
    pos_ = 2;
    return bytes_[1] == '5' ? 1 : 3;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void raster_separator() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      fail(ErrorCode::kInvalidImage, "missing separator before PGM raster");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  bool encrypted() const { return encrypted_; }

 private:
  ByteView bytes_;
  std::size_t pos_ = 0;
  bool encrypted_ = false;
};

}  // namespace

Bytes encode_pgm(const GrayImage& image, bool encrypted) {
  std::string header = "P5\n";
  if (encrypted) {
    header += kEncryptedPgmComment;
    header += '\n';
  }
  header += std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

PgmFile decode_pgm(ByteView bytes) {
  HeaderReader reader(bytes);
  const unsigned channels = reader.magic();
  const std::uint32_t width = reader.number();
  const std::uint32_t height = reader.number();
  const std::uint32_t maxval = reader.number();
  if (width == 0 || height == 0) fail(ErrorCode::kInvalidImage, "zero PGM dimension");
  if (maxval != 255) fail(ErrorCode::kInvalidImage, "PGM maxval must be 255");
  reader.raster_separator();
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if ((bytes.size() - reader.pos()) / channels < count) {
    fail(ErrorCode::kInvalidImage, "truncated raster");
  }
  const std::uint8_t* raster = bytes.data() + reader.pos();
  std::vector<std::uint8_t> pixels(count);
  if (channels == 1) {
    std::copy(raster, raster + count, pixels.begin());
  } else {
    if (reader.encrypted()) fail(ErrorCode::kInvalidImage, "encrypted images are always P5");
    // Integer luma, 0.299 R + 0.587 G + 0.114 B in 8-bit fixed point.
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint8_t* px = raster + 3 * i;
      pixels[i] = static_cast<std::uint8_t>((77u * px[0] + 150u * px[1] + 29u * px[2]) >> 8);
    }
  }
  return PgmFile{GrayImage(width, height, std::move(pixels)), reader.encrypted()};
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image, bool encrypted) {
  write_file(path, encode_pgm(image, encrypted));
}

PgmFile read_pgm(const std::filesystem::path& path) {
  return decode_pgm(read_file(path));
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, ByteView bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  Bytes raw = read_file(path);
  return std::string(raw.begin(), raw.end());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, as_bytes(text));
}

}  // namespace mipp
