#pragma once

#include <filesystem>

#include "mipp/image_cipher.hpp"

namespace mipp {

inline constexpr std::string_view kEncryptedPgmComment = "# MIPP-ENC";

struct PgmFile {
  GrayImage image;
  bool encrypted = false;  // carried the MIPP-ENC comment
};

/// Binary PGM (P5, maxval 255). Encrypted images carry a `# MIPP-ENC` line.
/// decode_pgm also takes colour P6 input and converts it to integer luma.
Bytes encode_pgm(const GrayImage& image, bool encrypted = false);
PgmFile decode_pgm(ByteView bytes);

void write_pgm(const std::filesystem::path& path, const GrayImage& image,
               bool encrypted = false);
PgmFile read_pgm(const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView bytes);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace mipp
