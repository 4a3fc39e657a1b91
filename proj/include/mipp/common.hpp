#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mipp {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class ErrorCode {
  kParamGeneration,
  kInvalidParams,
  kDegenerateRing,
  kOverflow,
  kMalformedCiphertext,
  kSumOutOfRange,
  kInvalidLength,
  kKeyLength,
  kImageTooSmall,
  kInvalidImage,
  kLengthMismatch,
  kCorruptedSums,
  kParamsMismatch,
  kDuplicateOwner,
  kDuplicateImage,
  kUnknownOwner,
  kUnknownImage,
  kOwnership,
  kUnauthorized,
  kInvalidIdentifier,
  kVault,
  kSession,
  kKeyOverwrite,
  kUnknownParty,
  kDecode,
  kParse,
  kIo,
  kConsistency,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the wire decoder; offset is the byte position where decoding failed.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& what);

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Identifiers end up as path components of the cloud store.
bool is_valid_identifier(std::string_view id);
void require_identifier(std::string_view id, std::string_view what);

std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace mipp
