#include "mipp/common.hpp"

namespace mipp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParamGeneration: return "parameter-generation failure";
    case ErrorCode::kInvalidParams: return "invalid group parameters";
    case ErrorCode::kDegenerateRing: return "degenerate ring";
    case ErrorCode::kOverflow: return "plaintext overflow";
    case ErrorCode::kMalformedCiphertext: return "malformed ciphertext";
    case ErrorCode::kSumOutOfRange: return "recovered sum out of range";
    case ErrorCode::kInvalidLength: return "invalid length";
    case ErrorCode::kKeyLength: return "key too short";
    case ErrorCode::kImageTooSmall: return "image too small";
    case ErrorCode::kInvalidImage: return "invalid image";
    case ErrorCode::kLengthMismatch: return "length mismatch";
    case ErrorCode::kCorruptedSums: return "corrupted sums";
    case ErrorCode::kParamsMismatch: return "parameter mismatch";
    case ErrorCode::kDuplicateOwner: return "duplicate owner";
    case ErrorCode::kDuplicateImage: return "duplicate image";
    case ErrorCode::kUnknownOwner: return "unknown owner";
    case ErrorCode::kUnknownImage: return "unknown image";
    case ErrorCode::kOwnership: return "ownership violation";
    case ErrorCode::kUnauthorized: return "unauthorized";
    case ErrorCode::kInvalidIdentifier: return "invalid identifier";
    case ErrorCode::kVault: return "vault error";
    case ErrorCode::kSession: return "session error";
    case ErrorCode::kKeyOverwrite: return "key overwrite without rotate";
    case ErrorCode::kUnknownParty: return "unknown party";
    case ErrorCode::kDecode: return "decode error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kConsistency: return "consistency error";
  }
  return "unknown error";
}

DecodeError::DecodeError(std::size_t offset, const std::string& what)
    : Error(ErrorCode::kDecode,
            what + " at offset " + std::to_string(offset)),
      offset_(offset) {}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) fail(ErrorCode::kParse, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::kParse, "non-hex character");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

bool is_valid_identifier(std::string_view id) {
  if (id.empty() || id.size() > 128 || id == "." || id == "..") return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

void require_identifier(std::string_view id, std::string_view what) {
  if (!is_valid_identifier(id)) {
    fail(ErrorCode::kInvalidIdentifier,
         std::string(what) + " '" + std::string(id) + "'");
  }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace mipp
