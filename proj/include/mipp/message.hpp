#pragma once

// Canonical message encoding for the Owner / User / Cloud / KMC workflow.
//
//   u32 (big-endian)  length of everything after this field
//   u8                kind tag (1..7)
//   16 bytes          session id
//   ...               kind-specific body
//
// Body primitives: u32 big-endian integers, u32-length-prefixed strings and
// byte strings, big integers as length-prefixed big-endian magnitudes, and
// u32-count-prefixed lists.

#include <variant>

#include "mipp/cloud_node.hpp"
#include "mipp/kmc_node.hpp"

namespace mipp {

enum class MessageKind : std::uint8_t {
  kOwnerUpload = 1,      // (1) owner -> cloud
  kOwnerKeyDeposit = 2,  // (2) owner -> KMC
  kUserQuery = 3,        // (3) user -> cloud
  kUserKeyDeposit = 4,   // (4) user -> KMC
  kCloudToKmc = 5,       // (5) encrypted results + user identity
  kKmcToCloud = 6,       // (6) re-encrypted results
  kCloudToUser = 7,      // (7) re-encrypted results to the user
};

std::string_view to_string(MessageKind kind);

struct OwnerUploadBody {
  OwnerId owner_id;
  std::vector<AulEntry> aul;
  std::vector<ImageUpload> images;
  bool operator==(const OwnerUploadBody&) const = default;
};

struct OwnerKeyDepositBody {
  OwnerId owner_id;
  KeyStream sk;
  bool operator==(const OwnerKeyDepositBody&) const = default;
};

struct UserQueryBody {
  QueryEnvelope query;
  bool operator==(const UserQueryBody&) const = default;
};

struct UserKeyDepositBody {
  UserId uid;
  KeyStream usk;
  bool operator==(const UserKeyDepositBody&) const = default;
};

struct CloudToKmcBody {
  UserId uid;
  AccessToken ak;
  std::vector<RetrievedImage> results;
  bool operator==(const CloudToKmcBody&) const = default;
};

struct KmcToCloudBody {
  UserId uid;
  std::vector<RetrievedImage> results;
  bool operator==(const KmcToCloudBody&) const = default;
};

struct CloudToUserBody {
  std::vector<RetrievedImage> results;
  bool operator==(const CloudToUserBody&) const = default;
};

// Alternative index + 1 is the kind tag.
using Payload = std::variant<OwnerUploadBody, OwnerKeyDepositBody, UserQueryBody,
                             UserKeyDepositBody, CloudToKmcBody, KmcToCloudBody,
                             CloudToUserBody>;

struct Message {
  SessionId session{};
  Payload payload;

  MessageKind kind() const { return static_cast<MessageKind>(payload.index() + 1); }
  bool operator==(const Message&) const = default;
};

Bytes encode_message(const Message& m);

/// Throws DecodeError (with the failing offset) on truncated or
/// schema-violating input. Trailing bytes after the frame are rejected.
Message decode_message(ByteView bytes);

}  // namespace mipp
