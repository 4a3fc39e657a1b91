#include <cstring>

#include "mipp/message.hpp"

namespace mipp {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kOwnerUpload: return "OwnerUpload";
    case MessageKind::kOwnerKeyDeposit: return "OwnerKeyDeposit";
    case MessageKind::kUserQuery: return "UserQuery";
    case MessageKind::kUserKeyDeposit: return "UserKeyDeposit";
    case MessageKind::kCloudToKmc: return "CloudToKmc";
    case MessageKind::kKmcToCloud: return "KmcToCloud";
    case MessageKind::kCloudToUser: return "CloudToUser";
  }
  return "Unknown";
}

namespace {

constexpr std::size_t kFrameHeader = 4 + 1 + 16;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  void raw(ByteView b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void bytes(ByteView b) {
    u32(checked_len(b.size()));
    raw(b);
  }
  void str(std::string_view s) { bytes(as_bytes(s)); }
  void bigint(const BigInt& v) {
    if (v < 0) throw std::invalid_argument("negative integers are not encodable");
    Bytes mag;
    if (v != 0) {
      mag.resize((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
      std::size_t written = 0;
      mpz_export(mag.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
      mag.resize(written);
    }
    bytes(mag);
  }
  void count(std::size_t n) { u32(checked_len(n)); }

  void image(const GrayImage& img) {
    u32(img.width);
    u32(img.height);
    raw(img.pixels);
  }
  void feature(const EncryptedFeature& f) {
    str(f.params_id);
    for (const auto* ct : {&f.ef, &f.eff}) {
      count(ct->size());
      for (const auto& c : ct->c) bigint(c);
    }
  }
  void token(const AccessToken& ak) { raw(ak.bytes); }
  void results(const std::vector<RetrievedImage>& rs) {
    count(rs.size());
    for (const auto& r : rs) {
      str(r.owner_id);
      str(r.image_id);
      image(r.image);
    }
  }

  Bytes take() { return std::move(out_); }
  Bytes& buffer() { return out_; }

 private:
  static std::uint32_t checked_len(std::size_t n) {
    if (n > UINT32_MAX) throw std::length_error("field exceeds u32 length");
    return static_cast<std::uint32_t>(n);
  }
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

  [[noreturn]] void error(const std::string& what) const { throw DecodeError(pos_, what); }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) error(std::string("truncated ") + what);
  }

  std::uint8_t u8() {
    need(1, "u8");
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | in_[pos_++];
    return v;
  }
  ByteView raw(std::size_t n, const char* what) {
    need(n, what);
    ByteView out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  Bytes bytes() {
    const std::uint32_t n = u32();
    auto v = raw(n, "byte string");
    return Bytes(v.begin(), v.end());
  }
  std::string str() {
    const std::uint32_t n = u32();
    auto v = raw(n, "string");
    return std::string(reinterpret_cast<const char*>(v.data()), v.size());
  }
  BigInt bigint() {
    const std::uint32_t n = u32();
    auto v = raw(n, "integer");
    if (n > 0 && v[0] == 0) error("non-canonical integer (leading zero)");
    BigInt out = 0;
    if (n > 0) mpz_import(out.get_mpz_t(), n, 1, 1, 1, 0, v.data());
    return out;
  }
  // Every list element occupies at least `min_size` bytes.
  std::size_t count(std::size_t min_size) {
    const std::uint32_t n = u32();
    if (static_cast<std::uint64_t>(n) * min_size > remaining()) error("list count exceeds input");
    return n;
  }

  GrayImage image() {
    const std::uint32_t w = u32();
    const std::uint32_t h = u32();
    const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
    if (n > remaining()) error("image raster exceeds input");
    auto px = raw(static_cast<std::size_t>(n), "raster");
    return GrayImage(w, h, std::vector<std::uint8_t>(px.begin(), px.end()));
  }
  EncryptedFeature feature() {
    EncryptedFeature f;
    f.params_id = str();
    for (auto* ct : {&f.ef, &f.eff}) {
      const std::size_t n = count(4);
      ct->c.reserve(n);
      for (std::size_t i = 0; i < n; ++i) ct->c.push_back(bigint());
    }
    return f;
  }
  AccessToken token() {
    AccessToken ak;
    auto v = raw(ak.bytes.size(), "access token");
    std::memcpy(ak.bytes.data(), v.data(), v.size());
    return ak;
  }
  std::vector<RetrievedImage> results() {
    const std::size_t n = count(16);
    std::vector<RetrievedImage> rs;
    rs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      RetrievedImage r;
      r.owner_id = str();
      r.image_id = str();
      r.image = image();
      rs.push_back(std::move(r));
    }
    return rs;
  }

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

void encode_body(Writer& w, const OwnerUploadBody& b) {
  w.str(b.owner_id);
  w.count(b.aul.size());
  for (const auto& e : b.aul) {
    w.str(e.uid);
    w.token(e.ak);
  }
  w.count(b.images.size());
  for (const auto& img : b.images) {
    w.str(img.image_id);
    w.image(img.encrypted);
    w.feature(img.feature);
  }
}
void encode_body(Writer& w, const OwnerKeyDepositBody& b) {
  w.str(b.owner_id);
  w.bytes(b.sk.bytes);
}
void encode_body(Writer& w, const UserQueryBody& b) {
  w.feature(b.query.eq);
  w.str(b.query.uid);
  w.token(b.query.ak);
  w.u32(b.query.h);
}
void encode_body(Writer& w, const UserKeyDepositBody& b) {
  w.str(b.uid);
  w.bytes(b.usk.bytes);
}
void encode_body(Writer& w, const CloudToKmcBody& b) {
  w.str(b.uid);
  w.token(b.ak);
  w.results(b.results);
}
void encode_body(Writer& w, const KmcToCloudBody& b) {
  w.str(b.uid);
  w.results(b.results);
}
void encode_body(Writer& w, const CloudToUserBody& b) { w.results(b.results); }

Payload decode_body(Reader& r, std::uint8_t tag) {
  switch (static_cast<MessageKind>(tag)) {
    case MessageKind::kOwnerUpload: {
      OwnerUploadBody b;
      b.owner_id = r.str();
      const std::size_t n_aul = r.count(4 + 32);
      for (std::size_t i = 0; i < n_aul; ++i) {
        AulEntry e;
        e.uid = r.str();
        e.ak = r.token();
        b.aul.push_back(std::move(e));
      }
      const std::size_t n_img = r.count(16);
      for (std::size_t i = 0; i < n_img; ++i) {
        ImageUpload up;
        up.image_id = r.str();
        up.encrypted = r.image();
        up.feature = r.feature();
        b.images.push_back(std::move(up));
      }
      return b;
    }
    case MessageKind::kOwnerKeyDeposit: {
      OwnerKeyDepositBody b;
      b.owner_id = r.str();
      b.sk.bytes = r.bytes();
      return b;
    }
    case MessageKind::kUserQuery: {
      UserQueryBody b;
      b.query.eq = r.feature();
      b.query.uid = r.str();
      b.query.ak = r.token();
      b.query.h = r.u32();
      return b;
    }
    case MessageKind::kUserKeyDeposit: {
      UserKeyDepositBody b;
      b.uid = r.str();
      b.usk.bytes = r.bytes();
      return b;
    }
    case MessageKind::kCloudToKmc: {
      CloudToKmcBody b;
      b.uid = r.str();
      b.ak = r.token();
      b.results = r.results();
      return b;
    }
    case MessageKind::kKmcToCloud: {
      KmcToCloudBody b;
      b.uid = r.str();
      b.results = r.results();
      return b;
    }
    case MessageKind::kCloudToUser: {
      CloudToUserBody b;
      b.results = r.results();
      return b;
    }
  }
  throw DecodeError(4, "unknown message kind " + std::to_string(tag));
}

}  // namespace

Bytes encode_message(const Message& m) {
  Writer w;
  w.u32(0);  // patched below
  w.u8(static_cast<std::uint8_t>(m.kind()));
  w.raw(m.session);
  std::visit([&w](const auto& body) { encode_body(w, body); }, m.payload);
  Bytes out = w.take();
  const std::size_t len = out.size() - 4;
  if (len > UINT32_MAX) throw std::length_error("message exceeds u32 frame length");
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(len >> (24 - 8 * i));
  return out;
}

Message decode_message(ByteView bytes) {
  Reader r(bytes);
  if (bytes.size() < kFrameHeader) r.error("truncated frame header");
  const std::uint32_t len = r.u32();
  if (len != bytes.size() - 4) {
    throw DecodeError(0, "frame length " + std::to_string(len) + " disagrees with " +
                             std::to_string(bytes.size() - 4) + " available bytes");
  }
  const std::uint8_t tag = r.u8();
  if (tag < 1 || tag > 7) throw DecodeError(4, "unknown message kind " + std::to_string(tag));
  Message m;
  auto sid = r.raw(m.session.size(), "session id");
  std::memcpy(m.session.data(), sid.data(), sid.size());
  m.payload = decode_body(r, tag);
  if (r.remaining() != 0) r.error("trailing bytes after message body");
  return m;
}

}  // namespace mipp
