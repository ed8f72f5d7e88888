#include "clusterauth/messages.hpp"

#include "clusterauth/errors.hpp"

namespace clusterauth {

namespace {

class Writer {
 public:
  Writer(const GroupParams& group, MessageKind kind) : group_(group) {
    out_.push_back(static_cast<std::uint8_t>(kind));
  }
  Writer& block(const Block32& b) {
    out_.insert(out_.end(), b.begin(), b.end());
    return *this;
  }
  Writer& elem(const GroupElem& x) {
    Bytes enc = encode_elem(group_, x);
    out_.insert(out_.end(), enc.begin(), enc.end());
    return *this;
  }
  Writer& scalar(const Scalar& s) { return block(encode_scalar32(s)); }
  Writer& time(std::uint64_t ms) {
    auto b = encode_u64(ms);
    out_.insert(out_.end(), b.begin(), b.end());
    return *this;
  }
  Writer& u16(std::size_t v) {
    if (v > 0xffff) throw ProtocolError(Errc::Malformed, "list too long");
    out_.push_back(std::uint8_t(v >> 8));
    out_.push_back(std::uint8_t(v));
    return *this;
  }
  Bytes take() { return std::move(out_); }

 private:
  const GroupParams& group_;
  Bytes out_;
};

class Reader {
 public:
  Reader(const GroupParams& group, ByteView bytes, MessageKind kind) : group_(group), in_(bytes) {
    if (in_.empty() || in_[0] != static_cast<std::uint8_t>(kind))
      throw ProtocolError(Errc::Malformed, "unexpected message type");
    pos_ = 1;
  }
  Block32 block() {
    Block32 b;
    auto s = take(32);
    std::copy(s.begin(), s.end(), b.begin());
    return b;
  }
  GroupElem elem() { return decode_elem(group_, take(group_.elem_bytes())); }
  Scalar scalar() { return decode_scalar32(group_, block()); }
  std::uint64_t time() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (auto b : s) v = (v << 8) | b;
    return v;
  }
  std::uint16_t u16() {
    auto s = take(2);
    return std::uint16_t((s[0] << 8) | s[1]);
  }
  void finish() const {
    if (pos_ != in_.size()) throw ProtocolError(Errc::Malformed, "trailing bytes");
  }

 private:
  ByteView take(std::size_t n) {
    if (in_.size() - pos_ < n) throw ProtocolError(Errc::Malformed, "truncated message");
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  const GroupParams& group_;
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::JoinRequest: return "JoinRequest";
    case MessageKind::AggregateChallenge: return "AggregateChallenge";
    case MessageKind::CmResponse: return "CmResponse";
    case MessageKind::PeerBroadcast: return "PeerBroadcast";
    case MessageKind::PeerAck: return "PeerAck";
    case MessageKind::PeerAckLiteral: return "PeerAckLiteral";
    case MessageKind::NuavConfirm: return "NuavConfirm";
    case MessageKind::TransferRequest: return "TransferRequest";
    case MessageKind::KeyUpdateInit: return "KeyUpdateInit";
    case MessageKind::ShareEnvelope: return "ShareEnvelope";
    case MessageKind::PublicParams: return "PublicParams";
  }
  return "Unknown";
}

Bytes encode(const GroupParams& group, const JoinRequest& m) {
  return Writer(group, MessageKind::JoinRequest)
      .block(m.nuav_pid)
      .elem(m.nuav_pk)
      .block(m.ch_pid)
      .elem(m.v)
      .elem(m.sig)
      .take();
}

Bytes encode(const GroupParams& group, const AggregateChallenge& m) {
  return Writer(group, MessageKind::AggregateChallenge)
      .block(m.ch_pid)
      .time(m.t1)
      .block(m.sig_nuavs)
      .elem(m.c_nuavs)
      .block(m.share)
      .scalar(m.m_total)
      .block(m.k_tag)
      .take();
}

Bytes encode(const GroupParams& group, const CmResponse& m) {
  return Writer(group, MessageKind::CmResponse).time(m.t1).elem(m.sig_cm).block(m.c_cm).take();
}

Bytes encode(const GroupParams& group, const PeerBroadcast& m) {
  return Writer(group, MessageKind::PeerBroadcast)
      .elem(m.sig_cms)
      .elem(m.pk_cms)
      .block(m.c_ch)
      .block(m.q_ch)
      .time(m.t2)
      .take();
}

Bytes encode(const GroupParams& group, const PeerAck& m) {
  if (m.literal) return Writer(group, MessageKind::PeerAckLiteral).block(m.q_ack).time(m.t2).take();
  return Writer(group, MessageKind::PeerAck)
      .block(m.q_ack)
      .time(m.t2)
      .block(m.responder_pid)
      .take();
}

Bytes encode(const GroupParams& group, const NuavConfirm& m) {
  return Writer(group, MessageKind::NuavConfirm).block(m.res).elem(m.ch_pk).take();
}

Bytes encode(const GroupParams& group, const TransferRequest& m) {
  return Writer(group, MessageKind::TransferRequest).block(m.c).block(m.euav_pid).time(m.t3).take();
}

Bytes encode(const GroupParams& group, const KeyUpdateInit& m) {
  Writer w(group, MessageKind::KeyUpdateInit);
  w.time(m.t4).block(m.f_masked).u16(m.peer_commitments.size());
  for (const auto& [idx, c] : m.peer_commitments) w.u16(idx).elem(c);
  return w.block(m.confirm).take();
}

Bytes encode(const GroupParams& group, const ShareEnvelope& m) {
  Writer w(group, MessageKind::ShareEnvelope);
  w.u16(m.sender).u16(m.u.size());
  for (const auto& [idx, u] : m.u) w.u16(idx).block(u);
  return w.take();
}

JoinRequest decode_join_request(const GroupParams& group, ByteView bytes) {
  Reader r(group, bytes, MessageKind::JoinRequest);
  JoinRequest m;
  m.nuav_pid = r.block();
  m.nuav_pk = r.elem();
  m.ch_pid = r.block();
  m.v = r.elem();
  m.sig = r.elem();
  r.finish();
  return m;
}

AggregateChallenge decode_aggregate_challenge(const GroupParams& group, ByteView bytes) {
  Reader r(group, bytes, MessageKind::AggregateChallenge);
  AggregateChallenge m;
  m.ch_pid = r.block();
  m.t1 = r.time();
  m.sig_nuavs = r.block();
  m.c_nuavs = r.elem();
  m.share = r.block();
  m.m_total = r.scalar();
  m.k_tag = r.block();
  r.finish();
  return m;
}

CmResponse decode_cm_response(const GroupParams& group, ByteView bytes) {
  Reader r(group, bytes, MessageKind::CmResponse);
  CmResponse m;
  m.t1 = r.time();
  m.sig_cm = r.elem();
  m.c_cm = r.block();
  r.finish();
  return m;
}

PeerBroadcast decode_peer_broadcast(const GroupParams& group, ByteView bytes) {
  Reader r(group, bytes, MessageKind::PeerBroadcast);
  PeerBroadcast m;
  m.sig_cms = r.elem();
  m.pk_cms = r.elem();
  m.c_ch = r.block();
  m.q_ch = r.block();
  m.t2 = r.time();
  r.finish();
  return m;
}

PeerAck decode_peer_ack(const GroupParams& group, ByteView bytes) {
  bool literal = !bytes.empty() && bytes[0] == static_cast<std::uint8_t>(MessageKind::PeerAckLiteral);
  Reader r(group, bytes, literal ? MessageKind::PeerAckLiteral : MessageKind::PeerAck);
  PeerAck m;
  m.literal = literal;
  m.q_ack = r.block();
  m.t2 = r.time();
  if (!literal) m.responder_pid = r.block();
  r.finish();
  return m;
}

NuavConfirm decode_nuav_confirm(const GroupParams& group, ByteView bytes) {
  Reader r(group, bytes, MessageKind::NuavConfirm);
  NuavConfirm m;
  m.res = r.block();
  m.ch_pk = r.elem();
  r.finish();
  return m;
}

TransferRequest decode_transfer_request(const GroupParams& group, ByteView bytes) {
  Reader r(group, bytes, MessageKind::TransferRequest);
  TransferRequest m;
  m.c = r.block();
  m.euav_pid = r.block();
  m.t3 = r.time();
  r.finish();
  return m;
}

KeyUpdateInit decode_key_update_init(const GroupParams& group, ByteView bytes) {
  Reader r(group, bytes, MessageKind::KeyUpdateInit);
  KeyUpdateInit m;
  m.t4 = r.time();
  m.f_masked = r.block();
  std::uint16_t n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    std::uint16_t idx = r.u16();
    m.peer_commitments.emplace_back(idx, r.elem());
  }
  m.confirm = r.block();
  r.finish();
  return m;
}

ShareEnvelope decode_share_envelope(const GroupParams& group, ByteView bytes) {
  Reader r(group, bytes, MessageKind::ShareEnvelope);
  ShareEnvelope m;
  m.sender = r.u16();
  std::uint16_t n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    std::uint16_t idx = r.u16();
    m.u.emplace_back(idx, r.block());
  }
  r.finish();
  return m;
}

}  // namespace clusterauth
