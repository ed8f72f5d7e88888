#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "clusterauth/group.hpp"

namespace clusterauth {

// One type byte starts every frame; lists carry a 2-byte count.
enum class MessageKind : std::uint8_t {
  JoinRequest = 0x01,
  AggregateChallenge = 0x02,
  CmResponse = 0x03,
  PeerBroadcast = 0x04,
  PeerAck = 0x05,
  PeerAckLiteral = 0x06,
  NuavConfirm = 0x07,
  TransferRequest = 0x08,
  KeyUpdateInit = 0x09,
  ShareEnvelope = 0x0A,
  PublicParams = 0x10,
};

std::string_view kind_name(MessageKind kind);

struct JoinRequest {
  Block32 nuav_pid{};
  GroupElem nuav_pk;
  Block32 ch_pid{};
  GroupElem v;
  GroupElem sig;
};

struct AggregateChallenge {
  Block32 ch_pid{};
  std::uint64_t t1 = 0;
  Block32 sig_nuavs{};
  GroupElem c_nuavs;
  Block32 share{};
  Scalar m_total;
  Block32 k_tag{};
};

struct CmResponse {
  std::uint64_t t1 = 0;
  GroupElem sig_cm;
  Block32 c_cm{};
};

struct PeerBroadcast {
  GroupElem sig_cms;
  GroupElem pk_cms;
  Block32 c_ch{};
  Block32 q_ch{};
  std::uint64_t t2 = 0;
};

/// responder_pid is only on the wire in hardened mode.
struct PeerAck {
  Block32 q_ack{};
  std::uint64_t t2 = 0;
  Block32 responder_pid{};
  bool literal = false;
};

struct NuavConfirm {
  Block32 res{};
  GroupElem ch_pk;
};

struct TransferRequest {
  Block32 c{};
  Block32 euav_pid{};
  std::uint64_t t3 = 0;
};

struct KeyUpdateInit {
  std::uint64_t t4 = 0;
  Block32 f_masked{};
  /// (member index, g^{f(x_n)}) for every member except the recipient.
  std::vector<std::pair<std::uint16_t, GroupElem>> peer_commitments;
  Block32 confirm{};
};

struct ShareEnvelope {
  std::uint16_t sender = 0;
  std::vector<std::pair<std::uint16_t, Block32>> u;
};

Bytes encode(const GroupParams& group, const JoinRequest& m);
Bytes encode(const GroupParams& group, const AggregateChallenge& m);
Bytes encode(const GroupParams& group, const CmResponse& m);
Bytes encode(const GroupParams& group, const PeerBroadcast& m);
Bytes encode(const GroupParams& group, const PeerAck& m);
Bytes encode(const GroupParams& group, const NuavConfirm& m);
Bytes encode(const GroupParams& group, const TransferRequest& m);
Bytes encode(const GroupParams& group, const KeyUpdateInit& m);
Bytes encode(const GroupParams& group, const ShareEnvelope& m);

// Decoders reject wrong tags, trailing or missing bytes (Malformed), group
// elements outside the subgroup (NotInGroup) and scalars >= q (OutOfRange).
JoinRequest decode_join_request(const GroupParams& group, ByteView bytes);
AggregateChallenge decode_aggregate_challenge(const GroupParams& group, ByteView bytes);
CmResponse decode_cm_response(const GroupParams& group, ByteView bytes);
PeerBroadcast decode_peer_broadcast(const GroupParams& group, ByteView bytes);
PeerAck decode_peer_ack(const GroupParams& group, ByteView bytes);
NuavConfirm decode_nuav_confirm(const GroupParams& group, ByteView bytes);
TransferRequest decode_transfer_request(const GroupParams& group, ByteView bytes);
KeyUpdateInit decode_key_update_init(const GroupParams& group, ByteView bytes);
ShareEnvelope decode_share_envelope(const GroupParams& group, ByteView bytes);

/// Encoded sizes in bytes as a function of the element width E; these are
/// what the overhead model's derived closed forms are built from.
struct WireSizes {
  std::size_t e;
  std::size_t join_request() const { return 1 + 32 + e + 32 + e + e; }
  std::size_t aggregate_challenge() const { return 1 + 32 + 8 + 32 + e + 32 + 32 + 32; }
  std::size_t cm_response() const { return 1 + 8 + e + 32; }
  std::size_t peer_broadcast() const { return 1 + e + e + 32 + 32 + 8; }
  std::size_t peer_ack(bool literal) const { return literal ? 1 + 32 + 8 : 1 + 32 + 8 + 32; }
  std::size_t nuav_confirm() const { return 1 + 32 + e; }
  std::size_t transfer_request() const { return 1 + 32 + 32 + 8; }
  std::size_t key_update_init(std::size_t n) const { return 1 + 8 + 32 + 2 + (n - 1) * (2 + e) + 32; }
  std::size_t share_envelope(std::size_t n) const { return 1 + 2 + 2 + (n - 1) * (2 + 32); }
};

}  // namespace clusterauth
