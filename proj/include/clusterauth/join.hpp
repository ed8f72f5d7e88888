#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clusterauth/messages.hpp"
#include "clusterauth/registry.hpp"

namespace clusterauth {

struct ProtocolOptions {
  /// Reproduce the unbound peer acknowledgement and the reused transfer
  /// hash exactly as printed instead of the hardened variants.
  bool paper_literal = false;
  std::uint64_t freshness_ms = 100;
};

/// t is acceptable at `now` if it is not in the future and at most
/// `window` ms old.
bool is_fresh(std::uint64_t t, std::uint64_t now, std::uint64_t window);
void require_fresh(std::uint64_t t, std::uint64_t now, std::uint64_t window);

/// D = pk_GBS^{H(CJT)} * pk_CH, which equals g^{sk_CH}.
GroupElem join_base(const GroupParams& group, const GroupElem& gbs_pk, const Block32& h_cjt,
                    const GroupElem& ch_pk);
/// w = H(PID_NUAV, PID_CH, pk_NUAV) in exponent form.
Scalar join_weight(const GroupParams& group, const Block32& nuav_pid, const Block32& ch_pid,
                   const GroupElem& nuav_pk);

JoinRequest nuav_build_request(const PublicParams& pp, const NuavCredential& cred, Rng& rng);

/// CH-side state kept between aggregation and finalisation.
struct JoinBatch {
  std::uint64_t t1 = 0;
  std::vector<MemberInfo> nuavs;
  std::vector<MemberInfo> roster;
  std::vector<Scalar> shares;
  Scalar m_total;
  Block32 result{};
};

struct AggregateOutput {
  JoinBatch batch;
  /// One per roster entry, same order.
  std::vector<AggregateChallenge> challenges;
};

AggregateOutput ch_aggregate(const GroupParams& group, const ChCredential& ch,
                             std::span<const JoinRequest> reqs, std::span<const MemberInfo> roster,
                             std::uint64_t t1, Rng& rng);

CmResponse cm_verify_and_respond(const GroupParams& group, const CmCredential& cm,
                                 const Block32& ch_pid, std::size_t n_cm,
                                 const AggregateChallenge& chal, std::uint64_t now,
                                 const ProtocolOptions& opts = {});

/// The CH's own result for the batch; equals every honest CM's result.
Block32 expected_result(const ChCredential& ch, std::uint64_t t1);

/// Checks timestamps and that every CM returned the CH's result. Fills
/// batch.result.
void ch_check_results(const GroupParams& group, const ChCredential& ch, JoinBatch& batch,
                      std::span<const CmResponse> responses, std::uint64_t now,
                      const ProtocolOptions& opts = {});

PeerBroadcast ch_build_broadcast(const GroupParams& group, const ChCredential& ch,
                                 const Block32& result, const GroupElem& sig_cms,
                                 const GroupElem& pk_cms, std::uint64_t t2);

/// MAm path: result check, aggregate check g^{N^2 H(result)} = sig_CMs * pk_CMs,
/// then the broadcast for the peer CHs.
PeerBroadcast ch_collect_and_verify(const GroupParams& group, const ChCredential& ch,
                                    JoinBatch& batch, std::span<const CmResponse> responses,
                                    std::uint64_t now, std::uint64_t t2,
                                    const ProtocolOptions& opts = {});

/// No-aggregation path: every CM signature is checked on its own,
/// g^{N H(result)} = sig_l^{s_l} * pk_l^M, and one record per CM is produced.
struct IndividualRecord {
  GroupElem sig;
  GroupElem pk;
};
std::vector<IndividualRecord> ch_verify_individual(const GroupParams& group,
                                                   const ChCredential& ch, JoinBatch& batch,
                                                   std::span<const CmResponse> responses,
                                                   std::uint64_t now,
                                                   const ProtocolOptions& opts = {});

/// exponent_weight is N_CM^2 for aggregated broadcasts and N_CM for the
/// per-CM records of the no-aggregation path.
PeerAck peer_ch_verify(const GroupParams& group, const ChCredential& peer, const PeerBroadcast& bc,
                       std::uint64_t exponent_weight, std::uint64_t now,
                       const ProtocolOptions& opts = {});

/// Verifies one ack per peer CH (each peer exactly once in hardened mode).
void ch_verify_acks(const Block32& result, std::uint64_t t2, std::span<const PeerAck> acks,
                    std::span<const Block32> peer_pids, std::uint64_t now,
                    const ProtocolOptions& opts = {});

/// Reports the NUAV identifiers to the GBS and emits one confirmation per
/// NUAV, in batch order.
std::vector<NuavConfirm> ch_finalize(const ChCredential& ch, const JoinBatch& batch,
                                     Registry& registry);

bool nuav_verify_ch(const GroupParams& group, const NuavCredential& cred,
                    const NuavConfirm& conf);

}  // namespace clusterauth
