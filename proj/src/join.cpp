#include "clusterauth/join.hpp"

#include <algorithm>

#include "clusterauth/errors.hpp"

namespace clusterauth {

namespace {

ByteView view(const Block32& b) { return ByteView(b); }

Block32 key_mask_sig(const Block32& key) { return hash_to_block("key-sig", {view(key)}); }
Block32 key_mask_cm(const Block32& key) { return hash_to_block("key-cm", {view(key)}); }

Block32 share_mask(const Block32& key, std::uint64_t t1) {
  auto t = encode_u64(t1);
  return hash_to_block("share", {view(key), ByteView(t)});
}

Block32 share_tag(const Block32& share_raw, const Block32& cm_pid, const Scalar& m_total) {
  Block32 m = encode_scalar32(m_total);
  return hash_to_block("ktag", {view(share_raw), view(cm_pid), view(m)});
}

Block32 aggregate_digest(const GroupParams& group, const GroupElem& x) {
  Bytes enc = encode_elem(group, x);
  return hash_to_block("sigagg", {ByteView(enc)});
}

Scalar result_exponent(const GroupParams& group, const Block32& result) {
  return hash_to_exponent(group, "hres", {view(result)});
}

Block32 peer_token(const Block32& result, std::uint64_t t2) {
  auto t = encode_u64(t2);
  return hash_to_block("q", {view(result), ByteView(t)});
}

Block32 ack_token(const Block32& result, std::uint64_t t2, const Block32& responder) {
  auto t = encode_u64(t2);
  return hash_to_block("ack", {view(result), ByteView(t), view(responder)});
}

Block32 confirm_token(const Block32& h_cjt, const Block32& nuav_pid, const GroupParams& group,
                      const GroupElem& ch_pk) {
  Bytes pk = encode_elem(group, ch_pk);
  return hash_to_block("res", {view(h_cjt), view(nuav_pid), ByteView(pk)});
}

GroupElem exp_weighted(const GroupParams& group, const Scalar& h, std::uint64_t weight) {
  return exp_g(group, scalar_mul(group, reduce(group, mpz_class(std::to_string(weight))), h));
}

}  // namespace

bool is_fresh(std::uint64_t t, std::uint64_t now, std::uint64_t window) {
  return t <= now && now - t <= window;
}

void require_fresh(std::uint64_t t, std::uint64_t now, std::uint64_t window) {
  if (!is_fresh(t, now, window)) throw ProtocolError(Errc::StaleTimestamp);
}

GroupElem join_base(const GroupParams& group, const GroupElem& gbs_pk, const Block32& h_cjt,
                    const GroupElem& ch_pk) {
  return mul(group, mod_exp(group, gbs_pk, block_to_exponent(group, h_cjt)), ch_pk);
}

Scalar join_weight(const GroupParams& group, const Block32& nuav_pid, const Block32& ch_pid,
                   const GroupElem& nuav_pk) {
  Bytes pk = encode_elem(group, nuav_pk);
  return hash_to_exponent(group, "w", {view(nuav_pid), view(ch_pid), ByteView(pk)});
}

JoinRequest nuav_build_request(const PublicParams& pp, const NuavCredential& cred, Rng& rng) {
  const auto& group = pp.group;
  GroupElem d = join_base(group, pp.gbs_pubs.at(cred.gbs), cred.h_cjt, cred.ch_pk);
  Scalar w = join_weight(group, cred.pid, cred.ch_pid, cred.pk);
  Scalar v = rng.nonzero_scalar(group);
  JoinRequest req;
  req.nuav_pid = cred.pid;
  req.nuav_pk = cred.pk;
  req.ch_pid = cred.ch_pid;
  req.v = exp_g(group, v);
  req.sig = mod_exp(group, d, scalar_mul(group, v, w));
  return req;
}

AggregateOutput ch_aggregate(const GroupParams& group, const ChCredential& ch,
                             std::span<const JoinRequest> reqs, std::span<const MemberInfo> roster,
                             std::uint64_t t1, Rng& rng) {
  if (reqs.empty()) throw ProtocolError(Errc::EmptyBatch);
  if (roster.empty()) throw ProtocolError(Errc::EmptyCluster);
  for (const auto& r : reqs)
    if (r.ch_pid != ch.pid) throw ProtocolError(Errc::MismatchedCluster);

  AggregateOutput out;
  JoinBatch& batch = out.batch;
  batch.t1 = t1;
  batch.roster.assign(roster.begin(), roster.end());
  for (const auto& r : reqs) batch.nuavs.push_back({r.nuav_pid, r.nuav_pk});

  GroupElem sig_prod = reqs[0].sig;
  for (std::size_t k = 1; k < reqs.size(); ++k) sig_prod = mul(group, sig_prod, reqs[k].sig);
  GroupElem unblinded = mod_exp(group, sig_prod, scalar_inv(group, ch.sk));
  Block32 sig_nuavs = xor32(aggregate_digest(group, unblinded), key_mask_sig(ch.key));

  GroupElem c_nuavs;
  for (std::size_t k = 0; k < reqs.size(); ++k) {
    Scalar w = join_weight(group, reqs[k].nuav_pid, ch.pid, reqs[k].nuav_pk);
    GroupElem term = mod_exp(group, reqs[k].v, w);
    c_nuavs = k == 0 ? term : mul(group, c_nuavs, term);
  }

  Block32 mask = share_mask(ch.key, t1);
  batch.m_total = Scalar(0ul);
  for (std::size_t l = 0; l < roster.size(); ++l) {
    batch.shares.push_back(rng.nonzero_scalar(group));
    batch.m_total = scalar_add(group, batch.m_total, batch.shares.back());
  }
  for (std::size_t l = 0; l < roster.size(); ++l) {
    AggregateChallenge c;
    c.ch_pid = ch.pid;
    c.t1 = t1;
    c.sig_nuavs = sig_nuavs;
    c.c_nuavs = c_nuavs;
    Block32 s = encode_scalar32(batch.shares[l]);
    c.share = xor32(s, mask);
    c.m_total = batch.m_total;
    c.k_tag = share_tag(s, roster[l].pid, batch.m_total);
    out.challenges.push_back(c);
  }
  return out;
}

CmResponse cm_verify_and_respond(const GroupParams& group, const CmCredential& cm,
                                 const Block32& ch_pid, std::size_t n_cm,
                                 const AggregateChallenge& chal, std::uint64_t now,
                                 const ProtocolOptions& opts) {
  if (chal.ch_pid != ch_pid) throw ProtocolError(Errc::MismatchedCluster);
  require_fresh(chal.t1, now, opts.freshness_ms);
  if (xor32(chal.sig_nuavs, key_mask_sig(cm.key)) != aggregate_digest(group, chal.c_nuavs))
    throw ProtocolError(Errc::BatchRejected);

  auto t = encode_u64(chal.t1);
  Block32 s_raw = xor32(chal.share, share_mask(cm.key, chal.t1));
  bool share_ok = share_tag(s_raw, cm.pid, chal.m_total) == chal.k_tag;
  Scalar s(1ul);
  if (share_ok) {
    try {
      s = decode_scalar32(group, s_raw);
    } catch (const ProtocolError&) {
      share_ok = false;
    }
    if (s.is_zero()) share_ok = false;
  }
  if (!share_ok) s = Scalar(1ul);

  Block32 result = share_ok
                       ? hash_to_block("result", {view(ch_pid), ByteView(t), view(cm.key)})
                       : hash_to_block("fallback", {ByteView(t), view(cm.key)});
  Scalar h = result_exponent(group, result);
  Scalar n(static_cast<unsigned long>(n_cm));
  Scalar e = scalar_mul(
      group, scalar_sub(group, scalar_mul(group, n, h), scalar_mul(group, cm.sk, chal.m_total)),
      scalar_inv(group, s));

  CmResponse resp;
  resp.t1 = chal.t1;
  resp.sig_cm = exp_g(group, e);
  resp.c_cm = xor32(result, key_mask_cm(cm.key));
  return resp;
}

Block32 expected_result(const ChCredential& ch, std::uint64_t t1) {
  auto t = encode_u64(t1);
  return hash_to_block("result", {view(ch.pid), ByteView(t), view(ch.key)});
}

void ch_check_results(const GroupParams&, const ChCredential& ch, JoinBatch& batch,
                      std::span<const CmResponse> responses, std::uint64_t now,
                      const ProtocolOptions& opts) {
  if (responses.size() != batch.roster.size())
    throw ProtocolError(Errc::ResultMismatch, "missing CM response");
  for (const auto& r : responses) {
    if (r.t1 != batch.t1) throw ProtocolError(Errc::StaleTimestamp, "T1 echo differs");
    require_fresh(r.t1, now, opts.freshness_ms);
  }
  batch.result = expected_result(ch, batch.t1);
  Block32 mask = key_mask_cm(ch.key);
  for (const auto& r : responses)
    if (xor32(r.c_cm, mask) != batch.result) throw ProtocolError(Errc::ResultMismatch);
}

PeerBroadcast ch_build_broadcast(const GroupParams&, const ChCredential& ch,
                                 const Block32& result, const GroupElem& sig_cms,
                                 const GroupElem& pk_cms, std::uint64_t t2) {
  PeerBroadcast bc;
  bc.sig_cms = sig_cms;
  bc.pk_cms = pk_cms;
  bc.c_ch = xor32(xor32(result, ch.ct), encode_time32(t2));
  bc.q_ch = peer_token(result, t2);
  bc.t2 = t2;
  return bc;
}

PeerBroadcast ch_collect_and_verify(const GroupParams& group, const ChCredential& ch,
                                    JoinBatch& batch, std::span<const CmResponse> responses,
                                    std::uint64_t now, std::uint64_t t2,
                                    const ProtocolOptions& opts) {
  ch_check_results(group, ch, batch, responses, now, opts);
  Scalar h = result_exponent(group, batch.result);
  std::size_t n = responses.size();

  GroupElem sig_cms, pk_prod;
  for (std::size_t l = 0; l < n; ++l) {
    GroupElem term = mod_exp(group, responses[l].sig_cm, batch.shares[l]);
    sig_cms = l == 0 ? term : mul(group, sig_cms, term);
    pk_prod = l == 0 ? batch.roster[l].pk : mul(group, pk_prod, batch.roster[l].pk);
  }
  GroupElem pk_cms = mod_exp(group, pk_prod, batch.m_total);
  if (exp_weighted(group, h, n * n) != mul(group, sig_cms, pk_cms))
    throw ProtocolError(Errc::AggregateInvalid);
  return ch_build_broadcast(group, ch, batch.result, sig_cms, pk_cms, t2);
}

std::vector<IndividualRecord> ch_verify_individual(const GroupParams& group,
                                                   const ChCredential& ch, JoinBatch& batch,
                                                   std::span<const CmResponse> responses,
                                                   std::uint64_t now,
                                                   const ProtocolOptions& opts) {
  ch_check_results(group, ch, batch, responses, now, opts);
  Scalar h = result_exponent(group, batch.result);
  GroupElem expected = exp_weighted(group, h, responses.size());
  std::vector<IndividualRecord> out;
  for (std::size_t l = 0; l < responses.size(); ++l) {
    IndividualRecord rec;
    rec.sig = mod_exp(group, responses[l].sig_cm, batch.shares[l]);
    rec.pk = mod_exp(group, batch.roster[l].pk, batch.m_total);
    if (mul(group, rec.sig, rec.pk) != expected) throw ProtocolError(Errc::AggregateInvalid);
    out.push_back(rec);
  }
  return out;
}

PeerAck peer_ch_verify(const GroupParams& group, const ChCredential& peer, const PeerBroadcast& bc,
                       std::uint64_t exponent_weight, std::uint64_t now,
                       const ProtocolOptions& opts) {
  require_fresh(bc.t2, now, opts.freshness_ms);
  Block32 result = xor32(xor32(bc.c_ch, peer.ct), encode_time32(bc.t2));
  Block32 q = peer_token(result, bc.t2);
  if (q != bc.q_ch) throw ProtocolError(Errc::TokenMismatch);
  Scalar h = result_exponent(group, result);
  if (exp_weighted(group, h, exponent_weight) != mul(group, bc.sig_cms, bc.pk_cms))
    throw ProtocolError(Errc::AggregateInvalid);

  PeerAck ack;
  ack.t2 = bc.t2;
  ack.literal = opts.paper_literal;
  if (opts.paper_literal) {
    ack.q_ack = q;
  } else {
    ack.responder_pid = peer.pid;
    ack.q_ack = ack_token(result, bc.t2, peer.pid);
  }
  return ack;
}

void ch_verify_acks(const Block32& result, std::uint64_t t2, std::span<const PeerAck> acks,
                    std::span<const Block32> peer_pids, std::uint64_t now,
                    const ProtocolOptions& opts) {
  if (acks.size() != peer_pids.size()) throw ProtocolError(Errc::AckInvalid, "missing ack");
  for (const auto& a : acks) require_fresh(a.t2, now, opts.freshness_ms);
  for (const auto& a : acks)
    if (a.t2 != t2 || a.literal != opts.paper_literal) throw ProtocolError(Errc::AckInvalid);

  if (opts.paper_literal) {
    if (acks.empty()) return;
    Block32 q = peer_token(result, t2);
    for (const auto& a : acks)
      if (a.q_ack != q) throw ProtocolError(Errc::AckInvalid);
    return;
  }
  std::vector<Block32> seen;
  for (const auto& a : acks) {
    bool known = std::find(peer_pids.begin(), peer_pids.end(), a.responder_pid) != peer_pids.end();
    bool repeat = std::find(seen.begin(), seen.end(), a.responder_pid) != seen.end();
    if (!known || repeat) throw ProtocolError(Errc::AckInvalid, "unexpected responder");
    seen.push_back(a.responder_pid);
    if (a.q_ack != ack_token(result, t2, a.responder_pid)) throw ProtocolError(Errc::AckInvalid);
  }
}

std::vector<NuavConfirm> ch_finalize(const ChCredential& ch, const JoinBatch& batch,
                                     Registry& registry) {
  registry.record_joined(ch.gbs, ch.cluster, batch.nuavs);
  const auto& group = registry.group();
  Block32 h_cjt = hash_cjt(ch.cjt);
  std::vector<NuavConfirm> out;
  for (const auto& n : batch.nuavs) out.push_back({confirm_token(h_cjt, n.pid, group, ch.pk), ch.pk});
  return out;
}

bool nuav_verify_ch(const GroupParams& group, const NuavCredential& cred,
                    const NuavConfirm& conf) {
  if (conf.ch_pk != cred.ch_pk) return false;
  return confirm_token(cred.h_cjt, cred.pid, group, cred.ch_pk) == conf.res;
}

}  // namespace clusterauth
