#include "clusterauth/cross_cluster.hpp"

#include "clusterauth/errors.hpp"

namespace clusterauth {

namespace {

Block32 transfer_check(const Block32& ct, const Block32& pid, std::uint64_t t3) {
  auto t = encode_u64(t3);
  return hash_to_block("xfer", {ByteView(pid), ByteView(t), ByteView(ct)});
}

}  // namespace

TransferRequest source_ch_build_transfer(const ChCredential& ch, const Block32& euav_pid,
                                         std::uint64_t t3) {
  if (!ch.member_secrets.count(euav_pid)) throw ProtocolError(Errc::UnknownMember);
  TransferRequest req;
  req.euav_pid = euav_pid;
  req.t3 = t3;
  req.c = xor32(transfer_check(ch.ct, euav_pid, t3), ch.ct);
  return req;
}

Block32 transfer_new_pid(const Block32& ct, const Block32& euav_pid, std::uint64_t t3,
                         bool paper_literal) {
  if (paper_literal) return transfer_check(ct, euav_pid, t3);
  auto t = encode_u64(t3);
  return hash_to_block("xfer-pid", {ByteView(euav_pid), ByteView(t), ByteView(ct)});
}

Block32 dest_ch_verify_transfer(const ChCredential& ch, Registry& registry,
                                const TransferRequest& req, std::uint64_t now,
                                const ProtocolOptions& opts) {
  require_fresh(req.t3, now, opts.freshness_ms);
  if (transfer_check(ch.ct, req.euav_pid, req.t3) != xor32(req.c, ch.ct))
    throw ProtocolError(Errc::TokenMismatch);
  if (!registry.db_lookup(ch.gbs, req.euav_pid)) throw ProtocolError(Errc::UnknownPid);
  Block32 new_pid = transfer_new_pid(ch.ct, req.euav_pid, req.t3, opts.paper_literal);
  registry.supersede(ch.gbs, req.euav_pid, new_pid, ch.cluster);
  return new_pid;
}

}  // namespace clusterauth
