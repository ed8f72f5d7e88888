#include "clusterauth/key_update.hpp"

#include <algorithm>

#include "clusterauth/errors.hpp"

namespace clusterauth {

namespace {

constexpr std::uint64_t kSaltBound = 1024;

Block32 sk_mask(const Scalar& sk, std::uint64_t t4) {
  Block32 s = encode_scalar32(sk);
  auto t = encode_u64(t4);
  return hash_to_block("rekey-sk", {ByteView(s), ByteView(t)});
}

bool all_distinct(const std::vector<Scalar>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (xs[i] == xs[j]) return false;
  return true;
}

std::size_t roster_index(std::span<const Block32> roster, const Block32& pid) {
  auto it = std::find(roster.begin(), roster.end(), pid);
  if (it == roster.end()) throw ProtocolError(Errc::UnknownMember);
  return static_cast<std::size_t>(it - roster.begin());
}

}  // namespace

std::vector<Scalar> derive_abscissas(const GroupParams& group, std::span<const Block32> roster) {
  for (std::uint64_t salt = 0; salt < kSaltBound; ++salt) {
    auto s = encode_u64(salt);
    std::vector<Scalar> xs;
    for (const auto& pid : roster)
      xs.push_back(hash_to_exponent(group, "abscissa", {ByteView(s), ByteView(pid)}));
    if (all_distinct(xs)) return xs;
  }
  throw ProtocolError(Errc::AbscissaCollision);
}

Block32 envelope_mask(const GroupParams& group, const GroupElem& dh, const GroupElem& sender_commit,
                      const GroupElem& recipient_commit) {
  Bytes a = encode_elem(group, dh), b = encode_elem(group, sender_commit),
        c = encode_elem(group, recipient_commit);
  return hash_to_block("dh", {ByteView(a), ByteView(b), ByteView(c)});
}

Block32 key_confirm_digest(const Block32& key, std::uint64_t t4) {
  auto t = encode_u64(t4);
  return hash_to_block("confirm", {ByteView(key), ByteView(t)});
}

DealerOutput ch_init_update(const GroupParams& group, const ChCredential& ch,
                            std::span<const Block32> roster, std::uint64_t t4, Rng& rng) {
  if (roster.empty()) throw ProtocolError(Errc::EmptyCluster);
  std::vector<Scalar> xs = derive_abscissas(group, roster);
  return deal_with_abscissas(group, ch, roster, xs, t4, rng);
}

DealerOutput deal_with_abscissas(const GroupParams& group, const ChCredential& ch,
                                 std::span<const Block32> roster,
                                 std::span<const Scalar> abscissas, std::uint64_t t4, Rng& rng) {
  if (roster.empty()) throw ProtocolError(Errc::EmptyCluster);
  if (abscissas.size() != roster.size())
    throw ProtocolError(Errc::Malformed, "one abscissa per member");
  std::vector<Scalar> xs(abscissas.begin(), abscissas.end());
  for (const auto& x : xs)
    if (reduce(group, x.value()).is_zero()) throw ProtocolError(Errc::ZeroAbscissa);
  if (!all_distinct(xs)) throw ProtocolError(Errc::AbscissaCollision);

  const std::size_t n = roster.size();
  DealerOutput out;
  out.abscissas = xs;
  out.key_new = rng.scalar(group);
  out.coeffs.push_back(out.key_new);
  for (std::size_t i = 1; i < n; ++i) out.coeffs.push_back(rng.scalar(group));

  std::vector<GroupElem> commits;
  for (std::size_t l = 0; l < n; ++l) {
    out.shares.push_back(poly_eval(group, out.coeffs, xs[l]));
    commits.push_back(exp_g(group, out.shares[l]));
  }
  Block32 confirm = key_confirm_digest(encode_scalar32(out.key_new), t4);
  for (std::size_t l = 0; l < n; ++l) {
    auto secret = ch.member_secrets.find(roster[l]);
    if (secret == ch.member_secrets.end()) throw ProtocolError(Errc::UnknownMember);
    KeyUpdateInit init;
    init.t4 = t4;
    init.f_masked = xor32(encode_scalar32(out.shares[l]), sk_mask(secret->second, t4));
    for (std::size_t m = 0; m < n; ++m)
      if (m != l) init.peer_commitments.emplace_back(static_cast<std::uint16_t>(m), commits[m]);
    init.confirm = confirm;
    out.inits.push_back(std::move(init));
  }
  return out;
}

ShareEnvelope cm_recover_and_share(const GroupParams& group, const CmCredential& cm,
                                   std::span<const Block32> roster, const KeyUpdateInit& init,
                                   std::uint64_t now, MemberShareState& state,
                                   const ProtocolOptions& opts) {
  require_fresh(init.t4, now, opts.freshness_ms);
  const std::size_t n = roster.size();
  state = MemberShareState{};
  state.index = roster_index(roster, cm.pid);
  state.t4 = init.t4;
  if (init.peer_commitments.size() != n - 1)
    throw ProtocolError(Errc::Malformed, "commitment count");
  for (std::size_t i = 0; i < init.peer_commitments.size(); ++i) {
    std::size_t expect = i < state.index ? i : i + 1;
    if (init.peer_commitments[i].first != expect)
      throw ProtocolError(Errc::Malformed, "commitment index");
  }

  Block32 raw = xor32(init.f_masked, sk_mask(cm.sk, init.t4));
  try {
    state.share = decode_scalar32(group, raw);
  } catch (const ProtocolError&) {
    throw ProtocolError(Errc::MalformedShare);
  }
  state.abscissas = derive_abscissas(group, roster);
  state.commitment = exp_g(group, state.share);
  state.dh.assign(n, GroupElem{});

  ShareEnvelope env;
  env.sender = static_cast<std::uint16_t>(state.index);
  Block32 enc_share = encode_scalar32(state.share);
  for (const auto& [m, commit] : init.peer_commitments) {
    state.dh[m] = mod_exp(group, commit, state.share);
    Block32 mask = envelope_mask(group, state.dh[m], state.commitment, commit);
    env.u.emplace_back(m, xor32(mask, enc_share));
  }
  return env;
}

Block32 cm_reconstruct(const GroupParams& group, const MemberShareState& state,
                       std::span<const ShareEnvelope> envelopes, const KeyUpdateInit& init) {
  const std::size_t n = state.abscissas.size();
  std::vector<SharePoint> points;
  points.push_back({state.abscissas[state.index], state.share});

  for (const auto& [m, commit] : init.peer_commitments) {
    const ShareEnvelope* env = nullptr;
    for (const auto& e : envelopes) {
      if (e.sender != m) continue;
      if (env) throw ProtocolError(Errc::Malformed, "duplicate envelope");
      env = &e;
    }
    if (!env) throw ProtocolError(Errc::MissingEnvelope);
    const Block32* u = nullptr;
    for (const auto& [to, value] : env->u)
      if (to == state.index) u = &value;
    if (!u) throw ProtocolError(Errc::MissingEnvelope);

    Block32 mask = envelope_mask(group, state.dh.at(m), commit, state.commitment);
    Scalar share;
    try {
      share = decode_scalar32(group, xor32(*u, mask));
    } catch (const ProtocolError&) {
      throw ProtocolError(Errc::MalformedShare);
    }
    points.push_back({state.abscissas.at(m), share});
  }
  if (points.size() != n) throw ProtocolError(Errc::MissingEnvelope);

  Block32 key = encode_scalar32(lagrange_at_zero(group, points));
  if (key_confirm_digest(key, state.t4) != init.confirm) throw ProtocolError(Errc::ConfirmMismatch);
  return key;
}

std::vector<std::uint64_t> constant_posterior(const GroupParams& group, std::size_t degree,
                                              std::span<const SharePoint> known) {
  const unsigned long q = group.q.get_ui();
  std::vector<std::uint64_t> counts(q, 0);
  std::vector<unsigned long> c(degree + 1, 0);
  for (;;) {
    bool ok = true;
    for (const auto& pt : known) {
      unsigned long x = pt.x.to_ulong() % q, acc = 0;
      for (std::size_t i = c.size(); i-- > 0;) acc = (acc * x + c[i]) % q;
      if (acc != pt.y.to_ulong() % q) {
        ok = false;
        break;
      }
    }
    if (ok) ++counts[c[0]];
    std::size_t i = 0;
    while (i < c.size() && ++c[i] == q) c[i++] = 0;
    if (i == c.size()) break;
  }
  return counts;
}

}  // namespace clusterauth
