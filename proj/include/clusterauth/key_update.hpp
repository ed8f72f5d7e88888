#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clusterauth/join.hpp"

namespace clusterauth {

/// x_l = H(salt, PID_l) mapped into [1, q). The salt is the smallest counter
/// that makes all abscissas distinct; the dealer and every member derive it
/// from the same roster, so it never travels. Throws AbscissaCollision if no
/// salt below the retry bound works.
std::vector<Scalar> derive_abscissas(const GroupParams& group, std::span<const Block32> roster);

struct DealerOutput {
  Scalar key_new;
  std::vector<Scalar> coeffs;
  std::vector<Scalar> abscissas;
  /// f(x_l) per member; kept for tests and the simulator's bookkeeping.
  std::vector<Scalar> shares;
  /// One per member, roster order.
  std::vector<KeyUpdateInit> inits;
};

DealerOutput ch_init_update(const GroupParams& group, const ChCredential& ch,
                            std::span<const Block32> roster, std::uint64_t t4, Rng& rng);

/// Same as ch_init_update with caller-chosen abscissas; duplicates raise
/// AbscissaCollision and zero raises ZeroAbscissa.
DealerOutput deal_with_abscissas(const GroupParams& group, const ChCredential& ch,
                                 std::span<const Block32> roster,
                                 std::span<const Scalar> abscissas, std::uint64_t t4, Rng& rng);

/// What a member keeps between sending its envelope and reconstructing.
struct MemberShareState {
  std::size_t index = 0;
  Scalar share;
  GroupElem commitment;
  std::vector<Scalar> abscissas;
  /// DH value shared with each other member, g^{f(x_l) f(x_n)}.
  std::vector<GroupElem> dh;
  std::uint64_t t4 = 0;
};

ShareEnvelope cm_recover_and_share(const GroupParams& group, const CmCredential& cm,
                                   std::span<const Block32> roster, const KeyUpdateInit& init,
                                   std::uint64_t now, MemberShareState& state,
                                   const ProtocolOptions& opts = {});

/// Opens the other members' envelopes, interpolates at zero and checks the
/// dealer's confirmation digest. Returns key_new in its 32-byte form.
Block32 cm_reconstruct(const GroupParams& group, const MemberShareState& state,
                       std::span<const ShareEnvelope> envelopes, const KeyUpdateInit& init);

/// Masking key for the envelope from `sender` to `recipient`.
Block32 envelope_mask(const GroupParams& group, const GroupElem& dh, const GroupElem& sender_commit,
                      const GroupElem& recipient_commit);

Block32 key_confirm_digest(const Block32& key, std::uint64_t t4);

/// Exhaustive count, for every candidate constant term c in [0, q), of the
/// polynomials of the given degree with f(0) = c passing through `known`.
/// Only practical for small q and degree.
std::vector<std::uint64_t> constant_posterior(const GroupParams& group, std::size_t degree,
                                              std::span<const SharePoint> known);

}  // namespace clusterauth
