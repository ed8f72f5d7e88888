#pragma once

#include <cstdint>

#include "clusterauth/join.hpp"

namespace clusterauth {

/// C = H(PID, T3, CT) xor CT. The member must belong to the source cluster.
TransferRequest source_ch_build_transfer(const ChCredential& ch, const Block32& euav_pid,
                                         std::uint64_t t3);

/// Checks freshness, the token equation and the GBS database, then issues
/// the new pseudonym and records it. In hardened mode the new PID is derived
/// under its own domain tag; in paper-literal mode it is the check value
/// itself, which lets an observer recover CT from C xor PID_new.
Block32 dest_ch_verify_transfer(const ChCredential& ch, Registry& registry,
                                const TransferRequest& req, std::uint64_t now,
                                const ProtocolOptions& opts = {});

/// Pure derivation of the pseudonym both ends agree on.
Block32 transfer_new_pid(const Block32& ct, const Block32& euav_pid, std::uint64_t t3,
                         bool paper_literal);

}  // namespace clusterauth
