#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clusterauth/counters.hpp"

namespace clusterauth {

enum class Stage { Init, UavAuth, KeyUpdate };

/// "init", "uav_auth" or "key_update"; anything else is UnknownStage.
Stage parse_stage(std::string_view name);
std::string_view stage_name(Stage stage);

struct FieldSizes {
  std::uint64_t z_bits = 256;
  std::uint64_t t_bits = 32;
};

struct CommBits {
  std::uint64_t zp_elems = 0;
  std::uint64_t timestamps = 0;
  std::uint64_t total_bits = 0;
};

// ---- the published cost polynomials ------------------------------------

OpCounts predict_comp(Stage stage, std::uint64_t n_nuav, std::uint64_t n_cm);
CommBits predict_comm(Stage stage, std::uint64_t n_nuav, std::uint64_t n_cm, std::uint64_t n_ch,
                      FieldSizes sizes = {});

struct P2Bits {
  std::uint64_t mam_bits = 0;
  std::uint64_t baseline_bits = 0;
  /// No joins happen with n_nuav = 0; the numbers are still reported.
  bool degenerate = false;
};
P2Bits predict_p2(std::uint64_t n_nuav, std::uint64_t n_cm, FieldSizes sizes = {});

/// Transfer cost, 3 hashes and 2 XORs.
OpCounts predict_transfer();
/// The NUAV-authentication variant of the first performance goal.
OpCounts predict_p1_nuav(std::uint64_t n_cm);

// ---- closed forms of this implementation's message inventory --------------

struct JoinShape {
  std::uint64_t n_nuav = 0;
  std::uint64_t n_cm = 0;
  std::uint64_t n_ch = 1;
  bool mam = true;
  bool paper_literal = false;
};

/// Bytes on air for one join of the given shape with element width e.
std::uint64_t derived_join_bytes(std::size_t e, const JoinShape& shape);
/// All protocol frames of one rekey with n members.
std::uint64_t derived_key_update_bytes(std::size_t e, std::uint64_t n);
std::uint64_t derived_transfer_bytes();

/// Primitive counts summed over every party of one join.
OpCounts derived_join_ops(const JoinShape& shape);
/// Primitive counts summed over dealer and members of one rekey.
OpCounts derived_key_update_ops(std::uint64_t n);
/// Setup plus registration of the given population.
OpCounts derived_init_ops(std::uint64_t n_gbs, std::uint64_t n_ch, std::uint64_t n_cm,
                          std::uint64_t n_nuav);

// ---- delta report --------------------------------------------------------

struct DeltaRow {
  std::string stage;
  std::string term;
  std::int64_t paper_value = 0;
  std::int64_t measured_value = 0;
  std::int64_t delta() const { return measured_value - paper_value; }
};

/// One row per counter (t_hf ... t_sss).
void append_op_deltas(std::vector<DeltaRow>& rows, std::string_view stage,
                      const OpCounts& published, const OpCounts& measured);
/// Header "stage,term,paper_value,measured_value,delta".
std::string delta_csv(const std::vector<DeltaRow>& rows);

}  // namespace clusterauth
