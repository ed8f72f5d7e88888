#include "clusterauth/overhead.hpp"

#include <sstream>

#include "clusterauth/errors.hpp"
#include "clusterauth/messages.hpp"

namespace clusterauth {

Stage parse_stage(std::string_view name) {
  if (name == "init") return Stage::Init;
  if (name == "uav_auth") return Stage::UavAuth;
  if (name == "key_update") return Stage::KeyUpdate;
  throw ProtocolError(Errc::UnknownStage, std::string(name));
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Init: return "init";
    case Stage::UavAuth: return "uav_auth";
    case Stage::KeyUpdate: return "key_update";
  }
  return "?";
}

OpCounts predict_comp(Stage stage, std::uint64_t n_nuav, std::uint64_t n) {
  OpCounts c;
  switch (stage) {
    case Stage::Init:
      c.t_hf = 3;
      c.t_me = 2;
      c.t_mm = 1;
      break;
    case Stage::UavAuth:
      c.t_hf = n + 18;
      c.t_me = 8;
      c.t_mm = n_nuav + 2 * n + 3;
      c.t_xor = n + 10;
      break;
    case Stage::KeyUpdate:
      c.t_hf = n + 2;
      c.t_me = n ? 3 * n - 1 : 0;
      c.t_mm = n ? n * n - 1 : 0;
      c.t_xor = 2 * n + 10;
      c.t_sss = n;
      break;
  }
  return c;
}

CommBits predict_comm(Stage stage, std::uint64_t, std::uint64_t n_cm, std::uint64_t n_ch,
                      FieldSizes sizes) {
  CommBits b;
  switch (stage) {
    case Stage::Init:
      b.zp_elems = 10;
      break;
    case Stage::UavAuth:
      b.zp_elems = 6 * n_cm + 4 * n_ch + 18;
      b.timestamps = 6 * n_cm + n_ch + 4;
      break;
    case Stage::KeyUpdate:
      b.zp_elems = n_cm ? n_cm * n_cm + 5 * n_cm - 1 : 0;
      b.timestamps = n_cm;
      break;
  }
  b.total_bits = b.zp_elems * sizes.z_bits + b.timestamps * sizes.t_bits;
  return b;
}

P2Bits predict_p2(std::uint64_t n_nuav, std::uint64_t n_cm, FieldSizes sizes) {
  P2Bits p;
  p.mam_bits = 20 * sizes.z_bits + 4 * sizes.t_bits;
  p.baseline_bits =
      (7 * n_nuav + 3 * n_cm + 8) * sizes.z_bits + (2 * n_nuav + n_cm + 1) * sizes.t_bits;
  p.degenerate = n_nuav == 0;
  return p;
}

OpCounts predict_transfer() {
  OpCounts c;
  c.t_hf = 3;
  c.t_xor = 2;
  return c;
}

OpCounts predict_p1_nuav(std::uint64_t n) {
  OpCounts c;
  c.t_hf = n + 15;
  c.t_me = 8;
  c.t_mm = 2 * n + 3;
  c.t_xor = n + 8;
  return c;
}

std::uint64_t derived_join_bytes(std::size_t e, const JoinShape& s) {
  if (s.n_nuav == 0) return 0;
  WireSizes w{e};
  const std::uint64_t p = s.n_ch ? s.n_ch - 1 : 0;
  const std::uint64_t peer_round = w.peer_broadcast() + w.peer_ack(s.paper_literal);
  if (s.mam) {
    return s.n_nuav * (w.join_request() + w.nuav_confirm()) +
           s.n_cm * (w.aggregate_challenge() + w.cm_response()) + p * peer_round;
  }
  return s.n_nuav * (w.join_request() + w.nuav_confirm() +
                     s.n_cm * (w.aggregate_challenge() + w.cm_response()) +
                     s.n_cm * p * peer_round);
}

std::uint64_t derived_key_update_bytes(std::size_t e, std::uint64_t n) {
  if (n == 0) return 0;
  WireSizes w{e};
  return n * (w.key_update_init(n) + w.share_envelope(n));
}

std::uint64_t derived_transfer_bytes() { return WireSizes{0}.transfer_request(); }

OpCounts derived_join_ops(const JoinShape& s) {
  OpCounts c;
  const std::uint64_t N = s.n_nuav, n = s.n_cm, p = s.n_ch ? s.n_ch - 1 : 0;
  if (N == 0) return c;
  if (s.mam) {
    c.t_hf = 4 * N + 8 * n + 8 + (s.paper_literal ? 2 * p + (p > 0 ? 1 : 0) : 4 * p);
    c.t_me = 4 * N + 2 * n + p + 3;
    c.t_mm = 3 * N + 2 * n + p - 3;
    c.t_xor = 5 * n + 2 * p + 3;
    return c;
  }
  const std::uint64_t ack_hashes = s.paper_literal ? n * (2 * p + (p > 0 ? 1 : 0)) : 4 * n * p;
  c.t_hf = N * (9 * n + 11 + ack_hashes);
  c.t_me = N * (3 * n + n * p + 6);
  c.t_mm = N * (n + n * p + 1);
  c.t_xor = N * (7 * n + 2 * n * p + 1);
  return c;
}

OpCounts derived_key_update_ops(std::uint64_t n) {
  OpCounts c;
  if (n == 0) return c;
  c.t_hf = 3 * n * n + 2 * n + 1;
  c.t_me = n * n + n;
  c.t_xor = 2 * n * n;
  c.t_sss = n;
  return c;
}

OpCounts derived_init_ops(std::uint64_t n_gbs, std::uint64_t n_ch, std::uint64_t n_cm,
                          std::uint64_t n_nuav) {
  OpCounts c;
  c.t_me = n_gbs + n_ch + n_cm + n_nuav;
  c.t_hf = 2 * n_ch + n_cm + 2 * n_nuav;
  return c;
}

void append_op_deltas(std::vector<DeltaRow>& rows, std::string_view stage,
                      const OpCounts& published, const OpCounts& measured) {
  auto add = [&](const char* term, std::uint64_t a, std::uint64_t b) {
    rows.push_back({std::string(stage), term, static_cast<std::int64_t>(a),
                    static_cast<std::int64_t>(b)});
  };
  add("t_hf", published.t_hf, measured.t_hf);
  add("t_me", published.t_me, measured.t_me);
  add("t_mm", published.t_mm, measured.t_mm);
  add("t_xor", published.t_xor, measured.t_xor);
  add("t_sss", published.t_sss, measured.t_sss);
}

std::string delta_csv(const std::vector<DeltaRow>& rows) {
  std::ostringstream os;
  os << "stage,term,paper_value,measured_value,delta\n";
  for (const auto& r : rows)
    os << r.stage << ',' << r.term << ',' << r.paper_value << ',' << r.measured_value << ','
       << r.delta() << '\n';
  return os.str();
}

}  // namespace clusterauth
