// Runs the nine acceptance criteria end to end and prints one PASS/FAIL line
// for each. Optional first argument: path to the clusterauth CLI, used by the
// determinism check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clusterauth/adversary.hpp"
#include "clusterauth/cross_cluster.hpp"
#include "clusterauth/errors.hpp"
#include "clusterauth/key_update.hpp"
#include "clusterauth/overhead.hpp"
#include "clusterauth/sim.hpp"
#include "swarm_fixture.hpp"

using namespace clusterauth;
using clusterauth::testing::Swarm;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Collects failure notes; keeps the first few for the report line.
struct Tally {
  std::size_t checks = 0, failures = 0;
  std::vector<std::string> notes;
  void check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    if (notes.size() < 5) notes.push_back(what);
  }
  Verdict verdict(const std::string& summary) const {
    std::ostringstream os;
    os << summary << ", " << checks << " checks, " << failures << " failures";
    for (const auto& n : notes) os << "; " << n;
    return {failures == 0, os.str()};
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

ScenarioConfig shape(const std::string& group, std::uint64_t k, std::uint64_t n, std::uint64_t c,
                     bool mam = true) {
  ScenarioConfig cfg;
  cfg.group = group;
  cfg.n_nuav = k;
  cfg.n_cm = n;
  cfg.n_ch = c;
  cfg.mam = mam;
  return cfg;
}

std::string tag(const ScenarioConfig& c) {
  return c.group + "(" + std::to_string(c.n_nuav) + "," + std::to_string(c.n_cm) + "," +
         std::to_string(c.n_ch) + (c.mam ? ",mam)" : ",base)");
}

// ---- 1 ---------------------------------------------------------------------

Verdict honest_completeness() {
  auto t0 = std::chrono::steady_clock::now();
  Tally t;
  auto run = [&](const ScenarioConfig& cfg) {
    SimOutcome out = simulate(cfg);
    bool ok = out.accepted && out.metrics.key_update_done &&
              out.metrics.transfer_done == (cfg.n_ch > 1);
    t.check(ok, tag(cfg) + " " + std::string(stage_label(out.stage)) + " " + out.detail);
  };
  for (std::uint64_t k = 1; k <= 7; ++k)
    for (std::uint64_t n = 1; n <= 7; ++n)
      for (std::uint64_t c = 1; c <= 7; ++c) run(shape("tiny", k, n, c));
  const std::uint64_t sample[] = {1, 2, 4, 6, 7};
  for (auto k : sample)
    for (auto n : sample)
      for (auto c : sample) run(shape("full", k, n, c));
  double secs = seconds_since(t0);
  t.check(secs < 60.0, "runtime " + fmt(secs, 1) + " s");
  return t.verdict("343 tiny + 125 full runs in " + fmt(secs, 1) + " s");
}

// ---- 2 ---------------------------------------------------------------------

Verdict algebraic_identities() {
  Tally t;
  for (const GroupParams& g : {tiny_group(), full_group()}) {
    Rng rng(derive_seed(2, g.elem_bytes()));
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t k = 1 + trial % 3, n = 1 + (trial / 3) % 4;
      Swarm s(g, k, n, 2, derive_seed(trial, g.elem_bytes()));
      const std::string at = g.name + " trial " + std::to_string(trial);

      t.check(join_base(g, s.reg.gbs(0).pk, hash_cjt(s.ch().cjt), s.ch().pk) ==
                  exp_g(g, s.ch().sk),
              at + " D != g^sk");

      // Request balance: (prod sig)^{1/sk_CH} = prod V^w, and every member's
      // check accepts the honest batch.
      auto reqs = s.requests();
      GroupElem sig_prod(1ul), weighted(1ul);
      for (const auto& r : reqs) {
        sig_prod = mul(g, sig_prod, r.sig);
        weighted = mul(g, weighted, mod_exp(g, r.v, join_weight(g, r.nuav_pid, r.ch_pid, r.nuav_pk)));
      }
      t.check(mod_exp(g, sig_prod, scalar_inv(g, s.ch().sk)) == weighted, at + " request balance");
      auto agg = s.aggregate(reqs, 500);
      std::vector<CmResponse> resp;
      try {
        resp = s.respond(agg, 500);
      } catch (const ProtocolError& e) {
        t.check(false, at + " member rejected honest batch: " + e.what());
        continue;
      }

      PeerBroadcast bc = ch_collect_and_verify(g, s.ch(), agg.batch, resp, 501, 501);
      Scalar h = hash_to_exponent(g, "hres", {ByteView(agg.batch.result)});
      Scalar nn(static_cast<unsigned long>(n * n));
      t.check(exp_g(g, scalar_mul(g, nn, h)) == mul(g, bc.sig_cms, bc.pk_cms),
              at + " aggregate check");

      Scalar a = rng.nonzero_scalar(g), b = rng.nonzero_scalar(g);
      t.check(mod_exp(g, exp_g(g, a), b) == mod_exp(g, exp_g(g, b), a), at + " DH symmetry");

      const std::size_t deg = trial % (g.name == "tiny" ? 10 : 7);
      std::vector<Scalar> f;
      for (std::size_t i = 0; i <= deg; ++i) f.push_back(rng.scalar(g));
      std::set<Scalar> xs;
      while (xs.size() < deg + 1) xs.insert(rng.nonzero_scalar(g));
      std::vector<SharePoint> pts;
      for (const auto& x : xs) pts.push_back({x, poly_eval(g, f, x)});
      t.check(lagrange_at_zero(g, pts) == f[0], at + " Lagrange");
    }

    // Mask bases seen from both ends of every pair in real rekeys.
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + trial % 4;
      Registry reg(g, 1, derive_seed(trial, 77));
      ClusterId id = reg.register_ch(0, "ch").cluster;
      for (std::size_t l = 0; l < n; ++l) reg.register_cm(0, id, std::to_string(l));
      const auto& rec = reg.cluster(id);
      std::vector<Block32> roster;
      for (const auto& m : rec.members) roster.push_back(m.pid);
      DealerOutput d = ch_init_update(g, rec.ch, roster, 10, rng);
      std::vector<MemberShareState> st(n);
      for (std::size_t l = 0; l < n; ++l)
        cm_recover_and_share(g, rec.members[l], roster, d.inits[l], 10, st[l]);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          t.check(st[a].dh[b] == st[b].dh[a], g.name + " rekey DH mask");
    }
  }
  return t.verdict("1000 trials x 5 identities, tiny and full");
}

// ---- 3 ---------------------------------------------------------------------

// Latest stage whose check covers the flipped byte. The NUAV's PID and key
// reach the members' check only through a weight reduced mod q; in the toy
// group one flip in eleven keeps the weight, and the GBS provisioning record
// at finalisation is the verifier that still covers them. A member answers a
// corrupted share, total or tag with the fallback result and echoes any T1
// inside the window, so the head's result comparison covers the challenge.
SimStage covering_stage(MessageKind kind, std::size_t byte, std::size_t elem_bytes) {
  switch (kind) {
    case MessageKind::JoinRequest:
      return byte >= 1 && byte < 1 + 32 + elem_bytes ? SimStage::Finalize : SimStage::CmVerify;
    case MessageKind::AggregateChallenge:
    case MessageKind::CmResponse: return SimStage::ChCollect;
    case MessageKind::PeerBroadcast: return SimStage::PeerVerify;
    case MessageKind::PeerAck:
    case MessageKind::PeerAckLiteral: return SimStage::Finalize;
    case MessageKind::NuavConfirm: return SimStage::NuavVerify;
    case MessageKind::TransferRequest: return SimStage::Transfer;
    default: return SimStage::KeyUpdate;
  }
}

Verdict tamper_soundness() {
  auto t0 = std::chrono::steady_clock::now();
  Tally t;
  std::size_t flips = 0;
  std::map<std::string, std::size_t> by_kind;
  for (bool mam : {true, false}) {
    ScenarioConfig cfg = shape("tiny", 2, 3, 3, mam);
    struct Frame {
      MessageKind kind;
      std::size_t index, size;
    };
    std::vector<Frame> frames;
    SimHooks record;
    record.tamper = [&](MessageKind k, std::size_t i, Bytes& b) { frames.push_back({k, i, b.size()}); };
    SimOutcome honest = simulate(cfg, record);
    t.check(honest.accepted, tag(cfg) + " honest run rejected");

    for (const Frame& f : frames) {
      for (std::size_t bit = 0; bit < f.size * 8; ++bit) {
        SimHooks hooks;
        hooks.tamper = [&](MessageKind k, std::size_t i, Bytes& b) {
          if (k == f.kind && i == f.index) b[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        };
        SimOutcome out = simulate(cfg, hooks);
        ++flips;
        ++by_kind[std::string(kind_name(f.kind))];
        const std::string what = tag(cfg) + " " + std::string(kind_name(f.kind)) + "#" +
                                 std::to_string(f.index) + " bit " + std::to_string(bit);
        t.check(!out.accepted, what + " accepted");
        if (!out.accepted)
          t.check(out.stage <= covering_stage(f.kind, bit / 8, tiny_group().elem_bytes()),
                  what + " caught late at " + std::string(stage_label(out.stage)));
      }
    }
  }
  double secs = seconds_since(t0);
  t.check(secs < 120.0, "runtime " + fmt(secs, 1) + " s");
  std::ostringstream os;
  os << flips << " single-bit flips over " << by_kind.size() << " message types in " << fmt(secs, 1)
     << " s";
  return t.verdict(os.str());
}

// ---- 4 ---------------------------------------------------------------------

bool uniform(const std::vector<std::uint64_t>& post) {
  return post.size() == 11 && post[0] > 0 &&
         std::all_of(post.begin(), post.end(), [&](auto v) { return v == post[0]; });
}

// Shares of the dealt polynomial an outsider actually learns from a rekey
// transcript using its own secrets: it opens every init with its own key and
// every envelope with its own share as the DH exponent. A decoded value only
// counts if it is the member's real share.
std::size_t shares_unmasked(const GroupParams& g, const CmCredential& outsider,
                            const Scalar& own_share, std::span<const Block32> roster,
                            const DealerOutput& deal, std::span<const ShareEnvelope> envelopes) {
  std::set<std::size_t> got;
  for (std::size_t l = 0; l < roster.size(); ++l) {
    CmCredential pose = outsider;
    pose.pid = roster[l];
    MemberShareState st;
    try {
      cm_recover_and_share(g, pose, roster, deal.inits[l], deal.inits[l].t4, st);
      if (st.share == deal.shares[l]) got.insert(l);
    } catch (const ProtocolError&) {
    }
  }
  // Member commitments travel in the inits.
  std::map<std::size_t, GroupElem> commits;
  for (const auto& init : deal.inits)
    for (const auto& [m, c] : init.peer_commitments) commits.emplace(m, c);
  GroupElem own_commit = exp_g(g, own_share);
  for (const auto& env : envelopes) {
    const GroupElem& sender_commit = commits.at(env.sender);
    GroupElem dh = mod_exp(g, sender_commit, own_share);
    for (const auto& entry : env.u) {
      Block32 raw = xor32(entry.second, envelope_mask(g, dh, sender_commit, own_commit));
      if (raw == encode_scalar32(deal.shares[env.sender])) got.insert(env.sender);
    }
  }
  return got.size();
}

struct RekeyRun {
  std::vector<Block32> roster;
  DealerOutput deal;
  std::vector<ShareEnvelope> envelopes;
  std::vector<MemberShareState> states;
};

RekeyRun rekey(Registry& reg, ClusterId id, std::uint64_t t4, Rng& rng) {
  const auto& g = reg.group();
  const auto& rec = reg.cluster(id);
  RekeyRun r;
  for (const auto& m : rec.members) r.roster.push_back(m.pid);
  r.deal = ch_init_update(g, rec.ch, r.roster, t4, rng);
  r.states.resize(r.roster.size());
  for (std::size_t l = 0; l < r.roster.size(); ++l)
    r.envelopes.push_back(
        cm_recover_and_share(g, rec.members[l], r.roster, r.deal.inits[l], t4, r.states[l]));
  Block32 key = encode_scalar32(r.deal.key_new);
  for (std::size_t l = 0; l < r.roster.size(); ++l)
    if (cm_reconstruct(g, r.states[l], r.envelopes, r.deal.inits[l]) != key)
      throw ProtocolError(Errc::ConfirmMismatch);
  reg.install_key(id, key);
  return r;
}

Verdict secrecy_brute_force() {
  const GroupParams g = tiny_group();
  Tally t;
  std::size_t enumerations = 0;

  // (a) every (N-1)-subset of real shares
  for (std::size_t n = 2; n <= 6; ++n)
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      Registry reg(g, 1, derive_seed(seed, n));
      ClusterId id = reg.register_ch(0, "ch").cluster;
      for (std::size_t l = 0; l < n; ++l) reg.register_cm(0, id, std::to_string(l));
      Rng rng(seed);
      RekeyRun r = rekey(reg, id, 10, rng);
      for (std::size_t drop = 0; drop < n; ++drop) {
        std::vector<SharePoint> known;
        for (std::size_t l = 0; l < n; ++l)
          if (l != drop) known.push_back({r.deal.abscissas[l], r.deal.shares[l]});
        ++enumerations;
        t.check(uniform(constant_posterior(g, n - 1, known)),
                "n=" + std::to_string(n) + " drop " + std::to_string(drop));
      }
    }

  // (b) a member leaves between two rekeys and another one joins. In Z_11
  // each view is what the party holds: its own share point of the other run,
  // counted only if it happens to lie on that run's polynomial. The toy group
  // cannot protect the hash and DH masks (only ten secret keys exist), so
  // attacks on the transcript itself are run in the full group, where they
  // must recover nothing.
  std::size_t transcript_attempts = 0;
  for (const GroupParams& grp : {tiny_group(), full_group()}) {
    const bool toy = grp.name == "tiny";
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const std::size_t n = 3 + seed % 3;
      Registry reg(grp, 1, derive_seed(seed, 100));
      ClusterId id = reg.register_ch(0, "ch").cluster;
      for (std::size_t l = 0; l < n; ++l) reg.register_cm(0, id, "m" + std::to_string(l));
      Rng rng(seed + 100);
      RekeyRun before = rekey(reg, id, 10, rng);

      CmCredential departed = reg.cluster(id).members.back();
      SharePoint old_point{before.deal.abscissas.back(), before.states.back().share};
      ClusterId elsewhere = reg.register_ch(0, "other").cluster;
      reg.supersede(0, departed.pid, Rng(seed).block(), elsewhere);
      CmCredential joined = reg.register_cm(0, id, "late");
      RekeyRun after = rekey(reg, id, 20, rng);
      SharePoint new_point{after.deal.abscissas.back(), after.states.back().share};
      const std::string at = grp.name + " seed " + std::to_string(seed);

      if (toy) {
        auto on = [&](const RekeyRun& r, const SharePoint& p) {
          std::vector<SharePoint> v;
          if (poly_eval(grp, r.deal.coeffs, p.x) == p.y) v.push_back(p);
          return v;
        };
        enumerations += 2;
        t.check(uniform(constant_posterior(grp, after.roster.size() - 1, on(after, old_point))),
                "departed view " + at);
        t.check(uniform(constant_posterior(grp, before.roster.size() - 1, on(before, new_point))),
                "newcomer view " + at);
        continue;
      }
      std::size_t got =
          shares_unmasked(grp, departed, old_point.y, after.roster, after.deal, after.envelopes);
      t.check(got == 0, "departed member unmasked " + std::to_string(got) + " shares, " + at);
      got = shares_unmasked(grp, joined, new_point.y, before.roster, before.deal, before.envelopes);
      t.check(got == 0, "newcomer unmasked " + std::to_string(got) + " shares, " + at);
      transcript_attempts += 2;
    }
  }
  return t.verdict(std::to_string(enumerations) + " exhaustive posteriors over Z_11, " +
                   std::to_string(transcript_attempts) + " full-group transcript attacks");
}

// ---- 5 ---------------------------------------------------------------------

Verdict overhead_consistency(const std::filesystem::path& report) {
  Tally t;
  std::size_t runs = 0;
  for (bool mam : {true, false})
    for (std::uint64_t k = 1; k <= 5; ++k)
      for (std::uint64_t n = 1; n <= 5; ++n)
        for (std::uint64_t c = 1; c <= 4; ++c) {
          ScenarioConfig cfg = shape("tiny", k, n, c, mam);
          Metrics m = run_scenario(cfg);
          ++runs;
          const std::string at = tag(cfg);
          t.check(m.bytes_join == derived_join_bytes(1, {k, n, c, mam, false}), at + " join bytes");
          t.check(m.ops_join == derived_join_ops({k, n, c, mam, false}), at + " join ops");
          t.check(m.bytes_keyupdate == derived_key_update_bytes(1, m.keyupdate_members),
                  at + " rekey bytes");
          if (c > 1) {
            t.check(m.bytes_transfer == derived_transfer_bytes(), at + " transfer bytes");
            t.check(m.ops_transfer == OpCounts{3, 0, 0, 2, 0}, at + " transfer ops");
          }
        }

  std::vector<DeltaRow> rows;
  for (bool mam : {true, false}) {
    ScenarioConfig cfg = shape("full", 7, 5, 5, mam);
    Metrics m = run_scenario(cfg);
    ++runs;
    const std::string at = tag(cfg);
    t.check(m.bytes_join == derived_join_bytes(256, {7, 5, 5, mam, false}), at + " join bytes");
    t.check(m.ops_join == derived_join_ops({7, 5, 5, mam, false}), at + " join ops");
    t.check(m.bytes_keyupdate == derived_key_update_bytes(256, m.keyupdate_members),
            at + " rekey bytes");
    t.check(m.ops_keyupdate == derived_key_update_ops(m.keyupdate_members), at + " rekey ops");
    t.check(m.bytes_transfer == derived_transfer_bytes(), at + " transfer bytes");
    t.check(m.ops_transfer == OpCounts{3, 0, 0, 2, 0}, at + " transfer ops");
    if (!mam) continue;
    append_op_deltas(rows, "uav_auth", predict_comp(Stage::UavAuth, 7, 5), m.ops_join);
    append_op_deltas(rows, "key_update", predict_comp(Stage::KeyUpdate, 7, m.keyupdate_members),
                     m.ops_keyupdate);
    append_op_deltas(rows, "transfer", predict_transfer(), m.ops_transfer);
    rows.push_back({"uav_auth", "bits",
                    static_cast<std::int64_t>(predict_comm(Stage::UavAuth, 7, 5, 5).total_bits),
                    static_cast<std::int64_t>(m.bytes_join * 8)});
    rows.push_back({"key_update", "bits",
                    static_cast<std::int64_t>(
                        predict_comm(Stage::KeyUpdate, 7, m.keyupdate_members, 5).total_bits),
                    static_cast<std::int64_t>(m.bytes_keyupdate * 8)});
  }
  std::ofstream(report) << delta_csv(rows);
  return t.verdict(std::to_string(runs) + " runs; published-formula deltas in " + report.string());
}

// ---- 6, 7 ------------------------------------------------------------------

struct SweepSet {
  std::map<SweepParam, std::vector<SweepRow>> rows;
  double seconds = 0;
};

SweepSet run_sweeps() {
  auto t0 = std::chrono::steady_clock::now();
  SweepSet s;
  ScenarioConfig base = shape("full", 5, 5, 5);
  base.run_key_update = false;
  for (SweepParam p : {SweepParam::NNuav, SweepParam::NCm, SweepParam::NCh})
    s.rows[p] = sweep(p, {3, 4, 5, 6, 7}, base, {true, false});
  s.rows[SweepParam::Bitrate] = sweep(SweepParam::Bitrate, {1, 11, 24, 48, 54}, base, {true, false});
  s.seconds = seconds_since(t0);
  return s;
}

Verdict latency_trends(const SweepSet& s) {
  Tally t;
  double lo = 1.0, hi = 0.0;
  for (const auto& [p, rows] : s.rows) {
    const std::string name(sweep_param_name(p));
    const double floor = p == SweepParam::Bitrate ? 0.85 : 0.80;
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
      const Metrics& on = rows[i].metrics;
      const Metrics& off = rows[i + 1].metrics;
      double red = 1.0 - on.join_latency_ms / off.join_latency_ms;
      lo = std::min(lo, red);
      hi = std::max(hi, red);
      t.check(red >= floor, rows[i].scenario_id + " reduction " + fmt(red));
      if (p == SweepParam::Bitrate || i == 0) continue;
      const Metrics& on_prev = rows[i - 2].metrics;
      const Metrics& off_prev = rows[i - 1].metrics;
      t.check(off.join_latency_ms > off_prev.join_latency_ms,
              name + " baseline not increasing at " + rows[i + 1].scenario_id);
      t.check(std::abs(on.join_latency_ms - on_prev.join_latency_ms) <= 2.0,
              name + " aggregated slope at " + rows[i].scenario_id);
    }
  }
  t.check(s.seconds < 120.0, "runtime " + fmt(s.seconds, 1) + " s");
  return t.verdict("reduction " + fmt(lo * 100, 1) + "-" + fmt(hi * 100, 1) + "% over 20 points, " +
                   fmt(s.seconds, 1) + " s");
}

Verdict energy_trends(const SweepSet& s) {
  Tally t;
  ScenarioConfig on_cfg = shape("full", 7, 5, 5, true), off_cfg = shape("full", 7, 5, 5, false);
  on_cfg.run_key_update = off_cfg.run_key_update = false;
  Metrics on = run_scenario(on_cfg), off = run_scenario(off_cfg);
  double ch = 1.0 - on.e_ch_j / off.e_ch_j;
  double cm = 1.0 - on.e_cm_j / off.e_cm_j;
  t.check(ch >= 0.55 && ch <= 0.85, "CH reduction " + fmt(ch));
  t.check(cm >= 0.45 && cm <= 0.75, "CM reduction " + fmt(cm));

  double lo = 1e9, hi = 0;
  for (const auto& [p, rows] : s.rows) {
    if (p == SweepParam::Bitrate) continue;
    for (const auto& r : rows) {
      lo = std::min(lo, r.metrics.e_nuav_j);
      hi = std::max(hi, r.metrics.e_nuav_j);
    }
  }
  double spread = (hi - lo) / lo;
  t.check(spread <= 0.10, "NUAV energy spread " + fmt(spread));
  return t.verdict("CH -" + fmt(ch * 100, 1) + "%, CM -" + fmt(cm * 100, 1) + "%, NUAV " +
                   fmt(lo * 1e3, 3) + "-" + fmt(hi * 1e3, 3) + " mJ");
}

// ---- 8 ---------------------------------------------------------------------

Verdict adversary_suites() {
  auto t0 = std::chrono::steady_clock::now();
  Tally t;
  SuiteConfig cfg;
  auto rows = run_adversary_suite(cfg);
  std::ostringstream os;
  for (const auto& r : rows) {
    t.check(r.pass, r.suite + " " + std::to_string(r.wins) + "/" + std::to_string(r.trials) +
                        " vs " + r.threshold);
    os << r.suite << " " << r.wins << "/" << r.trials << ", ";
  }
  double secs = seconds_since(t0);
  t.check(secs < 180.0, "runtime " + fmt(secs, 1) + " s");
  return t.verdict(os.str() + fmt(secs, 1) + " s");
}

// ---- 9 ---------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Verdict determinism(const std::string& cli, const std::filesystem::path& dir) {
  Tally t;
  auto sweep_csv = [] {
    ScenarioConfig base = shape("tiny", 3, 3, 3);
    base.seed = 11;
    std::string out = metrics_csv_header() + "\n";
    for (const auto& r : sweep(SweepParam::NCm, {1, 2, 3, 4}, base, {true, false}))
      out += metrics_csv_row(r) + "\n";
    return out;
  };
  t.check(sweep_csv() == sweep_csv(), "in-process sweep CSV differs");
  SuiteConfig sc;
  sc.dug_trials = sc.dcg_rounds = sc.unlink_trials = 200;
  t.check(suite_csv(run_adversary_suite(sc)) == suite_csv(run_adversary_suite(sc)),
          "in-process suite CSV differs");

  std::size_t invocations = 0;
  if (!cli.empty()) {
    std::filesystem::create_directories(dir);
    const std::vector<std::string> commands = {
        "sweep --param n_nuav --values 1,2,3,4,5 --mam both --seed 7",
        "sweep --param bitrate --values 1,11,54 --tiny --seed 3",
        "sweep --param n_ch --values 2,4 --seed 5 --paper-literal --tiny",
        "demo --tiny --n-nuav 3 --seed 9",
        "keyupdate --tiny --n-cm 4 --seed 2",
        "overhead --seed 4",
        "attack --trials 100 --seed 6",
    };
    for (std::size_t i = 0; i < commands.size(); ++i) {
      std::string files[2];
      for (int rep = 0; rep < 2; ++rep) {
        auto out = dir / ("run" + std::to_string(i) + "_" + std::to_string(rep) + ".csv");
        std::filesystem::remove(out);
        std::string cmd = "\"" + cli + "\" " + commands[i] + " --out \"" + out.string() +
                          "\" > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        (void)rc;  // attack exits 1 when a small run misses a threshold
        files[rep] = slurp(out);
      }
      ++invocations;
      t.check(!files[0].empty(), "no CSV from: " + commands[i]);
      t.check(files[0] == files[1], "CSV differs for: " + commands[i]);
    }
  }
  return t.verdict(cli.empty() ? std::string("in-process only (no CLI path given)")
                               : std::to_string(invocations) + " CLI invocations run twice");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::filesystem::path work = std::filesystem::current_path() / "acceptance_out";
  std::filesystem::create_directories(work);

  std::optional<SweepSet> sweeps;
  auto sweeps_once = [&]() -> const SweepSet& {
    if (!sweeps) sweeps = run_sweeps();
    return *sweeps;
  };

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"honest-run completeness", honest_completeness},
      {"algebraic identities", algebraic_identities},
      {"tamper soundness", tamper_soundness},
      {"secrecy brute force", secrecy_brute_force},
      {"overhead consistency", [&] { return overhead_consistency(work / "overhead_deltas.csv"); }},
      {"latency trends", [&] { return latency_trends(sweeps_once()); }},
      {"energy trends", [&] { return energy_trends(sweeps_once()); }},
      {"adversary suites", adversary_suites},
      {"determinism", [&] { return determinism(cli, work / "cli"); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first
              << ": " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
