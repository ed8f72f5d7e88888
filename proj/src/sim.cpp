#include "clusterauth/sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <queue>
#include <sstream>

#include "clusterauth/cross_cluster.hpp"
#include "clusterauth/join.hpp"
#include "clusterauth/key_update.hpp"

namespace clusterauth {

double ProcDelays::cost_us(const OpCounts& c) const {
  return c.t_me * me_us + c.t_mm * mm_us + c.t_hf * hf_us + c.t_xor * xor_us + c.t_sss * sss_us;
}

void validate_config(const ScenarioConfig& cfg) {
  auto bad = [](const char* field) { throw ProtocolError(Errc::ConfigInvalid, field); };
  if (!(cfg.bitrate_bps > 0)) bad("bitrate");
  const auto& p = cfg.power;
  if (p.sleep_mw < 0) bad("power.sleep");
  if (!(p.rx_idle_mw > 0)) bad("power.rx_idle");
  if (!(p.rx_busy_mw > 0)) bad("power.rx_busy");
  if (!(p.rx_receiving_mw > 0)) bad("power.rx_receiving");
  if (!(p.tx_idle_mw > 0)) bad("power.tx_idle");
  if (!(p.tx_transmitting_mw > 0)) bad("power.tx_transmitting");
  if (!(cfg.initial_energy_j > 0)) bad("initial_energy");
  const auto& d = cfg.delays;
  for (double v : {d.me_us, d.mm_us, d.hf_us, d.xor_us, d.sss_us})
    if (v < 0 || !std::isfinite(v)) bad("proc_delays");
  if (cfg.frame_overhead_us < 0) bad("frame_overhead_us");
  if (cfg.observation_window_ms < 0) bad("observation_window_ms");
  if (cfg.freshness_ms == 0) bad("freshness_window");
  if (cfg.n_ch == 0) bad("n_ch");
  if (cfg.n_nuav > 0 && cfg.n_cm == 0) bad("n_cm");
  if (cfg.n_nuav > 1000 || cfg.n_cm > 1000 || cfg.n_ch > 1000) bad("counts");
  try {
    group_preset(cfg.group);
  } catch (const ProtocolError&) {
    bad("group");
  }
}

double tx_time_us(std::uint64_t bytes, double bitrate_bps, double overhead_us) {
  if (bytes == 0) return 0.0;
  return static_cast<double>(bytes) * 8.0 / bitrate_bps * 1e6 + overhead_us;
}

double state_power_mw(const PowerModel& p, RadioState state) {
  switch (state) {
    case RadioState::Sleep: return p.sleep_mw;
    case RadioState::Idle: return p.rx_idle_mw + p.tx_idle_mw;
    case RadioState::Busy: return p.rx_busy_mw + p.tx_idle_mw;
    case RadioState::Receiving: return p.rx_receiving_mw + p.tx_idle_mw;
    case RadioState::Transmitting: return p.rx_idle_mw + p.tx_transmitting_mw;
  }
  return 0.0;
}

double energy_account(const PowerModel& power, const std::vector<Segment>& timeline,
                      double horizon_us) {
  const double idle = state_power_mw(power, RadioState::Idle);
  double mj_us = idle * horizon_us;
  for (const auto& s : timeline) {
    double a = std::clamp(s.start_us, 0.0, horizon_us), b = std::clamp(s.end_us, 0.0, horizon_us);
    mj_us += (state_power_mw(power, s.state) - idle) * (b - a);
  }
  // mW * us = 1e-9 J
  return mj_us * 1e-9;
}

std::string_view stage_label(SimStage stage) {
  switch (stage) {
    case SimStage::Decode: return "decode";
    case SimStage::ChAggregate: return "ch_aggregate";
    case SimStage::CmVerify: return "cm_verify";
    case SimStage::ChCollect: return "ch_collect";
    case SimStage::PeerVerify: return "peer_verify";
    case SimStage::Finalize: return "finalize";
    case SimStage::NuavVerify: return "nuav_verify";
    case SimStage::Transfer: return "transfer";
    case SimStage::KeyUpdate: return "key_update";
  }
  return "?";
}

namespace {

std::uint64_t to_ms(double t_us) { return static_cast<std::uint64_t>(t_us / 1000.0); }

class Engine {
 public:
  Engine(const ScenarioConfig& cfg, const SimHooks& hooks)
      : cfg_(cfg),
        hooks_(hooks),
        registry_(group_preset(cfg.group), 1, derive_seed(cfg.seed, 1)),
        rng_(derive_seed(cfg.seed, 2)) {
    opts_.paper_literal = cfg.paper_literal;
    opts_.freshness_ms = cfg.freshness_ms;
  }

  SimOutcome run();

 private:
  struct Node {
    NodeRole role;
    bool neighbourhood;
    double cpu_free = 0.0;
    std::vector<Segment> timeline;
  };
  struct Event {
    double t;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
  };
  using Handler = std::function<void(const Bytes&, double)>;

  const GroupParams& group() const { return registry_.group(); }
  const ChCredential& ch() const { return registry_.cluster(cluster_).ch; }

  void setup();
  void at(double t, std::function<void()> fn) { queue_.push({t, seq_++, std::move(fn)}); }
  template <class F>
  double process(std::size_t node, double t, SimStage stage, F&& fn);
  void send(std::size_t from, std::size_t to, MessageKind kind, Bytes bytes, double ready,
            Handler on_rx);
  Bytes tampered(MessageKind kind, Bytes bytes);
  template <class F>
  auto decode(F&& fn) {
    stage_ = SimStage::Decode;
    return fn();
  }

  void start_join();
  void on_request(std::size_t i, const Bytes& b, double t);
  void mam_aggregate(double t);
  void baseline_try(double t);
  void challenge_members(double t, std::span<const JoinRequest> reqs);
  void on_challenge(std::size_t l, const Bytes& b, double t);
  void collect_responses(double t);
  void baseline_record(double t);
  void broadcast_to_peers(double ready, const PeerBroadcast& bc, std::uint64_t weight,
                          std::function<void(double)> done);
  void finalize(double t, std::function<void(double)> after);
  void run_transfer();
  void run_key_update();

  const ScenarioConfig& cfg_;
  const SimHooks& hooks_;
  ProtocolOptions opts_;
  Registry registry_;
  Rng rng_;
  ClusterId cluster_ = 0;
  std::vector<ClusterId> peer_clusters_;
  std::vector<NuavCredential> nuavs_;
  std::vector<Node> nodes_;
  std::size_t ch_node_ = 0;
  std::vector<std::size_t> cm_nodes_, nuav_nodes_, peer_nodes_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  double clock_us_ = 0.0;
  double medium_free_ = 0.0;
  std::map<MessageKind, std::size_t> kind_index_;
  SimStage stage_ = SimStage::Decode;
  std::uint64_t now_ms_ = 0;
  Metrics m_;

  // join state
  std::vector<JoinRequest> requests_;
  std::vector<bool> received_;
  std::size_t requests_in_ = 0;
  std::size_t baseline_k_ = 0;
  bool baseline_busy_ = false;
  std::vector<std::size_t> batch_nuavs_;
  std::size_t responses_in_ = 0;
  JoinBatch batch_;
  std::vector<std::optional<CmResponse>> responses_;
  std::vector<IndividualRecord> records_;
  std::size_t record_k_ = 0;
  std::vector<PeerAck> acks_;
  Block32 result_{};
  std::uint64_t t2_ = 0;
  std::size_t verified_ = 0;
  double join_end_ = 0.0;
};

void Engine::setup() {
  ChCredential head = registry_.register_ch(0, "ch-0");
  cluster_ = head.cluster;
  for (std::uint64_t j = 1; j < cfg_.n_ch; ++j)
    peer_clusters_.push_back(registry_.register_ch(0, "ch-" + std::to_string(j)).cluster);
  for (std::uint64_t l = 0; l < cfg_.n_cm; ++l)
    registry_.register_cm(0, cluster_, "cm-" + std::to_string(l));
  for (std::uint64_t i = 0; i < cfg_.n_nuav; ++i) nuavs_.push_back(registry_.provision_nuav(0, cluster_));

  nodes_.push_back({NodeRole::Ch, true, 0.0, {}});
  for (std::uint64_t l = 0; l < cfg_.n_cm; ++l) {
    cm_nodes_.push_back(nodes_.size());
    nodes_.push_back({NodeRole::Cm, true, 0.0, {}});
  }
  for (std::uint64_t i = 0; i < cfg_.n_nuav; ++i) {
    nuav_nodes_.push_back(nodes_.size());
    nodes_.push_back({NodeRole::Nuav, false, 0.0, {}});
  }
  for (std::uint64_t j = 1; j < cfg_.n_ch; ++j) {
    peer_nodes_.push_back(nodes_.size());
    nodes_.push_back({NodeRole::OtherCh, true, 0.0, {}});
  }
}

template <class F>
double Engine::process(std::size_t node, double t, SimStage stage, F&& fn) {
  Node& n = nodes_[node];
  double start = std::max(t, n.cpu_free);
  stage_ = stage;
  now_ms_ = to_ms(start);
  OpCounts used;
  {
    CounterScope scope;
    fn();
    used = scope.counts();
  }
  n.cpu_free = start + cfg_.delays.cost_us(used);
  return n.cpu_free;
}

Bytes Engine::tampered(MessageKind kind, Bytes bytes) {
  std::size_t index = kind_index_[kind]++;
  if (hooks_.tamper) hooks_.tamper(kind, index, bytes);
  return bytes;
}

void Engine::send(std::size_t from, std::size_t to, MessageKind kind, Bytes bytes, double ready,
                  Handler on_rx) {
  bytes = tampered(kind, std::move(bytes));
  at(ready, [this, from, to, bytes = std::move(bytes), on_rx = std::move(on_rx)]() mutable {
    double t = clock_us_;
    double start = std::max(t, medium_free_);
    double end = start + tx_time_us(bytes.size(), cfg_.bitrate_bps, cfg_.frame_overhead_us);
    medium_free_ = end;
    m_.bytes_join += bytes.size();
    ++m_.frames_join;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      RadioState s;
      if (i == from)
        s = RadioState::Transmitting;
      else if (i == to || nodes_[i].neighbourhood)
        s = RadioState::Receiving;
      else if (cfg_.nuav_overhear)
        s = RadioState::Busy;
      else
        continue;
      nodes_[i].timeline.push_back({s, start, end});
    }
    at(end, [this, bytes = std::move(bytes), on_rx = std::move(on_rx), end]() { on_rx(bytes, end); });
  });
}

void Engine::start_join() {
  const std::size_t n = nuavs_.size();
  if (n == 0) return;
  // Requests are prepared before the clock starts; their cost is counted
  // but not charged to the latency.
  for (const auto& cred : nuavs_)
    requests_.push_back(nuav_build_request(registry_.public_params(), cred, rng_));
  received_.assign(n, false);
  for (std::size_t i = 0; i < n; ++i)
    send(nuav_nodes_[i], ch_node_, MessageKind::JoinRequest, encode(group(), requests_[i]), 0.0,
         [this, i](const Bytes& b, double t) { on_request(i, b, t); });
}

void Engine::on_request(std::size_t i, const Bytes& b, double t) {
  requests_[i] = decode([&] { return decode_join_request(group(), b); });
  received_[i] = true;
  ++requests_in_;
  if (cfg_.mam) {
    if (requests_in_ == requests_.size()) mam_aggregate(t);
  } else {
    baseline_try(t);
  }
}

void Engine::mam_aggregate(double t) {
  batch_nuavs_.clear();
  for (std::size_t i = 0; i < requests_.size(); ++i) batch_nuavs_.push_back(i);
  challenge_members(t, requests_);
}

void Engine::baseline_try(double t) {
  if (baseline_busy_ || baseline_k_ >= requests_.size() || !received_[baseline_k_]) return;
  baseline_busy_ = true;
  batch_nuavs_ = {baseline_k_};
  challenge_members(t, std::span<const JoinRequest>(&requests_[baseline_k_], 1));
}

void Engine::challenge_members(double t, std::span<const JoinRequest> reqs) {
  AggregateOutput out;
  std::vector<MemberInfo> roster = registry_.cluster(cluster_).roster();
  double end = process(ch_node_, t, SimStage::ChAggregate,
                       [&] { out = ch_aggregate(group(), ch(), reqs, roster, now_ms_, rng_); });
  batch_ = std::move(out.batch);
  responses_.assign(cm_nodes_.size(), std::nullopt);
  responses_in_ = 0;
  for (std::size_t l = 0; l < cm_nodes_.size(); ++l)
    send(ch_node_, cm_nodes_[l], MessageKind::AggregateChallenge,
         encode(group(), out.challenges[l]), end,
         [this, l](const Bytes& b, double t2) { on_challenge(l, b, t2); });
}

void Engine::on_challenge(std::size_t l, const Bytes& b, double t) {
  auto chal = decode([&] { return decode_aggregate_challenge(group(), b); });
  const CmCredential& cm = registry_.cluster(cluster_).members.at(l);
  CmResponse resp;
  double end = process(cm_nodes_[l], t, SimStage::CmVerify, [&] {
    resp = cm_verify_and_respond(group(), cm, ch().pid, cm_nodes_.size(), chal, now_ms_, opts_);
  });
  send(cm_nodes_[l], ch_node_, MessageKind::CmResponse, encode(group(), resp), end,
       [this, l](const Bytes& rb, double rt) {
         responses_[l] = decode([&] { return decode_cm_response(group(), rb); });
         if (++responses_in_ == responses_.size()) collect_responses(rt);
       });
}

void Engine::collect_responses(double t) {
  std::vector<CmResponse> rs;
  for (const auto& r : responses_) rs.push_back(*r);
  const std::uint64_t n = rs.size();
  if (cfg_.mam) {
    PeerBroadcast bc;
    double end = process(ch_node_, t, SimStage::ChCollect, [&] {
      bc = ch_collect_and_verify(group(), ch(), batch_, rs, now_ms_, now_ms_, opts_);
    });
    result_ = batch_.result;
    t2_ = bc.t2;
    broadcast_to_peers(end, bc, n * n, [this](double t3) { finalize(t3, [](double) {}); });
    return;
  }
  double end = process(ch_node_, t, SimStage::ChCollect, [&] {
    records_ = ch_verify_individual(group(), ch(), batch_, rs, now_ms_, opts_);
  });
  record_k_ = 0;
  baseline_record(end);
}

// Stop-and-wait: the next per-CM record goes out once every peer has
// acknowledged the previous one.
void Engine::baseline_record(double t) {
  if (record_k_ == records_.size()) {
    finalize(t, [this](double t2) {
      baseline_busy_ = false;
      ++baseline_k_;
      baseline_try(t2);
    });
    return;
  }
  PeerBroadcast bc;
  const auto& rec = records_[record_k_];
  double end = process(ch_node_, t, SimStage::ChCollect, [&] {
    bc = ch_build_broadcast(group(), ch(), batch_.result, rec.sig, rec.pk, now_ms_);
  });
  result_ = batch_.result;
  t2_ = bc.t2;
  ++record_k_;
  broadcast_to_peers(end, bc, cm_nodes_.size(), [this](double t2) { baseline_record(t2); });
}

void Engine::broadcast_to_peers(double ready, const PeerBroadcast& bc, std::uint64_t weight,
                                std::function<void(double)> done) {
  acks_.clear();
  if (peer_nodes_.empty()) {
    done(ready);
    return;
  }
  auto on_ack = [this, done](const Bytes& b, double t) {
    acks_.push_back(decode([&] { return decode_peer_ack(group(), b); }));
    if (acks_.size() != peer_nodes_.size()) return;
    std::vector<Block32> peer_pids;
    for (ClusterId c : peer_clusters_) peer_pids.push_back(registry_.cluster(c).ch.pid);
    double end = process(ch_node_, t, SimStage::Finalize, [&] {
      ch_verify_acks(result_, t2_, acks_, peer_pids, now_ms_, opts_);
    });
    done(end);
  };
  Bytes wire = encode(group(), bc);
  for (std::size_t j = 0; j < peer_nodes_.size(); ++j)
    send(ch_node_, peer_nodes_[j], MessageKind::PeerBroadcast, wire, ready,
         [this, j, weight, on_ack](const Bytes& b, double t) {
           auto rbc = decode([&] { return decode_peer_broadcast(group(), b); });
           const ChCredential& peer = registry_.cluster(peer_clusters_[j]).ch;
           PeerAck ack;
           double end = process(peer_nodes_[j], t, SimStage::PeerVerify, [&] {
             ack = peer_ch_verify(group(), peer, rbc, weight, now_ms_, opts_);
           });
           send(peer_nodes_[j], ch_node_, MessageKind::PeerAck, encode(group(), ack), end, on_ack);
         });
}

void Engine::finalize(double t, std::function<void(double)> after) {
  std::vector<NuavConfirm> confs;
  double end = process(ch_node_, t, SimStage::Finalize,
                       [&] { confs = ch_finalize(ch(), batch_, registry_); });
  for (std::size_t k = 0; k < confs.size(); ++k) {
    std::size_t i = batch_nuavs_.at(k);
    send(ch_node_, nuav_nodes_[i], MessageKind::NuavConfirm, encode(group(), confs[k]), end,
         [this, i](const Bytes& b, double rt) {
           auto conf = decode([&] { return decode_nuav_confirm(group(), b); });
           double done = process(nuav_nodes_[i], rt, SimStage::NuavVerify, [&] {
             if (!nuav_verify_ch(group(), nuavs_[i], conf))
               throw ProtocolError(Errc::TokenMismatch, "CH confirmation");
           });
           ++verified_;
           join_end_ = std::max(join_end_, done);
         });
  }
  after(end);
}

void Engine::run_transfer() {
  if (!cfg_.run_transfer || peer_clusters_.empty()) return;
  const auto& members = registry_.cluster(cluster_).members;
  if (members.empty()) return;
  const Block32 euav = members.front().pid;
  const std::uint64_t t3 = to_ms(join_end_);
  CounterScope scope;
  stage_ = SimStage::Transfer;
  TransferRequest req = source_ch_build_transfer(ch(), euav, t3);
  Bytes wire = tampered(MessageKind::TransferRequest, encode(group(), req));
  m_.bytes_transfer += wire.size();
  auto rx = decode([&] { return decode_transfer_request(group(), wire); });
  stage_ = SimStage::Transfer;
  ChCredential dest = registry_.cluster(peer_clusters_.front()).ch;
  dest_ch_verify_transfer(dest, registry_, rx, t3, opts_);
  m_.ops_transfer = scope.counts();
  m_.transfer_done = true;
}

void Engine::run_key_update() {
  if (!cfg_.run_key_update) return;
  const ClusterRecord& rec = registry_.cluster(cluster_);
  std::vector<Block32> roster;
  for (const auto& m : rec.members) roster.push_back(m.pid);
  if (roster.empty()) return;
  stage_ = SimStage::KeyUpdate;
  try {
    derive_abscissas(group(), roster);
  } catch (const ProtocolError& e) {
    if (e.code() != Errc::AbscissaCollision) throw;
    // A toy group cannot give every member of a large roster its own
    // abscissa; rekey the members that were there before the join.
    std::vector<Block32> original;
    for (const auto& pid : roster)
      if (std::none_of(nuavs_.begin(), nuavs_.end(),
                       [&](const NuavCredential& n) { return n.pid == pid; }))
        original.push_back(pid);
    roster = original;
    if (roster.empty()) return;
  }

  const std::uint64_t t4 = to_ms(join_end_);
  const std::size_t n = roster.size();
  CounterScope scope;
  ChCredential dealer = rec.ch;
  DealerOutput deal = ch_init_update(group(), dealer, roster, t4, rng_);

  std::vector<KeyUpdateInit> inits;
  for (const auto& init : deal.inits) {
    Bytes wire = tampered(MessageKind::KeyUpdateInit, encode(group(), init));
    m_.bytes_keyupdate += wire.size();
    inits.push_back(decode([&] { return decode_key_update_init(group(), wire); }));
  }
  auto member = [&](const Block32& pid) -> const CmCredential& {
    for (const auto& m : rec.members)
      if (m.pid == pid) return m;
    throw ProtocolError(Errc::UnknownMember);
  };
  std::vector<MemberShareState> states(n);
  std::vector<ShareEnvelope> envelopes;
  for (std::size_t l = 0; l < n; ++l) {
    stage_ = SimStage::KeyUpdate;
    ShareEnvelope env =
        cm_recover_and_share(group(), member(roster[l]), roster, inits[l], t4, states[l], opts_);
    Bytes wire = tampered(MessageKind::ShareEnvelope, encode(group(), env));
    m_.bytes_keyupdate += wire.size();
    envelopes.push_back(decode([&] { return decode_share_envelope(group(), wire); }));
  }
  const Block32 expected = encode_scalar32(deal.key_new);
  for (std::size_t l = 0; l < n; ++l) {
    stage_ = SimStage::KeyUpdate;
    if (cm_reconstruct(group(), states[l], envelopes, inits[l]) != expected)
      throw ProtocolError(Errc::ConfirmMismatch, "member disagrees");
  }
  registry_.install_key(cluster_, expected);
  m_.ops_keyupdate = scope.counts();
  m_.keyupdate_members = n;
  m_.key_update_done = true;
}

SimOutcome Engine::run() {
  SimOutcome out;
  try {
    setup();
    {
      CounterScope scope;
      start_join();
      while (!queue_.empty()) {
        Event ev = queue_.top();
        queue_.pop();
        clock_us_ = ev.t;
        ++m_.events;
        ev.fn();
      }
      m_.ops_join = scope.counts();
    }
    if (verified_ != nuavs_.size())
      throw ProtocolError(Errc::ProtocolAbort, "join did not complete");
    m_.join_latency_ms = join_end_ / 1000.0;

    const double horizon = std::max(cfg_.observation_window_ms * 1000.0, join_end_);
    std::map<NodeRole, std::pair<double, std::size_t>> by_role;
    for (const auto& node : nodes_) {
      NodeEnergy e{node.role, energy_account(cfg_.power, node.timeline, horizon), false};
      e.depleted = e.joules > cfg_.initial_energy_j;
      m_.nodes.push_back(e);
      m_.e_total_j += e.joules;
      by_role[node.role].first += e.joules;
      ++by_role[node.role].second;
    }
    auto mean = [&](NodeRole r) {
      auto it = by_role.find(r);
      return it == by_role.end() ? 0.0 : it->second.first / it->second.second;
    };
    m_.e_nuav_j = mean(NodeRole::Nuav);
    m_.e_cm_j = mean(NodeRole::Cm);
    m_.e_ch_j = mean(NodeRole::Ch);
    m_.e_otherch_j = mean(NodeRole::OtherCh);

    if (!nuavs_.empty()) registry_.admit_members(cluster_, nuavs_);
    run_transfer();
    run_key_update();
  } catch (const ProtocolError& e) {
    out.accepted = false;
    out.stage = stage_;
    out.error = e.code();
    out.detail = e.what();
  }
  out.metrics = std::move(m_);
  return out;
}

}  // namespace

SimOutcome simulate(const ScenarioConfig& cfg, const SimHooks& hooks) {
  validate_config(cfg);
  Engine engine(cfg, hooks);
  return engine.run();
}

Metrics run_scenario(const ScenarioConfig& cfg) {
  SimOutcome out = simulate(cfg);
  if (!out.accepted)
    throw ProtocolError(Errc::ProtocolAbort,
                        std::string(stage_label(out.stage)) + ": " + out.detail);
  return std::move(out.metrics);
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "n_nuav") return SweepParam::NNuav;
  if (name == "n_cm") return SweepParam::NCm;
  if (name == "n_ch") return SweepParam::NCh;
  if (name == "bitrate") return SweepParam::Bitrate;
  throw ProtocolError(Errc::ConfigInvalid, "sweep parameter " + std::string(name));
}

std::string_view sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::NNuav: return "n_nuav";
    case SweepParam::NCm: return "n_cm";
    case SweepParam::NCh: return "n_ch";
    case SweepParam::Bitrate: return "bitrate";
  }
  return "?";
}

std::vector<SweepRow> sweep(SweepParam param, const std::vector<double>& values,
                            const ScenarioConfig& base, const std::vector<bool>& mam_settings) {
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double v = values[k];
    if (param != SweepParam::Bitrate && (v < 0 || v != std::floor(v)))
      throw ProtocolError(Errc::ConfigInvalid, "count values must be non-negative integers");
    ScenarioConfig cfg = base;
    switch (param) {
      case SweepParam::NNuav: cfg.n_nuav = static_cast<std::uint64_t>(v); break;
      case SweepParam::NCm: cfg.n_cm = static_cast<std::uint64_t>(v); break;
      case SweepParam::NCh: cfg.n_ch = static_cast<std::uint64_t>(v); break;
      case SweepParam::Bitrate: cfg.bitrate_bps = v * 1e6; break;
    }
    // Both MAm settings of one point share the seed so they compare the
    // same swarm.
    cfg.seed = derive_seed(base.seed, k + 1);
    for (bool mam : mam_settings) {
      cfg.mam = mam;
      std::ostringstream id;
      id << sweep_param_name(param) << '-' << v << '-' << (mam ? "mam" : "base");
      rows.push_back({id.str(), cfg, run_scenario(cfg)});
    }
  }
  return rows;
}

std::string metrics_csv_header() {
  return "scenario-id,n_nuav,n_cm,n_ch,bitrate,mam,latency_ms,e_nuav_j,e_cm_j,e_ch_j,"
         "e_otherch_j,bytes_join,bytes_keyupdate";
}

std::string metrics_csv_row(const SweepRow& row) {
  const auto& c = row.cfg;
  const auto& m = row.metrics;
  std::ostringstream os;
  os << row.scenario_id << ',' << c.n_nuav << ',' << c.n_cm << ',' << c.n_ch << ','
     << static_cast<std::uint64_t>(std::llround(c.bitrate_bps)) << ',' << (c.mam ? "on" : "off")
     << ',' << std::fixed << std::setprecision(6) << m.join_latency_ms << std::setprecision(9)
     << ',' << m.e_nuav_j << ',' << m.e_cm_j << ',' << m.e_ch_j << ',' << m.e_otherch_j << ','
     << m.bytes_join << ',' << m.bytes_keyupdate;
  return os.str();
}

}  // namespace clusterauth
