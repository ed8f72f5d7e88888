#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clusterauth/counters.hpp"
#include "clusterauth/errors.hpp"
#include "clusterauth/messages.hpp"

namespace clusterauth {

struct PowerModel {
  double sleep_mw = 0.0;
  double rx_idle_mw = 2.0;
  double rx_busy_mw = 5.0;
  double rx_receiving_mw = 100.0;
  double tx_idle_mw = 2.0;
  double tx_transmitting_mw = 300.0;
};

/// Cost charged per counted primitive, in microseconds.
struct ProcDelays {
  double me_us = 200.0;
  double mm_us = 2.0;
  double hf_us = 5.0;
  double xor_us = 0.1;
  double sss_us = 2.0;

  double cost_us(const OpCounts& c) const;
};

struct ScenarioConfig {
  std::uint64_t n_nuav = 5;
  std::uint64_t n_cm = 5;
  std::uint64_t n_ch = 5;
  double bitrate_bps = 48e6;
  bool mam = true;
  bool paper_literal = false;
  PowerModel power;
  double initial_energy_j = 0.01;
  ProcDelays delays;
  std::uint64_t freshness_ms = 100;
  /// Fixed airtime added to every frame (preamble, MAC and PHY headers).
  double frame_overhead_us = 200.0;
  /// Energy is accounted over max(this, join end).
  double observation_window_ms = 1000.0;
  /// NUAVs sense foreign frames as rx busy; off means they stay rx idle.
  bool nuav_overhear = true;
  bool run_transfer = true;
  bool run_key_update = true;
  std::uint64_t seed = 1;
  std::string group = "full";
};

/// Throws ConfigInvalid naming the first bad field.
void validate_config(const ScenarioConfig& cfg);

/// bytes * 8 / bitrate plus the fixed per-frame overhead, in microseconds.
double tx_time_us(std::uint64_t bytes, double bitrate_bps, double overhead_us = 0.0);

enum class RadioState { Sleep, Idle, Busy, Receiving, Transmitting };

struct Segment {
  RadioState state = RadioState::Idle;
  double start_us = 0.0;
  double end_us = 0.0;
};

/// Instantaneous draw of the node, receiver plus transmitter, in mW.
double state_power_mw(const PowerModel& power, RadioState state);

/// Sum of power times duration over [0, horizon]. Gaps between segments are
/// idle. Segments must not overlap.
double energy_account(const PowerModel& power, const std::vector<Segment>& timeline,
                      double horizon_us);

enum class NodeRole { Nuav, Cm, Ch, OtherCh };

struct NodeEnergy {
  NodeRole role = NodeRole::Cm;
  double joules = 0.0;
  bool depleted = false;
};

struct Metrics {
  double join_latency_ms = 0.0;
  /// Mean per node of the role; zero when the role is absent.
  double e_nuav_j = 0.0;
  double e_cm_j = 0.0;
  double e_ch_j = 0.0;
  double e_otherch_j = 0.0;
  double e_total_j = 0.0;
  std::vector<NodeEnergy> nodes;
  std::uint64_t bytes_join = 0;
  std::uint64_t bytes_transfer = 0;
  std::uint64_t bytes_keyupdate = 0;
  std::uint64_t frames_join = 0;
  std::uint64_t events = 0;
  OpCounts ops_join;
  OpCounts ops_transfer;
  OpCounts ops_keyupdate;
  /// Members that took part in the rekey.
  std::uint64_t keyupdate_members = 0;
  bool transfer_done = false;
  bool key_update_done = false;
};

enum class SimStage {
  Decode,
  ChAggregate,
  CmVerify,
  ChCollect,
  PeerVerify,
  Finalize,
  NuavVerify,
  Transfer,
  KeyUpdate,
};
std::string_view stage_label(SimStage stage);

struct SimHooks {
  /// Sees every frame before it goes on air: kind, running index of that
  /// kind within the run, encoded bytes (mutable).
  std::function<void(MessageKind, std::size_t, Bytes&)> tamper;
};

struct SimOutcome {
  bool accepted = true;
  SimStage stage = SimStage::Decode;
  std::optional<Errc> error;
  std::string detail;
  Metrics metrics;
};

/// Runs join, optional transfer and optional rekey. Verification failures
/// are reported in the outcome instead of thrown.
SimOutcome simulate(const ScenarioConfig& cfg, const SimHooks& hooks = {});

/// simulate() for honest runs; a rejection raises ProtocolAbort.
Metrics run_scenario(const ScenarioConfig& cfg);

enum class SweepParam { NNuav, NCm, NCh, Bitrate };
SweepParam parse_sweep_param(std::string_view name);
std::string_view sweep_param_name(SweepParam p);

struct SweepRow {
  std::string scenario_id;
  ScenarioConfig cfg;
  Metrics metrics;
};

/// One run per value (per mam setting listed). Seeds are derived from the
/// base seed and the value so rows do not share random streams.
std::vector<SweepRow> sweep(SweepParam param, const std::vector<double>& values,
                            const ScenarioConfig& base, const std::vector<bool>& mam_settings);

std::string metrics_csv_header();
std::string metrics_csv_row(const SweepRow& row);

}  // namespace clusterauth
