#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "clusterauth/adversary.hpp"
#include "clusterauth/overhead.hpp"
#include "clusterauth/sim.hpp"

using namespace clusterauth;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kAbort = 1;
constexpr int kConfig = 2;

const char* kColumns = R"(CSV columns
  sweep, demo and keyupdate (--out):
    scenario-id      <param>-<value>-<mam|base> for sweeps, demo-<mam|base> otherwise
    n_nuav           joining UAVs
    n_cm             members of the joining cluster
    n_ch             cluster heads in the neighbourhood, joining CH included
    bitrate          channel bitrate in bit/s
    mam              on or off
    latency_ms       first request on air until the last NUAV holds its confirmation
    e_nuav_j         mean energy per NUAV over the accounting horizon, J
    e_cm_j           mean energy per CM, J
    e_ch_j           energy of the joining CH, J
    e_otherch_j      mean energy per peer CH, J
    bytes_join       on-air bytes of the join phase
    bytes_keyupdate  on-air bytes of the rekey that follows the join
  overhead (--out):
    stage,term,paper_value,measured_value,delta
      one row per counter (t_hf, t_me, t_mm, t_xor, t_sss) and per
      communication term (bits); delta = measured - published
  attack (--out):
    suite,trials,wins,threshold,pass
)";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

template <class T>
void take(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for ") + key);
  }
}

void apply_delays(const json& j, ProcDelays& d) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"me_us", "mm_us", "hf_us", "xor_us", "sss_us"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw ConfigError("unknown processing delay key " + it.key());
  }
  take(j, "me_us", d.me_us);
  take(j, "mm_us", d.mm_us);
  take(j, "hf_us", d.hf_us);
  take(j, "xor_us", d.xor_us);
  take(j, "sss_us", d.sss_us);
}

void apply_config(const json& j, ScenarioConfig& c) {
  static const std::set<std::string> known = {
      "n_nuav", "n_cm", "n_ch", "bitrate_bps", "mam", "paper_literal", "power", "initial_energy_j",
      "delays", "freshness_ms", "frame_overhead_us", "observation_window_ms", "nuav_overhear",
      "run_transfer", "run_key_update", "seed", "group"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown config key " + it.key());
  take(j, "n_nuav", c.n_nuav);
  take(j, "n_cm", c.n_cm);
  take(j, "n_ch", c.n_ch);
  take(j, "bitrate_bps", c.bitrate_bps);
  take(j, "mam", c.mam);
  take(j, "paper_literal", c.paper_literal);
  take(j, "initial_energy_j", c.initial_energy_j);
  take(j, "freshness_ms", c.freshness_ms);
  take(j, "frame_overhead_us", c.frame_overhead_us);
  take(j, "observation_window_ms", c.observation_window_ms);
  take(j, "nuav_overhear", c.nuav_overhear);
  take(j, "run_transfer", c.run_transfer);
  take(j, "run_key_update", c.run_key_update);
  take(j, "seed", c.seed);
  take(j, "group", c.group);
  if (j.contains("delays")) apply_delays(j.at("delays"), c.delays);
  if (j.contains("power")) {
    const json& p = j.at("power");
    take(p, "sleep_mw", c.power.sleep_mw);
    take(p, "rx_idle_mw", c.power.rx_idle_mw);
    take(p, "rx_busy_mw", c.power.rx_busy_mw);
    take(p, "rx_receiving_mw", c.power.rx_receiving_mw);
    take(p, "tx_idle_mw", c.power.tx_idle_mw);
    take(p, "tx_transmitting_mw", c.power.tx_transmitting_mw);
  }
}

void write_atomic(const std::string& path, const std::string& content) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad value '" + item + "' in --values");
    }
  }
  if (out.empty()) throw ConfigError("--values is empty");
  return out;
}

struct Options {
  std::string config_path;
  std::string delays_path;
  std::optional<std::uint64_t> n_nuav, n_cm, n_ch, seed;
  std::optional<double> bitrate_mbps;
  std::string mam = "on";
  std::optional<std::string> group;
  bool tiny = false;
  bool paper_literal = false;
  std::string out;
  std::string param;
  std::string values;
  std::size_t trials = 10'000;
};

ScenarioConfig build_config(const Options& o) {
  ScenarioConfig c;
  if (!o.config_path.empty()) apply_config(read_json(o.config_path), c);
  if (!o.delays_path.empty()) apply_delays(read_json(o.delays_path), c.delays);
  if (o.n_nuav) c.n_nuav = *o.n_nuav;
  if (o.n_cm) c.n_cm = *o.n_cm;
  if (o.n_ch) c.n_ch = *o.n_ch;
  if (o.seed) c.seed = *o.seed;
  if (o.bitrate_mbps) c.bitrate_bps = *o.bitrate_mbps * 1e6;
  if (o.group) c.group = *o.group;
  if (o.tiny) c.group = "tiny";
  if (o.paper_literal) c.paper_literal = true;
  validate_config(c);
  return c;
}

std::vector<bool> mam_settings(const std::string& mam) {
  if (mam == "on") return {true};
  if (mam == "off") return {false};
  return {true, false};
}

void print_summary(std::ostream& os, const SweepRow& row) {
  const Metrics& m = row.metrics;
  os << std::fixed << std::setprecision(3);
  os << row.scenario_id << ": latency " << m.join_latency_ms << " ms, frames " << m.frames_join
     << ", join bytes " << m.bytes_join << ", rekey bytes " << m.bytes_keyupdate << '\n';
  os << std::setprecision(4) << "  energy mJ: nuav " << m.e_nuav_j * 1e3 << ", cm "
     << m.e_cm_j * 1e3 << ", ch " << m.e_ch_j * 1e3 << ", other ch " << m.e_otherch_j * 1e3
     << '\n';
}

std::string metrics_csv(const std::vector<SweepRow>& rows) {
  std::string out = metrics_csv_header() + "\n";
  for (const auto& r : rows) out += metrics_csv_row(r) + "\n";
  return out;
}

int cmd_demo(const Options& o) {
  ScenarioConfig base = build_config(o);
  std::vector<SweepRow> rows;
  for (bool mam : mam_settings(o.mam)) {
    ScenarioConfig cfg = base;
    cfg.mam = mam;
    std::cout << "== " << (mam ? "aggregated" : "per-NUAV") << " join, group " << cfg.group
              << ", " << cfg.n_nuav << " NUAV, " << cfg.n_cm << " CM, " << cfg.n_ch << " CH\n";
    SimHooks hooks;
    hooks.tamper = [](MessageKind kind, std::size_t index, Bytes& frame) {
      std::cout << "  " << std::setw(18) << std::left << kind_name(kind) << std::right << " #"
                << std::setw(3) << index << "  " << std::setw(5) << frame.size() << " B\n";
    };
    SimOutcome out = simulate(cfg, hooks);
    if (!out.accepted) {
      std::cerr << "rejected at " << stage_label(out.stage) << ": " << out.detail << '\n';
      return kAbort;
    }
    SweepRow row{std::string("demo-") + (mam ? "mam" : "base"), cfg, out.metrics};
    std::cout << "  transfer " << (out.metrics.transfer_done ? "done" : "skipped")
              << ", key update " << (out.metrics.key_update_done ? "done" : "skipped") << " ("
              << out.metrics.keyupdate_members << " members)\n";
    print_summary(std::cout, row);
    rows.push_back(std::move(row));
  }
  if (!o.out.empty()) write_atomic(o.out, metrics_csv(rows));
  return kOk;
}

int cmd_sweep(const Options& o) {
  if (o.param.empty() || o.values.empty()) throw ConfigError("sweep needs --param and --values");
  ScenarioConfig base = build_config(o);
  SweepParam param = parse_sweep_param(o.param);
  std::vector<SweepRow> rows = sweep(param, parse_values(o.values), base, mam_settings(o.mam));
  std::string csv = metrics_csv(rows);
  if (o.out.empty())
    std::cout << csv;
  else {
    write_atomic(o.out, csv);
    for (const auto& r : rows) print_summary(std::cout, r);
  }
  return kOk;
}

int cmd_overhead(const Options& o) {
  ScenarioConfig cfg = build_config(o);
  cfg.mam = true;
  cfg.run_transfer = false;
  const std::uint64_t n = cfg.n_cm;
  const std::uint64_t k = cfg.n_nuav;

  CommBits init = predict_comm(Stage::Init, k, n, cfg.n_ch);
  CommBits auth = predict_comm(Stage::UavAuth, k, n, cfg.n_ch);
  CommBits rekey = predict_comm(Stage::KeyUpdate, k, n, cfg.n_ch);
  P2Bits p2 = predict_p2(k, n);

  Metrics m = run_scenario(cfg);
  const std::size_t e = group_preset(cfg.group).elem_bytes();
  JoinShape shape{k, n, cfg.n_ch, true, cfg.paper_literal};

  std::cout << "published communication cost, n_cm=" << n << " n_ch=" << cfg.n_ch
            << " n_nuav=" << k << " (|Z|=256, |T|=32 bits)\n";
  std::cout << "  init        " << init.total_bits << " bits\n";
  std::cout << "  uav_auth    " << auth.total_bits << " bits (" << auth.zp_elems << " Z + "
            << auth.timestamps << " T)\n";
  std::cout << "  key_update  " << rekey.total_bits << " bits\n";
  std::cout << "  join with aggregation " << p2.mam_bits << " bits, without " << p2.baseline_bits
            << " bits" << (p2.degenerate ? " (no NUAV)" : "") << '\n';
  std::cout << "measured on air, group " << cfg.group << " (" << e << "-byte elements)\n";
  std::cout << "  join        " << m.bytes_join << " bytes (" << m.bytes_join * 8 << " bits), "
            << "closed form " << derived_join_bytes(e, shape) << " bytes\n";
  std::cout << "  key_update  " << m.bytes_keyupdate << " bytes (" << m.keyupdate_members
            << " members), closed form " << derived_key_update_bytes(e, m.keyupdate_members)
            << " bytes\n";
  std::cout << "  ops join " << m.ops_join << ", rekey " << m.ops_keyupdate << '\n';

  std::vector<DeltaRow> rows;
  append_op_deltas(rows, "uav_auth", predict_comp(Stage::UavAuth, k, n), m.ops_join);
  append_op_deltas(rows, "key_update", predict_comp(Stage::KeyUpdate, k, m.keyupdate_members),
                   m.ops_keyupdate);
  rows.push_back({"uav_auth", "bits", static_cast<std::int64_t>(auth.total_bits),
                  static_cast<std::int64_t>(m.bytes_join * 8)});
  CommBits rekey_n = predict_comm(Stage::KeyUpdate, k, m.keyupdate_members, cfg.n_ch);
  rows.push_back({"key_update", "bits", static_cast<std::int64_t>(rekey_n.total_bits),
                  static_cast<std::int64_t>(m.bytes_keyupdate * 8)});
  if (!o.out.empty()) write_atomic(o.out, delta_csv(rows));
  return kOk;
}

int cmd_attack(const Options& o) {
  SuiteConfig sc;
  sc.dug_trials = sc.dcg_rounds = sc.unlink_trials = o.trials;
  if (o.seed) sc.seed = *o.seed;
  sc.group = o.tiny ? "tiny" : o.group.value_or("full");
  if (sc.group != "tiny" && sc.group != "full") throw ConfigError("group must be tiny or full");
  if (o.trials == 0) throw ConfigError("--trials must be positive");
  std::vector<SuiteRow> rows = run_adversary_suite(sc);
  std::string csv = suite_csv(rows);
  if (o.out.empty())
    std::cout << csv;
  else {
    write_atomic(o.out, csv);
    for (const auto& r : rows)
      std::cout << r.suite << ": " << r.wins << "/" << r.trials << " (" << r.threshold << ") "
                << (r.pass ? "pass" : "FAIL") << '\n';
  }
  bool ok = std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.pass; });
  return ok ? kOk : kAbort;
}

int cmd_keyupdate(const Options& o) {
  ScenarioConfig base = build_config(o);
  base.run_key_update = true;
  std::vector<SweepRow> rows;
  for (bool mam : mam_settings(o.mam)) {
    ScenarioConfig cfg = base;
    cfg.mam = mam;
    Metrics m = run_scenario(cfg);
    const std::size_t e = group_preset(cfg.group).elem_bytes();
    std::cout << "rekey of " << m.keyupdate_members << " members: " << m.bytes_keyupdate
              << " bytes (closed form " << derived_key_update_bytes(e, m.keyupdate_members)
              << "), ops " << m.ops_keyupdate << ", published "
              << predict_comp(Stage::KeyUpdate, 0, m.keyupdate_members) << '\n';
    rows.push_back({std::string("keyupdate-") + (mam ? "mam" : "base"), cfg, m});
  }
  if (!o.out.empty()) write_atomic(o.out, metrics_csv(rows));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster authentication protocol simulator and test harness"};
  app.footer(kColumns);
  app.require_subcommand(1);
  Options o;

  auto scenario_flags = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON file whose keys mirror the scenario fields")
        ->check(CLI::ExistingFile);
    sub->add_option("--proc-delays", o.delays_path,
                    "JSON file with me_us, mm_us, hf_us, xor_us, sss_us")
        ->check(CLI::ExistingFile);
    sub->add_option("--n-nuav", o.n_nuav, "joining UAVs (default 5)");
    sub->add_option("--n-cm", o.n_cm, "cluster members (default 5)");
    sub->add_option("--n-ch", o.n_ch, "cluster heads, joining CH included (default 5)");
    sub->add_option("--bitrate", o.bitrate_mbps, "channel bitrate in Mbit/s (default 48)");
    sub->add_option("--mam", o.mam, "message aggregation: on, off or both")
        ->check(CLI::IsMember({"on", "off", "both"}));
    sub->add_option("--seed", o.seed, "random seed (default 1)");
    sub->add_option("--group", o.group, "tiny or full")->check(CLI::IsMember({"tiny", "full"}));
    sub->add_flag("--tiny", o.tiny, "shorthand for --group tiny");
    sub->add_flag("--paper-literal", o.paper_literal,
                  "use the unbound peer ack and the reused transfer hash as published");
    sub->add_option("--out", o.out, "CSV output file, written atomically");
  };

  auto* demo = app.add_subcommand("demo", "run one join, transfer and rekey, print the frames");
  scenario_flags(demo);
  auto* sw = app.add_subcommand("sweep", "vary one parameter and write one CSV row per run");
  scenario_flags(sw);
  sw->add_option("--param", o.param, "n_nuav, n_cm, n_ch or bitrate")
      ->check(CLI::IsMember({"n_nuav", "n_cm", "n_ch", "bitrate"}));
  sw->add_option("--values", o.values, "comma-separated values (bitrate in Mbit/s)");
  auto* oh = app.add_subcommand("overhead", "published cost formulas next to measured traffic");
  scenario_flags(oh);
  auto* at = app.add_subcommand("attack", "run the forgery, confidentiality and linking suites");
  scenario_flags(at);
  at->add_option("--trials", o.trials, "trials per suite (default 10000)");
  auto* ku = app.add_subcommand("keyupdate", "join then rekey, report rekey traffic");
  scenario_flags(ku);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*demo) return cmd_demo(o);
    if (*sw) return cmd_sweep(o);
    if (*oh) return cmd_overhead(o);
    if (*at) return cmd_attack(o);
    if (*ku) return cmd_keyupdate(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ProtocolError& e) {
    std::cerr << e.what() << '\n';
    return e.code() == Errc::ConfigInvalid ? kConfig : kAbort;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}
