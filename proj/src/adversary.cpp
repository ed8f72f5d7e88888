#include "clusterauth/adversary.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "clusterauth/cross_cluster.hpp"
#include "clusterauth/errors.hpp"
#include "clusterauth/key_update.hpp"

namespace clusterauth {

QueryKind parse_query_kind(std::string_view name) {
  if (name == "registration") return QueryKind::Registration;
  if (name == "joining_request") return QueryKind::JoiningRequest;
  if (name == "cm_verification") return QueryKind::CmVerification;
  if (name == "ch_verification") return QueryKind::ChVerification;
  if (name == "cross_cluster") return QueryKind::CrossCluster;
  throw ProtocolError(Errc::UnknownQueryKind, std::string(name));
}

std::string_view query_kind_name(QueryKind kind) {
  switch (kind) {
    case QueryKind::Registration: return "registration";
    case QueryKind::JoiningRequest: return "joining_request";
    case QueryKind::CmVerification: return "cm_verification";
    case QueryKind::ChVerification: return "ch_verification";
    case QueryKind::CrossCluster: return "cross_cluster";
  }
  return "?";
}

OracleSession::OracleSession(GroupParams group, std::uint64_t seed, ProtocolOptions opts)
    : opts_(opts), reg_(std::move(group), 1, derive_seed(seed, 1)), rng_(derive_seed(seed, 2)) {
  challenge_ = reg_.register_ch(0, "challenge-ch").cluster;
  peer_ = reg_.register_ch(0, "peer-ch").cluster;
  source_ = reg_.register_ch(0, "source-ch").cluster;
  reg_.register_cm(0, challenge_, "challenge-cm-0");
  reg_.register_cm(0, challenge_, "challenge-cm-1");
}

const PublicParams& OracleSession::public_params() const { return reg_.public_params(); }
const GroupParams& OracleSession::group() const { return reg_.group(); }
Block32 OracleSession::challenge_ch_pid() const { return reg_.cluster(challenge_).ch.pid; }

ClusterId OracleSession::adversary_cluster() {
  if (!adversary_) adversary_ = reg_.register_ch(0, "adversary-ch").cluster;
  return *adversary_;
}

OracleSession::Batch OracleSession::make_batch() {
  const auto& group = reg_.group();
  NuavCredential nuav = reg_.provision_nuav(0, challenge_);
  JoinRequest req = nuav_build_request(reg_.public_params(), nuav, rng_);
  const ClusterRecord& rec = reg_.cluster(challenge_);
  std::vector<MemberInfo> roster = rec.roster();
  AggregateOutput out =
      ch_aggregate(group, rec.ch, std::span<const JoinRequest>(&req, 1), roster, now_, rng_);
  Batch b{std::move(out.batch), {}};
  for (std::size_t l = 0; l < rec.members.size(); ++l)
    b.honest.push_back(cm_verify_and_respond(group, rec.members[l], rec.ch.pid,
                                             rec.members.size(), out.challenges[l], now_, opts_));
  return b;
}

std::uint64_t OracleSession::open_batch() {
  batches_.push_back(make_batch());
  return batches_.size() - 1;
}

std::uint64_t OracleSession::challenge_batch(std::size_t slot) {
  constexpr std::size_t kPool = 32;
  slot %= kPool;
  while (pool_.size() <= slot) pool_.push_back(open_batch());
  return pool_[slot];
}

std::uint64_t OracleSession::batch_t1(std::uint64_t batch) const {
  return batches_.at(batch).state.t1;
}

std::vector<CmResponse> OracleSession::visible_responses(std::uint64_t batch) const {
  const auto& honest = batches_.at(batch).honest;
  return {honest.begin() + 1, honest.end()};
}

MemberInfo OracleSession::fresh_nuav() {
  NuavCredential n = reg_.provision_nuav(0, challenge_);
  return {n.pid, n.pk};
}

Block32 OracleSession::fresh_euav() {
  return reg_.register_cm(0, source_, "euav-" + std::to_string(rid_counter_++)).pid;
}

OracleResponse OracleSession::query(QueryKind kind, const QueryArgs& args) {
  const auto& group = reg_.group();
  OracleResponse response;
  switch (kind) {
    case QueryKind::Registration: {
      RegistrationView v;
      v.role = args.role;
      v.gbs_pk = reg_.gbs(0).pk;
      if (args.role == Role::Ch) {
        ChCredential ch = reg_.register_ch(0, "adv-ch-" + std::to_string(rid_counter_++));
        v.pid = ch.pid;
        v.sk = ch.sk;
        v.pk = ch.pk;
        v.r = ch.r;
        v.h_cjt = hash_cjt(ch.cjt);
      } else if (args.role == Role::Cm) {
        CmCredential cm =
            reg_.register_cm(0, adversary_cluster(), "adv-cm-" + std::to_string(rid_counter_++));
        v.pid = cm.pid;
        v.sk = cm.sk;
        v.pk = cm.pk;
        v.r = cm.r;
      } else {
        NuavCredential n = reg_.provision_nuav(0, adversary_cluster());
        v.pid = n.pid;
        v.sk = n.sk;
        v.pk = n.pk;
        v.r = n.r;
        v.h_cjt = n.h_cjt;
      }
      response = v;
      break;
    }
    case QueryKind::JoiningRequest: {
      NuavCredential n = reg_.provision_nuav(0, challenge_);
      response = nuav_build_request(reg_.public_params(), n, rng_);
      break;
    }
    case QueryKind::CmVerification: {
      std::uint64_t id = open_batch();
      response = CmVerificationView{id, batches_[id].honest.front()};
      break;
    }
    case QueryKind::ChVerification: {
      Batch b = make_batch();
      response = ch_collect_and_verify(group, reg_.cluster(challenge_).ch, b.state, b.honest, now_,
                                       now_, opts_);
      break;
    }
    case QueryKind::CrossCluster: {
      Block32 pid = reg_.register_cm(0, source_, "xfer-" + std::to_string(rid_counter_++)).pid;
      response = source_ch_build_transfer(reg_.cluster(source_).ch, pid, now_);
      break;
    }
  }
  log_.push_back({kind, now_, response});
  advance(1);
  return response;
}

bool OracleSession::verify_join(const JoinRequest& req) {
  const ClusterRecord& rec = reg_.cluster(challenge_);
  try {
    std::vector<MemberInfo> roster = rec.roster();
    AggregateOutput out = ch_aggregate(reg_.group(), rec.ch, std::span<const JoinRequest>(&req, 1),
                                       roster, now_, rng_);
    cm_verify_and_respond(reg_.group(), rec.members.front(), rec.ch.pid, rec.members.size(),
                          out.challenges.front(), now_, opts_);
    return true;
  } catch (const ProtocolError&) {
    return false;
  }
}

bool OracleSession::verify_cm_response(std::uint64_t batch, const CmResponse& resp,
                                       std::uint64_t now) {
  Batch b = batches_.at(batch);
  b.honest.front() = resp;
  try {
    ch_collect_and_verify(reg_.group(), reg_.cluster(challenge_).ch, b.state, b.honest, now, now,
                          opts_);
    return true;
  } catch (const ProtocolError&) {
    return false;
  }
}

bool OracleSession::verify_peer(const PeerBroadcast& bc, std::uint64_t now) {
  const std::uint64_t n = reg_.cluster(challenge_).members.size();
  try {
    peer_ch_verify(reg_.group(), reg_.cluster(peer_).ch, bc, n * n, now, opts_);
    return true;
  } catch (const ProtocolError&) {
    return false;
  }
}

bool OracleSession::verify_transfer(const TransferRequest& req, std::uint64_t now) {
  ChCredential dest = reg_.cluster(peer_).ch;
  try {
    dest_ch_verify_transfer(dest, reg_, req, now, opts_);
    return true;
  } catch (const ProtocolError&) {
    return false;
  }
}

bool OracleSession::registration_identity_holds(const RegistrationView& v) const {
  const auto& group = reg_.group();
  if (!v.h_cjt || v.role != Role::Ch) return false;
  Scalar e = block_to_exponent(group, *v.h_cjt);
  return exp_g(group, v.sk) == mul(group, mod_exp(group, v.gbs_pk, e), v.pk);
}

OracleResponse dug_query(OracleSession& session, QueryKind kind, const QueryArgs& args) {
  return session.query(kind, args);
}

ForgeryStrategy parse_strategy(std::string_view name) {
  if (name == "random") return ForgeryStrategy::Random;
  if (name == "replay-stale") return ForgeryStrategy::ReplayStale;
  if (name == "splice-fields") return ForgeryStrategy::SpliceFields;
  throw ProtocolError(Errc::ConfigInvalid, "strategy " + std::string(name));
}

std::string_view strategy_name(ForgeryStrategy s) {
  switch (s) {
    case ForgeryStrategy::Random: return "random";
    case ForgeryStrategy::ReplayStale: return "replay-stale";
    case ForgeryStrategy::SpliceFields: return "splice-fields";
  }
  return "?";
}

namespace {

// Picks logged responses of one kind, querying more if the log is short.
template <class T>
std::vector<T> logged(OracleSession& s, QueryKind kind, std::size_t want) {
  std::vector<T> out;
  for (const auto& e : s.log())
    if (e.kind == kind) out.push_back(std::get<T>(e.response));
  while (out.size() < want) out.push_back(std::get<T>(s.query(kind)));
  return out;
}

template <class T>
std::pair<T, T> two_distinct(const std::vector<T>& pool, Rng& adv) {
  std::size_t a = adv.next() % pool.size();
  std::size_t b = (a + 1 + adv.next() % (pool.size() - 1)) % pool.size();
  return {pool[a], pool[b]};
}

bool forge_join(OracleSession& s, ForgeryStrategy strategy, Rng& adv) {
  const auto& group = s.group();
  MemberInfo id = s.fresh_nuav();
  JoinRequest f{id.pid, id.pk, s.challenge_ch_pid(), {}, {}};
  if (strategy == ForgeryStrategy::Random) {
    f.v = exp_g(group, adv.nonzero_scalar(group));
    f.sig = exp_g(group, adv.nonzero_scalar(group));
  } else {
    auto pool = logged<JoinRequest>(s, QueryKind::JoiningRequest, 2);
    auto [a, b] = two_distinct(pool, adv);
    // A logged request carries no timestamp; reusing it means moving its
    // signature onto the fresh identity.
    f.v = a.v;
    f.sig = strategy == ForgeryStrategy::ReplayStale ? a.sig : b.sig;
  }
  return s.verify_join(f);
}

bool forge_cm_response(OracleSession& s, ForgeryStrategy strategy, std::size_t trial, Rng& adv) {
  const auto& group = s.group();
  const std::uint64_t window = s.options().freshness_ms;
  if (strategy == ForgeryStrategy::ReplayStale) {
    auto pool = logged<CmVerificationView>(s, QueryKind::CmVerification, 2);
    const auto& v = pool[adv.next() % pool.size()];
    std::uint64_t late = s.batch_t1(v.batch) + window + 1 + adv.next() % 1000;
    return s.verify_cm_response(v.batch, v.response, late);
  }
  std::uint64_t batch = s.challenge_batch(trial / 4);
  const std::uint64_t t1 = s.batch_t1(batch);
  CmResponse f;
  f.t1 = t1;
  if (strategy == ForgeryStrategy::Random) {
    f.sig_cm = exp_g(group, adv.nonzero_scalar(group));
    f.c_cm = adv.block();
  } else {
    auto seen = s.visible_responses(batch);
    auto pool = logged<CmVerificationView>(s, QueryKind::CmVerification, 2);
    const auto& other = pool[adv.next() % pool.size()].response;
    const auto& peer = seen.at(adv.next() % seen.size());
    switch (adv.next() % 3) {
      case 0: f.sig_cm = other.sig_cm; f.c_cm = peer.c_cm; break;
      case 1: f.sig_cm = peer.sig_cm; f.c_cm = other.c_cm; break;
      default: f.sig_cm = peer.sig_cm; f.c_cm = peer.c_cm; break;
    }
  }
  return s.verify_cm_response(batch, f, t1);
}

bool forge_peer(OracleSession& s, ForgeryStrategy strategy, Rng& adv) {
  const auto& group = s.group();
  const std::uint64_t window = s.options().freshness_ms;
  if (strategy == ForgeryStrategy::Random) {
    PeerBroadcast f;
    f.sig_cms = exp_g(group, adv.nonzero_scalar(group));
    f.pk_cms = exp_g(group, adv.nonzero_scalar(group));
    f.c_ch = adv.block();
    f.q_ch = adv.block();
    f.t2 = s.now();
    return s.verify_peer(f, s.now());
  }
  auto pool = logged<PeerBroadcast>(s, QueryKind::ChVerification, 2);
  if (strategy == ForgeryStrategy::ReplayStale) {
    const auto& v = pool[adv.next() % pool.size()];
    return s.verify_peer(v, v.t2 + window + 1 + adv.next() % 1000);
  }
  auto [a, b] = two_distinct(pool, adv);
  PeerBroadcast f = a;
  switch (adv.next() % 3) {
    case 0: f.sig_cms = b.sig_cms; f.pk_cms = b.pk_cms; break;
    case 1: f.t2 = b.t2; break;
    default: f.q_ch = b.q_ch; break;
  }
  return s.verify_peer(f, std::max(a.t2, b.t2));
}

bool forge_transfer(OracleSession& s, ForgeryStrategy strategy, Rng& adv) {
  const std::uint64_t window = s.options().freshness_ms;
  if (strategy == ForgeryStrategy::Random) {
    TransferRequest f{adv.block(), s.fresh_euav(), s.now()};
    return s.verify_transfer(f, s.now());
  }
  auto pool = logged<TransferRequest>(s, QueryKind::CrossCluster, 2);
  if (strategy == ForgeryStrategy::ReplayStale) {
    const auto& v = pool[adv.next() % pool.size()];
    return s.verify_transfer(v, v.t3 + window + 1 + adv.next() % 1000);
  }
  auto [a, b] = two_distinct(pool, adv);
  TransferRequest f = a;
  if (adv.next() & 1)
    f.euav_pid = s.fresh_euav();
  else
    f.t3 = b.t3;
  return s.verify_transfer(f, std::max(a.t3, b.t3));
}

}  // namespace

bool dug_forgery_trial(OracleSession& session, ForgeryStrategy strategy, std::size_t trial,
                       Rng& adversary) {
  switch (trial % 4) {
    case 0: return forge_join(session, strategy, adversary);
    case 1: return forge_cm_response(session, strategy, trial, adversary);
    case 2: return forge_peer(session, strategy, adversary);
    default: return forge_transfer(session, strategy, adversary);
  }
}

DcgSession::DcgSession(GroupParams group, std::uint64_t seed, std::size_t n_members)
    : reg_(std::move(group), 1, derive_seed(seed, 1)), rng_(derive_seed(seed, 2)) {
  cluster_ = reg_.register_ch(0, "dcg-ch").cluster;
  for (std::size_t l = 0; l < n_members; ++l)
    reg_.register_cm(0, cluster_, "dcg-cm-" + std::to_string(l));
}

void DcgSession::register_pair(const Block32& m0, const Block32& m1) {
  if (m0 == m1 || seen_.count(m0) || seen_.count(m1)) throw ProtocolError(Errc::RepeatedChallenge);
  seen_.insert(m0);
  seen_.insert(m1);
}

Block32 dcg_keystream(const Block32& key) { return hash_to_block("dcg-stream", {ByteView(key)}); }

DcgSession::Round DcgSession::challenge(const Block32& m0, const Block32& m1) {
  const auto& group = reg_.group();
  const ClusterRecord& rec = reg_.cluster(cluster_);
  std::vector<Block32> roster;
  for (const auto& m : rec.members) roster.push_back(m.pid);
  const std::uint64_t t4 = now_++;

  Round round;
  DealerOutput deal = ch_init_update(group, rec.ch, roster, t4, rng_);
  for (const auto& init : deal.inits) round.transcript.push_back(encode(group, init));
  std::vector<MemberShareState> states(roster.size());
  std::vector<ShareEnvelope> envelopes;
  for (std::size_t l = 0; l < roster.size(); ++l) {
    envelopes.push_back(
        cm_recover_and_share(group, rec.members[l], roster, deal.inits[l], t4, states[l]));
    round.transcript.push_back(encode(group, envelopes.back()));
  }
  const Block32 key = encode_scalar32(deal.key_new);
  for (std::size_t l = 0; l < roster.size(); ++l)
    if (cm_reconstruct(group, states[l], envelopes, deal.inits[l]) != key)
      throw ProtocolError(Errc::ConfirmMismatch);
  reg_.install_key(cluster_, key);

  round.b = static_cast<int>(rng_.next() & 1);
  round.ciphertext = xor32(round.b ? m1 : m0, dcg_keystream(key));
  return round;
}

namespace {

std::size_t hamming(const Block32& a, const Block32& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
  return d;
}

}  // namespace

DcgAccuracy dcg_round(DcgSession& session, const Block32& m0, const Block32& m1,
                      std::size_t rounds, Rng& adversary) {
  session.register_pair(m0, m1);
  DcgAccuracy acc;
  for (std::size_t r = 0; r < rounds; ++r) {
    DcgSession::Round round = session.challenge(m0, m1);
    ++acc.rounds;
    int random_guess = static_cast<int>(adversary.next() & 1);
    if (random_guess == round.b) ++acc.random_correct;

    // Bet that the keystream leans towards a digest of the public rekey
    // transcript: pick the message whose implied keystream is closer.
    std::vector<ByteView> parts(round.transcript.begin(), round.transcript.end());
    Block32 predicted = hash_to_block("dcg-guess", parts);
    std::size_t d0 = hamming(xor32(round.ciphertext, m0), predicted);
    std::size_t d1 = hamming(xor32(round.ciphertext, m1), predicted);
    int corr_guess = d1 < d0 ? 1 : 0;
    if (corr_guess == round.b) ++acc.correlation_correct;
  }
  return acc;
}

double unlink_trial(std::size_t n_trials, std::uint64_t seed, const UnlinkOptions& opts) {
  if (n_trials == 0) return 0.0;
  Rng rng(seed);
  const Block32 ct = rng.block();
  ChCredential first, second;
  first.ct = second.ct = ct;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n_trials; ++i) {
    const bool same = rng.next() & 1;
    const Block32 x = rng.block(), y = rng.block();
    const std::uint64_t t1 = 1'000'000 + rng.next() % 1'000'000;
    const std::uint64_t t0 = t1 - 1 - rng.next() % 1000;
    const std::uint64_t t2 = t1 + 1 + rng.next() % 1000;

    first.member_secrets = {{x, Scalar(1ul)}};
    TransferRequest a = source_ch_build_transfer(first, x, t1);
    // Either EUAV arrives at the second cluster under a pseudonym issued by
    // an earlier transfer.
    Block32 moved = same ? transfer_new_pid(ct, x, t1, opts.paper_literal)
                         : transfer_new_pid(ct, y, t0, opts.paper_literal);
    second.member_secrets = {{moved, Scalar(1ul)}};
    TransferRequest b = source_ch_build_transfer(second, moved, t2);

    bool guess_same;
    if (opts.reveal_ct) {
      guess_same = transfer_new_pid(ct, a.euav_pid, a.t3, opts.paper_literal) == b.euav_pid;
    } else {
      // If the second PID is the first transfer's check value, C xor PID
      // exposes CT, and CT must then explain the second request too.
      Block32 ct_guess = xor32(a.c, b.euav_pid);
      Block32 check = transfer_new_pid(ct_guess, b.euav_pid, b.t3, true);
      guess_same = xor32(check, ct_guess) == b.c;
    }
    if (guess_same == same) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n_trials);
}

std::vector<SuiteRow> run_adversary_suite(const SuiteConfig& cfg) {
  const GroupParams group = group_preset(cfg.group);
  std::vector<SuiteRow> rows;
  const ForgeryStrategy strategies[] = {ForgeryStrategy::Random, ForgeryStrategy::ReplayStale,
                                        ForgeryStrategy::SpliceFields};
  for (std::size_t k = 0; k < 3; ++k) {
    OracleSession session(group, derive_seed(cfg.seed, 10 + k));
    for (QueryKind q : {QueryKind::JoiningRequest, QueryKind::CmVerification,
                        QueryKind::ChVerification, QueryKind::CrossCluster})
      for (int i = 0; i < 4; ++i) session.query(q);
    Rng adv(derive_seed(cfg.seed, 20 + k));
    std::size_t wins = 0;
    for (std::size_t t = 0; t < cfg.dug_trials; ++t)
      wins += dug_forgery_trial(session, strategies[k], t, adv) ? 1 : 0;
    rows.push_back({"dug-" + std::string(strategy_name(strategies[k])), cfg.dug_trials, wins,
                    "wins == 0", wins == 0});
  }

  DcgSession dcg(group, derive_seed(cfg.seed, 30));
  Rng adv(derive_seed(cfg.seed, 31));
  Block32 m0 = adv.block(), m1 = adv.block();
  DcgAccuracy acc = dcg_round(dcg, m0, m1, cfg.dcg_rounds, adv);
  rows.push_back({"dcg-random", acc.rounds, acc.random_correct, "|accuracy - 0.5| <= 0.02",
                  std::abs(acc.random() - 0.5) <= 0.02});
  rows.push_back({"dcg-correlation", acc.rounds, acc.correlation_correct,
                  "|accuracy - 0.5| <= 0.02", std::abs(acc.correlation() - 0.5) <= 0.02});

  double u = unlink_trial(cfg.unlink_trials, derive_seed(cfg.seed, 40));
  double sigma = std::sqrt(0.25 / static_cast<double>(cfg.unlink_trials));
  std::ostringstream th;
  th << "accuracy <= " << std::fixed << std::setprecision(4) << 0.5 + 3 * sigma;
  rows.push_back({"unlink", cfg.unlink_trials,
                  static_cast<std::size_t>(std::llround(u * cfg.unlink_trials)), th.str(),
                  u <= 0.5 + 3 * sigma});
  return rows;
}

std::string suite_csv(const std::vector<SuiteRow>& rows) {
  std::ostringstream os;
  os << "suite,trials,wins,threshold,pass\n";
  for (const auto& r : rows)
    os << r.suite << ',' << r.trials << ',' << r.wins << ',' << r.threshold << ','
       << (r.pass ? "pass" : "fail") << '\n';
  return os.str();
}

}  // namespace clusterauth
