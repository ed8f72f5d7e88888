#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clusterauth/join.hpp"

namespace clusterauth {

enum class QueryKind { Registration, JoiningRequest, CmVerification, ChVerification, CrossCluster };

/// "registration", "joining_request", "cm_verification", "ch_verification",
/// "cross_cluster"; anything else is UnknownQueryKind.
QueryKind parse_query_kind(std::string_view name);
std::string_view query_kind_name(QueryKind kind);

struct QueryArgs {
  Role role = Role::Cm;
};

/// What a registration query hands the adversary: the new entity's own
/// credential. The entity always lives in the adversary's cluster, never in
/// the challenge cluster.
struct RegistrationView {
  Role role = Role::Cm;
  Block32 pid{};
  Scalar sk;
  GroupElem pk;
  Scalar r;
  /// CH and NUAV registrations only.
  std::optional<Block32> h_cjt;
  GroupElem gbs_pk;
};

struct CmVerificationView {
  std::uint64_t batch = 0;
  CmResponse response;
};

using OracleResponse =
    std::variant<RegistrationView, JoinRequest, CmVerificationView, PeerBroadcast, TransferRequest>;

struct LogEntry {
  QueryKind kind;
  std::uint64_t time = 0;
  OracleResponse response;
};

/// Challenger side of the unforgeability game. Secrets stay inside; the
/// public surface is the query interface, the log of issued responses,
/// public identities and the honest verifiers.
class OracleSession {
 public:
  OracleSession(GroupParams group, std::uint64_t seed, ProtocolOptions opts = {});

  const PublicParams& public_params() const;
  const GroupParams& group() const;
  const ProtocolOptions& options() const { return opts_; }
  std::uint64_t now() const { return now_; }
  void advance(std::uint64_t ms) { now_ += ms; }

  OracleResponse query(QueryKind kind, const QueryArgs& args = {});
  const std::vector<LogEntry>& log() const { return log_; }

  Block32 challenge_ch_pid() const;
  /// A provisioned NUAV of the challenge cluster that no query touched.
  MemberInfo fresh_nuav();
  /// A source-cluster member that was never transferred.
  Block32 fresh_euav();
  /// Opens an honest batch whose slot-0 response is withheld; the other
  /// members' responses are what an eavesdropper would see.
  std::uint64_t open_batch();
  /// One of a fixed pool of such batches, opened on first use.
  std::uint64_t challenge_batch(std::size_t slot);
  std::uint64_t batch_t1(std::uint64_t batch) const;
  std::vector<CmResponse> visible_responses(std::uint64_t batch) const;

  // Honest verifiers. They never throw; false means rejected.
  bool verify_join(const JoinRequest& req);
  bool verify_cm_response(std::uint64_t batch, const CmResponse& resp, std::uint64_t now);
  bool verify_peer(const PeerBroadcast& bc, std::uint64_t now);
  bool verify_transfer(const TransferRequest& req, std::uint64_t now);

  /// Harness-only check of the registration identity g^sk = pk_GBS^{H(CJT)} pk.
  bool registration_identity_holds(const RegistrationView& view) const;

 private:
  struct Batch {
    JoinBatch state;
    std::vector<CmResponse> honest;
  };
  Batch make_batch();
  ClusterId adversary_cluster();

  ProtocolOptions opts_;
  Registry reg_;
  Rng rng_;
  std::uint64_t now_ = 1'000'000;
  ClusterId challenge_ = 0, peer_ = 0, source_ = 0;
  std::optional<ClusterId> adversary_;
  std::vector<Batch> batches_;
  std::vector<std::uint64_t> pool_;
  std::vector<LogEntry> log_;
  std::size_t rid_counter_ = 0;
};

OracleResponse dug_query(OracleSession& session, QueryKind kind, const QueryArgs& args = {});

enum class ForgeryStrategy { Random, ReplayStale, SpliceFields };
ForgeryStrategy parse_strategy(std::string_view name);
std::string_view strategy_name(ForgeryStrategy s);

/// One forgery attempt. The target verifier cycles with `trial` over join
/// request, CM response, peer broadcast and transfer request. The
/// adversary only reads the session log and public identities.
bool dug_forgery_trial(OracleSession& session, ForgeryStrategy strategy, std::size_t trial,
                       Rng& adversary);

/// Challenger of the confidentiality game: every round rekeys a cluster and
/// encrypts one of two messages under the new key.
class DcgSession {
 public:
  DcgSession(GroupParams group, std::uint64_t seed, std::size_t n_members = 2);

  struct Round {
    std::vector<Bytes> transcript;
    Block32 ciphertext{};
    int b = 0;
  };
  Round challenge(const Block32& m0, const Block32& m1);
  /// Rejects equal messages and messages seen by an earlier call.
  void register_pair(const Block32& m0, const Block32& m1);

 private:
  Registry reg_;
  Rng rng_;
  ClusterId cluster_ = 0;
  std::uint64_t now_ = 1'000'000;
  std::set<Block32> seen_;
};

Block32 dcg_keystream(const Block32& key);

struct DcgAccuracy {
  std::size_t rounds = 0;
  std::size_t random_correct = 0;
  std::size_t correlation_correct = 0;
  double random() const { return rounds ? double(random_correct) / rounds : 0.0; }
  double correlation() const { return rounds ? double(correlation_correct) / rounds : 0.0; }
};

DcgAccuracy dcg_round(DcgSession& session, const Block32& m0, const Block32& m1,
                      std::size_t rounds, Rng& adversary);

struct UnlinkOptions {
  bool paper_literal = false;
  /// Hand CT to the distinguisher (sanity inversion).
  bool reveal_ct = false;
};

/// Pairs of transfers, half by the same EUAV (second one under its new PID)
/// and half by different EUAVs. Returns the distinguisher's accuracy.
double unlink_trial(std::size_t n_trials, std::uint64_t seed, const UnlinkOptions& opts = {});

struct SuiteRow {
  std::string suite;
  std::size_t trials = 0;
  std::size_t wins = 0;
  std::string threshold;
  bool pass = false;
};

struct SuiteConfig {
  std::size_t dug_trials = 10'000;
  std::size_t dcg_rounds = 10'000;
  std::size_t unlink_trials = 10'000;
  std::uint64_t seed = 1;
  std::string group = "full";
};

std::vector<SuiteRow> run_adversary_suite(const SuiteConfig& cfg);
/// Header "suite,trials,wins,threshold,pass".
std::string suite_csv(const std::vector<SuiteRow>& rows);

}  // namespace clusterauth
