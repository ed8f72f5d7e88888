#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clusterauth/group.hpp"

namespace clusterauth {

using ClusterId = std::uint32_t;

struct PublicParams {
  GroupParams group;
  std::vector<GroupElem> gbs_pubs;
};

Bytes encode_public_params(const PublicParams& pp);
PublicParams decode_public_params(ByteView bytes);

enum class Role { Ch, Cm, Nuav };

struct PidRecord {
  Role role = Role::Cm;
  ClusterId cluster = 0;
  bool superseded = false;
};

struct ChCredential {
  Block32 pid{};
  Block32 key{};
  Block32 cjt{};
  Scalar sk;
  GroupElem pk;
  Scalar r;
  Block32 ct{};
  /// Member PID -> sk, provisioned by the GBS so the CH can mask rekey shares.
  std::map<Block32, Scalar> member_secrets;
  ClusterId cluster = 0;
  std::uint32_t gbs = 0;
};

struct CmCredential {
  Block32 pid{};
  Scalar sk;
  GroupElem pk;
  Block32 key{};
  Scalar r;
  ClusterId cluster = 0;
};

struct NuavCredential {
  Block32 pid{};
  Scalar sk;
  GroupElem pk;
  Scalar r;
  Block32 h_cjt{};
  GroupElem ch_pk;
  Block32 ch_pid{};
  ClusterId cluster = 0;
  std::uint32_t gbs = 0;
};

/// Public view of a cluster member, the roster entry every role may hold.
struct MemberInfo {
  Block32 pid{};
  GroupElem pk;
};

struct GbsState {
  Scalar sk;
  GroupElem pk;
  Block32 ct{};
  std::map<Block32, PidRecord> db;
  std::set<ClusterId> clusters;
  /// Provisioned but not yet joined NUAVs: pid -> pk.
  std::map<Block32, GroupElem> pending_nuavs;
};

struct ClusterRecord {
  ClusterId id = 0;
  std::uint32_t gbs = 0;
  ChCredential ch;
  std::vector<CmCredential> members;

  std::vector<MemberInfo> roster() const;
};

/// PID = H(sk, r).
Block32 derive_pid(const Scalar& sk, const Scalar& r);
/// H(CJT); its exponent form is block_to_exponent of this digest.
Block32 hash_cjt(const Block32& cjt);

/// All GBSs of one swarm plus the clusters they administer. Registration
/// messages travel over the secure channel the scheme assumes, so they are
/// plain calls here. Every PID write is mirrored to all GBS databases.
class Registry {
 public:
  /// forced_sks pins GBS secret keys (tests); missing entries are random.
  Registry(GroupParams group, std::size_t n_gbs, std::uint64_t seed,
           std::vector<Scalar> forced_sks = {});

  const GroupParams& group() const { return pp_.group; }
  const PublicParams& public_params() const { return pp_; }
  std::size_t gbs_count() const { return gbs_.size(); }
  const GbsState& gbs(std::uint32_t i) const { return gbs_.at(i); }

  ChCredential register_ch(std::uint32_t gbs, const std::string& rid);
  CmCredential register_cm(std::uint32_t gbs, ClusterId cluster, const std::string& rid);
  NuavCredential provision_nuav(std::uint32_t gbs, ClusterId cluster);

  bool db_lookup(std::uint32_t gbs, const Block32& pid) const;
  std::optional<PidRecord> db_record(std::uint32_t gbs, const Block32& pid) const;
  void db_insert(std::uint32_t gbs, const Block32& pid, PidRecord record);

  /// Join step 7: the CH reports admitted NUAVs. Each (pid, pk) must match a
  /// provisioning record of this GBS.
  void record_joined(std::uint32_t gbs, ClusterId cluster, const std::vector<MemberInfo>& nuavs);
  /// Turns joined NUAVs into cluster members so later rekeys include them.
  void admit_members(ClusterId cluster, const std::vector<NuavCredential>& nuavs);

  /// Cross-cluster bookkeeping: retire old_pid, register new_pid in the
  /// destination cluster and move the member record.
  void supersede(std::uint32_t gbs, const Block32& old_pid, const Block32& new_pid,
                 ClusterId destination);

  void install_key(ClusterId cluster, const Block32& key);

  const ClusterRecord& cluster(ClusterId id) const;
  std::vector<ClusterId> clusters_of(std::uint32_t gbs) const;

  /// "pid: <hex>, <role>, <cluster>" lines, sorted by pid.
  std::string dump_db(std::uint32_t gbs) const;

 private:
  GbsState& gbs_mut(std::uint32_t i);
  ClusterRecord& cluster_mut(std::uint32_t gbs, ClusterId id);
  Block32 fresh_pid(Scalar& sk, Scalar& r);
  bool pid_taken(const Block32& pid) const;

  PublicParams pp_;
  std::vector<GbsState> gbs_;
  std::map<ClusterId, ClusterRecord> clusters_;
  std::set<std::string> rids_;
  Rng rng_;
};

}  // namespace clusterauth
