#include "clusterauth/registry.hpp"

#include <algorithm>
#include <sstream>

#include "clusterauth/errors.hpp"
#include "clusterauth/messages.hpp"

namespace clusterauth {

namespace {

void put_u16(Bytes& out, std::size_t v) {
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void put_int(Bytes& out, const mpz_class& v) {
  std::size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  put_u16(out, n);
  std::size_t at = out.size();
  out.resize(at + n);
  mpz_export(out.data() + at, nullptr, 1, 1, 1, 0, v.get_mpz_t());
}

struct Cursor {
  ByteView in;
  std::size_t pos = 0;

  ByteView take(std::size_t n) {
    if (in.size() - pos < n) throw ProtocolError(Errc::Malformed, "truncated public params");
    auto s = in.subspan(pos, n);
    pos += n;
    return s;
  }
  std::size_t u16() {
    auto s = take(2);
    return (std::size_t(s[0]) << 8) | s[1];
  }
  mpz_class integer() {
    auto s = take(u16());
    mpz_class v;
    if (!s.empty()) mpz_import(v.get_mpz_t(), s.size(), 1, 1, 1, 0, s.data());
    return v;
  }
};

// Identity check outside the instrumented primitives so that issuance
// assertions do not show up in cost measurements.
bool ch_identity_holds(const GroupParams& group, const ChCredential& ch, const GroupElem& gbs_pk,
                       const Scalar& e) {
  mpz_class lhs, rhs;
  mpz_powm(lhs.get_mpz_t(), group.g.get_mpz_t(), ch.sk.value().get_mpz_t(), group.p.get_mpz_t());
  mpz_powm(rhs.get_mpz_t(), gbs_pk.value().get_mpz_t(), e.value().get_mpz_t(), group.p.get_mpz_t());
  rhs = (rhs * ch.pk.value()) % group.p;
  return lhs == rhs;
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Ch: return "ch";
    case Role::Cm: return "cm";
    case Role::Nuav: return "nuav";
  }
  return "?";
}

}  // namespace

Bytes encode_public_params(const PublicParams& pp) {
  Bytes out{static_cast<std::uint8_t>(MessageKind::PublicParams)};
  put_int(out, pp.group.p);
  put_int(out, pp.group.q);
  put_int(out, pp.group.g);
  put_u16(out, pp.gbs_pubs.size());
  for (const auto& pk : pp.gbs_pubs) {
    Bytes e = encode_elem(pp.group, pk);
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

PublicParams decode_public_params(ByteView bytes) {
  if (bytes.empty() || bytes[0] != static_cast<std::uint8_t>(MessageKind::PublicParams))
    throw ProtocolError(Errc::Malformed, "unexpected message type");
  Cursor c{bytes, 1};
  PublicParams pp;
  pp.group.p = c.integer();
  pp.group.q = c.integer();
  pp.group.g = c.integer();
  validate_group(pp.group);
  if (pp.group == tiny_group()) pp.group.name = "tiny";
  else if (pp.group == full_group()) pp.group.name = "full";
  else pp.group.name = "custom";
  std::size_t n = c.u16();
  for (std::size_t i = 0; i < n; ++i)
    pp.gbs_pubs.push_back(decode_elem(pp.group, c.take(pp.group.elem_bytes())));
  if (c.pos != bytes.size()) throw ProtocolError(Errc::Malformed, "trailing bytes");
  return pp;
}

std::vector<MemberInfo> ClusterRecord::roster() const {
  std::vector<MemberInfo> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back({m.pid, m.pk});
  return out;
}

Block32 derive_pid(const Scalar& sk, const Scalar& r) {
  Block32 a = encode_scalar32(sk), b = encode_scalar32(r);
  return hash_to_block("pid", {ByteView(a), ByteView(b)});
}

Block32 hash_cjt(const Block32& cjt) { return hash_to_block("cjt", {ByteView(cjt)}); }

Registry::Registry(GroupParams group, std::size_t n_gbs, std::uint64_t seed,
                   std::vector<Scalar> forced_sks)
    : rng_(seed) {
  validate_group(group);
  if (n_gbs == 0) throw ProtocolError(Errc::ConfigInvalid, "at least one GBS required");
  pp_.group = std::move(group);
  Block32 ct = rng_.block();
  for (std::size_t i = 0; i < n_gbs; ++i) {
    GbsState s;
    s.sk = i < forced_sks.size() ? reduce(pp_.group, forced_sks[i].value())
                                 : rng_.nonzero_scalar(pp_.group);
    s.pk = exp_g(pp_.group, s.sk);
    s.ct = ct;
    pp_.gbs_pubs.push_back(s.pk);
    gbs_.push_back(std::move(s));
  }
}

GbsState& Registry::gbs_mut(std::uint32_t i) {
  if (i >= gbs_.size()) throw ProtocolError(Errc::ConfigInvalid, "no such GBS");
  return gbs_[i];
}

ClusterRecord& Registry::cluster_mut(std::uint32_t gbs, ClusterId id) {
  auto it = clusters_.find(id);
  if (it == clusters_.end() || it->second.gbs != gbs) throw ProtocolError(Errc::UnknownCluster);
  return it->second;
}

const ClusterRecord& Registry::cluster(ClusterId id) const {
  auto it = clusters_.find(id);
  if (it == clusters_.end()) throw ProtocolError(Errc::UnknownCluster);
  return it->second;
}

std::vector<ClusterId> Registry::clusters_of(std::uint32_t gbs) const {
  const auto& s = gbs_.at(gbs).clusters;
  return {s.begin(), s.end()};
}

bool Registry::pid_taken(const Block32& pid) const {
  return gbs_.front().db.count(pid) || gbs_.front().pending_nuavs.count(pid);
}

Block32 Registry::fresh_pid(Scalar& sk, Scalar& r) {
  // PIDs must stay unique across the swarm, which matters in the tiny group
  // where only (q-1)^2 of them exist.
  for (int attempt = 0; attempt < 1 << 16; ++attempt) {
    sk = rng_.nonzero_scalar(pp_.group);
    r = rng_.nonzero_scalar(pp_.group);
    Block32 pid = derive_pid(sk, r);
    if (!pid_taken(pid)) return pid;
  }
  throw ProtocolError(Errc::ConfigInvalid, "pseudonym space exhausted");
}

ChCredential Registry::register_ch(std::uint32_t gbs_index, const std::string& rid) {
  GbsState& gbs = gbs_mut(gbs_index);
  if (rids_.count(rid)) throw ProtocolError(Errc::DuplicateRegistration, rid);
  const auto& group = pp_.group;

  ChCredential ch;
  ch.cjt = rng_.block();
  ch.key = encode_scalar32(rng_.scalar(group));
  ch.ct = gbs.ct;
  ch.gbs = gbs_index;
  Scalar e = block_to_exponent(group, hash_cjt(ch.cjt));
  // sk_CH must be invertible (it is used as sk_CH^{-1} during aggregation).
  do {
    ch.r = rng_.nonzero_scalar(group);
    ch.sk = scalar_add(group, ch.r, scalar_mul(group, gbs.sk, e));
  } while (ch.sk.is_zero() || pid_taken(ch.pid = derive_pid(ch.sk, ch.r)));
  ch.pk = exp_g(group, ch.r);
  if (!ch_identity_holds(group, ch, gbs.pk, e))
    throw ProtocolError(Errc::InvalidGroup, "CH credential identity failed");

  ClusterId id = static_cast<ClusterId>(clusters_.size());
  ch.cluster = id;
  rids_.insert(rid);
  ClusterRecord rec;
  rec.id = id;
  rec.gbs = gbs_index;
  rec.ch = ch;
  clusters_.emplace(id, std::move(rec));
  gbs.clusters.insert(id);
  db_insert(gbs_index, ch.pid, {Role::Ch, id, false});
  return ch;
}

CmCredential Registry::register_cm(std::uint32_t gbs_index, ClusterId id, const std::string& rid) {
  gbs_mut(gbs_index);
  ClusterRecord& rec = cluster_mut(gbs_index, id);
  if (rids_.count(rid)) throw ProtocolError(Errc::DuplicateRegistration, rid);
  CmCredential cm;
  cm.pid = fresh_pid(cm.sk, cm.r);
  cm.pk = exp_g(pp_.group, cm.sk);
  cm.key = rec.ch.key;
  cm.cluster = id;
  rids_.insert(rid);
  db_insert(gbs_index, cm.pid, {Role::Cm, id, false});
  rec.ch.member_secrets[cm.pid] = cm.sk;
  rec.members.push_back(cm);
  return cm;
}

NuavCredential Registry::provision_nuav(std::uint32_t gbs_index, ClusterId id) {
  GbsState& gbs = gbs_mut(gbs_index);
  const ClusterRecord& rec = cluster_mut(gbs_index, id);
  NuavCredential n;
  n.pid = fresh_pid(n.sk, n.r);
  n.pk = exp_g(pp_.group, n.sk);
  n.h_cjt = hash_cjt(rec.ch.cjt);
  n.ch_pk = rec.ch.pk;
  n.ch_pid = rec.ch.pid;
  n.cluster = id;
  n.gbs = gbs_index;
  gbs.pending_nuavs[n.pid] = n.pk;
  return n;
}

bool Registry::db_lookup(std::uint32_t gbs, const Block32& pid) const {
  auto rec = db_record(gbs, pid);
  return rec && !rec->superseded;
}

std::optional<PidRecord> Registry::db_record(std::uint32_t gbs, const Block32& pid) const {
  const auto& db = gbs_.at(gbs).db;
  auto it = db.find(pid);
  if (it == db.end()) return std::nullopt;
  return it->second;
}

void Registry::db_insert(std::uint32_t gbs_index, const Block32& pid, PidRecord record) {
  gbs_mut(gbs_index);
  for (const auto& s : gbs_)
    if (s.db.count(pid)) throw ProtocolError(Errc::DuplicateInsert);
  for (auto& s : gbs_) s.db.emplace(pid, record);
}

void Registry::record_joined(std::uint32_t gbs_index, ClusterId cluster,
                             const std::vector<MemberInfo>& nuavs) {
  GbsState& gbs = gbs_mut(gbs_index);
  cluster_mut(gbs_index, cluster);
  for (const auto& n : nuavs) {
    auto it = gbs.pending_nuavs.find(n.pid);
    if (it == gbs.pending_nuavs.end() || !(it->second == n.pk))
      throw ProtocolError(Errc::UnprovisionedNuav);
  }
  for (std::size_t i = 0; i < nuavs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (nuavs[i].pid == nuavs[j].pid) throw ProtocolError(Errc::DuplicateInsert);
  for (const auto& n : nuavs) {
    db_insert(gbs_index, n.pid, {Role::Nuav, cluster, false});
    gbs.pending_nuavs.erase(n.pid);
  }
}

void Registry::admit_members(ClusterId id, const std::vector<NuavCredential>& nuavs) {
  auto it = clusters_.find(id);
  if (it == clusters_.end()) throw ProtocolError(Errc::UnknownCluster);
  ClusterRecord& rec = it->second;
  for (const auto& n : nuavs) {
    if (!db_lookup(rec.gbs, n.pid)) throw ProtocolError(Errc::UnknownPid, "NUAV not joined");
    for (auto& s : gbs_) {
      auto d = s.db.find(n.pid);
      if (d != s.db.end()) d->second.cluster = id;
    }
    CmCredential cm;
    cm.pid = n.pid;
    cm.sk = n.sk;
    cm.pk = n.pk;
    cm.r = n.r;
    cm.key = rec.ch.key;
    cm.cluster = id;
    rec.ch.member_secrets[cm.pid] = cm.sk;
    rec.members.push_back(cm);
  }
}

void Registry::supersede(std::uint32_t gbs_index, const Block32& old_pid, const Block32& new_pid,
                         ClusterId destination) {
  if (!db_lookup(gbs_index, old_pid)) throw ProtocolError(Errc::UnknownPid);
  auto rec = *db_record(gbs_index, old_pid);
  auto dest = clusters_.find(destination);
  if (dest == clusters_.end()) throw ProtocolError(Errc::UnknownCluster);
  db_insert(gbs_index, new_pid, {rec.role, destination, false});
  for (auto& s : gbs_) s.db[old_pid].superseded = true;

  auto src = clusters_.find(rec.cluster);
  if (src == clusters_.end()) return;
  auto& members = src->second.members;
  auto m = std::find_if(members.begin(), members.end(),
                        [&](const CmCredential& c) { return c.pid == old_pid; });
  if (m == members.end()) return;
  CmCredential moved = *m;
  members.erase(m);
  src->second.ch.member_secrets.erase(old_pid);
  moved.pid = new_pid;
  moved.cluster = destination;
  moved.key = dest->second.ch.key;
  dest->second.ch.member_secrets[new_pid] = moved.sk;
  dest->second.members.push_back(moved);
}

void Registry::install_key(ClusterId id, const Block32& key) {
  auto it = clusters_.find(id);
  if (it == clusters_.end()) throw ProtocolError(Errc::UnknownCluster);
  it->second.ch.key = key;
  for (auto& m : it->second.members) m.key = key;
}

std::string Registry::dump_db(std::uint32_t gbs) const {
  std::ostringstream os;
  for (const auto& [pid, rec] : gbs_.at(gbs).db) {
    os << "pid: " << to_hex(pid) << ", " << role_name(rec.role) << ", " << rec.cluster;
    if (rec.superseded) os << ", superseded";
    os << '\n';
  }
  return os.str();
}

}  // namespace clusterauth
