#include <gtest/gtest.h>

#include <set>

#include "clusterauth/errors.hpp"
#include "clusterauth/registry.hpp"

using namespace clusterauth;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ProtocolError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ProtocolError thrown";
  return Errc::ProtocolAbort;
}

}  // namespace

TEST(Setup, ForcedGbsKeyGivesKnownPublicKey) {
  Registry reg(tiny_group(), 1, 1, {Scalar(3ul)});
  EXPECT_EQ(reg.gbs(0).pk, GroupElem(8ul));
  EXPECT_EQ(reg.public_params().gbs_pubs.at(0), GroupElem(8ul));
}

TEST(Setup, AllStationsShareOneCrossClusterToken) {
  Registry reg(full_group(), 3, 2);
  EXPECT_EQ(reg.gbs(0).ct, reg.gbs(1).ct);
  EXPECT_EQ(reg.gbs(1).ct, reg.gbs(2).ct);
  EXPECT_NE(reg.gbs(0).pk, reg.gbs(1).pk);
  EXPECT_THROW(Registry(full_group(), 0, 1), ProtocolError);
}

TEST(Setup, PublicParamsRoundTrip) {
  Registry reg(full_group(), 2, 3);
  PublicParams back = decode_public_params(encode_public_params(reg.public_params()));
  EXPECT_EQ(back.group, reg.group());
  EXPECT_EQ(back.gbs_pubs, reg.public_params().gbs_pubs);
  Bytes enc = encode_public_params(reg.public_params());
  enc.push_back(0);
  EXPECT_THROW(decode_public_params(enc), ProtocolError);
}

TEST(RegisterCh, CredentialIdentityHolds) {
  for (const GroupParams& g : {tiny_group(), full_group()}) {
    Registry reg(g, 2, 4);
    for (int i = 0; i < 20; ++i) {
      std::uint32_t s = i % 2;
      ChCredential ch = reg.register_ch(s, "ch" + std::to_string(i));
      Scalar e = block_to_exponent(g, hash_cjt(ch.cjt));
      // g^{sk} = pk_GBS^{H(CJT)} * pk, checked through an independent route.
      EXPECT_EQ(exp_g(g, ch.sk), mul(g, mod_exp(g, reg.gbs(s).pk, e), ch.pk));
      EXPECT_EQ(ch.pid, derive_pid(ch.sk, ch.r));
      EXPECT_EQ(ch.ct, reg.gbs(0).ct);
    }
  }
}

TEST(RegisterCh, DistinctSecretsAndDuplicateRid) {
  Registry reg(full_group(), 1, 5);
  ChCredential a = reg.register_ch(0, "a");
  ChCredential b = reg.register_ch(0, "b");
  EXPECT_NE(a.cjt, b.cjt);
  EXPECT_NE(a.key, b.key);
  EXPECT_NE(a.pid, b.pid);
  EXPECT_EQ(code_of([&] { reg.register_ch(0, "a"); }), Errc::DuplicateRegistration);
  EXPECT_EQ(code_of([&] { reg.register_cm(0, a.cluster, "b"); }), Errc::DuplicateRegistration);
}

TEST(RegisterCm, SharesClusterKeyAndIsKnownToCh) {
  Registry reg(full_group(), 1, 6);
  ChCredential ch = reg.register_ch(0, "ch");
  CmCredential cm = reg.register_cm(0, ch.cluster, "cm");
  EXPECT_EQ(cm.key, ch.key);
  EXPECT_EQ(cm.pk, exp_g(reg.group(), cm.sk));
  EXPECT_EQ(cm.pid, derive_pid(cm.sk, cm.r));
  const ClusterRecord& rec = reg.cluster(ch.cluster);
  ASSERT_EQ(rec.members.size(), 1u);
  EXPECT_EQ(rec.ch.member_secrets.at(cm.pid), cm.sk);
  EXPECT_TRUE(reg.db_lookup(0, cm.pid));
  EXPECT_EQ(code_of([&] { reg.register_cm(0, 99, "x"); }), Errc::UnknownCluster);
}

TEST(ProvisionNuav, CarriesClusterContext) {
  Registry reg(full_group(), 1, 7);
  ChCredential ch = reg.register_ch(0, "ch");
  NuavCredential n = reg.provision_nuav(0, ch.cluster);
  EXPECT_EQ(n.h_cjt, hash_cjt(ch.cjt));
  EXPECT_EQ(n.ch_pk, ch.pk);
  EXPECT_EQ(n.ch_pid, ch.pid);
  EXPECT_FALSE(reg.db_lookup(0, n.pid));
  EXPECT_EQ(reg.gbs(0).pending_nuavs.count(n.pid), 1u);
}

TEST(Database, LookupInsertSupersede) {
  Registry reg(tiny_group(), 2, 8);
  ChCredential a = reg.register_ch(0, "a");
  ChCredential b = reg.register_ch(1, "b");
  Rng rng(1);
  Block32 pid = rng.block();
  EXPECT_FALSE(reg.db_lookup(0, pid));
  reg.db_insert(0, pid, {Role::Cm, a.cluster, false});
  EXPECT_TRUE(reg.db_lookup(0, pid));
  EXPECT_TRUE(reg.db_lookup(1, pid));
  EXPECT_EQ(code_of([&] { reg.db_insert(1, pid, {Role::Cm, a.cluster, false}); }),
            Errc::DuplicateInsert);

  CmCredential cm = reg.register_cm(0, a.cluster, "cm");
  Block32 fresh = rng.block();
  reg.supersede(0, cm.pid, fresh, b.cluster);
  EXPECT_FALSE(reg.db_lookup(0, cm.pid));
  EXPECT_TRUE(reg.db_record(0, cm.pid)->superseded);
  EXPECT_TRUE(reg.db_lookup(1, fresh));
  EXPECT_TRUE(reg.cluster(a.cluster).members.empty());
  ASSERT_EQ(reg.cluster(b.cluster).members.size(), 1u);
  EXPECT_EQ(reg.cluster(b.cluster).members[0].pid, fresh);
  EXPECT_EQ(reg.cluster(b.cluster).members[0].key, b.key);
  EXPECT_EQ(reg.cluster(b.cluster).ch.member_secrets.count(fresh), 1u);
  EXPECT_EQ(code_of([&] { reg.supersede(0, cm.pid, rng.block(), b.cluster); }), Errc::UnknownPid);
}

TEST(Database, RecordJoinedNeedsProvisioning) {
  Registry reg(full_group(), 1, 9);
  ChCredential ch = reg.register_ch(0, "ch");
  NuavCredential n = reg.provision_nuav(0, ch.cluster);
  Rng rng(2);
  EXPECT_EQ(code_of([&] { reg.record_joined(0, ch.cluster, {{rng.block(), n.pk}}); }),
            Errc::UnprovisionedNuav);
  EXPECT_EQ(code_of([&] { reg.record_joined(0, ch.cluster, {{n.pid, ch.pk}}); }),
            Errc::UnprovisionedNuav);
  reg.record_joined(0, ch.cluster, {{n.pid, n.pk}});
  EXPECT_TRUE(reg.db_lookup(0, n.pid));
  EXPECT_EQ(code_of([&] { reg.record_joined(0, ch.cluster, {{n.pid, n.pk}}); }),
            Errc::UnprovisionedNuav);
  reg.admit_members(ch.cluster, {n});
  EXPECT_EQ(reg.cluster(ch.cluster).members.back().pid, n.pid);
}

TEST(Database, PidsUniqueAndMirroredAcrossStations) {
  // The tiny group has only 100 (sk, r) pairs, so uniqueness is enforced,
  // not luck.
  Registry reg(tiny_group(), 3, 10);
  ChCredential ch = reg.register_ch(0, "ch");
  std::set<Block32> pids{ch.pid};
  for (int i = 0; i < 60; ++i) pids.insert(reg.register_cm(0, ch.cluster, std::to_string(i)).pid);
  EXPECT_EQ(pids.size(), 61u);
  EXPECT_EQ(reg.dump_db(0), reg.dump_db(1));
  EXPECT_EQ(reg.dump_db(1), reg.dump_db(2));
}

TEST(Database, ExhaustedPseudonymSpaceIsAnError) {
  Registry reg(tiny_group(), 1, 11);
  ChCredential ch = reg.register_ch(0, "ch");
  EXPECT_THROW(
      {
        for (int i = 0; i < 200; ++i) reg.register_cm(0, ch.cluster, std::to_string(i));
      },
      ProtocolError);
}

TEST(Database, DumpFormat) {
  Registry reg(tiny_group(), 1, 12);
  ChCredential ch = reg.register_ch(0, "ch");
  std::string dump = reg.dump_db(0);
  EXPECT_EQ(dump, "pid: " + to_hex(ch.pid) + ", ch, 0\n");
}

TEST(InstallKey, UpdatesHeadAndMembers) {
  Registry reg(full_group(), 1, 13);
  ChCredential ch = reg.register_ch(0, "ch");
  reg.register_cm(0, ch.cluster, "m1");
  reg.register_cm(0, ch.cluster, "m2");
  Block32 k{};
  k[0] = 1;
  reg.install_key(ch.cluster, k);
  EXPECT_EQ(reg.cluster(ch.cluster).ch.key, k);
  for (const auto& m : reg.cluster(ch.cluster).members) EXPECT_EQ(m.key, k);
}
