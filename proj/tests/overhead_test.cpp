#include <gtest/gtest.h>

#include "clusterauth/errors.hpp"
#include "clusterauth/key_update.hpp"
#include "clusterauth/overhead.hpp"
#include "swarm_fixture.hpp"

using namespace clusterauth;
using clusterauth::testing::Swarm;

namespace {

OpCounts ops(std::uint64_t hf, std::uint64_t me, std::uint64_t mm, std::uint64_t x,
             std::uint64_t sss = 0) {
  return {hf, me, mm, x, sss};
}

}  // namespace

TEST(PublishedComp, Rows) {
  EXPECT_EQ(predict_comp(Stage::Init, 0, 0), ops(3, 2, 1, 0));
  EXPECT_EQ(predict_comp(Stage::UavAuth, 5, 5), ops(23, 8, 18, 15));
  EXPECT_EQ(predict_comp(Stage::KeyUpdate, 0, 1).t_mm, 0u);
  // (n+2) HF, (3n-1) ME, (n^2-1) MM, (2n+10) XOR, n SSS at n = 4
  EXPECT_EQ(predict_comp(Stage::KeyUpdate, 0, 4), ops(6, 11, 15, 18, 4));
  EXPECT_EQ(predict_transfer(), ops(3, 0, 0, 2));
  EXPECT_EQ(predict_p1_nuav(5), ops(20, 8, 13, 13));
}

TEST(PublishedComm, Substitutions) {
  EXPECT_EQ(predict_comm(Stage::UavAuth, 5, 5, 5).total_bits, 18656u);
  EXPECT_EQ(predict_comm(Stage::UavAuth, 5, 5, 5).zp_elems, 68u);
  EXPECT_EQ(predict_comm(Stage::UavAuth, 5, 5, 5).timestamps, 39u);
  EXPECT_EQ(predict_comm(Stage::KeyUpdate, 0, 3, 1).total_bits, 5984u);
  EXPECT_EQ(predict_comm(Stage::Init, 0, 0, 0).total_bits, 2560u);
  FieldSizes wide{512, 64};
  EXPECT_EQ(predict_comm(Stage::Init, 0, 0, 0, wide).total_bits, 5120u);
}

TEST(PublishedComm, AggregatedJoinDoesNotDependOnNuavCount) {
  for (std::uint64_t n = 0; n < 20; ++n) EXPECT_EQ(predict_p2(n, 5).mam_bits, 20u * 256 + 4 * 32);
  EXPECT_EQ(predict_p2(5, 5).baseline_bits, 15360u);
  EXPECT_TRUE(predict_p2(0, 5).degenerate);
  EXPECT_FALSE(predict_p2(1, 5).degenerate);
}

TEST(Stages, ParseAndName) {
  for (Stage s : {Stage::Init, Stage::UavAuth, Stage::KeyUpdate})
    EXPECT_EQ(parse_stage(stage_name(s)), s);
  try {
    parse_stage("teardown");
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), Errc::UnknownStage);
  }
}

TEST(Derived, JoinOpsMatchInstrumentedRun) {
  for (std::uint64_t n_nuav : {1, 3, 6})
    for (std::uint64_t n_cm : {1, 2, 5})
      for (std::uint64_t n_ch : {1, 2, 4})
        for (bool literal : {false, true}) {
          Swarm s(tiny_group(), n_nuav, n_cm, n_ch, n_nuav * 31 + n_cm * 7 + n_ch);
          ProtocolOptions opts;
          opts.paper_literal = literal;
          CounterScope scope;
          ASSERT_TRUE(s.run_join(100, opts));
          EXPECT_EQ(scope.counts(), derived_join_ops({n_nuav, n_cm, n_ch, true, literal}))
              << n_nuav << "," << n_cm << "," << n_ch << " literal=" << literal;
        }
}

TEST(Derived, KeyUpdateOpsMatchInstrumentedRun) {
  for (std::uint64_t n = 1; n <= 7; ++n) {
    Registry reg(full_group(), 1, n);
    ClusterId id = reg.register_ch(0, "ch").cluster;
    for (std::uint64_t l = 0; l < n; ++l) reg.register_cm(0, id, std::to_string(l));
    const auto& rec = reg.cluster(id);
    std::vector<Block32> roster;
    for (const auto& m : rec.members) roster.push_back(m.pid);
    Rng rng(n);
    CounterScope scope;
    DealerOutput d = ch_init_update(reg.group(), rec.ch, roster, 10, rng);
    std::vector<MemberShareState> st(n);
    std::vector<ShareEnvelope> env;
    for (std::uint64_t l = 0; l < n; ++l)
      env.push_back(cm_recover_and_share(reg.group(), rec.members[l], roster, d.inits[l], 10, st[l]));
    for (std::uint64_t l = 0; l < n; ++l) cm_reconstruct(reg.group(), st[l], env, d.inits[l]);
    EXPECT_EQ(scope.counts(), derived_key_update_ops(n)) << n;
  }
}

TEST(Derived, InitOpsMatchInstrumentedRegistration) {
  CounterScope scope;
  Registry reg(full_group(), 2, 1);
  ClusterId a = reg.register_ch(0, "a").cluster;
  reg.register_ch(1, "b");
  for (int i = 0; i < 3; ++i) reg.register_cm(0, a, std::to_string(i));
  for (int i = 0; i < 4; ++i) reg.provision_nuav(0, a);
  EXPECT_EQ(scope.counts(), derived_init_ops(2, 2, 3, 4));
}

TEST(Derived, ByteFormsFollowWireSizes) {
  WireSizes w{256};
  EXPECT_EQ(derived_transfer_bytes(), w.transfer_request());
  EXPECT_EQ(derived_key_update_bytes(256, 3), 3 * (w.key_update_init(3) + w.share_envelope(3)));
  EXPECT_EQ(derived_join_bytes(256, {0, 5, 5, true, false}), 0u);
  // One NUAV, one CM, no peers: request, challenge, response, confirm.
  EXPECT_EQ(derived_join_bytes(256, {1, 1, 1, true, false}),
            w.join_request() + w.aggregate_challenge() + w.cm_response() + w.nuav_confirm());
  EXPECT_EQ(derived_join_bytes(256, {7, 5, 5, true, false}), 14096u);
  EXPECT_EQ(derived_join_bytes(256, {7, 5, 5, false, false}), 125244u);
  // Aggregation never sends more than the per-NUAV path.
  for (std::uint64_t k = 1; k < 8; ++k)
    for (std::uint64_t n = 1; n < 8; ++n)
      for (std::uint64_t c = 1; c < 8; ++c)
        EXPECT_LE(derived_join_bytes(256, {k, n, c, true, false}),
                  derived_join_bytes(256, {k, n, c, false, false}));
}

TEST(Counters, ScopesNestAndAdd) {
  CounterScope outer;
  {
    CounterScope inner;
    hash_to_block("x", {});
    EXPECT_EQ(inner.counts().t_hf, 1u);
  }
  hash_to_block("x", {});
  EXPECT_EQ(outer.counts().t_hf, 2u);
}

TEST(DeltaReport, CsvShape) {
  std::vector<DeltaRow> rows;
  append_op_deltas(rows, "uav_auth", ops(23, 8, 18, 15), ops(92, 45, 32, 36));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].delta(), 69);
  EXPECT_EQ(delta_csv(rows).substr(0, delta_csv(rows).find('\n')),
            "stage,term,paper_value,measured_value,delta");
  EXPECT_NE(delta_csv(rows).find("uav_auth,t_me,8,45,37\n"), std::string::npos);
}
