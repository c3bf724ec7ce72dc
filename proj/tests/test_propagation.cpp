#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"

using namespace maxw;
using maxw::testing::overlapping_pair;
using maxw::testing::make_instance;

namespace {

struct Fixture {
  Instance inst;
  Model model;
  SearchState state;

  Fixture(Instance i, int ub, bool with_maxw = true)
      : inst(std::move(i)), model(inst, plan_for(inst, with_maxw), ub), state(model) {}

  static SubintervalPlan plan_for(const Instance &inst, bool with_maxw) {
    auto all = all_constraints(inst);
    return with_maxw ? build_plan(inst, all) : build_plan(inst, {});
  }
  Fixture(const Fixture &) = delete;
};

VarBounds b(const SearchState &s, int v) { return s.bounds(v); }

} // namespace

TEST(Chain, TwoTaskJob) {
  Fixture f(make_instance(1, {{{0, 2}, {0, 3}}}), 5);
  auto r = propagate_chain(f.model, f.state);
  EXPECT_EQ(r.outcome, Outcome::changed);
  EXPECT_TRUE((b(f.state, f.model.start(1)) == VarBounds{2, 2}));
  EXPECT_TRUE((b(f.state, f.model.end(0)) == VarBounds{2, 2}));
  EXPECT_TRUE((b(f.state, f.model.start(0)) == VarBounds{0, 0}));
  EXPECT_TRUE((b(f.state, f.model.end(1)) == VarBounds{5, 5}));
}

TEST(Chain, DurationExceedsMakespan) {
  Fixture f(make_instance(1, {{{0, 3}}}), 10);
  f.state.assign(f.model.cmax(), {0, 2});
  auto r = propagate_chain(f.model, f.state);
  EXPECT_TRUE(r.failed());
  EXPECT_EQ(r.conflict.propagator, "chain");
}

TEST(Chain, NoTasks) {
  Fixture f(make_instance(1, {}), 5);
  EXPECT_EQ(propagate_chain(f.model, f.state).outcome, Outcome::unchanged);
}

TEST(Overload, TwoTasksSameWindow) {
  Fixture f(make_instance(1, {{{0, 2}}, {{0, 1}}}), 2);
  auto r = overload_check(f.model, f.state, 0);
  ASSERT_TRUE(r.failed());
  EXPECT_EQ(r.conflict.lo, 0);
  EXPECT_EQ(r.conflict.hi, 2);
}

TEST(Overload, RestAtMinimumDuration) {
  // constraint (0,[0,2)) gives one rest task on [0,2) with d in [0,2]
  Fixture f(make_instance(1, {{{0, 3}}}, {{0, 0, 0, 2}}), 4);
  int d = f.model.rest(0);
  ASSERT_TRUE((b(f.state, d) == VarBounds{0, 2}));
  EXPECT_FALSE(overload_check(f.model, f.state, 0).failed());
  f.state.assign(d, {2, 2});
  auto r = overload_check(f.model, f.state, 0);
  ASSERT_TRUE(r.failed());
  EXPECT_EQ(r.conflict.lo, 0);
  EXPECT_EQ(r.conflict.hi, 4);
}

TEST(Filter, NestedTaskPushesEnd) {
  Fixture f(make_instance(1, {{{0, 4}}, {{0, 2}}}), 6);
  f.state.assign(f.model.end(1), {2, 2});
  f.state.assign(f.model.start(1), {0, 0});
  SearchState before = f.state;
  ASSERT_FALSE(overload_check(f.model, f.state, 0).failed());
  auto r = filter_noverlap(f.model, f.state, 0);
  EXPECT_EQ(r.outcome, Outcome::changed);
  EXPECT_EQ(f.state.lo(f.model.end(0)), 6);
  EXPECT_EQ(f.state.lo(f.model.start(0)), 0);
  // exhaustive oracle: every satisfying assignment survives
  int count = 0;
  maxw::testing::enumerate_assignments(f.model, before, [&](const std::vector<int> &v) {
    ++count;
    EXPECT_TRUE(maxw::testing::within(v, f.state));
    return true;
  });
  EXPECT_GT(count, 0);
}

TEST(Filter, SingleTaskNoChange) {
  Fixture f(make_instance(1, {{{0, 2}}}), 6);
  EXPECT_EQ(filter_noverlap(f.model, f.state, 0).outcome, Outcome::unchanged);
}

TEST(Filter, OverloadCaughtFirst) {
  Fixture f(make_instance(1, {{{0, 2}}, {{0, 2}}}), 3);
  EXPECT_TRUE(overload_check(f.model, f.state, 0).failed());
}

TEST(Filter, RestCappedBySlack) {
  // rest window [0,4) with d <= 2, work task fixed inside [0,3) with dur 3
  Fixture f(make_instance(1, {{{0, 3}}}, {{0, 2, 0, 4}}), 4);
  f.state.assign(f.model.end(0), {3, 3});
  auto r = filter_noverlap(f.model, f.state, 0);
  EXPECT_EQ(r.outcome, Outcome::changed);
  EXPECT_EQ(f.state.hi(f.model.rest(0)), 1);
}

TEST(Filter, MirrorRuleLowersStart) {
  // A:[0,4) dur 2 must finish its units before B occupies [2,4)
  Fixture f(make_instance(1, {{{0, 2}}, {{0, 2}}}), 4);
  f.state.assign(f.model.start(1), {2, 2});
  f.state.assign(f.model.end(1), {4, 4});
  f.state.assign(f.model.start(0), {0, 2});
  auto r = filter_noverlap(f.model, f.state, 0);
  EXPECT_EQ(r.outcome, Outcome::changed);
  EXPECT_EQ(f.state.hi(f.model.start(0)), 0);
}

TEST(MaxW, OverlappingPair) {
  Fixture f(make_instance(1, {{{0, 5}}}, overlapping_pair()), 9);
  int d1 = f.model.rest(0), d2 = f.model.rest(1), d3 = f.model.rest(2);
  EXPECT_EQ(f.state.hi(d1), 1);
  EXPECT_EQ(f.state.hi(d2), 2);
  EXPECT_EQ(f.state.hi(d3), 3);
  ASSERT_FALSE(propagate_maxw(f.model, f.state).failed());
  // R1 = 1 leaves both lows at 0; R2 = 3 with d2 <= 2 forces d3 >= 1
  EXPECT_EQ(f.state.lo(d1), 0);
  EXPECT_EQ(f.state.lo(d2), 0);
  EXPECT_EQ(f.state.lo(d3), 1);
  f.state.assign(d2, {0, 0});
  ASSERT_FALSE(propagate_maxw(f.model, f.state).failed());
  EXPECT_EQ(f.state.lo(d1), 1);
  EXPECT_EQ(f.state.lo(d3), 3);
}

TEST(MaxW, CapacityShortfall) {
  Fixture f(make_instance(1, {{{0, 1}}}, {{0, 0, 0, 3}}), 5);
  f.state.assign(f.model.rest(0), {0, 2});
  auto r = propagate_maxw(f.model, f.state);
  ASSERT_TRUE(r.failed());
  EXPECT_EQ(r.conflict.propagator, "maxw");
}

TEST(MaxW, NoActiveConstraints) {
  Fixture f(make_instance(1, {{{0, 5}}}, overlapping_pair()), 9, false);
  EXPECT_EQ(propagate_maxw(f.model, f.state).outcome, Outcome::unchanged);
}

TEST(PropagateAll, FixedConsistentState) {
  Fixture f(make_instance(1, {{{0, 3}}}), 3);
  f.state.assign(f.model.cmax(), {3, 3});
  EXPECT_EQ(propagate_all(f.model, f.state).outcome, Outcome::unchanged);
}

TEST(PropagateAll, ChainTooLong) {
  Fixture f(make_instance(1, {{{0, 2}, {0, 3}}}), 10);
  f.state.assign(f.model.cmax(), {0, 4});
  EXPECT_TRUE(propagate_all(f.model, f.state).failed());
}

TEST(PropagateAll, OverlappingPairOverfull) {
  Fixture f(make_instance(1, {{{0, 9}}}, overlapping_pair()), 9);
  auto r = propagate_all(f.model, f.state);
  ASSERT_TRUE(r.failed());
  // oracle: nothing fits at horizon 9
  auto o = brute_force_optimum(f.inst, 9);
  EXPECT_FALSE(o.exhausted);
  EXPECT_FALSE(o.cmax);
}

TEST(PropagateAll, Deterministic) {
  std::mt19937 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto ts = maxw::testing::random_tiny_state(rng);
    Model m(ts.inst, build_plan(ts.inst, ts.active), ts.ub);
    SearchState a(m), c(m);
    auto ra = propagate_all(m, a);
    auto rc = propagate_all(m, c);
    ASSERT_EQ(ra.outcome, rc.outcome);
    for (int v = 0; v < m.num_vars(); ++v)
      ASSERT_TRUE(a.bounds(v) == c.bounds(v));
  }
}

TEST(Trail, PopRestoresBounds) {
  Fixture f(make_instance(1, {{{0, 2}, {0, 3}}}), 8);
  std::vector<VarBounds> before(f.state.all().begin(), f.state.all().end());
  f.state.push_level();
  f.state.assign(f.model.cmax(), {0, 5});
  ASSERT_FALSE(propagate_all(f.model, f.state).failed());
  f.state.push_level();
  f.state.set_lo(f.model.start(1), 3);
  f.state.pop_level();
  EXPECT_EQ(f.state.lo(f.model.start(1)), 2);
  f.state.pop_level();
  for (int v = 0; v < f.model.num_vars(); ++v)
    EXPECT_TRUE(f.state.bounds(v) == before[v]);
  EXPECT_EQ(f.state.depth(), 0u);
}

TEST(Trace, OneLinePerChange) {
  Fixture f(make_instance(1, {{{0, 2}, {0, 3}}}), 5);
  std::ostringstream log;
  f.state.trace = &log;
  f.state.trace_model = &f.model;
  propagate_chain(f.model, f.state);
  std::string out = log.str();
  EXPECT_NE(out.find("(chain, s0,1, [0,2], [2,2])"), std::string::npos) << out;
  EXPECT_EQ(static_cast<std::size_t>(std::count(out.begin(), out.end(), '\n')), f.state.changes());
}

// Exhaustive soundness on random tiny states: no satisfying assignment is
// pruned, conflicts have no solutions, bounds never widen.
TEST(PropagationProperty, Soundness) {
  std::mt19937 rng(99);
  maxw::testing::SoundnessStats stats;
  for (int i = 0; i < 300; ++i) {
    auto bad = maxw::testing::soundness_trial(rng, stats);
    ASSERT_FALSE(bad) << *bad;
  }
  EXPECT_GT(stats.conflicts, 0);
  EXPECT_GT(stats.assignments, 0);
}
