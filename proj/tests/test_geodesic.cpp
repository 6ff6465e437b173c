#include "hspace/geodesic.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace hspace;
using namespace hspace::testing;

namespace {

Vec6<double> unit(int i) { return Vec6<double>::Unit(i); }

std::vector<GeodesicState> states(const HSpace& s, int n, double speed = 0.25, std::uint64_t seed = 42) {
  Sampler sampler(seed);
  return sample_initial_states(s, default_box(s), sampler, n, speed);
}

/// Endpoint of an RK4 run.
GeodesicState endpoint(const HSpace& s, const GeodesicState& s0, double dt, int steps) {
  IntegrateOptions o;
  o.dt = dt;
  o.n_steps = steps;
  const Trajectory t = integrate(s, s0, o);
  EXPECT_FALSE(t.chart_exit);
  return t.samples.back().state;
}

double distance(const GeodesicState& a, const GeodesicState& b) {
  return std::max((a.x - b.x).cwiseAbs().maxCoeff(), (a.v - b.v).cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Rhs, ConstantMetricAndRest) {
  const HSpace flat = HSpace::build(config_flat());
  const StateRate r = rhs(flat, {Point6::Random(), Vec6<double>::Random()});
  EXPECT_EQ(r.dv, Vec6<double>::Zero());

  const HSpace s = HSpace::build(config_3_21());
  const Point6 x = sample(s, 1).front();
  const StateRate rest = rhs(s, {x, Vec6<double>::Zero()});
  EXPECT_EQ(rest.dx, Vec6<double>::Zero());
  EXPECT_EQ(rest.dv, Vec6<double>::Zero());
}

TEST(Rhs, SatisfiesEulerLagrange) {
  // d/dt (g_ij v^j) - 1/2 d_i g_jk v^j v^k = 0 with metric partials by
  // central differences.
  for (const HSpaceConfig& c : generic_configs()) {
    const HSpace s = HSpace::build(c);
    for (const GeodesicState& st : states(s, 5, 1.0)) {
      const StateRate r = rhs(s, st);
      std::array<Sym6, 6> dg;
      for (int l = 0; l < 6; ++l) {
        Point6 xp = st.x, xm = st.x;
        xp[l] += 1e-5;
        xm[l] -= 1e-5;
        dg[l] = (metric(s, xp) - metric(s, xm)) / 2e-5;
      }
      const Sym6 g = metric(s, st.x);
      for (int i = 0; i < 6; ++i) {
        double el = g.row(i).dot(r.dv);
        for (int k = 0; k < 6; ++k) el += st.v[k] * dg[k].row(i).dot(st.v);
        el -= 0.5 * st.v.dot(dg[i] * st.v);
        EXPECT_LT(std::fabs(el), 1e-6) << to_string(c.family) << " i=" << i;
      }
    }
  }
}

TEST(Rhs, ThrowsOffChart) {
  const HSpace s = HSpace::build(config_3_21());
  EXPECT_THROW(rhs(s, {(Point6() << 0, 0, 5, 0, 0, 0).finished(), unit(0)}), InadmissiblePoint);
}

TEST(Integrate, StraightLineInFlatSpace) {
  const HSpace flat = HSpace::build(config_flat());
  IntegrateOptions o;
  o.dt = 1e-2;
  o.n_steps = 100;
  const Trajectory t = integrate(flat, {Point6::Zero(), unit(0)}, o);
  ASSERT_EQ(t.samples.size(), 101u);
  for (const TrajectorySample& smp : t.samples) {
    EXPECT_NEAR(smp.state.x[0], smp.t, 1e-14);
    EXPECT_EQ(smp.state.x.tail<5>(), Vec6<double>::Zero().tail<5>());
    EXPECT_EQ(smp.state.v, unit(0));
  }
  EXPECT_EQ(t.method, Method::kRK4);
  EXPECT_DOUBLE_EQ(t.last_t(), 1.0);
}

TEST(Integrate, TimesStrictlyIncreasing) {
  const HSpace s = HSpace::build(config_32_1());
  for (Method m : {Method::kRK4, Method::kRK45}) {
    IntegrateOptions o;
    o.method = m;
    const Trajectory t = integrate(s, states(s, 1).front(), o);
    for (std::size_t i = 1; i < t.samples.size(); ++i) EXPECT_GT(t.samples[i].t, t.samples[i - 1].t);
    EXPECT_DOUBLE_EQ(t.last_t(), 1.0);
  }
}

TEST(Integrate, ReversibilityIsFourthOrder) {
  const HSpace s = HSpace::build(config_3_21());
  const GeodesicState s0 = states(s, 1, 1.0).front();
  auto round_trip_error = [&](double dt) {
    const int steps = static_cast<int>(std::lround(0.5 / dt));
    GeodesicState back = endpoint(s, s0, dt, steps);
    back.v = -back.v;
    GeodesicState home = endpoint(s, back, dt, steps);
    home.v = -home.v;
    return distance(home, s0);
  };
  // RK4's fourth-order error terms largely cancel on the way back, so the
  // round trip is at least fourth order, not exactly.
  const double e1 = round_trip_error(0.02), e2 = round_trip_error(0.01);
  EXPECT_GT(e1, 1e-13);
  EXPECT_GE(std::log2(e1 / e2), 3.5);
}

TEST(Integrate, SelfConvergenceAgainstFineReference) {
  const HSpace s = HSpace::build(config_32_1());
  const GeodesicState s0 = states(s, 1, 1.0).front();
  const double dt = 0.02;
  const GeodesicState ref = endpoint(s, s0, dt / 64, 64 * 25);
  const double e1 = distance(endpoint(s, s0, dt, 25), ref);
  const double e2 = distance(endpoint(s, s0, dt / 2, 50), ref);
  EXPECT_NEAR(e1 / e2, 16.0, 4.0);
}

TEST(Integrate, ChartExitIsBisected) {
  const HSpace s = HSpace::build(config_3_21());
  GeodesicState s0;
  s0.x << 0.1, 0.5, 5.3, 0.0, 0.1, 0.1;
  s0.v = -unit(2);  // heading for f3 = lambda
  IntegrateOptions o;
  o.dt = 1e-2;
  o.n_steps = 100;
  const Trajectory t = integrate(s, s0, o);
  EXPECT_TRUE(t.chart_exit);
  EXPECT_LT(t.last_t(), 0.5);
  EXPECT_TRUE(admissible(s, t.samples.back().state.x).ok);
  EXPECT_LT(t.samples.back().state.x[2] - 5.0, 0.1);  // det g ~ (f3 - lambda)^9 hits its guard first

  o.method = Method::kRK45;
  const Trajectory t45 = integrate(s, s0, o);
  EXPECT_TRUE(t45.chart_exit);
  EXPECT_LT(t45.last_t(), 0.5);
}

TEST(Integrate, RejectsBadInput) {
  const HSpace s = HSpace::build(config_flat());
  IntegrateOptions o;
  o.dt = 0;
  EXPECT_THROW(integrate(s, {}, o), std::invalid_argument);
  const HSpace s3 = HSpace::build(config_3_21());
  EXPECT_THROW(integrate(s3, {(Point6() << 0, 0, 5, 0, 0, 0).finished(), unit(0)}, {}), InadmissiblePoint);
}

TEST(Invariants, Examples) {
  const HSpace s = HSpace::build(config_3_21());
  const Point6 x = sample(s, 1).front();
  const FirstIntegrals rest = invariants(s, {x, Vec6<double>::Zero()});
  EXPECT_EQ(rest.E, 0.0);
  EXPECT_EQ(rest.I, 0.0);

  HSpaceConfig c = config_321();
  c.c = 0;
  const HSpace s321 = HSpace::build(c);
  const Point6 y = sample(s321, 1).front();
  const Vec6<double> v = Vec6<double>::Random();
  EXPECT_NEAR(invariants(s321, {y, v}).I, v.dot(aform(s321, y) * v), 1e-14);

  const HSpace flat = HSpace::build(config_flat());
  EXPECT_EQ(invariants(flat, {Point6::Zero(), unit(0)}).E, 0.0);  // null direction
}

TEST(Invariants, QuadraticInVelocity) {
  for (const HSpaceConfig& c : generic_configs()) {
    const HSpace s = HSpace::build(c);
    const GeodesicState st = states(s, 1).front();
    const FirstIntegrals a = invariants(s, st);
    const FirstIntegrals b = invariants(s, {st.x, 3.0 * st.v});
    EXPECT_NEAR(b.E, 9.0 * a.E, 1e-13 * (1.0 + std::fabs(b.E)));
    EXPECT_NEAR(b.I, 9.0 * a.I, 1e-13 * (1.0 + std::fabs(b.I)));
  }
}

TEST(Drift, FlatSpaceIsExact) {
  const HSpace flat = HSpace::build(config_flat());
  IntegrateOptions o;
  o.n_steps = 10000;
  for (const GeodesicState& st : states(flat, 3, 1.0)) {
    const Drift d = drift_report(integrate(flat, st, o));
    EXPECT_LE(d.E, 1e-13);
    EXPECT_LE(d.I, 1e-13);
  }
}

TEST(Drift, ConservedOnGenericFamilies) {
  for (const HSpaceConfig& c : generic_configs()) {
    const HSpace s = HSpace::build(c);
    for (const GeodesicState& st : states(s, 5)) {
      if (!extends_to(s, st, 1.0)) continue;
      const Drift d = drift_report(integrate(s, st, {}));
      EXPECT_LE(d.E, 1e-8) << to_string(c.family);
      EXPECT_LE(d.I, 1e-8) << to_string(c.family);
    }
  }
}

TEST(Drift, Rk45WithinToleranceBudget) {
  const HSpace s = HSpace::build(config_32_1());
  IntegrateOptions o;
  o.method = Method::kRK45;
  o.rk45_tol = 1e-10;
  o.dt = 0.1;
  o.n_steps = 10;
  for (const GeodesicState& st : states(s, 3, 1.0)) {
    const Drift d = drift_report(integrate(s, st, o));
    EXPECT_LE(d.I, 1e-10 * 1e2);
  }
}

TEST(Drift, EmptyTrajectoryThrows) { EXPECT_THROW(drift_report(Trajectory{}), std::invalid_argument); }

TEST(OrderStudy, FourthOrderOnGenericFamilies) {
  const std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
  for (const HSpaceConfig& c : {config_3_21(), config_32_1()}) {
    const HSpace s = HSpace::build(c);
    for (const GeodesicState& st : states(s, 3, 1.0)) {
      if (!extends_to(s, st, 1.0)) continue;
      const OrderStudy o = order_study(s, st, dts);
      ASSERT_FALSE(o.floor_limited);
      EXPECT_GE(o.slope, 3.5) << to_string(c.family);
      EXPECT_LE(o.slope, 4.5) << to_string(c.family);
    }
  }
}

TEST(OrderStudy, FlatSpaceIsFloorLimited) {
  const HSpace flat = HSpace::build(config_flat());
  const OrderStudy o = order_study(flat, {Point6::Zero(), Vec6<double>::Ones()}, {0.1, 0.05, 0.025});
  EXPECT_TRUE(o.floor_limited);
  EXPECT_EQ(o.points_used, 0);
}

TEST(OrderStudy, NeedsThreeSteps) {
  const HSpace flat = HSpace::build(config_flat());
  EXPECT_THROW(order_study(flat, {}, {0.1, 0.05}), std::invalid_argument);
}

TEST(OrderStudy, ChartExitThrows) {
  const HSpace s = HSpace::build(config_3_21());
  GeodesicState s0;
  s0.x << 0.1, 0.5, 5.3, 0.0, 0.1, 0.1;
  s0.v = -unit(2);
  EXPECT_THROW(order_study(s, s0, {0.1, 0.05, 0.025}), InadmissiblePoint);
}

TEST(InitialStates, InnerBoxAndSpeed) {
  const HSpace s = HSpace::build(config_3_21());
  const Box box = default_box(s);
  const Point6 mid = 0.5 * (box.lo + box.hi);
  const Point6 quarter = 0.25 * (box.hi - box.lo);
  for (const GeodesicState& st : states(s, 20, 0.5)) {
    EXPECT_TRUE(((st.x - mid).cwiseAbs().array() <= quarter.array()).all());
    EXPECT_LE(st.v.cwiseAbs().maxCoeff(), 0.5);
    EXPECT_TRUE(admissible(s, st.x).ok);
  }
}

TEST(ExtendsTo, DetectsIncompleteGeodesics) {
  const HSpace s = HSpace::build(config_3_21());
  GeodesicState s0;
  s0.x << 0.1, 0.5, 5.3, 0.0, 0.1, 0.1;
  s0.v = -unit(2);
  EXPECT_FALSE(extends_to(s, s0, 1.0));
  const HSpace flat = HSpace::build(config_flat());
  EXPECT_TRUE(extends_to(flat, {Point6::Zero(), unit(1)}, 1.0));
}

TEST(Csv, HeaderAndRows) {
  const HSpace flat = HSpace::build(config_flat());
  IntegrateOptions o;
  o.n_steps = 3;
  o.dt = 0.5;
  std::ostringstream out;
  write_csv(integrate(flat, {Point6::Zero(), unit(0)}, o), out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x1,x2,x3,x4,x5,x6,v1,v2,v3,v4,v5,v6,E,I");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 14);
  }
  EXPECT_EQ(rows, 4);
  EXPECT_NE(out.str().find("\n1.5,1.5,0,"), std::string::npos);
}

TEST(FlowRate, ZeroWhenFlatAndLargeNearSingularLocus) {
  const HSpace flat = HSpace::build(config_flat());
  EXPECT_EQ(flow_rate(flat, {Point6::Zero(), unit(0)}, 1.0), 0.0);

  const HSpace s = HSpace::build(config_3_21());
  const GeodesicState far = states(s, 1, 1.0).front();
  const double r = flow_rate(s, far, 0.1);
  EXPECT_GT(r, 0.0);
  // Doubling the speed doubles max|v| along the same orbit.
  EXPECT_NEAR(flow_rate(s, {far.x, 2.0 * far.v}, 0.05), 2.0 * r, 1e-6 * r);

  GeodesicState toward;
  toward.x << 0.1, 0.5, 5.3, 0.0, 0.1, 0.1;
  toward.v = -unit(2);
  EXPECT_THROW(flow_rate(s, toward, 1.0), InadmissiblePoint);
}
