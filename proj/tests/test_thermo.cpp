#include <gtest/gtest.h>

#include "hop/thermo.hpp"

using namespace hop;

namespace {

// sum_{m in Z} 1/(a + 2 pi^2 m^2) = coth(sqrt(a/2)) / sqrt(2a)
double s_two_sided_closed(double a) { return 1.0 / (std::tanh(std::sqrt(a / 2.0)) * std::sqrt(2.0 * a)); }

// sum_{j>=1} 1/(pi^2 j^2 + a - pi^2)
double r_closed(double a) {
  const double e = (a - pi * pi) / (pi * pi);
  if (e > 0) {
    double c = std::sqrt(e);
    return (pi * c / std::tanh(pi * c) - 1.0) / (2.0 * c * c) / (pi * pi);
  }
  double b = std::sqrt(-e);
  return (1.0 - pi * b / std::tan(pi * b)) / (2.0 * b * b) / (pi * pi);
}

// (2pi)^-d int d theta / (e^{L - 2 sum cos} - 1) by the midpoint rule
double fiber_density(double L, int d, int M, double beta = 1.0) {
  KahanSum s;
  if (d == 1) {
    for (int i = 0; i < M; ++i) s.add(1.0 / std::expm1(beta * (L - 2.0 * std::cos(2.0 * pi * (i + 0.5) / M))));
    return s.value() / M;
  }
  std::vector<double> c(M);
  for (int i = 0; i < M; ++i) c[i] = 2.0 * std::cos(2.0 * pi * (i + 0.5) / M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) s.add(1.0 / std::expm1(beta * (L - c[i] - c[j])));
  return s.value() / (static_cast<double>(M) * M);
}

}  // namespace

TEST(Occupation, FReg) {
  EXPECT_EQ(f_reg(0.0), -0.5);
  for (double x : {-3.0, -0.49, -0.1, 0.01, 0.2, 0.49, 0.5, 1.0, 7.0})
    EXPECT_NEAR(f_reg(x), 1.0 / std::expm1(x) - 1.0 / x, 1e-12) << x;
  EXPECT_NEAR(f_reg(0.4999999999), f_reg(0.5000000001), 1e-10);
  EXPECT_NEAR(bose(1.0, {1.0, 0.0}), 1.0 / (std::exp(1.0) - 1.0), 1e-15);
  EXPECT_THROW(bose(0.0, {1.0, 0.0}), PreconditionError);
}

TEST(Scaling, SClosedForm) {
  for (double a : {0.01, 0.5, 1.0, 3.0, 20.0, 500.0}) {
    double two = s_two_sided_closed(a);
    EXPECT_NEAR(scaling_s(a).value() / ((two + 1.0 / a) / 2.0), 1.0, 1e-12) << a;
    EXPECT_NEAR(scaling_s_two_sided(a).value() / two, 1.0, 1e-12) << a;
  }
  EXPECT_TRUE(scaling_s(0.0).is_infinite());
  EXPECT_EQ(scaling_s(std::numeric_limits<double>::infinity()).value(), 0.0);
}

TEST(Scaling, RClosedForm) {
  for (double a : {0.3, 1.0, 5.0, 9.0, 20.0, 300.0}) EXPECT_NEAR(scaling_r(a).value() / r_closed(a), 1.0, 1e-12) << a;
  EXPECT_NEAR(scaling_r(pi * pi).value(), 1.0 / 6.0, 1e-13);
  EXPECT_TRUE(scaling_r(0.0).is_infinite());
  EXPECT_NEAR(scaling_R(4.0, 2).value(), 0.25, 0.0);
  EXPECT_NEAR(scaling_S(4.0, 3).value(), 0.25, 0.0);
  EXPECT_EQ(scaling_S(2.0, 1, LimitForm::one_sided).value(), scaling_s(2.0).value());
  EXPECT_EQ(scaling_alpha(-1.0).value(), 0.0);
  EXPECT_EQ(scaling_alpha(0.0).value(), 1.0);
  EXPECT_TRUE(scaling_alpha(1.0).is_infinite());
}

TEST(CriticalDensity, Values) {
  EXPECT_TRUE(critical_density(GraphModel::half_line()).is_infinite());
  EXPECT_TRUE(critical_density(GraphModel::line()).is_infinite());
  EXPECT_TRUE(critical_density(GraphModel::lattice(2)).is_infinite());
  EXPECT_NEAR(critical_density(GraphModel::zcomb(1)).value(), 0.196712743197, 1e-10);
  EXPECT_NEAR(critical_density(GraphModel::ncomb(1)).value(), 0.196712743197, 1e-10);
  EXPECT_NEAR(critical_density(GraphModel::ncomb(2)).value(), 0.249719052821, 1e-9);
  EXPECT_NEAR(critical_density(GraphModel::lattice(3)).value(), 0.067251170685, 1e-9);
  EXPECT_NEAR(critical_density(GraphModel::ncomb(3)).value(), critical_density(GraphModel::lattice(3)).value(), 1e-10);
}

TEST(CriticalDensity, FiberQuadrature) {
  // the comb IDS is the fiber IDS shifted to the comb norm
  EXPECT_NEAR(critical_density(GraphModel::zcomb(1)).value(), fiber_density(2.0 * std::sqrt(2.0), 1, 4000), 1e-10);
  EXPECT_NEAR(critical_density(GraphModel::zcomb(2)).value(), fiber_density(2.0 * std::sqrt(5.0), 1, 4000), 1e-10);
  EXPECT_NEAR(critical_density(GraphModel::zcomb(3), 2.0).value(), fiber_density(2.0 * std::sqrt(10.0), 1, 4000, 2.0),
              1e-10);
  const double L2 = infinite_norm(GraphModel::ncomb(2));
  EXPECT_NEAR(critical_density(GraphModel::ncomb(2)).value(), fiber_density(L2, 2, 1600), 1e-6);
}

TEST(FiniteDensity, SolveMuRoundTrip) {
  FiniteVolume fv(GraphModel::zcomb(1), 60);
  for (double rho : {0.05, 0.5, 3.0}) {
    double mu = solve_mu(fv, 1.0, rho);
    EXPECT_LT(mu, fv.eps0());
    EXPECT_NEAR(finite_density(fv, {1.0, mu}) / rho, 1.0, 1e-10);
  }
  EXPECT_THROW(finite_density(fv, {1.0, fv.eps0()}), PreconditionError);
  EXPECT_THROW(solve_mu(fv, 1.0, -1.0), PreconditionError);
}

TEST(FiniteDensity, MatchesDense) {
  FiniteVolume fv(GraphModel::ncomb(1), 8);
  BoseParams p{0.7, -0.2};
  auto d = dense_spectrum(fv.build_operator(), 4000, false).spectrum;
  double direct = d.sum([&](double l) { return bose(fv.norm_inf() - l, p); }) / fv.volume();
  EXPECT_NEAR(finite_density(fv, p), direct, 1e-12);
}

TEST(Schedules, Consistency) {
  FiniteVolume fv(GraphModel::half_line(), 400);
  double mu = condensate_schedule(fv, 0.5);
  EXPECT_NEAR(schedule_ratio(fv, mu), 0.5, 1e-12);
  EXPECT_EQ(condensate_schedule(fv, 0.0), fv.eps0() - 1.0);
  double mu_a = gap_rate_mu(fv, 2.0);
  EXPECT_NEAR(400.0 * (fv.eps0() - mu_a), 2.0, 1e-12);
  EXPECT_THROW(condensate_schedule(fv, -1.0), PreconditionError);
  EXPECT_THROW(gap_rate_mu(fv, 0.0), PreconditionError);
  auto c = condensate_density_finite(fv, mu, 0.5);
  EXPECT_NEAR(c.state_side, 1.0 / (401.0 * (fv.eps0() - mu)), 1e-15);
  EXPECT_NEAR(c.weight_side, 0.5 * pf_partial_norm(GraphModel::half_line(), 400) / 401.0, 1e-9);
}

TEST(TwoPoint, PathsAgree) {
  FiniteVolume fv(GraphModel::ncomb(1), 20);
  BoseParams p{1.0, -0.1};
  for (auto [x, y] : std::vector<std::pair<Site, Site>>{{{0, 0}, {0, 0}}, {{3, 1}, {0, 0}}, {{7, -5}, {6, -5}}}) {
    double s = two_point_finite(fv, p, x, y, TwoPointPath::structured);
    double d = two_point_finite(fv, p, x, y, TwoPointPath::dense);
    double m = two_point_finite(fv, p, x, y, TwoPointPath::matrix_free);
    EXPECT_NEAR(s, d, 1e-12);
    EXPECT_NEAR(m, d, 1e-8);
  }
  FiniteVolume seg(GraphModel::half_line(), 30);
  EXPECT_NEAR(two_point_finite(seg, {2.0, -0.05}, {4}, {9}, TwoPointPath::structured),
              two_point_finite(seg, {2.0, -0.05}, {4}, {9}, TwoPointPath::dense), 1e-12);
}

TEST(TwoPoint, Limit) {
  auto t = two_point_limit(GraphModel::half_line(), 1.0, 0.5, {0}, {0});
  EXPECT_EQ(t.resolvent, 1.0);
  EXPECT_EQ(t.condensate, 0.5);
  // diagonal element at the edge: (2/pi) int sin^2 f_reg(2 - 2 cos)
  auto g = [](double x) { return x < 1e-6 ? -0.5 + x / 12.0 : 1.0 / std::expm1(x) - 1.0 / x; };
  const int K = 20000;
  double q = 0.0;
  for (int i = 0; i < K; ++i) {
    double th = (i + 0.5) * pi / K;
    q += std::sin(th) * std::sin(th) * g(2.0 - 2.0 * std::cos(th));
  }
  EXPECT_NEAR(t.smooth, 2.0 / K * q, 2e-6);
  EXPECT_NEAR(t.total(), t.smooth + 1.5, 1e-15);
  auto nz = two_point_limit(GraphModel::ncomb(1), 1.0, 0.0, {0, 0}, {0, 0});
  EXPECT_EQ(nz.resolvent, edge_resolvent(GraphModel::ncomb(1), {0, 0}, {0, 0}));
  EXPECT_GT(nz.resolvent, 0.0);
  EXPECT_THROW(two_point_limit(GraphModel::line(), 1.0, 0.0, {0}, {0}), PreconditionError);
  EXPECT_THROW(two_point_limit(GraphModel::segment(4), 1.0, 0.0, {0}, {0}), PreconditionError);
}

TEST(TwoPoint, EdgeResolventIsLimitOfResolvent) {
  auto m = GraphModel::ncomb(1);
  const double L = infinite_norm(m);
  double edge = edge_resolvent(m, {1, 2}, {0, 0});
  EXPECT_NEAR(comb_resolvent_element(m, L + 1e-9, {1, 2}, {0, 0}), edge, 1e-3);
}

TEST(DensityLimit, Shape) {
  const double inf = std::numeric_limits<double>::infinity();
  for (auto m : {GraphModel::ncomb(1), GraphModel::ncomb(2), GraphModel::zcomb(1), GraphModel::zcomb(3)}) {
    double rc = critical_density(m).value();
    EXPECT_NEAR(density_limit(m, inf).value(), rc, 1e-15) << m.name();
    double prev = inf;
    for (double a : {0.1, 1.0, 10.0}) {
      double v = density_limit(m, a).value();
      EXPECT_GT(v, rc);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
  EXPECT_THROW(density_limit(GraphModel::ncomb(3), 1.0), PreconditionError);
  EXPECT_THROW(density_limit(GraphModel::line(), 1.0), PreconditionError);
  EXPECT_THROW(density_limit(GraphModel::zcomb(1), 1.0, 2.0), PreconditionError);
}

TEST(Verdict, Trichotomy) {
  auto v1 = fixed_density_verdict(GraphModel::ncomb(1), 0.5);
  EXPECT_EQ(v1.regime, Regime::pinned);
  EXPECT_EQ(v1.coefficient.value(), 0.0);
  auto v2 = fixed_density_verdict(GraphModel::ncomb(2), 0.5);
  EXPECT_EQ(v2.regime, Regime::finite_condensate);
  EXPECT_GT(v2.coefficient.value(), 0.0);
  auto v3 = fixed_density_verdict(GraphModel::zcomb(3), 0.5);
  EXPECT_EQ(v3.regime, Regime::divergent);
  EXPECT_TRUE(v3.coefficient.is_infinite());
  for (auto m : {GraphModel::line(), GraphModel::lattice(2), GraphModel::zcomb(1), GraphModel::zcomb(2)})
    EXPECT_EQ(fixed_density_verdict(m, 0.5).regime, Regime::divergent) << m.name();
  auto z3 = fixed_density_verdict(GraphModel::lattice(3), 0.5);
  EXPECT_EQ(z3.regime, Regime::finite_condensate);
  EXPECT_NEAR(z3.coefficient.value(), 0.5 - 0.067251170685, 1e-9);
  EXPECT_STREQ(to_string(Regime::pinned), "i");
  EXPECT_STREQ(to_string(Regime::divergent), "iii");
  EXPECT_THROW(fixed_density_verdict(GraphModel::half_line(), 1.0), PreconditionError);
  EXPECT_THROW(fixed_density_verdict(GraphModel::ncomb(1), 0.1), PreconditionError);
  EXPECT_THROW(fixed_density_verdict(GraphModel::ncomb(3), 1.0), UnsupportedError);
}
