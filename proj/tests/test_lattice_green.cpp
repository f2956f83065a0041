#include <gtest/gtest.h>

#include "hop/graph_core.hpp"
#include "hop/lattice_green.hpp"
#include "hop/spectral_ops.hpp"

using namespace hop;

namespace {

// plain midpoint rule on [0, 2pi)^d for (2pi)^-d int cos(k.theta)/(lambda - 2 sum cos)
double torus_integral(double lambda, const std::vector<long>& k, int M) {
  const int d = static_cast<int>(k.size());
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= M;
  double s = 0.0;
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t r = c;
    double den = lambda, phase = 0.0;
    for (int j = 0; j < d; ++j) {
      double th = 2.0 * pi * ((r % M) + 0.5) / M;
      r /= M;
      den -= 2.0 * std::cos(th);
      phase += k[j] * th;
    }
    s += std::cos(phase) / den;
  }
  return s / total;
}

}  // namespace

TEST(GreenZ1, Examples) {
  EXPECT_NEAR(green_z1(2.5, 0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(green_z1(2.0 * std::sqrt(2.0), 0), 0.5, 1e-14);
  EXPECT_NEAR(green_z1(10.0, 0), 1.0 / std::sqrt(96.0), 1e-14);
  for (double lambda : {2.5, 3.0, 10.0})
    for (long k : {0L, 1L, 4L, -3L}) EXPECT_NEAR(green_z1(lambda, k), torus_integral(lambda, {k}, 4000), 1e-10);
  EXPECT_THROW(green_z1(2.0, 0), PreconditionError);
}

TEST(GreenZd, CrossMethod) {
  EXPECT_NEAR(green_zd(2.5, 1).value(), 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(green_zd(2.5, 1, GreenMethod::bessel).value(), 2.0 / 3.0, 1e-10);
  for (int d = 2; d <= 4; ++d) {
    const double lambda = 2.0 * d + 0.1;
    std::vector<std::vector<long>> ks = {std::vector<long>(d, 0), std::vector<long>(d, 1)};
    std::vector<long> far(d, 0);
    far[0] = 5;
    ks.push_back(far);
    for (auto& k : ks) {
      double q = green_zd(lambda, k, GreenMethod::torus_quadrature).value();
      double b = green_zd(lambda, k, GreenMethod::bessel).value();
      EXPECT_NEAR(q, b, 1e-8) << "d=" << d;
    }
  }
}

TEST(GreenZd, QuadratureOracle) {
  EXPECT_NEAR(green_zd(4.5, {0, 0}).value(), torus_integral(4.5, {0, 0}, 400), 1e-8);
  EXPECT_NEAR(green_zd(4.5, {2, 1}).value(), torus_integral(4.5, {2, 1}, 400), 1e-8);
  EXPECT_NEAR(green_zd(6.5, {1, 0, 0}).value(), torus_integral(6.5, {1, 0, 0}, 80), 1e-7);
}

TEST(GreenZd, EdgeValues) {
  // 2 G_3(6) is the Watson integral P(1)/3
  double v = green_zd(6.0, 3, GreenMethod::bessel).value();
  EXPECT_NEAR(v, 0.252731, 1e-5);
  EXPECT_GT(2.0 * v, 0.5);
  EXPECT_LT(2.0 * v, 0.6);
  EXPECT_TRUE(green_zd(4.0, 2).is_infinite());
  EXPECT_TRUE(green_zd(2.0, 1).is_infinite());
  EXPECT_TRUE(green_zd(8.0, 4, GreenMethod::bessel).is_finite());
  EXPECT_THROW(green_zd(5.0, 3), PreconditionError);
}

TEST(GreenZd, PositivityDecayAndResolventBracket) {
  for (int d = 1; d <= 3; ++d) {
    const double lambda = 2.0 * d + 0.3;
    double g0 = green_zd(lambda, d).value();
    for (long a = 0; a <= 4; ++a) {
      std::vector<long> k(d, 0);
      k[0] = a;
      double g = green_zd(lambda, k).value();
      EXPECT_GT(g, 0.0);
      EXPECT_LE(g, g0 + 1e-15);
    }
    for (double lp : {lambda + 0.1, lambda + 1.0}) {
      double diff = g0 - green_zd(lp, d).value();
      EXPECT_GE(diff, (lp - lambda) * green_moment2(lp, d).value() * (1 - 1e-10));
      EXPECT_LE(diff, (lp - lambda) * green_moment2(lambda, d).value() * (1 + 1e-10));
    }
  }
}

TEST(GreenN, EdgeExact) {
  EXPECT_EQ(green_n(2.0, 3, 7), 4.0);
  EXPECT_EQ(green_n(2.0, 0, 0), 1.0);
  for (long k = 0; k <= 50; ++k)
    for (long l = 0; l <= 50; ++l) EXPECT_EQ(green_n(2.0, k, l), static_cast<double>(std::min(k, l) + 1));
  EXPECT_NEAR(green_n(2.5, 0, 0), 0.5, 1e-14);
  EXPECT_THROW(green_n(1.9, 0, 0), PreconditionError);
  EXPECT_THROW(green_n(2.5, -1, 0), PreconditionError);
}

TEST(GreenN, Harmonicity) {
  for (long l : {5L, 9L})
    for (long k = 1; k <= 15; ++k) {
      if (k >= l - 1 && k <= l + 1) continue;
      EXPECT_EQ(2.0 * green_n(2.0, k, l), green_n(2.0, k - 1, l) + green_n(2.0, k + 1, l));
    }
}

TEST(GreenN, FiniteVolume) {
  auto a = build_segment(4000);
  const double spr = 2.0 * std::cos(pi / 4002.0);
  for (double lambda : {2.1, 2.5}) {
    for (long l : {0L, 7L, 20L}) {
      std::vector<double> b(4001, 0.0);
      b[l] = 1.0;
      auto x = shifted_solve(a, lambda, b, 1e-13, spr);
      for (long k : {0L, 3L, 20L}) EXPECT_NEAR(x[k], green_n(lambda, k, l), 1e-6);
    }
  }
}

TEST(SegmentProjected, MatchesDense) {
  const int n = 12;
  auto ds = dense_spectrum(build_segment(n));
  const double lambda = ds.spectrum.top();
  for (long k : {0L, 3L})
    for (long l : {0L, 5L}) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)  // all but the top eigenvector
        s += ds.eigen.vectors(k, j) * ds.eigen.vectors(l, j) / (lambda - ds.eigen.values[j]);
      EXPECT_NEAR(segment_projected_resolvent(n, lambda, k, l), s, 1e-12);
    }
}

TEST(GreenMoment2, Examples) {
  EXPECT_NEAR(green_moment2(2.5, 1).value(), 2.5 / std::pow(2.25, 1.5), 1e-10);
  EXPECT_NEAR(green_moment2(2.0 * std::sqrt(2.0), 1).value(), 2.0 * std::sqrt(2.0) / 8.0, 1e-10);
  EXPECT_NEAR(green_z1_moment2(2.5), 2.5 / std::pow(2.25, 1.5), 1e-14);
  for (int d = 1; d <= 4; ++d) EXPECT_NEAR(green_moment2(100.0, d).value() * 1e4, 1.0, 0.01);
}

TEST(Recurrence, Classification) {
  EXPECT_EQ(classify_recurrence(GraphModel::half_line()), Recurrence::Transient);
  EXPECT_EQ(classify_recurrence(GraphModel::line()), Recurrence::Recurrent);
  EXPECT_EQ(classify_recurrence(GraphModel::lattice(2)), Recurrence::Recurrent);
  EXPECT_EQ(classify_recurrence(GraphModel::lattice(3)), Recurrence::Transient);
  for (int d = 1; d <= 4; ++d) EXPECT_EQ(classify_recurrence(GraphModel::ncomb(d)), Recurrence::Transient);
  EXPECT_EQ(classify_recurrence(GraphModel::zcomb(1)), Recurrence::Recurrent);
  EXPECT_EQ(classify_recurrence(GraphModel::zcomb(2)), Recurrence::Recurrent);
  EXPECT_EQ(classify_recurrence(GraphModel::zcomb(3)), Recurrence::Transient);
  EXPECT_THROW(classify_recurrence(GraphModel::segment(4)), PreconditionError);
}

TEST(Tauberian, Origin) {
  double g3 = green_zd(6.0, 3, GreenMethod::bessel).value();
  EXPECT_NEAR(tauberian_partial_sums(3, 0), 4.0 * g3 * g3, 1e-9);
  EXPECT_NEAR(tauberian_partial_sums(3, 0), 0.2555, 1e-3);
  EXPECT_THROW(tauberian_partial_sums(2, 4), PreconditionError);
  EXPECT_THROW(tauberian_partial_sums(3, -1), PreconditionError);
}

TEST(Tauberian, GrowsWithN) {
  double s1 = tauberian_partial_sums(3, 2), s2 = tauberian_partial_sums(3, 4);
  EXPECT_GT(s2, s1);
}
