#include <gtest/gtest.h>

#include <sstream>

#include "hop/ids.hpp"

using namespace hop;

TEST(Ids, StepCurve) {
  auto s = SpectrumStructured::from_entries({{-1.0, 2}, {2.0, 1}});
  auto c = ids_from_spectrum(s, 2.0);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.energy[0], 0.0);
  EXPECT_NEAR(c.cumulative[0], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(c.energy[1], 3.0);
  EXPECT_EQ(c.cumulative[1], 1.0);
  EXPECT_EQ(c(-0.1), 0.0);
  EXPECT_NEAR(c(0.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c(2.9), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(c(3.0), 1.0);
}

TEST(Ids, Kolmogorov) {
  IdsCurve f{{0.0, 1.0}, {0.5, 1.0}}, g{{0.5, 1.0}, {0.25, 1.0}};
  EXPECT_NEAR(kolmogorov_distance(f, g), 0.5, 1e-15);
  EXPECT_EQ(kolmogorov_distance(f, f), 0.0);
  EXPECT_EQ(kolmogorov_distance(g, f), kolmogorov_distance(f, g));
}

TEST(Ids, EmpiricalMatchesDense) {
  FiniteVolume fv(GraphModel::zcomb(1), 5);
  auto a = ids_empirical(fv);
  auto d = ids_from_spectrum(dense_spectrum(fv.build_operator()).spectrum, fv.norm_inf());
  for (double x = -0.5; x < 6.0; x += 0.01) EXPECT_NEAR(a(x), d(x), 1e-12) << x;
  EXPECT_NEAR(a.energy.front(), fv.eps0(), 1e-12);
  EXPECT_EQ(a.cumulative.back(), 1.0);
}

TEST(Ids, ShiftDistanceDecreases) {
  double prev = 1.0;
  for (int n : {25, 50, 100, 200}) {
    double d = ids_shift_distance(GraphModel::zcomb(1), n);
    EXPECT_LE(d, prev) << n;
    prev = d;
  }
  EXPECT_LT(prev, 0.02);
  EXPECT_LT(ids_shift_distance(GraphModel::ncomb(1), 200), 0.02);
  EXPECT_THROW(ids_shift_distance(GraphModel::line(), 10), PreconditionError);
}

TEST(Ids, GapReport) {
  auto nz = eps0_E0(FiniteVolume(GraphModel::ncomb(1), 300));
  EXPECT_TRUE(nz.hidden);
  EXPECT_NEAR(nz.predicted_gap, 2.0 * std::sqrt(2.0) - 2.0, 1e-12);
  EXPECT_GT(nz.E0 - nz.eps0, 0.5 * nz.predicted_gap);
  EXPECT_NEAR(nz.theta, 10.0 / 601.0, 1e-15);

  auto nz3 = eps0_E0(FiniteVolume(GraphModel::ncomb(3), 8));
  EXPECT_FALSE(nz3.hidden);
  EXPECT_EQ(nz3.predicted_gap, 0.0);
}

TEST(Ids, Csv) {
  std::ostringstream out;
  write_ids_csv(out, IdsCurve{{0.0, 1.5}, {0.25, 1.0}});
  EXPECT_EQ(out.str(), "energy,F\n0,0.25\n1.5,1\n");
}
