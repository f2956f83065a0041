#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hop/graph_core.hpp"
#include "hop/spectral_ops.hpp"

using namespace hop;

namespace {

std::vector<long> degrees(const SparseOperator& a) {
  std::vector<long> d;
  for (std::size_t x = 0; x < a.dimension(); ++x) d.push_back(a.degree(x));
  std::sort(d.begin(), d.end());
  return d;
}

double dense_top(const SparseOperator& a) { return dense_spectrum(a).spectrum.top(); }

}  // namespace

TEST(GraphCore, SegmentSmallest) {
  auto a = build_segment(1);
  EXPECT_EQ(a.dimension(), 2u);
  EXPECT_EQ(a.edge_count(), 1);
  EXPECT_EQ(a.degree(0), 1);
  EXPECT_EQ(a.degree(1), 1);
}

TEST(GraphCore, SegmentDegrees) {
  EXPECT_EQ(degrees(build_segment(5)), (std::vector<long>{1, 1, 2, 2, 2, 2}));
}

TEST(GraphCore, SegmentTopEigenvalue) {
  EXPECT_NEAR(dense_top(build_segment(10)), 2.0 * std::cos(pi / 12.0), 1e-12);
}

TEST(GraphCore, TorusTriangle) {
  auto s = dense_spectrum(build_torus(1, 1)).spectrum.expanded();
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s[0], -1.0, 1e-12);
  EXPECT_NEAR(s[1], -1.0, 1e-12);
  EXPECT_NEAR(s[2], 2.0, 1e-12);
}

TEST(GraphCore, TorusRegular) {
  auto a = build_torus(2, 1);
  EXPECT_EQ(a.dimension(), 9u);
  for (std::size_t x = 0; x < 9; ++x) EXPECT_EQ(a.degree(x), 4);
  EXPECT_NEAR(dense_top(build_torus(1, 5)), 2.0, 1e-12);
}

TEST(GraphCore, CombHandCounts) {
  auto k2 = build_segment(1);
  auto c = build_comb(k2, k2, 0);
  EXPECT_EQ(c.dimension(), 4u);
  EXPECT_EQ(c.edge_count(), 3);

  auto c2 = build_comb(build_segment(1), build_torus(1, 1), 0);
  EXPECT_EQ(c2.dimension(), 6u);
  EXPECT_EQ(degrees(c2), (std::vector<long>{2, 2, 2, 2, 3, 3}));
}

TEST(GraphCore, CombTopMatchesExplicitMatrix) {
  auto c = build_comb(build_segment(2), build_segment(2), 0);
  // explicit 9x9 matrix: base path on the roots, a path fiber at each base vertex
  dense::Matrix m(9);
  auto link = [&](int x, int y) { m(x, y) = m(y, x) = 1.0; };
  for (int g = 0; g < 3; ++g) {
    link(3 * g, 3 * g + 1);
    link(3 * g + 1, 3 * g + 2);
  }
  link(0, 3);
  link(3, 6);
  auto e = dense::symmetric_eigen(m, false);
  EXPECT_NEAR(dense_top(c), e.values.back(), 1e-12);
}

TEST(GraphCore, Matvec) {
  EXPECT_EQ(matvec(build_segment(1), {1, 0}), (std::vector<double>{0, 1}));
  EXPECT_EQ(matvec(build_torus(1, 1), {1, 1, 1}), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(matvec(build_segment(2), {1, 2, 3}), (std::vector<double>{2, 4, 2}));
}

TEST(GraphCore, VertexCounts) {
  EXPECT_EQ((Exhaustion{GraphModel::half_line(), 7}.build().dimension()), 8u);
  EXPECT_EQ((Exhaustion{GraphModel::lattice(2), 3}.build().dimension()), 49u);
  EXPECT_EQ((Exhaustion{GraphModel::ncomb(2), 2}.build().dimension()), 3u * 25u);
  EXPECT_EQ((Exhaustion{GraphModel::zcomb(1), 3}.build().dimension()), 49u);
  for (auto m : {GraphModel::half_line(), GraphModel::lattice(3), GraphModel::ncomb(1), GraphModel::zcomb(2)}) {
    Exhaustion ex{m, 2};
    EXPECT_EQ(ex.vertex_count(), ex.build().dimension()) << m.name();
  }
}

TEST(GraphCore, SymmetryAndRowSums) {
  std::mt19937_64 rng(7);
  for (auto m : {GraphModel::half_line(), GraphModel::lattice(2), GraphModel::ncomb(1), GraphModel::ncomb(2),
                 GraphModel::zcomb(1), GraphModel::zcomb(2)}) {
    auto a = Exhaustion{m, 3}.build();
    const std::size_t V = a.dimension();
    EXPECT_TRUE(a.is_symmetric());
    std::uniform_int_distribution<std::size_t> pick(0, V - 1);
    for (int t = 0; t < 100; ++t) {
      std::size_t x = pick(rng), y = pick(rng);
      std::vector<double> ex(V, 0.0), ey(V, 0.0);
      ex[x] = 1.0;
      ey[y] = 1.0;
      EXPECT_EQ(matvec(a, ex)[y], matvec(a, ey)[x]);
    }
    std::vector<double> ones(V, 1.0);
    auto rs = matvec(a, ones);
    for (std::size_t x = 0; x < V; ++x) {
      EXPECT_EQ(rs[x], static_cast<double>(a.degree(x)));
      EXPECT_EQ(a.entry(x, x), 0);
    }
  }
  EXPECT_EQ((Exhaustion{GraphModel::zcomb(2), 3}.build().max_degree()), 6);
  EXPECT_EQ((Exhaustion{GraphModel::lattice(3), 2}.build().max_degree()), 6);
  EXPECT_EQ((Exhaustion{GraphModel::half_line(), 5}.build().max_degree()), 2);
}

TEST(GraphCore, CombTensorFormula) {
  std::vector<std::pair<SparseOperator, SparseOperator>> cases = {
      {build_segment(3), build_torus(1, 2)}, {build_torus(1, 1), build_torus(1, 4)},
      {build_torus(2, 1), build_torus(1, 1)}, {build_segment(2), build_torus(2, 1)}};
  for (auto& [g, h] : cases) {
    for (std::size_t root : {std::size_t{0}, h.dimension() - 1}) {
      auto c = build_comb(g, h, root);
      const std::size_t B = g.dimension(), F = h.dimension();
      ASSERT_LE(B * F, 100u);
      for (std::size_t b1 = 0; b1 < B; ++b1)
        for (std::size_t f1 = 0; f1 < F; ++f1)
          for (std::size_t b2 = 0; b2 < B; ++b2)
            for (std::size_t f2 = 0; f2 < F; ++f2) {
              int expect = (f1 == root && f2 == root ? g.entry(b1, b2) : 0) + (b1 == b2 ? h.entry(f1, f2) : 0);
              EXPECT_EQ(c.entry(comb_index(b1, f1, F), comb_index(b2, f2, F)), expect);
            }
    }
  }
}

TEST(GraphCore, Nesting) {
  // S_n sits inside S_{n+1} as the first n+1 vertices
  auto a = build_segment(6), b = build_segment(7);
  for (std::size_t x = 0; x <= 6; ++x)
    for (std::size_t y = 0; y <= 6; ++y) EXPECT_EQ(a.entry(x, y), b.entry(x, y));
}

TEST(GraphCore, MultiEdges) {
  OperatorBuilder bld(2);
  bld.add_edge(0, 1, 2);
  auto a = bld.build();
  EXPECT_EQ(a.entry(0, 1), 2);
  EXPECT_EQ(a.degree(0), 2);
}

TEST(GraphCore, PerturbationDensity) {
  Exhaustion zz{GraphModel::zcomb(1), 1};
  EXPECT_NEAR(perturbation_density(zz, 1), 2.0 / 3.0, 1e-15);
  Exhaustion nz{GraphModel::ncomb(1), 10};
  EXPECT_NEAR(perturbation_density(nz, 10), 21.0 / 231.0, 1e-15);
  for (auto m : {GraphModel::ncomb(1), GraphModel::ncomb(2), GraphModel::zcomb(1), GraphModel::zcomb(3)}) {
    Exhaustion ex{m, 1};
    double prev = perturbation_density(ex, 10);
    for (int n : {100, 1000, 10000}) {
      double cur = perturbation_density(ex, n);
      EXPECT_LT(cur, prev) << m.name();
      prev = cur;
    }
    EXPECT_LT(prev, 1e-3) << m.name();
  }
}

TEST(GraphCore, Errors) {
  EXPECT_THROW(build_segment(0), PreconditionError);
  EXPECT_THROW(build_torus(0, 2), PreconditionError);
  EXPECT_THROW(perturbation_density(Exhaustion{GraphModel::half_line(), 1}, 3), PreconditionError);
}
