#pragma once

#include <functional>

#include "common.hpp"
#include "dense.hpp"
#include "graph_core.hpp"
#include "lattice_green.hpp"
#include "model.hpp"

namespace hop {

struct SecularProblem {
  double base_norm = 0.0;
  std::function<Ext(double)> fiber_green_diag;
  double fiber_norm = 0.0;
};

// Root of ||A_G|| * G_H(lambda) = 1 above ||A_H||, else ||A_H||.
inline double comb_norm(const SecularProblem& p, double tol = 1e-15) {
  require(tol > 0, "comb_norm: tol must be positive");
  auto f = [&](double x) { return p.base_norm * p.fiber_green_diag(x).as_double(); };
  Ext edge = p.fiber_green_diag(p.fiber_norm);
  if (!(edge.is_infinite() || edge.value() * p.base_norm > 1.0)) return p.fiber_norm;
  double lo = p.fiber_norm + 1e-12, hi = p.fiber_norm + 1.0;
  while (f(hi) >= 1.0) hi = p.fiber_norm + 2.0 * (hi - p.fiber_norm);
  while (hi - lo > tol * hi) {
    double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    if (f(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

inline GraphModel comb_base(const GraphModel& m) {
  require(m.is_comb(), "comb model expected");
  return m.kind == Kind::NComb ? GraphModel::half_line() : GraphModel::lattice(m.d);
}

inline GraphModel comb_fiber(const GraphModel& m) {
  require(m.is_comb(), "comb model expected");
  return m.kind == Kind::NComb ? GraphModel::lattice(m.d) : GraphModel::line();
}

inline double lattice_norm(const GraphModel& m) {
  switch (m.kind) {
    case Kind::HalfLineN: return 2.0;
    case Kind::LineZ:
    case Kind::LatticeZd: return 2.0 * m.lattice_dim();
    default: throw PreconditionError("lattice_norm: N or Z^d expected");
  }
}

// Diagonal of the Z^d resolvent including the edge value (marker if recurrent).
inline Ext zd_diagonal(double lambda, int d) {
  if (d == 1) return lambda == 2.0 ? Ext::infinity() : Ext(green_z1(lambda, 0));
  return green_zd(lambda, d);
}

inline SecularProblem secular_problem(const GraphModel& m) {
  require(m.is_comb(), "secular_problem: comb model expected");
  SecularProblem p;
  GraphModel fiber = comb_fiber(m);
  p.base_norm = lattice_norm(comb_base(m));
  p.fiber_norm = lattice_norm(fiber);
  const int fd = fiber.lattice_dim();
  p.fiber_green_diag = [fd](double x) { return zd_diagonal(x, fd); };
  return p;
}

// ||A|| of an infinite catalog model.
inline double infinite_norm(const GraphModel& m) {
  if (m.is_comb()) return comb_norm(secular_problem(m));
  if (m.kind == Kind::SegmentN || m.kind == Kind::TorusZd)
    throw PreconditionError("infinite_norm: finite model given");
  return lattice_norm(m);
}

struct HiddenSpectrumReport {
  double comb_norm = 0.0;
  double base_disjoint_norm = 0.0;
  double gap = 0.0;
  bool present = false;
};

inline HiddenSpectrumReport hidden_spectrum(const GraphModel& m, double tol = 1e-12) {
  auto p = secular_problem(m);
  HiddenSpectrumReport r;
  r.comb_norm = comb_norm(p);
  r.base_disjoint_norm = p.fiber_norm;
  r.gap = std::max(0.0, r.comb_norm - p.fiber_norm);
  r.present = r.gap > tol;
  return r;
}

namespace detail {

inline Ext base_green(const GraphModel& base, double mu, const Site& g, const Site& gp) {
  if (base.kind == Kind::HalfLineN) return Ext(green_n(mu, g.at(0), gp.at(0)));
  const int d = base.lattice_dim();
  std::vector<long> k(d);
  for (int j = 0; j < d; ++j) k[j] = g.at(j) - gp.at(j);
  if (d == 1 && mu > 2.0) return Ext(green_z1(mu, k[0]));
  return green_zd(mu, k);
}

inline Ext fiber_green(const GraphModel& fiber, double lambda, const std::vector<long>& h) {
  if (fiber.lattice_dim() == 1 && lambda > 2.0) return Ext(green_z1(lambda, h.at(0)));
  return green_zd(lambda, h);
}

// Splits a comb site into (base coords, fiber coords).
inline std::pair<Site, Site> split_site(const GraphModel& m, const Site& x) {
  const int bd = comb_base(m).lattice_dim(), fd = comb_fiber(m).lattice_dim();
  require(static_cast<int>(x.size()) == bd + fd, "comb site has wrong number of coordinates");
  if (m.kind == Kind::NComb) require(x[0] >= 0, "NComb base coordinate must be >= 0");
  return {Site(x.begin(), x.begin() + bd), Site(x.begin() + bd, x.end())};
}

// Comb resolvent element; lambda may equal the comb norm when every factor
// stays finite there.
inline Ext comb_resolvent_at(const GraphModel& m, double lambda, const Site& x, const Site& y) {
  auto [g, h] = split_site(m, x);
  auto [gp, hp] = split_site(m, y);
  GraphModel base = comb_base(m), fiber = comb_fiber(m);
  std::vector<long> dh(h.size()), zero(h.size(), 0);
  for (std::size_t j = 0; j < h.size(); ++j) dh[j] = h[j] - hp[j];
  Ext g0 = fiber_green(fiber, lambda, zero);
  if (g0.is_infinite()) return g0;
  double mu = 1.0 / g0.value();
  // at the comb norm mu equals the base norm; snap the rounding
  const double base_norm = lattice_norm(base);
  if (std::abs(mu - base_norm) <= 1e-12 * base_norm) mu = std::max(mu, base_norm);
  Ext gb = base_green(base, mu, g, gp);
  if (gb.is_infinite()) return gb;
  const bool same = g == gp;
  double out = mu * (mu * gb.value() - (same ? 1.0 : 0.0)) * fiber_green(fiber, lambda, h).value() *
               fiber_green(fiber, lambda, hp).value();
  if (same) {
    Ext d = fiber_green(fiber, lambda, dh);
    if (d.is_infinite()) return d;
    out += d.value();
  }
  return Ext(out);
}

}  // namespace detail

inline double comb_resolvent_element(const GraphModel& m, double lambda, const Site& x, const Site& y) {
  require(m.is_comb(), "comb_resolvent_element: comb model expected");
  require(lambda > infinite_norm(m), "comb_resolvent_element: lambda must exceed the comb norm");
  return detail::comb_resolvent_at(m, lambda, x, y).value();
}

// R_{A_X + D}(lambda) via the Krein formula
// R_Y = R_X + R_X[:,K] (I - D_KK R_X[K,K])^{-1} D_KK R_X[K,:], K = supp D.
inline dense::Matrix krein_resolvent_finite(const SparseOperator& ax, const SparseOperator& d, double lambda,
                                            std::size_t cap = 4000) {
  const std::size_t n = ax.dimension();
  require(d.dimension() == n, "krein: perturbation has wrong dimension");
  require(n <= cap, "krein: dimension exceeds the dense cap");
  require(d.is_symmetric(), "krein: perturbation must be symmetric");

  std::vector<std::size_t> K;
  for (std::size_t x = 0; x < n; ++x)
    if (d.row_end(x) > d.row_begin(x)) K.push_back(x);
  const std::size_t k = K.size();

  double norm_x = 0.0, norm_d = 0.0;
  {
    auto ex = dense::symmetric_eigen(dense::Matrix(n, ax.to_dense()), false);
    norm_x = std::max(std::abs(ex.values.front()), std::abs(ex.values.back()));
    if (k > 0) {
      dense::Matrix dk(k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) dk(i, j) = d.entry(K[i], K[j]);
      auto ed = dense::symmetric_eigen(dk, false);
      norm_d = std::max(std::abs(ed.values.front()), std::abs(ed.values.back()));
    }
  }
  require(lambda > norm_x + norm_d, "krein: lambda must exceed ||A_X|| + ||D||");

  dense::Matrix shifted(n);
  for (std::size_t i = 0; i < n; ++i) {
    shifted(i, i) = lambda;
    for (std::size_t q = ax.row_begin(i); q < ax.row_end(i); ++q) shifted(i, ax.col(q)) -= ax.mult(q);
  }
  dense::Matrix rx = dense::inverse(shifted);
  if (k == 0) return rx;

  // M = I - D_KK R_KK on range(P)
  dense::Matrix mk = dense::Matrix::identity(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += d.entry(K[i], K[l]) * rx(K[l], K[j]);
      mk(i, j) -= s;
    }
  dense::Matrix mk_inv = dense::inverse(mk);
  double cond = dense::norm1(mk) * dense::norm1(mk_inv);
  if (!(cond < 1e12)) throw NumericalError("krein: P - S(lambda) is ill-conditioned, cond ~ " + std::to_string(cond));

  // X = M^{-1} D_KK, then R_Y = R_X + R_X[:,K] X R_X[K,:]
  dense::Matrix xk(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += mk_inv(i, l) * d.entry(K[l], K[j]);
      xk(i, j) = s;
    }
  std::vector<double> left(n * k, 0.0);  // R_X[:,K] X
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += rx(r, K[l]) * xk(l, j);
      left[r * k + j] = s;
    }
  dense::Matrix ry = rx;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += left[r * k + j] * rx(K[j], c);
      ry(r, c) += s;
    }
  return ry;
}

}  // namespace hop
