#pragma once

#include "finite_volume.hpp"
#include "lattice_green.hpp"
#include "secular.hpp"

namespace hop {

namespace detail {

inline void require_pf_supported(const GraphModel& m) {
  if (m.is_finite()) throw PreconditionError("PF weight: infinite catalog model expected");
  if (m.kind == Kind::NComb && m.d >= 3)
    throw UnsupportedError(
        "PF weight of N|Z^d for d >= 3 needs the regularized fiber integral "
        "(1/(2pi)^d) int (e^{-i<k,theta>} - 1)/(sum(1 - cos theta_j)) and is not implemented");
}

// Fiber decay rate of the Z-fiber weight: G(lambda;m)/G(lambda;0) = q^|m|.
inline double z_fiber_rate(double lambda) {
  double s = std::sqrt((lambda - 2.0) * (lambda + 2.0));
  return (lambda - s) / 2.0;
}

// sum_{|m| <= n} q^{2|m|}
inline double geometric_fiber_sum(double q, int n) {
  double q2 = q * q;
  return 1.0 + 2.0 * q2 * -std::expm1(n * std::log(q2)) / (1.0 - q2);
}

// Normalized Z^2 fiber weight G(lambda;k)/G(lambda;0) on 0 <= k_j <= K.
inline std::vector<double> z2_fiber_grid(double lambda, int K) {
  auto g = green_z2_grid(lambda, K);
  const double g0 = g[0];
  for (double& v : g) v /= g0;
  return g;
}

// Beyond this radius the N|Z^2 fiber weight squared is below 1e-40.
inline int z2_fiber_cutoff(double lambda) {
  double rate = std::acosh(lambda / 2.0 - 1.0);  // decay along an axis
  return static_cast<int>(std::ceil(46.0 / rate)) + 2;
}

}  // namespace detail

// PF weight v with A v = ||A|| v, v(root) = 1.
inline double pf_weight(const GraphModel& m, const Site& x) {
  detail::require_pf_supported(m);
  switch (m.kind) {
    case Kind::HalfLineN:
      require(x.size() == 1 && x[0] >= 0, "N site must be one coordinate >= 0");
      return static_cast<double>(x[0] + 1);
    case Kind::LineZ:
    case Kind::LatticeZd:
      require(static_cast<int>(x.size()) == m.lattice_dim(), "Z^d site has wrong dimension");
      return 1.0;
    case Kind::ZComb: {
      require(static_cast<int>(x.size()) == m.d + 1, "Z^d|Z site has wrong dimension");
      double q = std::sqrt(m.d * m.d + 1.0) - m.d;
      return std::pow(q, static_cast<double>(std::labs(x.back())));
    }
    case Kind::NComb: {
      auto [g, h] = detail::split_site(m, x);
      const double lambda = infinite_norm(m);
      double base = static_cast<double>(g[0] + 1);
      if (m.d == 1) return base * std::pow(detail::z_fiber_rate(lambda), static_cast<double>(std::labs(h[0])));
      std::vector<long> k(h.begin(), h.end());
      return base * green_zd(lambda, k).value() / green_zd(lambda, m.d).value();
    }
    default: break;
  }
  throw PreconditionError("pf_weight: unsupported model");
}

// ||v restricted to Lambda_n||^2.
inline double pf_partial_norm(const GraphModel& m, int n) {
  detail::require_pf_supported(m);
  require(n >= 0, "pf_partial_norm: n must be >= 0");
  const double dn = n;
  const double n_sum = (dn + 1.0) * (dn + 2.0) * (2.0 * dn + 3.0) / 6.0;  // sum_{k<=n} (k+1)^2
  switch (m.kind) {
    case Kind::HalfLineN: return n_sum;
    case Kind::LineZ:
    case Kind::LatticeZd: return std::pow(2.0 * dn + 1.0, m.lattice_dim());
    case Kind::ZComb: {
      double q = std::sqrt(m.d * m.d + 1.0) - m.d;
      return std::pow(2.0 * dn + 1.0, m.d) * detail::geometric_fiber_sum(q, n);
    }
    case Kind::NComb: {
      const double lambda = infinite_norm(m);
      if (m.d == 1) return n_sum * detail::geometric_fiber_sum(detail::z_fiber_rate(lambda), n);
      const int K = std::min(n, detail::z2_fiber_cutoff(lambda));
      auto w = detail::z2_fiber_grid(lambda, K);
      KahanSum s;
      for (int k1 = 0; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) {
          double v = w[k1 * (K + 1) + k2];
          double mult = (k1 ? 2.0 : 1.0) * (k2 ? 2.0 : 1.0);
          s.add(mult * v * v);
        }
      return n_sum * s.value();
    }
    default: break;
  }
  throw PreconditionError("pf_partial_norm: unsupported model");
}

// ||v restricted to Lambda_n||^2 / ||v_n||^2 with v_n the finite PF vector.
inline double pf_finite_ratio(const GraphModel& m, int n) {
  require(m.kind == Kind::HalfLineN || (m.kind == Kind::NComb && m.d <= 2),
          "pf_finite_ratio: model must be N or N|Z^d with d = 1, 2");
  FiniteVolume fv(m, n);
  return pf_partial_norm(m, n) / fv.pf_norm2();
}

struct DimensionEstimate {
  double d_G = 0.0;
  double d_PF = 0.0;
  int n_lo = 0;
  int n_hi = 0;
  double residual_G = 0.0;
  double residual_PF = 0.0;
  double fit_residual = 0.0;  // max of the two
  bool reliable = true;       // fit_residual <= 0.05
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "least_squares: need matching vectors of length >= 2");
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / k, my = sy / k, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0, "least_squares: x values must not all coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.residual = std::sqrt(rss / k);
  return f;
}

inline std::vector<int> doubling_range(int n0, int points) {
  std::vector<int> ns;
  for (int j = 0; j < points; ++j) ns.push_back(n0 << j);
  return ns;
}

inline DimensionEstimate estimate_dimensions(const GraphModel& m, const std::vector<int>& ns) {
  require(ns.size() >= 5, "estimate_dimensions: need at least 5 values of n");
  for (int n : ns) require(n >= 1, "estimate_dimensions: n must be >= 1");
  std::vector<double> ln, lv, lp;
  for (int n : ns) {
    ln.push_back(std::log(static_cast<double>(n)));
    lv.push_back(std::log(static_cast<double>(Exhaustion{m, n}.vertex_count())));
    lp.push_back(std::log(pf_partial_norm(m, n)));
  }
  auto g = least_squares(ln, lv), p = least_squares(ln, lp);
  DimensionEstimate e;
  e.d_G = g.slope;
  e.d_PF = p.slope;
  e.n_lo = *std::min_element(ns.begin(), ns.end());
  e.n_hi = *std::max_element(ns.begin(), ns.end());
  e.residual_G = g.residual;
  e.residual_PF = p.residual;
  e.fit_residual = std::max(g.residual, p.residual);
  e.reliable = e.fit_residual <= 0.05;
  return e;
}

}  // namespace hop
