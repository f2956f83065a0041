#pragma once

#include <limits>

#include "finite_volume.hpp"
#include "lattice_green.hpp"
#include "perron.hpp"
#include "secular.hpp"
#include "spectral_ops.hpp"

namespace hop {

struct BoseParams {
  double beta = 1.0;
  double mu = 0.0;
};

// 1/(e^{beta(eps - mu)} - 1)
inline double bose(double eps, const BoseParams& p) {
  require(p.beta > 0.0, "bose: beta must be positive");
  require(eps > p.mu, "bose: energy must exceed the chemical potential");
  return 1.0 / std::expm1(p.beta * (eps - p.mu));
}

// 1/(e^x - 1) - 1/x, continued by -1/2 at 0. Analytic on the real line.
inline double f_reg(double x) {
  if (std::abs(x) < 0.5) {
    // Bernoulli series
    const double x2 = x * x;
    return -0.5 + x * (1.0 / 12.0 +
                       x2 * (-1.0 / 720.0 +
                             x2 * (1.0 / 30240.0 +
                                   x2 * (-1.0 / 1209600.0 + x2 * (1.0 / 47900160.0 + x2 * (-691.0 / 1307674368000.0))))));
  }
  return 1.0 / std::expm1(x) - 1.0 / x;
}

// ---------------------------------------------------------------------------
// Scaling functions

namespace detail {

// sum_{m >= 0} 1/(A + kappa (m + c)^2) for A + kappa c^2 > 0; direct sum to M
// then Euler-Maclaurin with the integral in closed form.
inline double quadratic_series(double A, double kappa, double c) {
  const int M = 2000;
  KahanSum s;
  for (int m = 0; m < M; ++m) s.add(1.0 / (A + kappa * (m + c) * (m + c)));
  const double u = M + c;
  double integral;
  if (A > 0) {
    double r = std::sqrt(A / kappa);
    integral = std::atan2(r, u) / std::sqrt(A * kappa);  // (pi/2 - atan(u/r)) / sqrt(A kappa)
  } else if (A < 0) {
    double r = std::sqrt(-A / kappa);
    integral = std::log1p(2.0 * r / (u - r)) / (2.0 * std::sqrt(-A * kappa));
  } else {
    integral = 1.0 / (kappa * u);
  }
  const double g = 1.0 / (A + kappa * u * u);
  const double gp = -2.0 * kappa * u * g * g;
  s.add(integral);
  s.add(0.5 * g);
  s.add(-gp / 12.0);
  return s.value();
}

}  // namespace detail

// r(a) = sum_{m>=0} 1/(a + pi^2 m (m+2))
inline Ext scaling_r(double a) {
  require(a >= 0.0, "r(a) needs a >= 0");
  if (a == 0.0) return Ext::infinity();
  if (std::isinf(a)) return Ext(0.0);
  return Ext(detail::quadratic_series(a - pi * pi, pi * pi, 1.0));
}

// s(a) = sum_{m>=0} 1/(a + 2 pi^2 m^2)
inline Ext scaling_s(double a) {
  require(a >= 0.0, "s(a) needs a >= 0");
  if (a == 0.0) return Ext::infinity();
  if (std::isinf(a)) return Ext(0.0);
  return Ext(detail::quadratic_series(a, 2.0 * pi * pi, 0.0));
}

// R(a) = r(a) for d = 1, 1/a for d = 2.
inline Ext scaling_R(double a, int d) {
  require(d == 1 || d == 2, "R(a) is defined for d = 1, 2");
  if (d == 1) return scaling_r(a);
  require(a >= 0.0, "R(a) needs a >= 0");
  if (a == 0.0) return Ext::infinity();
  return Ext(std::isinf(a) ? 0.0 : 1.0 / a);
}

// Two-sided form of s used for Z|Z: sum_{m in Z} 1/(a + 2 pi^2 m^2) = 2 s(a) - 1/a.
inline Ext scaling_s_two_sided(double a) {
  Ext s = scaling_s(a);
  if (s.is_infinite()) return s;
  return Ext(std::isinf(a) ? 0.0 : 2.0 * s.value() - 1.0 / a);
}

enum class LimitForm { two_sided, one_sided };

// S(a) = s(a) for d = 1 (two-sided by default, see density_limit), 1/a for d >= 2.
inline Ext scaling_S(double a, int d, LimitForm form = LimitForm::two_sided) {
  require(d >= 1, "S(a) needs d >= 1");
  if (d == 1) return form == LimitForm::two_sided ? scaling_s_two_sided(a) : scaling_s(a);
  require(a >= 0.0, "S(a) needs a >= 0");
  if (a == 0.0) return Ext::infinity();
  return Ext(std::isinf(a) ? 0.0 : 1.0 / a);
}

// alpha(x) = 0 (x<0), 1 (x=0), +inf (x>0)
inline Ext scaling_alpha(double x) {
  if (x < 0) return Ext(0.0);
  if (x == 0) return Ext(1.0);
  return Ext::infinity();
}

// ---------------------------------------------------------------------------
// Critical density

namespace detail {

// int dN(h) f_reg(beta h) + (1/beta) G(edge), dN the IDS of lambda - 2 sum cos
// on the d-torus shifted so that h = edge - 2 sum cos theta_j.
inline double split_density(double edge, int d, double beta, double green_at_edge) {
  double reg = torus_quadrature(
      d,
      [&](const std::vector<double>& th) {
        double h = edge;
        for (double t : th) h -= 2.0 * std::cos(t);
        return f_reg(beta * h);
      },
      1e-12);
  return reg + green_at_edge / beta;
}

}  // namespace detail

// rho_c = int dN_H(h) / (e^{beta h} - 1).
inline Ext critical_density(const GraphModel& m, double beta = 1.0) {
  require(beta > 0.0, "critical_density: beta must be positive");
  switch (m.kind) {
    case Kind::HalfLineN: return Ext::infinity();
    case Kind::LineZ:
    case Kind::LatticeZd: {
      const int d = m.lattice_dim();
      if (d <= 2) return Ext::infinity();
      return Ext(detail::split_density(2.0 * d, d, beta, green_zd(2.0 * d, d, GreenMethod::bessel).value()));
    }
    case Kind::ZComb: {
      const double L = infinite_norm(m);
      return Ext(detail::split_density(L, 1, beta, green_z1(L, 0)));
    }
    case Kind::NComb: {
      const double L = infinite_norm(m);
      Ext g = zd_diagonal(L, m.d);
      if (g.is_infinite()) return g;
      return Ext(detail::split_density(L, m.d, beta, g.value()));
    }
    default: break;
  }
  throw PreconditionError("critical_density: infinite catalog model expected");
}

// ---------------------------------------------------------------------------
// Finite volume densities and schedules

inline void require_valid_mu(const FiniteVolume& fv, const BoseParams& p) {
  require(p.beta > 0.0, "beta must be positive");
  require(p.mu < fv.eps0(), "chemical potential must satisfy mu < ||A_inf|| - ||A_Lambda_n||");
}

// Occupation of the eigenvalue lambda of A_Lambda: energy ||A_inf|| - lambda,
// evaluated as (top - lambda) + (eps0 - mu) to keep the ground gap exact.
inline double occupation(const FiniteVolume& fv, const BoseParams& p, double lambda) {
  return 1.0 / std::expm1(p.beta * ((fv.top() - lambda) + (fv.eps0() - p.mu)));
}

inline double finite_density(const FiniteVolume& fv, const BoseParams& p) {
  require_valid_mu(fv, p);
  return fv.spectral_sum([&](double l) { return occupation(fv, p, l); }) / static_cast<double>(fv.volume());
}

inline double finite_density(const GraphModel& m, int n, const BoseParams& p, int workers = 0) {
  return finite_density(FiniteVolume(m, n, workers), p);
}

// Unique mu < eps0 with finite_density = rho.
inline double solve_mu(const FiniteVolume& fv, double beta, double rho) {
  require(beta > 0.0, "solve_mu: beta must be positive");
  require(rho > 0.0, "solve_mu: density must be positive");
  const double e0 = fv.eps0();
  const double scale = std::max(1.0, std::abs(fv.norm_inf()));
  double hi = e0 - 1e-14 * scale;
  auto rho_at = [&](double mu) { return finite_density(fv, {beta, mu}); };
  double width = 1.0;
  double lo = e0 - width;
  while (rho_at(lo) > rho) {
    width *= 2.0;
    lo = e0 - width;
    if (width > 1e300) throw NumericalError("solve_mu: lower bracket not found");
  }
  if (rho_at(hi) < rho) throw NumericalError("solve_mu: density at the upper bracket is below the target");
  for (int it = 0; it < 400; ++it) {
    double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    if (rho_at(mid) < rho)
      lo = mid;
    else
      hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

inline int geometric_dimension(const GraphModel& m) {
  switch (m.kind) {
    case Kind::HalfLineN:
    case Kind::LineZ: return 1;
    case Kind::LatticeZd: return m.d;
    case Kind::NComb:
    case Kind::ZComb: return m.d + 1;
    default: throw PreconditionError("geometric_dimension: infinite catalog model expected");
  }
}

// mu_n with n^{d_G} (eps0 - mu_n) = a.
inline double gap_rate_mu(const FiniteVolume& fv, double a) {
  require(a > 0.0 && std::isfinite(a), "gap_rate_mu: a must be positive and finite");
  return fv.eps0() - a / std::pow(static_cast<double>(fv.n()), geometric_dimension(fv.model()));
}

// D > 0: mu_n = eps0 - 1/(D ||v_n||^2); D = 0: mu_n = eps0 - 1.
inline double condensate_schedule(const FiniteVolume& fv, double D) {
  require(D >= 0.0 && std::isfinite(D), "condensate_schedule: D must be finite and >= 0");
  const double e0 = fv.eps0();
  if (D == 0.0) return e0 - 1.0;
  double mu = e0 - 1.0 / (D * fv.pf_norm2());
  if (!(mu < e0))
    throw PreconditionError("condensate_schedule: D too large for n = " + std::to_string(fv.n()) +
                            " (mu_n reaches the validity bound); increase n");
  return mu;
}

// 1/(||v_n||^2 (eps0 - mu_n))
inline double schedule_ratio(const FiniteVolume& fv, double mu) { return 1.0 / (fv.pf_norm2() * (fv.eps0() - mu)); }

struct CondensateDensities {
  double state_side = 0.0;   // 1/(|Lambda| (eps0 - mu))
  double weight_side = 0.0;  // D sum_{x in Lambda} v(x)^2 / |Lambda|
};

inline CondensateDensities condensate_density_finite(const FiniteVolume& fv, double mu, double D) {
  require(mu < fv.eps0(), "condensate_density_finite: mu must be below eps0");
  require(D >= 0.0, "condensate_density_finite: D must be >= 0");
  const double V = static_cast<double>(fv.volume());
  CondensateDensities c;
  c.state_side = 1.0 / (V * (fv.eps0() - mu));
  c.weight_side = D == 0.0 ? 0.0 : D * pf_partial_norm(fv.model(), fv.n()) / V;
  return c;
}

// ---------------------------------------------------------------------------
// Two-point functions

enum class TwoPointPath { structured, dense, matrix_free };

inline double two_point_finite(const FiniteVolume& fv, const BoseParams& p, const Site& x, const Site& y,
                               TwoPointPath path = TwoPointPath::structured, double tol = 1e-12) {
  require_valid_mu(fv, p);
  switch (path) {
    case TwoPointPath::structured:
      return fv.spectral_element([&](double l) { return occupation(fv, p, l); }, x, y);
    case TwoPointPath::dense: {
      auto ds = dense_spectrum(fv.build_operator());
      const std::size_t ix = fv.flat_index(x), iy = fv.flat_index(y);
      const std::size_t N = ds.eigen.values.size();
      KahanSum s;
      for (std::size_t k = 0; k < N; ++k) {
        double h = (fv.norm_inf() - ds.eigen.values[k]) - p.mu;
        s.add(ds.eigen.vectors(ix, k) * ds.eigen.vectors(iy, k) / std::expm1(p.beta * h));
      }
      return s.value();
    }
    case TwoPointPath::matrix_free: {
      // bose = f_reg(beta(Lambda - A)) + (1/beta) (Lambda - A)^{-1}, Lambda = ||A_inf|| - mu
      auto op = fv.build_operator();
      const double shift = fv.norm_inf() - p.mu;
      const double spr = fv.top();
      std::vector<double> ey(op.dimension(), 0.0);
      ey[fv.flat_index(y)] = 1.0;
      auto smooth = chebyshev_apply([&](double l) { return f_reg(p.beta * (shift - l)); }, op, spr, ey, tol);
      auto res = shifted_solve(op, shift, ey, tol, spr);
      const std::size_t ix = fv.flat_index(x);
      return smooth[ix] + res[ix] / p.beta;
    }
  }
  return 0.0;
}

inline double two_point_finite(const GraphModel& m, int n, const BoseParams& p, const Site& x, const Site& y,
                               TwoPointPath path = TwoPointPath::structured) {
  return two_point_finite(FiniteVolume(m, n), p, x, y, path);
}

// (1/beta) <R_A(||A||) delta_x, delta_y> of a transient catalog model.
inline double edge_resolvent(const GraphModel& m, const Site& x, const Site& y) {
  switch (m.kind) {
    case Kind::HalfLineN:
      require(x.size() == 1 && y.size() == 1 && x[0] >= 0 && y[0] >= 0, "N sites must be one coordinate >= 0");
      return green_n(2.0, x[0], y[0]);
    case Kind::LineZ:
    case Kind::LatticeZd: {
      const int d = m.lattice_dim();
      require(static_cast<int>(x.size()) == d && static_cast<int>(y.size()) == d, "Z^d site has wrong dimension");
      std::vector<long> k(d);
      for (int j = 0; j < d; ++j) k[j] = x[j] - y[j];
      return green_zd(2.0 * d, k, GreenMethod::bessel).value();
    }
    case Kind::NComb:
    case Kind::ZComb: return detail::comb_resolvent_at(m, infinite_norm(m), x, y).value();
    default: break;
  }
  throw PreconditionError("edge_resolvent: infinite catalog model expected");
}

struct TwoPointLimit {
  double smooth = 0.0;      // <f_reg(beta H) delta_x, delta_y>
  double resolvent = 0.0;   // (1/beta) G(||A||; x, y)
  double condensate = 0.0;  // D v(x) v(y)
  int converged_n = 0;
  double total() const { return smooth + resolvent + condensate; }
};

// Volume-doubled <f_reg(beta(||A_inf|| - A_n)) delta_x, delta_y>.
inline double smooth_part_limit(const GraphModel& m, double beta, const Site& x, const Site& y, int* n_out = nullptr,
                                double tol = 1e-6, int workers = 0) {
  long reach = 1;
  for (long c : x) reach = std::max(reach, std::labs(c));
  for (long c : y) reach = std::max(reach, std::labs(c));
  int n = static_cast<int>(std::max<long>(16, 2 * reach));
  auto at = [&](int k) {
    FiniteVolume fv(m, k, workers);
    const double L = fv.norm_inf();
    return fv.spectral_element([&](double l) { return f_reg(beta * (L - l)); }, x, y);
  };
  double prev = at(n);
  const int cap = m.is_comb() && m.kind == Kind::NComb && m.d >= 2 ? 128 : 1 << 14;
  while (2 * n <= cap) {
    n *= 2;
    double cur = at(n);
    if (std::abs(cur - prev) < tol) {
      if (n_out) *n_out = n;
      return cur;
    }
    prev = cur;
  }
  throw NumericalError("two_point_limit: smooth part did not converge under volume doubling");
}

inline TwoPointLimit two_point_limit(const GraphModel& m, double beta, double D, const Site& x, const Site& y,
                                     int workers = 0) {
  require(beta > 0.0, "two_point_limit: beta must be positive");
  require(D >= 0.0, "two_point_limit: D must be >= 0");
  require(!m.is_finite(), "two_point_limit: infinite catalog model expected");
  if (classify_recurrence(m) == Recurrence::Recurrent)
    throw PreconditionError("two_point_limit: recurrent model, the diagonal two-point function diverges");
  TwoPointLimit t;
  t.resolvent = edge_resolvent(m, x, y) / beta;
  t.smooth = smooth_part_limit(m, beta, x, y, &t.converged_n, 1e-6, workers);
  if (D != 0.0) t.condensate = D * pf_weight(m, x) * pf_weight(m, y);
  return t;
}

// ---------------------------------------------------------------------------
// Density limits along n^{d_G} (eps0 - mu_n) -> a

// For Z|Z the limiting sum runs over all torus modes m in Z (both signs), which
// gives 2 s(b) - 1/b; LimitForm::one_sided keeps s(b).
inline Ext density_limit(const GraphModel& m, double a, double beta = 1.0, LimitForm form = LimitForm::two_sided) {
  require(a >= 0.0, "density_limit: a must be >= 0");
  require(beta == 1.0, "density_limit: the limit formula is stated for beta = 1");
  const double L = infinite_norm(m);
  Ext rc = critical_density(m, beta);
  if (m.kind == Kind::NComb) {
    require(m.d == 1 || m.d == 2, "density_limit: N|Z^d needs d = 1, 2");
    double g = zd_diagonal(L, m.d).value();
    double m2 = green_moment2(L, m.d).value();
    double b = std::isinf(a) ? a : m2 / (g * g) * a;
    Ext R = scaling_R(b, m.d);
    if (R.is_infinite()) return R;
    return Ext(rc.value() + std::pow(2.0, 3 - geometric_dimension(m)) * R.value() * m2);
  }
  if (m.kind == Kind::ZComb) {
    double g = green_z1(L, 0), m2 = green_z1_moment2(L);
    double b = std::isinf(a) ? a : std::pow(2.0, m.d) * m2 / (g * g) * a;
    Ext S = scaling_S(b, m.d, form);
    if (S.is_infinite()) return S;
    return Ext(rc.value() + 2.0 * m.d * m.d * S.value() * m2);
  }
  throw PreconditionError("density_limit: model must be N|Z^d (d = 1, 2) or Z^d|Z");
}

// ---------------------------------------------------------------------------
// Fixed-density verdict

enum class Regime { pinned = 1, finite_condensate = 2, divergent = 3 };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::pinned: return "i";
    case Regime::finite_condensate: return "ii";
    case Regime::divergent: return "iii";
  }
  return "?";
}

struct FixedDensityVerdict {
  Regime regime = Regime::divergent;
  Ext coefficient;  // condensate weight D(rho); marker in regime (iii)
  Recurrence recurrence = Recurrence::Transient;
  Ext rho_c;
  double d_G = 0.0;
  double d_PF = 0.0;
  std::string note;
};

inline FixedDensityVerdict fixed_density_verdict(const GraphModel& m, double rho, double beta = 1.0) {
  require(!m.is_finite(), "fixed_density_verdict: infinite catalog model expected");
  if (m.kind == Kind::NComb && m.d >= 3)
    throw UnsupportedError("fixed_density_verdict: N|Z^d with d >= 3 is outside the proved regime");
  FixedDensityVerdict v;
  v.recurrence = classify_recurrence(m);
  v.rho_c = critical_density(m, beta);
  if (v.recurrence == Recurrence::Recurrent) {
    v.regime = Regime::divergent;
    v.coefficient = Ext::infinity();
    v.d_G = geometric_dimension(m);
    v.note = "recurrent: the diagonal two-point function diverges";
    return v;
  }
  if (v.rho_c.is_infinite())
    throw PreconditionError("fixed_density_verdict: critical density is infinite, no condensation regime at fixed density");
  require(rho >= v.rho_c.value(), "fixed_density_verdict: rho must be >= rho_c");

  auto est = estimate_dimensions(m, doubling_range(100, 6));
  v.d_G = est.d_G;
  v.d_PF = est.d_PF;
  const long dg = std::lround(est.d_G), dpf = std::lround(est.d_PF);
  if (dpf > dg) {
    v.regime = Regime::pinned;
    v.coefficient = Ext(0.0);
    v.note = "d_PF > d_G: no condensate in the limit, density pinned at rho_c";
  } else if (dpf == dg) {
    v.regime = Regime::finite_condensate;
    if (m.kind == Kind::NComb) {
      const double L = infinite_norm(m);
      double g = zd_diagonal(L, m.d).value(), m2 = green_moment2(L, m.d).value();
      v.coefficient = Ext(2.0 * pi * pi * (rho - v.rho_c.value()) / (g * g * m2));
    } else {
      v.coefficient = Ext(rho - v.rho_c.value());  // homogeneous lattice, v = 1
    }
    v.note = "d_PF = d_G: finite condensate weight";
  } else {
    v.regime = Regime::divergent;
    v.coefficient = Ext::infinity();
    v.note = "d_PF < d_G: the diagonal two-point function diverges";
  }
  return v;
}

}  // namespace hop
