#pragma once

#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "common.hpp"
#include "dense.hpp"
#include "graph_core.hpp"
#include "torus.hpp"

namespace hop {

// Sorted (eigenvalue, multiplicity) list.
struct SpectrumStructured {
  std::vector<std::pair<double, std::size_t>> entries;
  std::size_t total = 0;

  // Sorts and merges bitwise-equal eigenvalues.
  static SpectrumStructured from_entries(std::vector<std::pair<double, std::size_t>> e) {
    std::sort(e.begin(), e.end());
    SpectrumStructured s;
    for (auto& [v, m] : e) {
      if (m == 0) continue;
      if (!s.entries.empty() && s.entries.back().first == v)
        s.entries.back().second += m;
      else
        s.entries.emplace_back(v, m);
      s.total += m;
    }
    return s;
  }

  static SpectrumStructured from_values(const std::vector<double>& values) {
    std::vector<std::pair<double, std::size_t>> e;
    e.reserve(values.size());
    for (double v : values) e.emplace_back(v, 1);
    return from_entries(std::move(e));
  }

  std::vector<double> expanded() const {
    std::vector<double> out;
    out.reserve(total);
    for (auto& [v, m] : entries) out.insert(out.end(), m, v);
    return out;
  }

  double top() const { return entries.back().first; }
  double bottom() const { return entries.front().first; }

  // sum over eigenvalues (with multiplicity) of f(lambda)
  template <class F>
  double sum(F&& f) const {
    KahanSum s;
    for (auto& [v, m] : entries) s.add(static_cast<double>(m) * f(v));
    return s.value();
  }
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void project_out(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (const auto& q : basis) axpy(-dot(q, v), q, v);
}

}  // namespace detail

// Largest eigenpair by explicitly restarted Lanczos with full
// reorthogonalization. Start vector is all-ones (minus any deflated
// directions); the returned vector is scaled to 1 at `root` when `root` is
// given and to unit 2-norm otherwise. `deflate` holds orthonormal vectors
// to project out (used for the second eigenpair).
template <class Op>
EigenPair extremal_eig(const Op& op, double tol, std::optional<std::size_t> root = 0,
                       const std::vector<std::vector<double>>& deflate = {}, int max_restarts = 400) {
  using namespace detail;
  require(tol > 0, "extremal_eig: tol must be positive");
  const std::size_t n = op.dimension();
  require(n > 0, "extremal_eig: empty operator");
  if (root) require(*root < n, "extremal_eig: root out of range");

  std::vector<double> x(n, 1.0);
  project_out(x, deflate);
  if (norm2(x) < 1e-12) {
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + static_cast<double>(i % 7) / 7.0;
    project_out(x, deflate);
  }
  {
    double nx = norm2(x);
    for (double& v : x) v /= nx;
  }
  const std::size_t budget = 40'000'000;
  const std::size_t m = std::max<std::size_t>(2, std::min<std::size_t>({n - deflate.size(), 300, std::max<std::size_t>(20, budget / n)}));

  std::vector<double> ax(n);
  double theta = 0.0, res = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < max_restarts; ++restart) {
    std::vector<std::vector<double>> Q;
    std::vector<double> alpha, beta;
    std::vector<double> q = x, w(n);
    for (std::size_t k = 0; k < m; ++k) {
      Q.push_back(q);
      op.apply(q.data(), w.data());
      double a = dot(q, w);
      alpha.push_back(a);
      project_out(w, deflate);
      for (int pass = 0; pass < 2; ++pass) project_out(w, Q);
      double b = norm2(w);
      if (k + 1 == m || b < 1e-14 * std::max(1.0, std::abs(a))) break;
      beta.push_back(b);
      for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
    }
    // Ritz pair from the projected matrix Q^T A Q (tridiagonal up to rounding).
    auto eig = dense::tridiagonal_eigen(alpha, beta);
    const std::size_t k = alpha.size();
    theta = eig.values[k - 1];
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) axpy(eig.vectors(j, k - 1), Q[j], x);
    project_out(x, deflate);
    double nx = norm2(x);
    for (double& v : x) v /= nx;
    op.apply(x.data(), ax.data());
    theta = dot(x, ax);
    res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(ax[i] - theta * x[i]));
    if (res <= tol) break;
  }
  if (!(res <= tol))
    throw NumericalError("extremal_eig: no convergence, residual " + std::to_string(res));

  double scale = 1.0;
  if (root) {
    require(std::abs(x[*root]) > 1e-300, "extremal_eig: eigenvector vanishes at root");
    scale = 1.0 / x[*root];
  } else {
    double s = std::accumulate(x.begin(), x.end(), 0.0);
    scale = s < 0 ? -1.0 : 1.0;
  }
  for (double& v : x) v *= scale;
  return {theta, std::move(x), res * std::abs(scale)};
}

// Solves (lambda I - A) x = b by conjugate gradients. If `spr` is not
// supplied the spectral radius is computed with extremal_eig.
template <class Op>
std::vector<double> shifted_solve(const Op& op, double lambda, const std::vector<double>& b, double tol = 1e-10,
                                  std::optional<double> spr = std::nullopt) {
  using namespace detail;
  const std::size_t n = op.dimension();
  require(b.size() == n, "shifted_solve: right-hand side has wrong length");
  require(tol > 0, "shifted_solve: tol must be positive");
  if (!spr) spr = extremal_eig(op, 1e-10, std::nullopt).value;
  require(lambda > *spr, "shifted_solve: lambda must exceed the spectral radius");

  std::vector<double> x(n, 0.0), r = b, p = b, ap(n);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return x;
  double rr = dot(r, r);
  const std::size_t cap = 20 * n + 10000;
  auto apply_shifted = [&](const std::vector<double>& v, std::vector<double>& out) {
    op.apply(v.data(), out.data());
    for (std::size_t i = 0; i < n; ++i) out[i] = lambda * v[i] - out[i];
  };
  for (std::size_t it = 0; it < cap; ++it) {
    apply_shifted(p, ap);
    double alpha = rr / dot(p, ap);
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= 0.5 * tol * bnorm) {
      // confirm with the true residual
      apply_shifted(x, ap);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
      rr_new = dot(r, r);
      if (std::sqrt(rr_new) <= tol * bnorm) return x;
      p = r;
      rr = rr_new;
      continue;
    }
    double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  throw NumericalError("shifted_solve: no convergence, relative residual " + std::to_string(std::sqrt(rr) / bnorm));
}

// Chebyshev coefficients of fn on [a, b], degree doubled until the upper
// half of the coefficients sums below tol/2, then trimmed to the shortest
// tail below tol/2. tol is clamped to the roundoff floor of an N-point
// transform, 4 N eps max|f|.
inline std::vector<double> chebyshev_coefficients(const std::function<double(double)>& fn, double a, double b,
                                                  double tol, std::size_t max_degree = 1 << 16) {
  require(b > a, "chebyshev: empty interval");
  for (std::size_t N = 16; N <= max_degree; N *= 2) {
    std::vector<double> f(N), c(N);
    for (std::size_t j = 0; j < N; ++j) {
      double t = std::cos(pi * (j + 0.5) / N);
      f[j] = fn(0.5 * (b - a) * t + 0.5 * (b + a));
    }
    for (std::size_t k = 0; k < N; ++k) {
      KahanSum s;
      for (std::size_t j = 0; j < N; ++j) s.add(f[j] * std::cos(pi * k * (j + 0.5) / N));
      c[k] = 2.0 * s.value() / N;
    }
    c[0] *= 0.5;
    double upper = 0.0, fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    for (std::size_t k = N / 2; k < N; ++k) upper += std::abs(c[k]);
    const double eff = std::max(tol, 4.0 * static_cast<double>(N) * std::numeric_limits<double>::epsilon() * fmax);
    if (upper < 0.5 * eff) {
      std::size_t K = N;
      double tail = 0.0;
      while (K > 1 && tail + std::abs(c[K - 1]) < 0.5 * eff) tail += std::abs(c[--K]);
      c.resize(K);
      return c;
    }
  }
  throw NumericalError("chebyshev: degree cap exceeded");
}

// p(A) v with p the Chebyshev approximant of fn on [a, b].
template <class Op>
std::vector<double> chebyshev_apply(const std::function<double(double)>& fn, const Op& op, double a, double b,
                                    const std::vector<double>& v, double tol = 1e-12,
                                    std::size_t max_degree = 1 << 16) {
  const std::size_t n = op.dimension();
  require(v.size() == n, "chebyshev_apply: vector has wrong length");
  auto c = chebyshev_coefficients(fn, a, b, tol, max_degree);
  const double alpha = 2.0 / (b - a), shift = (a + b) / (b - a);
  std::vector<double> t0 = v, t1(n), t2(n), out(n), av(n);
  auto apply_hat = [&](const std::vector<double>& in, std::vector<double>& res) {
    op.apply(in.data(), av.data());
    for (std::size_t i = 0; i < n; ++i) res[i] = alpha * av[i] - shift * in[i];
  };
  for (std::size_t i = 0; i < n; ++i) out[i] = c[0] * t0[i];
  if (c.size() == 1) return out;
  apply_hat(t0, t1);
  for (std::size_t i = 0; i < n; ++i) out[i] += c[1] * t1[i];
  for (std::size_t k = 2; k < c.size(); ++k) {
    apply_hat(t1, t2);
    for (std::size_t i = 0; i < n; ++i) {
      t2[i] = 2.0 * t2[i] - t0[i];
      out[i] += c[k] * t2[i];
    }
    std::swap(t0, t1);
    std::swap(t1, t2);
  }
  return out;
}

template <class Op>
std::vector<double> chebyshev_apply(const std::function<double(double)>& fn, const Op& op, double spr,
                                    const std::vector<double>& v, double tol = 1e-12) {
  return chebyshev_apply(fn, op, -spr - 1e-6, spr + 1e-6, v, tol);
}

// ---------------------------------------------------------------------------
// Rank-one secular equations 1 = a * G(lambda), G(lambda) = sum_k w_k/(lambda-c_k).

// Poles with positive weight, ascending, plus an evaluator of G.
struct SecularKernel {
  std::vector<double> poles;
  std::function<double(double)> green;
};

inline SecularKernel pole_kernel(std::vector<double> c, std::vector<double> w) {
  SecularKernel k;
  k.poles = c;
  k.green = [c = std::move(c), w = std::move(w)](double x) {
    KahanSum s;
    for (std::size_t i = 0; i < c.size(); ++i) s.add(w[i] / (x - c[i]));
    return s.value();
  };
  return k;
}

namespace detail {

// Root of h(x) = 1 - a G(x) in the open interval (lo, hi); `rising` tells
// whether h increases across it.
inline double bisect_secular(const std::function<double(double)>& green, double a, double lo, double hi,
                             bool rising, double tol) {
  for (int it = 0; it < 2000; ++it) {
    double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) return mid;
    if (hi - lo <= tol * std::max(1.0, std::abs(mid))) return mid;
    double h = 1.0 - a * green(mid);
    if (h == 0.0) return mid;
    if ((h < 0.0) == rising)
      lo = mid;
    else
      hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace detail

// All roots of 1 = a G(lambda): one per pole (interlacing). a may have
// either sign; a = 0 returns the poles.
inline std::vector<double> secular_roots(const SecularKernel& k, double a, double tol = 1e-14) {
  const auto& c = k.poles;
  const std::size_t P = c.size();
  std::vector<double> roots(P);
  if (P == 0) return roots;
  if (a == 0.0) return c;
  const bool pos = a > 0;
  for (std::size_t i = 0; i < P; ++i) {
    double lo, hi;
    if (pos) {
      lo = c[i];
      hi = i + 1 < P ? c[i + 1] : c[i] + a;
      // at c[P-1] + a the secular value is already >= 0; widen by an ulp-scale margin
      if (i + 1 == P) hi = std::nextafter(hi + std::abs(hi) * 4e-16, INFINITY);
    } else {
      lo = i == 0 ? c[0] + a : c[i - 1];
      hi = c[i];
      if (i == 0) lo = std::nextafter(lo - std::abs(lo) * 4e-16, -INFINITY);
    }
    roots[i] = detail::bisect_secular(k.green, a, lo, hi, pos, tol);
  }
  return roots;
}

// Eigenvalues of diag(c) + a w w^T restricted as in the rank-one problem:
// poles with zero weight pass through; the others are replaced by the roots.
inline std::vector<double> rank_one_secular(const std::vector<double>& c, const std::vector<double>& w, double a,
                                            double tol = 1e-14) {
  require(c.size() == w.size(), "rank_one_secular: poles and weights differ in length");
  require(std::is_sorted(c.begin(), c.end()), "rank_one_secular: poles must be sorted");
  std::vector<double> pc, pw, out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    require(w[i] >= 0, "rank_one_secular: weights must be nonnegative");
    if (w[i] > 0) {
      require(pc.empty() || c[i] > pc.back(), "rank_one_secular: poles with weight must be distinct");
      pc.push_back(c[i]);
      pw.push_back(w[i]);
    } else {
      out.push_back(c[i]);
    }
  }
  auto roots = secular_roots(pole_kernel(pc, pw), a, tol);
  out.insert(out.end(), roots.begin(), roots.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Fiber A_T + a P_0 on a torus fiber: roots replace one copy of each level.
inline SecularKernel torus_kernel(const TorusFiber& f) {
  SecularKernel k;
  k.poles = f.levels().value;
  k.green = [&f](double x) { return f.green(x); };
  return k;
}

// Base modes (value a_m, multiplicity) of the comb base.
using BaseModes = std::vector<std::pair<double, std::size_t>>;

inline BaseModes segment_modes(int n) {
  BaseModes b;
  for (int m = 0; m <= n; ++m) b.emplace_back(2.0 * std::cos(pi * (m + 1) / (n + 2.0)), 1);
  return b;
}

inline BaseModes torus_modes(int d, int n) {
  auto L = TorusLevels::build(d, n);
  BaseModes b;
  for (std::size_t k = L.size(); k-- > 0;) b.emplace_back(L.value[k], L.count[k]);
  return b;
}

// Roots of the fiber rank-one problem for every base mode, in base order.
inline std::vector<std::vector<double>> comb_fiber_roots(const BaseModes& base, const TorusFiber& fiber,
                                                         double tol = 1e-14, int workers = 0) {
  auto kernel = torus_kernel(fiber);
  std::vector<std::vector<double>> out(base.size());
  parallel_for(base.size(), workers, [&](std::size_t m) { out[m] = secular_roots(kernel, base[m].first, tol); });
  return out;
}

// Full comb spectrum from per-mode rank-one problems.
inline SpectrumStructured comb_spectrum_structured(const BaseModes& base, const TorusFiber& fiber,
                                                   double tol = 1e-14, int workers = 0) {
  const auto& L = fiber.levels();
  auto roots = comb_fiber_roots(base, fiber, tol, workers);
  std::size_t base_total = 0;
  for (auto& [a, M] : base) base_total += M;
  std::vector<std::pair<double, std::size_t>> e;
  for (std::size_t k = 0; k < L.size(); ++k)
    if (L.count[k] > 1) e.emplace_back(L.value[k], (L.count[k] - 1) * base_total);
  for (std::size_t m = 0; m < base.size(); ++m)
    for (double r : roots[m]) e.emplace_back(r, base[m].second);
  return SpectrumStructured::from_entries(std::move(e));
}

struct DenseSpectrum {
  SpectrumStructured spectrum;
  dense::SymEigen eigen;
};

inline DenseSpectrum dense_spectrum(const SparseOperator& op, std::size_t cap = 4000, bool want_vectors = true) {
  require(op.dimension() <= cap, "dense_spectrum: dimension exceeds the dense cap");
  dense::Matrix m(op.dimension(), op.to_dense());
  DenseSpectrum out;
  out.eigen = dense::symmetric_eigen(m, want_vectors);
  out.spectrum = SpectrumStructured::from_values(out.eigen.values);
  return out;
}

}  // namespace hop
