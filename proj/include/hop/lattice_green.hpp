#pragma once

#include <array>
#include <map>
#include <vector>

#include "common.hpp"
#include "dense.hpp"
#include "model.hpp"

namespace hop {

// <R_{A_Z}(lambda) delta_0, delta_k> = r^{|k|} / sqrt(lambda^2 - 4).
inline double green_z1(double lambda, long k) {
  require(lambda > 2.0, "green_z1: lambda must exceed 2 (Z is recurrent at the edge)");
  double s = std::sqrt((lambda - 2.0) * (lambda + 2.0));
  double r = (lambda - s) / 2.0;
  if (lambda > 1e8) r = 1.0 / (lambda - 1.0 / lambda);  // avoids cancellation
  return std::pow(r, static_cast<double>(std::labs(k))) / s;
}

// d/dlambda-negated diagonal: <R^2 delta_0, delta_0> on Z.
inline double green_z1_moment2(double lambda) {
  require(lambda > 2.0, "green_z1_moment2: lambda must exceed 2");
  double q = (lambda - 2.0) * (lambda + 2.0);
  return lambda / (q * std::sqrt(q));
}

// <R_{A_N}(lambda) delta_k, delta_l> on the half-line.
inline double green_n(double lambda, long k, long l) {
  require(lambda >= 2.0, "green_n: lambda must be >= 2");
  require(k >= 0 && l >= 0, "green_n: vertices must be nonnegative");
  if (k > l) std::swap(k, l);
  if (lambda == 2.0) return static_cast<double>(k + 1);
  double s = std::sqrt((lambda - 2.0) * (lambda + 2.0));
  // Gamma_0 = +inf, Gamma_{j+1} = lambda - 1/Gamma_j; only 2/Gamma_k enters.
  double inv_gamma = 0.0;
  for (long j = 0; j < k; ++j) inv_gamma = 1.0 / (lambda - inv_gamma);
  double r = (lambda - s) / 2.0;
  return 2.0 / (lambda - 2.0 * inv_gamma + s) * std::pow(r, static_cast<double>(l - k));
}

// <R_{S_n}(lambda) Q_n delta_k, Q_n delta_l> with Q_n the projection off the
// top eigenvector of S_n; lambda must exceed the second eigenvalue.
inline double segment_projected_resolvent(int n, double lambda, long k, long l) {
  require(n >= 1, "segment_projected_resolvent: n must be >= 1");
  require(k >= 0 && l >= 0 && k <= n && l <= n, "segment_projected_resolvent: vertices must lie in 0..n");
  const double L = n + 2.0;
  require(lambda > 2.0 * std::cos(2.0 * pi / L), "segment_projected_resolvent: lambda below the second eigenvalue");
  KahanSum s;
  for (int m = 2; m <= n + 1; ++m)
    s.add(std::sin(pi * m * (k + 1) / L) * std::sin(pi * m * (l + 1) / L) / (lambda - 2.0 * std::cos(pi * m / L)));
  return 2.0 / L * s.value();
}

namespace bessel {

// e^{-x} I_m(x) for m = 0..K, Miller downward recurrence normalized by
// e^x = I_0 + 2 sum_{m>=1} I_m; asymptotic series when x >> K^2.
inline std::vector<double> scaled_i(double x, int K) {
  require(x >= 0 && K >= 0, "scaled_i: x >= 0 and K >= 0 required");
  std::vector<double> out(K + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x > 400.0 + 4.0 * K * K) {
    for (int nu = 0; nu <= K; ++nu) {
      double mu = 4.0 * nu * nu, term = 1.0, sum = 1.0;
      for (int i = 1; i < 40; ++i) {
        double next = -term * (mu - (2.0 * i - 1) * (2.0 * i - 1)) / (i * 8.0 * x);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
      }
      out[nu] = sum / std::sqrt(2.0 * pi * x);
    }
    return out;
  }
  int start = K + 20 + static_cast<int>(std::ceil(std::sqrt(80.0 * x)));
  double ip1 = 0.0, i0 = 1e-280, norm = 0.0;
  for (int m = start; m >= 1; --m) {
    // i0 holds I_m, ip1 holds I_{m+1}
    if (m <= K) out[m] = i0;
    norm += 2.0 * i0;
    double im1 = (2.0 * m / x) * i0 + ip1;
    ip1 = i0;
    i0 = im1;
    if (i0 > 1e250) {
      i0 *= 1e-250;
      ip1 *= 1e-250;
      norm *= 1e-250;
      for (int j = m; j <= K && j <= start; ++j) out[j] *= 1e-250;
    }
  }
  out[0] = i0;
  norm += i0;
  for (double& v : out) v /= norm;
  return out;
}

// Coefficients a_i of e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum (-1)^i a_i / x^i.
inline std::vector<double> asymptotic_coeffs(long nu, int terms) {
  std::vector<double> a(terms);
  double mu = 4.0 * static_cast<double>(nu) * static_cast<double>(nu), c = 1.0;
  for (int i = 0; i < terms; ++i) {
    a[i] = (i % 2 == 0 ? c : -c);
    c *= (mu - (2.0 * i + 1) * (2.0 * i + 1)) / ((i + 1) * 8.0);
  }
  return a;
}

}  // namespace bessel

namespace quad {

// n-point Gauss-Legendre rule on [-1, 1] via the Jacobi matrix.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int i = 1; i < n; ++i) off[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
  auto e = dense::tridiagonal_eigen(diag, off);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 2.0 * e.vectors(0, i) * e.vectors(0, i);
  return {e.values, w};
}

struct Node {
  double t, w;
};

// Nodes on [0, T] with panels [0, 1/2], [1/2, 1], [1, 2], ... each carrying
// a 30-point Gauss-Legendre rule.
inline std::vector<Node> geometric_panels(double T) {
  static const auto gl = gauss_legendre(30);
  std::vector<Node> nodes;
  double a = 0.0, b = 0.5;
  while (a < T) {
    b = std::min(b, T);
    for (std::size_t i = 0; i < gl.first.size(); ++i)
      nodes.push_back({0.5 * (b - a) * gl.first[i] + 0.5 * (a + b), 0.5 * (b - a) * gl.second[i]});
    a = b;
    b = 2.0 * b;
  }
  return nodes;
}

}  // namespace quad

enum class GreenMethod { torus_quadrature, bessel };

namespace detail {

// Trapezoid over the last d-1 angles of f(mu, theta_2..theta_d) where the
// first angle has been integrated in closed form; M nodes per angle.
template <class F>
double torus_trapezoid(int dims, int M, F&& f) {
  if (dims == 0) return f(std::vector<double>{});
  std::vector<int> idx(dims, 0);
  std::vector<double> th(dims);
  KahanSum s;
  std::size_t total = 1;
  for (int j = 0; j < dims; ++j) total *= M;
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t r = c;
    for (int j = dims - 1; j >= 0; --j) {
      th[j] = 2.0 * pi * static_cast<double>(r % M) / M;
      r /= M;
    }
    s.add(f(th));
  }
  return s.value() / static_cast<double>(total);
}

// Node doubling until two successive trapezoid values agree to tol.
template <class F>
double torus_quadrature(int dims, F&& f, double tol = 1e-12) {
  if (dims == 0) return f(std::vector<double>{});
  const std::size_t budget = dims == 1 ? (1u << 22) : dims == 2 ? (1u << 12) : (1u << 8);
  double prev = torus_trapezoid(dims, 8, f);
  for (std::size_t M = 16; M <= budget; M *= 2) {
    double cur = torus_trapezoid(dims, static_cast<int>(M), f);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw NumericalError("torus quadrature: node budget exhausted before convergence");
}

// G(lambda; k) for every canonical tuple 0 <= k_1 <= ... <= k_d <= K by the
// Bessel integral. power = 0 gives the resolvent, power = 1 the second
// moment (extra factor t).
inline std::map<std::vector<long>, double> bessel_table(double lambda, int d, int K, int power = 0) {
  const double eps = lambda - 2.0 * d;
  require(eps >= 0.0, "bessel route needs lambda >= 2d");
  const bool edge = eps == 0.0;
  if (edge) require(d - 2 * power >= 3, "bessel edge value diverges for this dimension");
  const double T = edge ? 4096.0 : std::max(64.0, 60.0 / eps);
  auto nodes = quad::geometric_panels(T);

  std::vector<std::vector<double>> B(nodes.size());
  std::vector<double> wt(nodes.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    B[q] = bessel::scaled_i(2.0 * nodes[q].t, K);
    wt[q] = nodes[q].w * std::exp(-eps * nodes[q].t) * (power ? nodes[q].t : 1.0);
  }

  std::map<std::vector<long>, double> table;
  std::vector<long> k(d, 0);
  const int terms = 6;
  while (true) {
    KahanSum s;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      double p = wt[q];
      for (int j = 0; j < d; ++j) p *= B[q][k[j]];
      s.add(p);
    }
    if (edge) {
      // product of per-axis series in 1/(2t), integrated over [T, inf)
      std::vector<double> poly(1, 1.0);
      for (int j = 0; j < d; ++j) {
        auto a = bessel::asymptotic_coeffs(k[j], terms);
        std::vector<double> next(std::min<std::size_t>(poly.size() + terms - 1, terms), 0.0);
        for (std::size_t u = 0; u < poly.size(); ++u)
          for (int v = 0; v < terms && u + v < next.size(); ++v) next[u + v] += poly[u] * a[v] / std::pow(2.0, v);
        poly = next;
      }
      const double pref = std::pow(4.0 * pi, -0.5 * d);
      for (std::size_t p = 0; p < poly.size(); ++p) {
        double e = 0.5 * d + p - power;  // integrand ~ t^{-e}
        s.add(pref * poly[p] * std::pow(T, 1.0 - e) / (e - 1.0));
      }
    }
    table[k] = s.value();
    int j = d - 1;
    while (j >= 0 && k[j] == K) --j;
    if (j < 0) break;
    ++k[j];
    for (int i = j + 1; i < d; ++i) k[i] = k[j];
  }
  return table;
}

inline std::vector<long> canonical(const std::vector<long>& k) {
  std::vector<long> c(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) c[j] = std::labs(k[j]);
  std::sort(c.begin(), c.end());
  return c;
}

}  // namespace detail

// <R_{A_{Z^d}}(lambda) delta_0, delta_k>.
inline Ext green_zd(double lambda, const std::vector<long>& k, GreenMethod method = GreenMethod::torus_quadrature) {
  const int d = static_cast<int>(k.size());
  require(d >= 1, "green_zd: empty displacement");
  require(lambda >= 2.0 * d, "green_zd: lambda below the spectral edge 2d");
  if (lambda == 2.0 * d) {
    if (d <= 2) return Ext::infinity();
    method = GreenMethod::bessel;
  }
  if (method == GreenMethod::bessel) {
    auto c = detail::canonical(k);
    auto table = detail::bessel_table(lambda, d, static_cast<int>(c.back()));
    return Ext(table.at(c));
  }
  if (d == 1) return Ext(green_z1(lambda, k[0]));
  double v = detail::torus_quadrature(d - 1, [&](const std::vector<double>& th) {
    double mu = lambda, phase = 1.0;
    for (int j = 1; j < d; ++j) {
      mu -= 2.0 * std::cos(th[j - 1]);
      phase *= std::cos(static_cast<double>(k[j]) * th[j - 1]);
    }
    return phase * green_z1(mu, k[0]);
  });
  return Ext(v);
}

inline Ext green_zd(double lambda, int d, GreenMethod method = GreenMethod::torus_quadrature) {
  return green_zd(lambda, std::vector<long>(d, 0), method);
}

// <R^2 delta_0, delta_0> on Z^d.
inline Ext green_moment2(double lambda, int d) {
  require(d >= 1, "green_moment2: d must be >= 1");
  require(lambda >= 2.0 * d, "green_moment2: lambda below the spectral edge 2d");
  if (lambda == 2.0 * d) {
    if (d <= 4) return Ext::infinity();
    auto table = detail::bessel_table(lambda, d, 0, 1);
    return Ext(table.begin()->second);
  }
  if (d == 1) return Ext(green_z1_moment2(lambda));
  double v = detail::torus_quadrature(d - 1, [&](const std::vector<double>& th) {
    double mu = lambda;
    for (int j = 1; j < d; ++j) mu -= 2.0 * std::cos(th[j - 1]);
    return green_z1_moment2(mu);
  });
  return Ext(v);
}

// Values of G(lambda; k) for all 0 <= k_j <= K (d = 1, 2), torus method.
// Entry index is k_1 * (K+1) + k_2 for d = 2.
inline std::vector<double> green_z2_grid(double lambda, int K) {
  require(lambda > 4.0, "green_z2_grid: lambda must exceed 4");
  std::vector<double> prev, cur;
  auto eval = [&](int M) {
    std::vector<double> g((K + 1) * (K + 1), 0.0);
    std::vector<double> cosk(K + 1);
    for (int q = 0; q < M; ++q) {
      double th = 2.0 * pi * q / M;
      double mu = lambda - 2.0 * std::cos(th);
      double s = std::sqrt((mu - 2.0) * (mu + 2.0)), r = (mu - s) / 2.0;
      for (int k2 = 0; k2 <= K; ++k2) cosk[k2] = std::cos(k2 * th);
      double rp = 1.0 / s;
      for (int k1 = 0; k1 <= K; ++k1) {
        for (int k2 = 0; k2 <= K; ++k2) g[k1 * (K + 1) + k2] += rp * cosk[k2];
        rp *= r;
      }
    }
    for (double& v : g) v /= M;
    return g;
  };
  prev = eval(std::max(16, 4 * K));
  for (int M = std::max(32, 8 * K); M <= (1 << 22); M *= 2) {
    cur = eval(M);
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
    if (diff <= 1e-13) return cur;
    prev = std::move(cur);
  }
  throw NumericalError("green_z2_grid: no convergence");
}

enum class Recurrence { Transient, Recurrent };

inline const char* to_string(Recurrence r) { return r == Recurrence::Transient ? "T" : "R"; }

// Diagonal resolvent at the spectral edge of N or Z^d (marker if infinite).
inline Ext edge_diagonal(const GraphModel& m) {
  switch (m.kind) {
    case Kind::HalfLineN: return Ext(green_n(2.0, 0, 0));
    case Kind::LineZ:
    case Kind::LatticeZd: return green_zd(2.0 * m.lattice_dim(), m.lattice_dim(), GreenMethod::bessel);
    default: throw PreconditionError("edge_diagonal: only N and Z^d are supported");
  }
}

// Transience from edge Green values; combs follow the two-case rule:
// fiber edge diagonal * ||A_G|| >= 1 -> as the base, otherwise transient.
inline Recurrence classify_recurrence(const GraphModel& m) {
  auto from_edge = [](Ext e) { return e.is_infinite() ? Recurrence::Recurrent : Recurrence::Transient; };
  switch (m.kind) {
    case Kind::HalfLineN:
    case Kind::LineZ:
    case Kind::LatticeZd: return from_edge(edge_diagonal(m));
    case Kind::NComb:
    case Kind::ZComb: {
      GraphModel base = m.kind == Kind::NComb ? GraphModel::half_line() : GraphModel::lattice(m.d);
      GraphModel fiber = m.kind == Kind::NComb ? GraphModel::lattice(m.d) : GraphModel::line();
      double base_norm = m.kind == Kind::NComb ? 2.0 : 2.0 * m.d;
      Ext fe = edge_diagonal(fiber);
      bool strong = fe.is_infinite() || fe.value() * base_norm >= 1.0;
      return strong ? from_edge(edge_diagonal(base)) : Recurrence::Transient;
    }
    default: throw PreconditionError("classify_recurrence: finite models have no transience type");
  }
}

// S(n) = sum_{|k|_inf <= n} |2 G_{Z^d}(2d; k)|^2.
inline double tauberian_partial_sums(int d, int n) {
  require(d == 3 || d == 4, "tauberian_partial_sums: d must be 3 or 4");
  require(n >= 0, "tauberian_partial_sums: n must be >= 0");
  require(n <= (d == 3 ? 40 : 24), "tauberian_partial_sums: n exceeds the cap");
  auto table = detail::bessel_table(2.0 * d, d, n);
  KahanSum s;
  for (auto& [k, g] : table) {
    std::size_t orbit = 1;
    for (long v : k)
      if (v != 0) orbit *= 2;
    std::size_t perms = 1;
    for (int j = 2; j <= d; ++j) perms *= j;
    for (std::size_t i = 0; i < k.size();) {
      std::size_t j = i;
      while (j < k.size() && k[j] == k[i]) ++j;
      for (std::size_t r = 2; r <= j - i; ++r) perms /= r;
      i = j;
    }
    s.add(static_cast<double>(orbit * perms) * 4.0 * g * g);
  }
  return s.value();
}

}  // namespace hop
