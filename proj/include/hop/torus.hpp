#pragma once

#include <map>
#include <vector>

#include "common.hpp"

namespace hop {

// <(lambda - A_{T_N})^{-1} delta_0, delta_h> on the N-cycle (N odd), closed
// form in the three regimes lambda > 2, |lambda| < 2, lambda < -2.
inline double cycle_green(long N, double lambda, long h = 0) {
  h %= N;
  if (h < 0) h += N;
  h = std::min(h, N - h);
  const double dN = static_cast<double>(N), dh = static_cast<double>(h);
  if (lambda > 2.0) {
    double t = std::acosh(lambda / 2.0);
    double num = std::exp(-dh * t) + std::exp(-(dN - dh) * t);
    return num / (-std::expm1(-dN * t) * 2.0 * std::sinh(t));
  }
  if (lambda < -2.0 || lambda == -2.0) {
    double s = std::acosh(-lambda / 2.0);
    double sign = (h % 2 == 0) ? 1.0 : -1.0;
    if (dN * s < 1e-8) return -sign * (dN - 2.0 * dh) / 4.0;
    double num = std::exp(-dh * s) - std::exp(-(dN - dh) * s);
    return -sign * num / ((1.0 + std::exp(-dN * s)) * 2.0 * std::sinh(s));
  }
  double phi = std::acos(lambda / 2.0);
  return -std::cos((dN / 2.0 - dh) * phi) / (2.0 * std::sin(phi) * std::sin(dN * phi / 2.0));
}

inline double cycle_green_deriv_direct(long N, double lambda) {
  KahanSum s;
  for (long j = 0; j < N; ++j) {
    double x = lambda - 2.0 * std::cos(2.0 * pi * std::min(j, N - j) / static_cast<double>(N));
    s.add(-1.0 / (x * x));
  }
  return s.value() / static_cast<double>(N);
}

// d/dlambda of cycle_green(N, lambda, 0). Within ~1/N of lambda = -2 the
// closed forms cancel badly, so the mode sum is used there.
inline double cycle_green_deriv(long N, double lambda) {
  const double dN = static_cast<double>(N);
  if (lambda > 2.0) {
    double t = std::acosh(lambda / 2.0);
    double q = std::exp(-dN * t), om = -std::expm1(-dN * t);
    double coth = (1.0 + q) / om, csch2 = 4.0 * q / (om * om);
    double sh = std::sinh(t), ch = std::cosh(t);
    double dGdt = (-(dN / 2.0) * csch2 * sh - coth * ch) / (2.0 * sh * sh);
    return dGdt / (2.0 * sh);
  }
  if (lambda <= -2.0) {
    double s = std::acosh(-lambda / 2.0);
    if (dN * s < 0.05) return cycle_green_deriv_direct(N, lambda);
    double q = std::exp(-dN * s);
    double tanh = (1.0 - q) / (1.0 + q), sech2 = 4.0 * q / ((1.0 + q) * (1.0 + q));
    double sh = std::sinh(s), ch = std::cosh(s);
    double dGds = -((dN / 2.0) * sech2 * sh - tanh * ch) / (2.0 * sh * sh);
    return dGds / (-2.0 * sh);
  }
  double phi = std::acos(lambda / 2.0);
  if (dN * (pi - phi) < 0.05) return cycle_green_deriv_direct(N, lambda);
  double sp = std::sin(phi), cp = std::cos(phi);
  double sx = std::sin(dN * phi / 2.0), cx = std::cos(dN * phi / 2.0);
  double dGdphi = ((dN / 2.0) * sp / (sx * sx) + (cx / sx) * cp) / (2.0 * sp * sp);
  return dGdphi / (-2.0 * sp);
}

// Distinct eigenvalues of the torus T^d_{2n+1} with their multiplicities.
// Each eigenvalue 2 sum_j cos(2 pi m_j / N) is generated from its canonical
// tuple 0 <= m_1 <= ... <= m_d <= n, summed in that order, so symmetric
// modes give identical bits; values closer than `merge_tol` are merged.
struct TorusLevels {
  int d = 1;
  int n = 1;
  long N = 3;
  std::vector<double> value;        // ascending
  std::vector<std::size_t> count;   // multiplicity

  static TorusLevels build(int d, int n, double merge_tol = 1e-12) {
    require(d >= 1 && n >= 1, "torus levels need d >= 1 and n >= 1");
    TorusLevels L;
    L.d = d;
    L.n = n;
    L.N = 2L * n + 1;
    std::vector<double> c(n + 1);
    for (int m = 0; m <= n; ++m) c[m] = 2.0 * std::cos(2.0 * pi * m / static_cast<double>(L.N));
    c[0] = 2.0;

    std::vector<std::pair<double, std::size_t>> raw;
    std::vector<int> m(d, 0);
    while (true) {
      double v = 0.0;
      for (int j = 0; j < d; ++j) v += c[m[j]];
      // orbit size: permutations of the multiset times sign choices
      std::size_t orbit = 1;
      for (int j = 0; j < d; ++j)
        if (m[j] != 0) orbit *= 2;
      std::size_t perms = 1;
      {
        std::size_t fact = 1;
        for (int j = 1; j <= d; ++j) fact *= j;
        perms = fact;
        int run = 1;
        for (int j = 1; j <= d; ++j) {
          if (j < d && m[j] == m[j - 1]) {
            ++run;
          } else {
            std::size_t f = 1;
            for (int r = 2; r <= run; ++r) f *= r;
            perms /= f;
            run = 1;
          }
        }
      }
      raw.emplace_back(v, orbit * perms);
      int j = d - 1;
      while (j >= 0 && m[j] == n) --j;
      if (j < 0) break;
      ++m[j];
      for (int k = j + 1; k < d; ++k) m[k] = m[j];
    }
    std::sort(raw.begin(), raw.end());
    for (auto& [v, k] : raw) {
      if (!L.value.empty() && v - L.value.back() <= merge_tol) {
        L.count.back() += k;
      } else {
        L.value.push_back(v);
        L.count.push_back(k);
      }
    }
    return L;
  }

  std::size_t size() const { return value.size(); }

  std::size_t volume() const {
    std::size_t v = 1;
    for (int j = 0; j < d; ++j) v *= static_cast<std::size_t>(N);
    return v;
  }

  double weight(std::size_t k) const { return static_cast<double>(count[k]) / static_cast<double>(volume()); }

  // Index of the level holding value v (nearest).
  std::size_t level_of(double v) const {
    auto it = std::lower_bound(value.begin(), value.end(), v);
    std::size_t i = static_cast<std::size_t>(it - value.begin());
    if (i == value.size()) return i - 1;
    if (i > 0 && v - value[i - 1] < value[i] - v) return i - 1;
    return i;
  }

  // Per level: (1/N^d) sum over modes theta in the level of cos(theta . delta),
  // i.e. <E_level delta_0, delta_delta>. Enumerates all N^d modes.
  std::vector<double> projector(const std::vector<long>& delta) const {
    require(static_cast<int>(delta.size()) == d, "projector: displacement has wrong dimension");
    std::vector<double> c(N);
    for (long m = 0; m < N; ++m) {
      long mm = std::min(m, N - m);
      c[m] = 2.0 * std::cos(2.0 * pi * mm / static_cast<double>(N));
    }
    c[0] = 2.0;
    std::vector<double> out(size(), 0.0);
    std::vector<long> m(d, 0);
    const double inv = 1.0 / static_cast<double>(volume());
    while (true) {
      std::vector<long> canon(d);
      for (int j = 0; j < d; ++j) canon[j] = std::min(m[j], N - m[j]);
      std::sort(canon.begin(), canon.end());
      double v = 0.0;
      for (int j = 0; j < d; ++j) v += c[canon[j]];
      double phase = 0.0;
      for (int j = 0; j < d; ++j) phase += 2.0 * pi * static_cast<double>((m[j] * delta[j]) % N) / N;
      out[level_of(v)] += std::cos(phase) * inv;
      int j = d - 1;
      while (j >= 0 && m[j] == N - 1) {
        m[j] = 0;
        --j;
      }
      if (j < 0) break;
      ++m[j];
    }
    return out;
  }
};

// Torus T^d_N used as a comb fiber: rank-one data at the origin and the
// resolvent diagonal/off-diagonal evaluated through nested cycle closed forms
// (cost N^{d-1} per call).
class TorusFiber {
 public:
  TorusFiber(int d, int n) : levels_(TorusLevels::build(d, n)) {
    const long N = levels_.N;
    cosines_.resize(N);
    for (long j = 0; j < N; ++j) cosines_[j] = 2.0 * std::cos(2.0 * pi * std::min(j, N - j) / static_cast<double>(N));
    cosines_[0] = 2.0;
  }

  const TorusLevels& levels() const { return levels_; }
  int d() const { return levels_.d; }
  long N() const { return levels_.N; }
  double top() const { return levels_.value.back(); }
  double bottom() const { return levels_.value.front(); }

  double green(double lambda) const { return green_nested(lambda, nullptr, levels_.d); }

  // <R(lambda) delta_0, delta_h>, h has d entries.
  double green(double lambda, const std::vector<long>& h) const {
    require(static_cast<int>(h.size()) == levels_.d, "fiber site has wrong dimension");
    return green_nested(lambda, h.data(), levels_.d);
  }

  double green_deriv(double lambda) const { return deriv_nested(lambda, levels_.d); }

 private:
  double green_nested(double lambda, const long* h, int depth) const {
    const long N = levels_.N;
    if (depth == 1) return cycle_green(N, lambda, h ? h[0] : 0);
    KahanSum s;
    for (long j = 0; j < N; ++j) {
      double w = h ? std::cos(2.0 * pi * static_cast<double>((j * h[0]) % N) / N) : 1.0;
      s.add(w * green_nested(lambda - cosines_[j], h ? h + 1 : nullptr, depth - 1));
    }
    return s.value() / static_cast<double>(N);
  }

  double deriv_nested(double lambda, int depth) const {
    const long N = levels_.N;
    if (depth == 1) return cycle_green_deriv(N, lambda);
    KahanSum s;
    for (long j = 0; j < N; ++j) s.add(deriv_nested(lambda - cosines_[j], depth - 1));
    return s.value() / static_cast<double>(N);
  }

  TorusLevels levels_;
  std::vector<double> cosines_;
};

}  // namespace hop
