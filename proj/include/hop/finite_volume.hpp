#pragma once

#include <memory>

#include "graph_core.hpp"
#include "secular.hpp"
#include "spectral_ops.hpp"
#include "torus.hpp"

namespace hop {

// Structured finite volume Lambda_n of an infinite catalog model:
// N -> S_n, Z^d -> T^d_{2n+1}, N|Z^d -> S_n | T^d_{2n+1},
// Z^d|Z -> T^d_{2n+1} | T_{2n+1}.
class FiniteVolume {
 public:
  enum class Layout { Segment, Torus, Comb };

  FiniteVolume(const GraphModel& model, int n, int workers = 0, double tol = 1e-14)
      : model_(model), n_(n), workers_(workers) {
    require(n >= 1, "finite volume index must be >= 1");
    if (model.kind == Kind::SegmentN) {
      model_ = GraphModel::half_line();
      n_ = model.n;
    } else if (model.kind == Kind::TorusZd) {
      model_ = GraphModel::lattice(model.d);
      n_ = model.n;
    }
    norm_inf_ = infinite_norm(model_);
    volume_ = Exhaustion{model_, n_}.vertex_count();
    switch (model_.kind) {
      case Kind::HalfLineN:
        layout_ = Layout::Segment;
        base_ = segment_modes(n_);
        top_ = base_.front().first;
        break;
      case Kind::LineZ:
      case Kind::LatticeZd:
        layout_ = Layout::Torus;
        levels_ = TorusLevels::build(model_.lattice_dim(), n_);
        top_ = levels_.value.back();
        break;
      case Kind::NComb:
      case Kind::ZComb: {
        layout_ = Layout::Comb;
        base_ = model_.kind == Kind::NComb ? segment_modes(n_) : torus_modes(model_.d, n_);
        fiber_ = std::make_shared<TorusFiber>(model_.kind == Kind::NComb ? model_.d : 1, n_);
        roots_ = comb_fiber_roots(base_, *fiber_, tol, workers);
        top_ = roots_.front().back();
        break;
      }
      default: throw PreconditionError("finite volume: unsupported model");
    }
  }

  const GraphModel& model() const { return model_; }
  int n() const { return n_; }
  Layout layout() const { return layout_; }
  int workers() const { return workers_; }
  double norm_inf() const { return norm_inf_; }
  double top() const { return top_; }  // ||A_{Lambda_n}||
  std::size_t volume() const { return volume_; }
  const BaseModes& base() const { return base_; }
  const TorusFiber& fiber() const { return *fiber_; }
  const std::vector<std::vector<double>>& roots() const { return roots_; }
  const TorusLevels& levels() const { return levels_; }

  // eps_0(H_Lambda) = ||A_inf|| - ||A_Lambda||
  double eps0() const { return norm_inf_ - top_; }

  // Sum over the spectrum (with multiplicity) of f(lambda); reduction order
  // is fixed so the value does not depend on the worker count.
  template <class F>
  double spectral_sum(F&& f) const {
    switch (layout_) {
      case Layout::Segment: {
        KahanSum s;
        for (auto& [a, m] : base_) s.add(f(a));
        return s.value();
      }
      case Layout::Torus: {
        KahanSum s;
        for (std::size_t k = 0; k < levels_.size(); ++k) s.add(static_cast<double>(levels_.count[k]) * f(levels_.value[k]));
        return s.value();
      }
      case Layout::Comb: {
        const auto& L = fiber_->levels();
        std::vector<double> partial(base_.size());
        parallel_for(base_.size(), workers_, [&](std::size_t m) {
          KahanSum s;
          for (double r : roots_[m]) s.add(f(r));
          partial[m] = static_cast<double>(base_[m].second) * s.value();
        });
        KahanSum s;
        for (double p : partial) s.add(p);
        std::size_t base_total = 0;
        for (auto& [a, M] : base_) base_total += M;
        for (std::size_t k = 0; k < L.size(); ++k)
          if (L.count[k] > 1) s.add(static_cast<double>((L.count[k] - 1) * base_total) * f(L.value[k]));
        return s.value();
      }
    }
    return 0.0;
  }

  SpectrumStructured spectrum() const {
    std::vector<std::pair<double, std::size_t>> e;
    switch (layout_) {
      case Layout::Segment:
        for (auto& [a, m] : base_) e.emplace_back(a, m);
        break;
      case Layout::Torus:
        for (std::size_t k = 0; k < levels_.size(); ++k) e.emplace_back(levels_.value[k], levels_.count[k]);
        break;
      case Layout::Comb: {
        const auto& L = fiber_->levels();
        std::size_t base_total = 0;
        for (auto& [a, M] : base_) base_total += M;
        for (std::size_t k = 0; k < L.size(); ++k)
          if (L.count[k] > 1) e.emplace_back(L.value[k], (L.count[k] - 1) * base_total);
        for (std::size_t m = 0; m < base_.size(); ++m)
          for (double r : roots_[m]) e.emplace_back(r, base_[m].second);
        break;
      }
    }
    return SpectrumStructured::from_entries(std::move(e));
  }

  // ||v_n||^2 of the finite PF eigenvector normalized to 1 at the root.
  double pf_norm2() const {
    switch (layout_) {
      case Layout::Segment: return segment_pf_norm2();
      case Layout::Torus: return static_cast<double>(volume_);
      case Layout::Comb: {
        double g = fiber_->green(top_), gp = fiber_->green_deriv(top_);
        double fiber_part = -gp / (g * g);
        double base_part = model_.kind == Kind::NComb ? segment_pf_norm2()
                                                      : static_cast<double>(ipow(2 * n_ + 1, model_.d));
        return base_part * fiber_part;
      }
    }
    return 0.0;
  }

  // Finite PF eigenvector entry at a site, normalized to 1 at the root.
  double pf_entry(const Site& x) const {
    check_site(x);
    switch (layout_) {
      case Layout::Segment: return segment_pf(x[0]);
      case Layout::Torus: return 1.0;
      case Layout::Comb: {
        auto [g, h] = split(x);
        double base = model_.kind == Kind::NComb ? segment_pf(g[0]) : 1.0;
        return base * fiber_->green(top_, h) / fiber_->green(top_);
      }
    }
    return 0.0;
  }

  // <f(A_Lambda) delta_x, delta_y> from the structured eigenbasis.
  template <class F>
  double spectral_element(F&& f, const Site& x, const Site& y) const {
    check_site(x);
    check_site(y);
    switch (layout_) {
      case Layout::Segment: {
        KahanSum s;
        for (int m = 0; m <= n_; ++m) s.add(segment_mode(m, x[0]) * segment_mode(m, y[0]) * f(base_[m].first));
        return s.value();
      }
      case Layout::Torus: {
        auto P = levels_.projector(diff(x, y));
        KahanSum s;
        for (std::size_t k = 0; k < levels_.size(); ++k) s.add(P[k] * f(levels_.value[k]));
        return s.value();
      }
      case Layout::Comb: return comb_element(f, x, y);
    }
    return 0.0;
  }

  // Flat vertex index of the built operator (Exhaustion::build layout).
  std::size_t flat_index(const Site& x) const {
    check_site(x);
    const long N = 2L * n_ + 1;
    auto torus_flat = [&](Site::const_iterator b, Site::const_iterator e) {
      std::size_t idx = 0;
      for (auto it = b; it != e; ++it) idx = idx * N + static_cast<std::size_t>(((*it % N) + N) % N);
      return idx;
    };
    switch (layout_) {
      case Layout::Segment: return static_cast<std::size_t>(x[0]);
      case Layout::Torus: return torus_flat(x.begin(), x.end());
      case Layout::Comb: {
        const int bd = comb_base(model_).lattice_dim();
        const std::size_t F = ipow(N, comb_fiber(model_).lattice_dim());
        std::size_t b = model_.kind == Kind::NComb ? static_cast<std::size_t>(x[0]) : torus_flat(x.begin(), x.begin() + bd);
        return b * F + torus_flat(x.begin() + bd, x.end());
      }
    }
    return 0;
  }

  SparseOperator build_operator() const { return Exhaustion{model_, n_}.build(); }

 private:
  double segment_pf(long k) const { return std::sin(pi * (k + 1) / (n_ + 2.0)) / std::sin(pi / (n_ + 2.0)); }

  double segment_pf_norm2() const {
    double s = std::sin(pi / (n_ + 2.0));
    return (n_ + 2.0) / 2.0 / (s * s);
  }

  double segment_mode(int m, long k) const {
    return std::sqrt(2.0 / (n_ + 2.0)) * std::sin(pi * (m + 1.0) * (k + 1.0) / (n_ + 2.0));
  }

  static std::vector<long> diff(const Site& x, const Site& y) {
    std::vector<long> d(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) d[j] = x[j] - y[j];
    return d;
  }

  std::pair<Site, Site> split(const Site& x) const {
    const int bd = comb_base(model_).lattice_dim();
    return {Site(x.begin(), x.begin() + bd), Site(x.begin() + bd, x.end())};
  }

  void check_site(const Site& x) const {
    std::size_t want = layout_ == Layout::Segment ? 1
                       : layout_ == Layout::Torus ? static_cast<std::size_t>(model_.lattice_dim())
                                                  : static_cast<std::size_t>(comb_base(model_).lattice_dim() +
                                                                             comb_fiber(model_).lattice_dim());
    require(x.size() == want, "site has the wrong number of coordinates for this volume");
    bool segment_first = layout_ == Layout::Segment || (layout_ == Layout::Comb && model_.kind == Kind::NComb);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j == 0 && segment_first)
        require(x[0] >= 0 && x[0] <= n_, "segment coordinate outside 0..n");
      else
        require(x[j] >= -n_ && x[j] <= n_, "torus coordinate outside -n..n");
    }
  }

  template <class F>
  double comb_element(F&& f, const Site& x, const Site& y) const {
    auto [g, h] = split(x);
    auto [gp, hp] = split(y);
    const auto& L = fiber_->levels();
    auto Eh = L.projector(h), Ehp = L.projector(hp), Ed = L.projector(diff(h, hp));

    // base projectors per base mode
    std::vector<double> B(base_.size());
    if (model_.kind == Kind::NComb) {
      for (std::size_t m = 0; m < base_.size(); ++m)
        B[m] = segment_mode(static_cast<int>(m), g[0]) * segment_mode(static_cast<int>(m), gp[0]);
    } else {
      auto bl = TorusLevels::build(model_.d, n_);
      auto P = bl.projector(diff(g, gp));
      // torus_modes lists levels in descending order
      for (std::size_t m = 0; m < base_.size(); ++m) B[m] = P[bl.size() - 1 - m];
    }

    std::vector<double> partial(base_.size(), 0.0);
    parallel_for(base_.size(), workers_, [&](std::size_t m) {
      if (B[m] == 0.0) return;
      const double a = base_[m].first;
      KahanSum s;
      for (std::size_t k = 0; k < roots_[m].size(); ++k) {
        double r = roots_[m][k];
        double uh, uhp;
        const std::size_t j = L.level_of(r);
        if (std::abs(r - L.value[j]) <= 1e-4 * std::max(1.0, std::abs(L.value[j]))) {
          // near a pole: split off level j and take the offset from the
          // secular equation, since r - c_j is not resolved in floating point
          double g_rest = 0.0, gp_rest = 0.0, gh = 0.0, ghp = 0.0;
          for (std::size_t i = 0; i < L.size(); ++i) {
            if (i == j) continue;
            double inv = 1.0 / (r - L.value[i]);
            g_rest += L.weight(i) * inv;
            gp_rest += L.weight(i) * inv * inv;
            gh += Eh[i] * inv;
            ghp += Ehp[i] * inv;
          }
          const double w = L.weight(j);
          const double delta = a == 0.0 ? 0.0 : a * w / (1.0 - a * g_rest);
          const double nrm = std::sqrt(w + delta * delta * gp_rest);
          uh = (Eh[j] + delta * gh) / nrm;
          uhp = (Ehp[j] + delta * ghp) / nrm;
        } else {
          double nrm = std::sqrt(-fiber_->green_deriv(r));
          uh = fiber_->green(r, h) / nrm;
          uhp = fiber_->green(r, hp) / nrm;
        }
        s.add(f(r) * uh * uhp);
      }
      partial[m] = B[m] * s.value();
    });
    KahanSum total;
    for (double p : partial) total.add(p);
    if (g == gp) {
      for (std::size_t k = 0; k < L.size(); ++k) {
        double w = L.weight(k);
        total.add(f(L.value[k]) * (Ed[k] - Eh[k] * Ehp[k] / w));
      }
    }
    return total.value();
  }

  GraphModel model_;
  int n_;
  int workers_;
  Layout layout_ = Layout::Segment;
  double norm_inf_ = 0.0;
  double top_ = 0.0;
  std::size_t volume_ = 0;
  BaseModes base_;
  TorusLevels levels_;
  std::shared_ptr<TorusFiber> fiber_;
  std::vector<std::vector<double>> roots_;
};

}  // namespace hop
