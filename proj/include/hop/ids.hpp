#pragma once

#include <ostream>

#include "finite_volume.hpp"
#include "secular.hpp"

namespace hop {

// Right-continuous step CDF: F(x) = fraction of energies <= x.
struct IdsCurve {
  std::vector<double> energy;      // ascending, distinct
  std::vector<double> cumulative;  // F at each energy

  double operator()(double x) const {
    auto it = std::upper_bound(energy.begin(), energy.end(), x);
    if (it == energy.begin()) return 0.0;
    return cumulative[static_cast<std::size_t>(it - energy.begin()) - 1];
  }

  std::size_t size() const { return energy.size(); }
};

// CDF of energies h = reference - lambda with the given multiplicities.
inline IdsCurve ids_from_spectrum(const SpectrumStructured& s, double reference) {
  IdsCurve c;
  c.energy.reserve(s.entries.size());
  c.cumulative.reserve(s.entries.size());
  const double total = static_cast<double>(s.total);
  std::size_t acc = 0;
  for (auto it = s.entries.rbegin(); it != s.entries.rend(); ++it) {
    acc += it->second;
    double h = reference - it->first;
    if (!c.energy.empty() && c.energy.back() == h) {
      c.cumulative.back() = acc / total;
    } else {
      c.energy.push_back(h);
      c.cumulative.push_back(acc / total);
    }
  }
  if (!c.cumulative.empty()) c.cumulative.back() = 1.0;
  return c;
}

// Empirical IDS of ||A_inf|| - A_{Lambda_n}.
inline IdsCurve ids_empirical(const FiniteVolume& fv) { return ids_from_spectrum(fv.spectrum(), fv.norm_inf()); }

inline IdsCurve ids_empirical(const GraphModel& m, int n, int workers = 0) {
  return ids_empirical(FiniteVolume(m, n, workers));
}

// IDS of the disjoint fiber copies of a comb volume, in comb energies shifted
// by delta = fiber_norm - comb_norm: jumps at ||A_comb|| - c_k.
inline IdsCurve fiber_copies_ids_shifted(const FiniteVolume& fv) {
  require(fv.layout() == FiniteVolume::Layout::Comb, "fiber IDS needs a comb volume");
  const auto& L = fv.fiber().levels();
  std::vector<std::pair<double, std::size_t>> e;
  for (std::size_t k = 0; k < L.size(); ++k) e.emplace_back(L.value[k], L.count[k]);
  return ids_from_spectrum(SpectrumStructured::from_entries(std::move(e)), fv.norm_inf());
}

// sup_x |F(x) - G(x)| over two step CDFs.
inline double kolmogorov_distance(const IdsCurve& f, const IdsCurve& g) {
  double best = 0.0;
  std::size_t i = 0, j = 0;
  double fi = 0.0, gj = 0.0;
  while (i < f.size() || j < g.size()) {
    double x;
    if (j >= g.size() || (i < f.size() && f.energy[i] <= g.energy[j]))
      x = f.energy[i];
    else
      x = g.energy[j];
    while (i < f.size() && f.energy[i] <= x) fi = f.cumulative[i++];
    while (j < g.size() && g.energy[j] <= x) gj = g.cumulative[j++];
    best = std::max(best, std::abs(fi - gj));
  }
  return best;
}

// Kolmogorov distance between F_Y(x) and F_X(x + delta).
inline double ids_shift_distance(const FiniteVolume& fv) {
  require(fv.model().is_comb(), "ids_shift_distance: comb model expected");
  return kolmogorov_distance(ids_empirical(fv), fiber_copies_ids_shifted(fv));
}

inline double ids_shift_distance(const GraphModel& m, int n, int workers = 0) {
  return ids_shift_distance(FiniteVolume(m, n, workers));
}

struct GapReport {
  double eps0 = 0.0;           // lowest finite-volume energy
  double E0 = 0.0;             // first energy where F_n >= theta
  double theta = 0.0;          // 10 / |fiber box|
  double predicted_gap = 0.0;  // ||A_comb|| - ||A_fiber||
  bool hidden = false;
};

// The band below the fiber bottom holds one state per base mode, i.e. weight
// 1/|fiber box|, so E0 is read at theta = 10/|fiber box|.
// hidden = predicted gap > gap_tol and E0 - eps0 > predicted_gap / 2.
inline GapReport eps0_E0(const FiniteVolume& fv, double gap_tol = 1e-9) {
  require(fv.model().is_comb(), "eps0_E0: comb model expected");
  GapReport r;
  auto ids = ids_empirical(fv);
  r.theta = 10.0 / static_cast<double>(fv.fiber().levels().volume());
  r.eps0 = ids.energy.front();
  r.E0 = ids.energy.back();
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids.cumulative[i] >= r.theta) {
      r.E0 = ids.energy[i];
      break;
    }
  r.predicted_gap = hidden_spectrum(fv.model()).gap;
  r.hidden = r.predicted_gap > gap_tol && r.E0 - r.eps0 > 0.5 * r.predicted_gap;
  return r;
}

inline void write_ids_csv(std::ostream& out, const IdsCurve& c) {
  out << "energy,F\n";
  out.precision(17);
  for (std::size_t i = 0; i < c.size(); ++i) out << c.energy[i] << ',' << c.cumulative[i] << '\n';
}

}  // namespace hop
