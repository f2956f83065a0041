// Comb norms, spectral gaps and transience of the catalog combs.
#include <cstdio>

#include "hop/hop.hpp"

int main() {
  using namespace hop;
  std::printf("%-10s %14s %14s %12s %s\n", "model", "norm", "fiber norm", "gap", "type");
  for (auto m : {GraphModel::ncomb(1), GraphModel::ncomb(2), GraphModel::ncomb(3), GraphModel::zcomb(1),
                 GraphModel::zcomb(2), GraphModel::zcomb(3)}) {
    auto h = hidden_spectrum(m);
    std::printf("%-10s %14.10f %14.10f %12.3e %s\n", m.name().c_str(), h.comb_norm, h.base_disjoint_norm, h.gap,
                to_string(classify_recurrence(m)));
  }
}
