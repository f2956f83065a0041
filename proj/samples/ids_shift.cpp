// Finite-volume IDS of Z|Z against the shifted fiber IDS; writes the curve at
// the largest n to ids.csv.
#include <cstdio>
#include <fstream>

#include "hop/hop.hpp"

int main() {
  using namespace hop;
  auto m = GraphModel::zcomb(1);
  for (int n : {50, 100, 200, 400}) {
    FiniteVolume fv(m, n);
    auto g = eps0_E0(fv);
    std::printf("n=%4d  distance=%.5f  eps0=%.3e  E0=%.5f  hidden=%s\n", n, ids_shift_distance(fv), g.eps0, g.E0,
                g.hidden ? "yes" : "no");
    if (n == 400) {
      std::ofstream out("ids.csv");
      write_ids_csv(out, ids_empirical(fv));
    }
  }
}
