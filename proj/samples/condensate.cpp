// Diagonal two-point function of N along the condensate schedule D = 0.5.
#include <cstdio>

#include "hop/hop.hpp"

int main() {
  using namespace hop;
  auto m = GraphModel::half_line();
  const double D = 0.5;
  auto lim = two_point_limit(m, 1.0, D, {0}, {0});
  std::printf("limit: smooth %.6f + resolvent %.6f + condensate %.6f = %.6f\n", lim.smooth, lim.resolvent,
              lim.condensate, lim.total());
  for (int n : {250, 500, 1000, 2000, 4000}) {
    FiniteVolume fv(m, n);
    double mu = condensate_schedule(fv, D);
    double tp = two_point_finite(fv, {1.0, mu}, {0}, {0});
    std::printf("n=%5d  mu_n=%.3e  <a*a>(0,0)=%.6f  rel=%+.2e\n", n, mu, tp, (tp - lim.total()) / lim.total());
  }
}
