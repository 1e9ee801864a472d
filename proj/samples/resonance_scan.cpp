// Noise level that maximizes the Fisher information of both estimators for
// OU noise and a few subthreshold signals.
#include <cstdio>

#include "sresonance/sresonance.hpp"

int main() {
  const auto law = sres::ou_law();
  const double tau = 1.0;
  std::printf("%-8s %-7s %-10s %-10s\n", "scheme", "theta", "eps*", "fisher*");
  for (auto scheme : {sres::Scheme::time, sres::Scheme::energy}) {
    for (double theta : {0.0, 0.25, 0.5, 0.75}) {
      const auto r = sres::find_resonance(theta, tau, law, scheme);
      std::printf("%-8s %-7.2f %-10.5f %-10.5f\n", sres::to_string(scheme), theta, r.eps_star,
                  r.fisher_star);
    }
  }
}
