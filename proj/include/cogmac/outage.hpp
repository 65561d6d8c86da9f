#ifndef COGMAC_OUTAGE_HPP
#define COGMAC_OUTAGE_HPP

#include <span>
#include <vector>

#include "cogmac/scenario.hpp"

namespace cogmac {

/// SINR = X / (1 + sum Y_k) with independent exponential X, Y_k.
struct OutageInputs {
  double sigma_x_sq = 1.0;          // E[X]
  std::vector<double> sigma_y_sq;   // E[Y_k]
  double gamma = 0.0;               // threshold
};

/// Pr{SINR < gamma} = 1 - exp(-gamma/sx) * prod_k (1 + sk * gamma / sx)^-1.
/// The product is accumulated as a sum of log1p terms.
double sinr_cdf(const OutageInputs& in);

/// Primary outage probability under secondary powers `powers`.
double outage_probability(std::span<const double> powers, const Scenario& s);

/// rho_0: primary outage with every secondary user silent.
double baseline_outage(const Scenario& s);

/// rho_m > rho_0.
bool coexistence_feasible(const Scenario& s);

}  // namespace cogmac

#endif  // COGMAC_OUTAGE_HPP
