#include "cogmac/outage.hpp"

#include <cassert>
#include <cmath>

namespace cogmac {

double sinr_cdf(const OutageInputs& in) {
  if (in.gamma <= 0.0) return 0.0;
  if (std::isinf(in.gamma) || in.sigma_x_sq <= 0.0) return 1.0;
  const double ratio = in.gamma / in.sigma_x_sq;
  double log_success = -ratio;
  for (double sk : in.sigma_y_sq) log_success -= std::log1p(sk * ratio);
  return -std::expm1(log_success);
}

double outage_probability(std::span<const double> powers, const Scenario& s) {
  assert(powers.size() == s.users.size());
  const auto& p = s.primary;
  OutageInputs in;
  in.sigma_x_sq = p.power_p0 * p.var_gp / p.noise_np;
  in.gamma = gamma_threshold(p.rate_rp);
  in.sigma_y_sq.reserve(powers.size());
  for (std::size_t k = 0; k < powers.size(); ++k) {
    in.sigma_y_sq.push_back(powers[k] * s.users[k].var_g / p.noise_np);
  }
  return sinr_cdf(in);
}

double baseline_outage(const Scenario& s) {
  OutageInputs in;
  in.sigma_x_sq = s.snr_p();
  in.gamma = gamma_threshold(s.primary.rate_rp);
  return sinr_cdf(in);
}

bool coexistence_feasible(const Scenario& s) {
  return s.outage_margin > baseline_outage(s);
}

}  // namespace cogmac
