#include "cogmac/ergodic_bounds.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cogmac {
namespace {

double weighted_snr(std::span<const double> powers, const Scenario& s) {
  assert(powers.size() == s.users.size());
  double total = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    total += powers[k] * s.users[k].var_h;
  }
  return total / s.noise_ns;
}

// N_s + P_0 E[|h_p|^2 1{|h_p|^2 < c_p}]
double weak_denominator(const Scenario& s) {
  const double p0 = s.primary.power_p0;
  const double c_p = s.noise_ns * gamma_threshold(s.primary.rate_rp) / p0;
  return s.noise_ns + p0 * truncated_exp_component(s.primary.var_hp, c_p);
}

}  // namespace

double truncated_exp_component(double var, double c) {
  if (var <= 0.0 || c <= 0.0) return 0.0;
  if (std::isinf(c)) return var;
  const double x = c / var;
  return -var * std::expm1(-x) - c * std::exp(-x);
}

double harmonic_number(std::size_t n) {
  double h = 0.0;
  for (std::size_t k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
  return h;
}

double upper_bound_strong(std::span<const double> powers, const Scenario& s) {
  return capacity(weighted_snr(powers, s));
}

double lower_bound_strong(std::span<const double> powers, const Scenario& s) {
  return capacity(weighted_snr(powers, s) * std::exp(-kEulerKappa));
}

double lower_bound_strong_iid(double p_s, double var_h, std::size_t k,
                              double noise_ns) {
  if (k == 0) throw std::invalid_argument("user count must be >= 1");
  return capacity(p_s * var_h / noise_ns *
                  std::exp(harmonic_number(k - 1) - kEulerKappa));
}

BoundReport bounds_strong(std::span<const double> powers, const Scenario& s) {
  if (!powers.empty() && is_iid(powers, s)) {
    return {lower_bound_strong_iid(powers[0], s.users[0].var_h, powers.size(),
                                   s.noise_ns),
            upper_bound_strong(powers, s), OicRegime::Strong, "exp_log_iid",
            "jensen"};
  }
  return {lower_bound_strong(powers, s), upper_bound_strong(powers, s),
          OicRegime::Strong, "exp_log_noniid", "jensen"};
}

BoundReport bounds_medium(std::span<const double> powers, const Scenario& s) {
  const double rp = s.primary.rate_rp;
  const double primary = s.primary.power_p0 * s.primary.var_hp / s.noise_ns;
  const double secondary = weighted_snr(powers, s);
  const double shrink = std::exp(-kEulerKappa);
  BoundReport r;
  r.regime = OicRegime::Medium;
  r.upper = std::max(0.0, -rp + capacity(primary + secondary));
  r.lower = std::max(0.0, -rp + capacity((primary + secondary) * shrink));
  r.lower_method = "exp_log_medium";
  r.upper_method = "jensen_medium";
  return r;
}

double upper_bound_weak(std::span<const double> powers, const Scenario& s) {
  const double received = weighted_snr(powers, s) * s.noise_ns;
  return capacity(received / weak_denominator(s));
}

bool is_iid(std::span<const double> powers, const Scenario& s) {
  assert(powers.size() == s.users.size());
  for (std::size_t k = 1; k < powers.size(); ++k) {
    if (powers[k] != powers[0] || s.users[k].var_h != s.users[0].var_h) {
      return false;
    }
  }
  return true;
}

double approx_lower_weak(std::span<const double> powers, const Scenario& s,
                         bool iid) {
  const double denom = weak_denominator(s);
  if (!iid) {
    const double received = weighted_snr(powers, s) * s.noise_ns;
    return capacity(received / denom * std::exp(-kEulerKappa));
  }
  if (!is_iid(powers, s)) {
    throw std::invalid_argument(
        "iid weak-interference bound requires equal var_h and power for all "
        "users");
  }
  const double gain = std::exp(harmonic_number(s.users.size() - 1) -
                               kEulerKappa);
  return capacity(powers[0] * s.users[0].var_h / denom * gain);
}

}  // namespace cogmac
