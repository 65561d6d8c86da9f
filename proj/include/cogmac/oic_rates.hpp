#ifndef COGMAC_OIC_RATES_HPP
#define COGMAC_OIC_RATES_HPP

#include <span>
#include <string_view>
#include <vector>

#include "cogmac/scenario.hpp"

namespace cogmac {

/// One joint realization of every squared channel magnitude.
struct GainSample {
  double gp_sq = 0.0;
  std::vector<double> gk_sq;
  double hp_sq = 0.0;
  std::vector<double> hk_sq;
};

enum class OicRegime { Weak, Medium, Strong };

std::string_view to_string(OicRegime r);

struct RatePair {
  double rs = 0.0;
  double rp_prime = 0.0;
};

/// C(x) = log2(1 + x).
double capacity(double snr);

/// Rate of the primary link, secondary transmissions treated as noise.
double primary_rate(const GainSample& sample, std::span<const double> powers,
                    const Scenario& s);

/// Aggregate secondary SNR at the secondary BS: sum P_k |h_k|^2 / N_s.
double secondary_snr(const GainSample& sample, std::span<const double> powers,
                     const Scenario& s);

/// Primary SNR at the secondary BS: P_0 |h_p|^2 / N_s.
double primary_snr_at_secondary(const GainSample& sample, const Scenario& s);

// Regime boundaries are closed on the left:
//   Weak    gamma_p < alpha
//   Medium  alpha <= gamma_p < alpha (1 + psi)
//   Strong  gamma_p >= alpha (1 + psi)
OicRegime classify_regime(double gamma_p, double psi, double rate_rp);
OicRegime classify_regime(const GainSample& sample,
                          std::span<const double> powers, const Scenario& s);

/// Rate formula of one branch, evaluated regardless of whether the branch's
/// condition holds. Clamped at zero.
double branch_rate(OicRegime branch, double gamma_p, double psi,
                   double rate_rp);

/// Piecewise OIC sum rate.
double sum_rate_oic(double gamma_p, double psi, double rate_rp);
double sum_rate_oic(const GainSample& sample, std::span<const double> powers,
                    const Scenario& s);

/// (R_s, R_p') the secondary BS operates at. R_p' is 0 in the weak regime
/// and min(R_p, C(gamma_p)) otherwise.
RatePair operating_point(const GainSample& sample,
                         std::span<const double> powers, const Scenario& s);

/// Two-source MAC capacity region test. `slack` (bits) absorbs rounding at
/// the faces of the region.
bool mac_region_contains(const RatePair& pair, const GainSample& sample,
                         std::span<const double> powers, const Scenario& s,
                         double slack = 1e-12);

}  // namespace cogmac

#endif  // COGMAC_OIC_RATES_HPP
