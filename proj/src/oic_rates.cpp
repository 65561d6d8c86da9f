#include "cogmac/oic_rates.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace cogmac {
namespace {

constexpr double kLn2 = std::numbers::ln2;

double log2_of(double x) { return std::log(x) / kLn2; }

}  // namespace

std::string_view to_string(OicRegime r) {
  switch (r) {
    case OicRegime::Weak: return "weak";
    case OicRegime::Medium: return "medium";
    case OicRegime::Strong: return "strong";
  }
  return "?";
}

double capacity(double snr) { return std::log1p(snr) / kLn2; }

double primary_rate(const GainSample& sample, std::span<const double> powers,
                    const Scenario& s) {
  assert(powers.size() == sample.gk_sq.size());
  double interference = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    interference += powers[k] * sample.gk_sq[k];
  }
  const double signal = s.primary.power_p0 * sample.gp_sq;
  return capacity(signal / (s.primary.noise_np + interference));
}

double secondary_snr(const GainSample& sample, std::span<const double> powers,
                     const Scenario& s) {
  assert(powers.size() == sample.hk_sq.size());
  double received = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    received += powers[k] * sample.hk_sq[k];
  }
  return received / s.noise_ns;
}

double primary_snr_at_secondary(const GainSample& sample, const Scenario& s) {
  return s.primary.power_p0 * sample.hp_sq / s.noise_ns;
}

OicRegime classify_regime(double gamma_p, double psi, double rate_rp) {
  const double alpha = gamma_threshold(rate_rp);
  if (gamma_p < alpha) return OicRegime::Weak;
  if (gamma_p < alpha * (1.0 + psi)) return OicRegime::Medium;
  return OicRegime::Strong;
}

OicRegime classify_regime(const GainSample& sample,
                          std::span<const double> powers, const Scenario& s) {
  return classify_regime(primary_snr_at_secondary(sample, s),
                         secondary_snr(sample, powers, s), s.primary.rate_rp);
}

double branch_rate(OicRegime branch, double gamma_p, double psi,
                   double rate_rp) {
  double r = 0.0;
  switch (branch) {
    case OicRegime::Weak:
      r = capacity(psi / (1.0 + gamma_p));
      break;
    case OicRegime::Medium:
      r = -rate_rp + log2_of(1.0 + gamma_p + psi);
      break;
    case OicRegime::Strong:
      r = capacity(psi);
      break;
  }
  return std::max(r, 0.0);
}

double sum_rate_oic(double gamma_p, double psi, double rate_rp) {
  if (psi <= 0.0) return 0.0;
  return branch_rate(classify_regime(gamma_p, psi, rate_rp), gamma_p, psi,
                     rate_rp);
}

double sum_rate_oic(const GainSample& sample, std::span<const double> powers,
                    const Scenario& s) {
  return sum_rate_oic(primary_snr_at_secondary(sample, s),
                      secondary_snr(sample, powers, s), s.primary.rate_rp);
}

RatePair operating_point(const GainSample& sample,
                         std::span<const double> powers, const Scenario& s) {
  const double gamma_p = primary_snr_at_secondary(sample, s);
  const double psi = secondary_snr(sample, powers, s);
  const OicRegime regime = classify_regime(gamma_p, psi, s.primary.rate_rp);
  RatePair pair;
  pair.rs = sum_rate_oic(gamma_p, psi, s.primary.rate_rp);
  if (regime != OicRegime::Weak) {
    pair.rp_prime = std::min(s.primary.rate_rp, capacity(gamma_p));
  }
  return pair;
}

bool mac_region_contains(const RatePair& pair, const GainSample& sample,
                         std::span<const double> powers, const Scenario& s,
                         double slack) {
  const double gamma_p = primary_snr_at_secondary(sample, s);
  const double psi = secondary_snr(sample, powers, s);
  return pair.rs <= capacity(psi) + slack &&
         pair.rp_prime <= capacity(gamma_p) + slack &&
         pair.rs + pair.rp_prime <= capacity(gamma_p + psi) + slack;
}

}  // namespace cogmac
