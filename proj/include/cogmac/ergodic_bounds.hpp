#ifndef COGMAC_ERGODIC_BOUNDS_HPP
#define COGMAC_ERGODIC_BOUNDS_HPP

#include <span>
#include <string_view>

#include "cogmac/oic_rates.hpp"
#include "cogmac/scenario.hpp"

namespace cogmac {

// Closed-form bounds on the ergodic secondary sum rate E{R_s}.
//
// Strong regime (clean MAC):   Jensen upper bound, exp-log lower bounds.
// Medium regime:               same two constructions on the medium branch.
// Weak regime (primary as noise, |h_p|^2 < c_p): double-Jensen upper bound
//   and exp-log approximations. The latter are not guaranteed lower bounds,
//   hence the approx_ prefix.
//
// The weak-regime denominators use E[X 1{X < c_p}] (restricted, unnormalized
// expectation) rather than the conditional mean.

struct BoundReport {
  double lower = 0.0;
  double upper = 0.0;
  OicRegime regime = OicRegime::Strong;
  std::string_view lower_method;
  std::string_view upper_method;
};

/// E[X 1{X < c}] for X ~ Exp(mean var).
double truncated_exp_component(double var, double c);

/// H_n = 1 + 1/2 + ... + 1/n, H_0 = 0.
double harmonic_number(std::size_t n);

double upper_bound_strong(std::span<const double> powers, const Scenario& s);
double lower_bound_strong(std::span<const double> powers, const Scenario& s);
double lower_bound_strong_iid(double p_s, double var_h, std::size_t k,
                              double noise_ns);

/// Lower bound is the harmonic-sum one when is_iid holds.
BoundReport bounds_strong(std::span<const double> powers, const Scenario& s);
BoundReport bounds_medium(std::span<const double> powers, const Scenario& s);

double upper_bound_weak(std::span<const double> powers, const Scenario& s);
/// Throws std::invalid_argument when iid is set but users differ in var_h or
/// power.
double approx_lower_weak(std::span<const double> powers, const Scenario& s,
                         bool iid);

/// True when every user shares var_h and power.
bool is_iid(std::span<const double> powers, const Scenario& s);

}  // namespace cogmac

#endif  // COGMAC_ERGODIC_BOUNDS_HPP
