#ifndef COGMAC_POWER_ALLOC_HPP
#define COGMAC_POWER_ALLOC_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cogmac/scenario.hpp"

namespace cogmac {

// Outage-constrained power allocation for the secondary uplink.
//
// Maximizes log2(1 + sum_k P_k w_k) subject to
//   1 - zeta * prod_k (1 + P_k beta_k)^-1 <= rho_m,   P_k >= 0,
// where w_k is alpha_k = var_h / (N_s e^kappa) with statistical CSI, or
// |h_k|^2 / N_s with instantaneous CSI.
//
// The KKT solver parameterizes every user by the pivot power P_1 (users[0]):
//   1 + F_j(P_1) beta_j = (w_1 beta_j) / (beta_1 w_j) * (1 + P_1 beta_1)
// and iterates P_1 <- G(P_1), which keeps the outage constraint active.
// The solver pivots on the user with the smallest w_k / beta_k (the first
// to turn on). companion_power, fixed_point_g and power_limits take
// users[0] as the pivot. User indices in this API are zero-based.

enum class CsiMode { Statistical, Instantaneous };

enum class SolverStatus { Converged, MaxIterations, SecondaryOff };

std::string_view to_string(SolverStatus s);
std::string_view to_string(CsiMode m);

struct PowerAllocation {
  std::vector<double> powers;
  SolverStatus status = SolverStatus::SecondaryOff;
  int iterations = 0;
  double constraint_residual = 0.0;  // f at `powers`
  double objective = 0.0;            // bits/s/Hz
  double lagrange_lambda = 0.0;      // diagnostic only
};

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 1000;
  double damping = 1.0;                // initial step factor theta
  std::optional<std::uint64_t> seed;   // random P_1 initialization if set
};

/// Throws std::invalid_argument on bad option values.
void validate(const SolverOptions& opts);

/// outage_probability(powers) - rho_m; negative means feasible.
double constraint_f(std::span<const double> powers, const Scenario& s);

/// Per-user objective weight w_k (see header comment). Instantaneous mode
/// throws std::invalid_argument when inst_h_sq is missing or zero.
std::vector<double> objective_weights(const Scenario& s, CsiMode mode);

/// log2(1 + sum_k P_k w_k).
double allocation_objective(std::span<const double> powers, const Scenario& s,
                            CsiMode mode);

/// [F_j(p1)]^+ for user j >= 1.
double companion_power(std::size_t j, double p1, const Scenario& s,
                       CsiMode mode);

/// [G(p1)]^+, the pivot power that makes the outage constraint active given
/// the companion powers [F_j(p1)]^+.
double fixed_point_g(double p1, const Scenario& s, CsiMode mode);

/// (p_min, p_max) bracket for the pivot. p_max <= 0 exactly when the
/// coexistence condition fails.
std::pair<double, double> power_limits(const Scenario& s, CsiMode mode);

/// Unconstrained KKT iteration.
PowerAllocation allocate(const Scenario& s, const SolverOptions& opts = {},
                         CsiMode mode = CsiMode::Statistical);

/// KKT iteration with per-user caps P_k <= power_cap. Every user must carry
/// a power_cap.
PowerAllocation allocate_capped(const Scenario& s,
                                const SolverOptions& opts = {},
                                CsiMode mode = CsiMode::Statistical);

/// Per-user power when all users share var_h and var_g.
double symmetric_closed_form(const Scenario& s);

using PowerObjective = std::function<double(std::span<const double>)>;

/// Brute-force maximizer over {0} U logspace(m_k 1e-6, m_k, points) on axis
/// k, where m_k is user k's single-user power limit, restricted to f <= 0. K <= 3. Ties resolve to the first point in
/// lexicographic grid order. `objective` defaults to allocation_objective.
PowerAllocation grid_oracle(const Scenario& s, int grid_points_per_axis = 200,
                            CsiMode mode = CsiMode::Statistical,
                            const PowerObjective& objective = {});

/// Grid used by grid_oracle along every axis, ascending.
std::vector<double> oracle_axis(double p_max, int grid_points_per_axis);

}  // namespace cogmac

#endif  // COGMAC_POWER_ALLOC_HPP
