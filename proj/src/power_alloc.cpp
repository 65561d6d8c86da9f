#include "cogmac/power_alloc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "cogmac/outage.hpp"

namespace cogmac {
namespace {

// log(zeta / (1 - rho_m)). Positive exactly when the secondary may transmit.
double log_headroom(const Scenario& s) {
  const double t = gamma_threshold(s.primary.rate_rp) / s.snr_p();
  return -t - std::log1p(-s.outage_margin);
}

// Pivot power at which user j's F_j crosses zero.
double crossing_point(std::size_t j, std::span<const double> beta,
                      std::span<const double> w) {
  return w[j] / (beta[j] * w[0]) - 1.0 / beta[0];
}

double raw_companion(std::size_t j, double p1, std::span<const double> beta,
                     std::span<const double> w) {
  const double ratio = (w[0] * beta[j]) / (beta[0] * w[j]);
  return (ratio * (1.0 + p1 * beta[0]) - 1.0) / beta[j];
}

// G evaluated against explicit companion powers (users 1..K-1).
double pivot_from_companions(std::span<const double> companions,
                             std::span<const double> beta, double headroom) {
  double l = headroom;
  for (std::size_t j = 1; j < beta.size(); ++j) {
    l -= std::log1p(beta[j] * companions[j]);
  }
  return std::max(0.0, std::expm1(l) / beta[0]);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double lagrange_multiplier(std::span<const double> powers,
                           std::span<const double> beta,
                           std::span<const double> w, double rho_m) {
  double weighted = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) weighted += powers[k] * w[k];
  return (1.0 + powers[0] * beta[0]) / (1.0 + weighted) *
         std::numbers::log2e / (1.0 - rho_m) * w[0] / beta[0];
}

PowerAllocation switched_off(const Scenario& s) {
  PowerAllocation a;
  a.powers.assign(s.users.size(), 0.0);
  a.status = SolverStatus::SecondaryOff;
  a.constraint_residual = constraint_f(a.powers, s);
  return a;
}

struct IterationSetup {
  std::vector<double> beta;
  std::vector<double> w;
  std::vector<double> caps;  // +inf when uncapped
  std::vector<bool> frozen;
  double headroom = 0.0;
  double pivot_lo = 0.0;
  double pivot_hi = 0.0;
};

void fill_companions(const IterationSetup& st, double p1,
                     std::vector<double>& powers) {
  powers[0] = p1;
  for (std::size_t j = 1; j < powers.size(); ++j) {
    if (st.frozen[j]) {
      powers[j] = 0.0;
      continue;
    }
    const double f = std::max(0.0, raw_companion(j, p1, st.beta, st.w));
    powers[j] = std::min(st.caps[j], f);
  }
}

// Damped fixed-point iteration shared by the uncapped and capped solvers.
PowerAllocation iterate(const Scenario& s, const SolverOptions& opts,
                        const IterationSetup& st) {
  const std::size_t k = s.users.size();
  PowerAllocation a;
  a.powers.assign(k, 0.0);

  double p1 = 0.5 * (st.pivot_lo + st.pivot_hi);
  if (opts.seed) {
    std::mt19937_64 rng(*opts.seed);
    p1 = st.pivot_lo + uniform01(rng) * (st.pivot_hi - st.pivot_lo);
  }

  const double theta_floor = std::min(0.125, 0.5 / static_cast<double>(k));
  double theta = opts.damping;
  double prev_step = 0.0;
  a.status = SolverStatus::MaxIterations;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    fill_companions(st, p1, a.powers);
    const double g =
        std::min(st.caps[0], pivot_from_companions(a.powers, st.beta,
                                                   st.headroom));
    const double step = g - p1;
    if (step * prev_step < 0.0) theta = std::max(theta_floor, 0.5 * theta);
    prev_step = step;

    const double next = p1 + theta * step;
    const double delta = std::abs(next - p1);
    p1 = next;
    fill_companions(st, p1, a.powers);
    a.iterations = it;
    a.constraint_residual = constraint_f(a.powers, s);

    const bool capped_slack = p1 >= st.caps[0];
    const bool boundary_ok = capped_slack
                                 ? a.constraint_residual <= opts.tolerance
                                 : std::abs(a.constraint_residual) <=
                                       opts.tolerance;
    if (delta <= opts.tolerance * (1.0 + p1) && boundary_ok) {
      a.status = SolverStatus::Converged;
      break;
    }
  }
  return a;
}

PowerAllocation solve_pivoted(const Scenario& s, const SolverOptions& opts,
                              CsiMode mode, bool capped) {
  const std::size_t k = s.users.size();

  IterationSetup st;
  st.caps.assign(k, std::numeric_limits<double>::infinity());
  if (capped) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!s.users[j].power_cap) {
        throw std::invalid_argument("users[" + std::to_string(j) +
                                    "].power_cap is required for the capped "
                                    "solver");
      }
      st.caps[j] = *s.users[j].power_cap;
    }
  }
  if (!coexistence_feasible(s)) return switched_off(s);

  st.beta = derive_constants(s).beta;
  st.w = objective_weights(s, mode);
  st.headroom = log_headroom(s);
  const auto [p_min, p_max] = power_limits(s, mode);

  PowerAllocation a;
  if (k == 1) {
    a.powers = {std::min(st.caps[0], p_max)};
    a.status = SolverStatus::Converged;
    a.iterations = 1;
    a.constraint_residual = constraint_f(a.powers, s);
  } else {
    // Users whose F_j stays negative on the whole pivot range never
    // transmit; the bracket's lower end is taken over the rest.
    st.frozen.assign(k, false);
    double lo = 0.0;
    for (std::size_t j = 1; j < k; ++j) {
      const double cross = crossing_point(j, st.beta, st.w);
      if (cross >= p_max) {
        st.frozen[j] = true;
      } else {
        lo = std::max(lo, cross);
      }
    }
    (void)p_min;
    st.pivot_hi = std::min(st.caps[0], p_max);
    st.pivot_lo = std::min(lo, st.pivot_hi);
    a = iterate(s, opts, st);
  }
  a.objective = allocation_objective(a.powers, s, mode);
  a.lagrange_lambda = lagrange_multiplier(a.powers, st.beta, st.w,
                                          s.outage_margin);
  return a;
}

// The iteration parameterizes everyone by the pivot's power, so the pivot
// must be the first user to become active: the smallest w_k / beta_k.
PowerAllocation solve(const Scenario& s, const SolverOptions& opts,
                      CsiMode mode, bool capped) {
  validate(opts);
  const std::size_t k = s.users.size();
  if (k == 0) throw std::invalid_argument("scenario has no secondary users");
  const auto beta = derive_constants(s).beta;
  const auto w = objective_weights(s, mode);
  std::size_t pivot = 0;
  for (std::size_t j = 1; j < k; ++j) {
    if (w[j] / beta[j] < w[pivot] / beta[pivot]) pivot = j;
  }
  if (pivot == 0) return solve_pivoted(s, opts, mode, capped);

  Scenario t = s;
  std::swap(t.users[0], t.users[pivot]);
  PowerAllocation a = solve_pivoted(t, opts, mode, capped);
  std::swap(a.powers[0], a.powers[pivot]);
  return a;
}

}  // namespace

std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIterations: return "max_iterations";
    case SolverStatus::SecondaryOff: return "secondary_off";
  }
  return "?";
}

std::string_view to_string(CsiMode m) {
  return m == CsiMode::Statistical ? "statistical" : "instantaneous";
}

void validate(const SolverOptions& opts) {
  if (!(opts.tolerance > 0.0)) {
    throw std::invalid_argument("tolerance must be > 0");
  }
  if (opts.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be >= 1");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw std::invalid_argument("damping must lie in (0, 1]");
  }
}

double constraint_f(std::span<const double> powers, const Scenario& s) {
  return outage_probability(powers, s) - s.outage_margin;
}

std::vector<double> objective_weights(const Scenario& s, CsiMode mode) {
  if (mode == CsiMode::Statistical) return derive_constants(s).alpha_stat;
  std::vector<double> w;
  w.reserve(s.users.size());
  for (std::size_t k = 0; k < s.users.size(); ++k) {
    const auto& h = s.users[k].inst_h_sq;
    if (!h) {
      throw std::invalid_argument("users[" + std::to_string(k) +
                                  "].inst_h_sq is required in instantaneous "
                                  "mode");
    }
    if (!(*h > 0.0)) {
      throw std::invalid_argument("users[" + std::to_string(k) +
                                  "].inst_h_sq must be > 0 in instantaneous "
                                  "mode");
    }
    w.push_back(*h / s.noise_ns);
  }
  return w;
}

double allocation_objective(std::span<const double> powers, const Scenario& s,
                            CsiMode mode) {
  const auto w = objective_weights(s, mode);
  double total = 0.0;
  for (std::size_t k = 0; k < powers.size(); ++k) total += powers[k] * w[k];
  return std::log1p(total) / std::numbers::ln2;
}

double companion_power(std::size_t j, double p1, const Scenario& s,
                       CsiMode mode) {
  if (j == 0 || j >= s.users.size()) {
    throw std::out_of_range("companion user index must be in [1, K)");
  }
  const auto beta = derive_constants(s).beta;
  const auto w = objective_weights(s, mode);
  return std::max(0.0, raw_companion(j, p1, beta, w));
}

double fixed_point_g(double p1, const Scenario& s, CsiMode mode) {
  const auto beta = derive_constants(s).beta;
  const auto w = objective_weights(s, mode);
  std::vector<double> powers(s.users.size(), 0.0);
  powers[0] = p1;
  for (std::size_t j = 1; j < powers.size(); ++j) {
    powers[j] = std::max(0.0, raw_companion(j, p1, beta, w));
  }
  return pivot_from_companions(powers, beta, log_headroom(s));
}

std::pair<double, double> power_limits(const Scenario& s, CsiMode mode) {
  const auto beta = derive_constants(s).beta;
  const auto w = objective_weights(s, mode);
  // ((1 - rho_m)^-1 zeta - 1) / beta_1, written through rho_m - rho_0 so
  // that its sign agrees with coexistence_feasible bit for bit.
  const double rho_m = s.outage_margin;
  const double p_max =
      (rho_m - baseline_outage(s)) / ((1.0 - rho_m) * beta[0]);
  double p_min = 0.0;
  for (std::size_t j = 1; j < beta.size(); ++j) {
    p_min = std::max(p_min, crossing_point(j, beta, w));
  }
  return {p_min, p_max};
}

PowerAllocation allocate(const Scenario& s, const SolverOptions& opts,
                         CsiMode mode) {
  return solve(s, opts, mode, false);
}

PowerAllocation allocate_capped(const Scenario& s, const SolverOptions& opts,
                                CsiMode mode) {
  return solve(s, opts, mode, true);
}

double symmetric_closed_form(const Scenario& s) {
  if (s.users.empty()) throw std::invalid_argument("no secondary users");
  for (const auto& u : s.users) {
    if (u.var_h != s.users[0].var_h || u.var_g != s.users[0].var_g) {
      throw std::invalid_argument(
          "symmetric closed form requires identical users");
    }
  }
  const double k = static_cast<double>(s.users.size());
  const double beta = derive_constants(s).beta[0];
  return std::max(0.0, std::expm1(log_headroom(s) / k) / beta);
}

std::vector<double> oracle_axis(double p_max, int grid_points_per_axis) {
  if (grid_points_per_axis < 2) {
    throw std::invalid_argument("grid needs at least 2 points per axis");
  }
  std::vector<double> axis;
  axis.reserve(static_cast<std::size_t>(grid_points_per_axis) + 1);
  axis.push_back(0.0);
  const int last = grid_points_per_axis - 1;
  for (int i = 0; i < last; ++i) {
    const double exponent = -6.0 + 6.0 * static_cast<double>(i) / last;
    axis.push_back(p_max * std::pow(10.0, exponent));
  }
  axis.push_back(p_max);
  return axis;
}

PowerAllocation grid_oracle(const Scenario& s, int grid_points_per_axis,
                            CsiMode mode, const PowerObjective& objective) {
  const std::size_t k = s.users.size();
  if (k == 0 || k > 3) {
    throw std::invalid_argument("grid oracle supports 1 <= K <= 3");
  }
  if (!coexistence_feasible(s)) return switched_off(s);

  const PowerObjective eval =
      objective ? objective : [&](std::span<const double> p) {
        return allocation_objective(p, s, mode);
      };
  // Axis k ends at the largest power user k could use alone.
  const auto beta = derive_constants(s).beta;
  const double p_max = power_limits(s, mode).second;
  std::vector<std::vector<double>> axes;
  for (std::size_t d = 0; d < k; ++d) {
    axes.push_back(oracle_axis(p_max * beta[0] / beta[d], grid_points_per_axis));
  }
  // Admit points on the constraint surface despite rounding in f.
  constexpr double kFeasibilitySlack = 1e-12;

  PowerAllocation best;
  best.powers.assign(k, 0.0);
  best.status = SolverStatus::Converged;
  double best_value = -std::numeric_limits<double>::infinity();

  std::vector<std::size_t> idx(k, 0);
  std::vector<double> point(k, 0.0);
  int evaluated = 0;
  while (true) {
    for (std::size_t d = 0; d < k; ++d) point[d] = axes[d][idx[d]];
    ++evaluated;
    if (constraint_f(point, s) <= kFeasibilitySlack) {
      const double v = eval(point);
      if (v > best_value) {
        best_value = v;
        best.powers = point;
      }
    }
    std::size_t d = k;
    while (d > 0) {
      --d;
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
      if (d == 0) {
        d = k + 1;
        break;
      }
    }
    if (d == k + 1) break;
  }
  best.iterations = evaluated;
  best.objective = best_value;
  best.constraint_residual = constraint_f(best.powers, s);
  return best;
}

}  // namespace cogmac
