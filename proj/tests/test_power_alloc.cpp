#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cogmac/oic_rates.hpp"
#include "cogmac/outage.hpp"
#include "cogmac/power_alloc.hpp"

using namespace cogmac;

namespace {

// gamma_th = 1, SNR_p = 10, beta = var_g / 10.
Scenario make_scenario(std::size_t k, double rho_m) {
  Scenario s;
  s.primary = {10.0, 1.0, 1.0, 1.0, 1.0};
  s.noise_ns = 1.0;
  s.outage_margin = rho_m;
  s.users.assign(k, SecondaryUser{1.0, 1.0, std::nullopt, std::nullopt});
  return s;
}

Scenario random_feasible(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scenario s;
  s.primary.power_p0 = std::pow(10.0, 3.0 * u(rng));
  s.primary.rate_rp = u(rng) < 0.5 ? 1.0 : 2.0;
  s.primary.noise_np = 1.0;
  s.primary.var_gp = 0.5 + u(rng);
  s.primary.var_hp = 1.0;
  s.noise_ns = 0.5 + u(rng);
  for (std::size_t j = 0; j < k; ++j) {
    s.users.push_back({0.2 + 4.0 * u(rng), 0.2 + 4.0 * u(rng), std::nullopt,
                       std::nullopt});
  }
  const double rho0 = baseline_outage(s);
  s.outage_margin = rho0 + (0.5 - rho0) * (0.05 + 0.9 * u(rng));
  if (rho0 >= 0.45) s.outage_margin = rho0 + 0.5 * (1.0 - rho0);
  return s;
}

}  // namespace

TEST_CASE("pivot power limit and G for one user") {
  const auto s = make_scenario(1, 0.2);
  const auto [p_min, p_max] = power_limits(s, CsiMode::Statistical);
  CHECK(p_min == 0.0);
  const double expected = (std::exp(-0.1) / 0.8 - 1.0) / 0.1;
  CHECK(p_max == doctest::Approx(expected).epsilon(1e-13));
  CHECK(p_max == doctest::Approx(1.31046772544949).epsilon(1e-12));
  CHECK(fixed_point_g(0.3, s, CsiMode::Statistical) == doctest::Approx(expected).epsilon(1e-13));

  const std::vector<double> p = {p_max};
  CHECK(outage_probability(p, s) == doctest::Approx(0.2).epsilon(1e-13));

  const auto a = allocate(s);
  CHECK(a.status == SolverStatus::Converged);
  CHECK(a.powers[0] == doctest::Approx(p_max).epsilon(1e-14));
  CHECK(symmetric_closed_form(s) == doctest::Approx(p_max).epsilon(1e-13));
}

TEST_CASE("symmetric two-user allocation matches the closed form") {
  const auto s = make_scenario(2, 0.1);
  const double expected = 10.0 * std::expm1(0.5 * (-0.1 - std::log(0.9)));
  CHECK(symmetric_closed_form(s) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(symmetric_closed_form(s) == doctest::Approx(0.0268385293114396).epsilon(1e-12));

  const auto a = allocate(s);
  REQUIRE(a.status == SolverStatus::Converged);
  CHECK(a.powers[0] == doctest::Approx(expected).epsilon(1e-8));
  CHECK(a.powers[1] == doctest::Approx(expected).epsilon(1e-8));
  CHECK(outage_probability(a.powers, s) == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("no room for the secondary") {
  auto s = make_scenario(3, 0.05);
  REQUIRE(baseline_outage(s) > 0.05);
  CHECK(power_limits(s, CsiMode::Statistical).second < 0.0);
  const auto a = allocate(s);
  CHECK(a.status == SolverStatus::SecondaryOff);
  CHECK(a.powers == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(a.constraint_residual == doctest::Approx(baseline_outage(s) - 0.05));

  s.users.resize(1);
  s.outage_margin = baseline_outage(s);
  CHECK(symmetric_closed_form(s) == 0.0);
  CHECK(allocate(s).status == SolverStatus::SecondaryOff);
}

TEST_CASE("solver reaches the constraint boundary on random scenarios") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = 1 + i % 5;
    const auto s = random_feasible(rng, k);
    const auto a = allocate(s);
    INFO("instance " << i << " K=" << k);
    REQUIRE(a.status == SolverStatus::Converged);
    CHECK(std::abs(a.constraint_residual) < 1e-9);
    CHECK(a.iterations <= 200);
    for (double p : a.powers) CHECK(p >= 0.0);
  }
}

TEST_CASE("active users satisfy the stationarity relation") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_feasible(rng, 3);
    const auto a = allocate(s);
    REQUIRE(a.status == SolverStatus::Converged);
    const auto d = derive_constants(s);
    // (1 + P_j beta_j) w_j / beta_j takes a common value c on every active
    // user; inactive users have w_j / beta_j >= c.
    std::vector<double> v(3);
    double c = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      v[j] = (1.0 + a.powers[j] * d.beta[j]) * d.alpha_stat[j] / d.beta[j];
      if (a.powers[j] > 0.0) c = v[j];
    }
    REQUIRE(c > 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      if (a.powers[j] > 0.0) {
        CHECK(v[j] == doctest::Approx(c).epsilon(1e-9));
      } else {
        CHECK(v[j] >= c * (1.0 - 1e-9));
      }
    }
  }
}

TEST_CASE("random initialization reaches the same fixed point") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_feasible(rng, 4);
    const auto a = allocate(s);
    SolverOptions opts;
    opts.seed = 1000 + i;
    const auto b = allocate(s, opts);
    REQUIRE(b.status == SolverStatus::Converged);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(b.powers[j] == doctest::Approx(a.powers[j]).epsilon(1e-8));
    }
  }
}

TEST_CASE("scaling every power and noise level scales the allocation") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_feasible(rng, 3);
    auto t = s;
    t.primary.power_p0 *= 7.5;
    t.primary.noise_np *= 7.5;
    t.noise_ns *= 7.5;
    const auto a = allocate(s);
    const auto b = allocate(t);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(b.powers[j] == doctest::Approx(7.5 * a.powers[j]).epsilon(1e-8));
    }
    CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-10));
  }
}

TEST_CASE("statistical and instantaneous modes agree when the ratios match") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    auto s = random_feasible(rng, 3);
    for (auto& u : s.users) u.inst_h_sq = 2.7 * u.var_h;
    const auto a = allocate(s, {}, CsiMode::Statistical);
    const auto b = allocate(s, {}, CsiMode::Instantaneous);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(b.powers[j] == doctest::Approx(a.powers[j]).epsilon(1e-9));
    }
  }
  auto s = make_scenario(2, 0.2);
  CHECK_THROWS_AS(allocate(s, {}, CsiMode::Instantaneous), std::invalid_argument);
  s.users[0].inst_h_sq = 1.0;
  s.users[1].inst_h_sq = 0.0;
  CHECK_THROWS_AS(objective_weights(s, CsiMode::Instantaneous), std::invalid_argument);
}

TEST_CASE("companion power") {
  auto s = make_scenario(2, 0.2);
  s.users[1].var_h = 0.5;
  // F_1(p) = ((w0 b1)/(b0 w1) (1 + p b0) - 1) / b1 with w0/w1 = 2.
  CHECK(companion_power(1, 1.0, s, CsiMode::Statistical) ==
        doctest::Approx((2.0 * 1.1 - 1.0) / 0.1).epsilon(1e-13));
  s.users[1].var_h = 4.0;
  CHECK(companion_power(1, 0.0, s, CsiMode::Statistical) == 0.0);
  CHECK_THROWS_AS(companion_power(0, 1.0, s, CsiMode::Statistical), std::out_of_range);
  CHECK_THROWS_AS(companion_power(2, 1.0, s, CsiMode::Statistical), std::out_of_range);
}

TEST_CASE("capped solver") {
  auto s = make_scenario(3, 0.3);
  for (auto& u : s.users) u.power_cap = 1e12;
  s.users[1].var_g = 0.7;
  const auto free = allocate(s);
  const auto capped = allocate_capped(s);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(capped.powers[j] == doctest::Approx(free.powers[j]).epsilon(1e-9));
  }

  for (auto& u : s.users) u.power_cap = 0.0;
  const auto zero = allocate_capped(s);
  CHECK(zero.powers == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(zero.constraint_residual == doctest::Approx(baseline_outage(s) - 0.3));

  auto one = make_scenario(1, 0.2);
  one.users[0].power_cap = 0.5;
  const auto c = allocate_capped(one);
  CHECK(c.powers[0] == 0.5);
  CHECK(c.constraint_residual < 0.0);

  one.users[0].power_cap.reset();
  CHECK_THROWS_AS(allocate_capped(one), std::invalid_argument);

  auto partial = make_scenario(3, 0.3);
  for (auto& u : partial.users) u.power_cap = 0.05;
  const auto d = allocate_capped(partial);
  for (double p : d.powers) CHECK(p <= 0.05);
  CHECK(d.constraint_residual <= 1e-10);
}

TEST_CASE("solver options are validated") {
  const auto s = make_scenario(2, 0.2);
  SolverOptions opts;
  opts.tolerance = 0.0;
  CHECK_THROWS_AS(allocate(s, opts), std::invalid_argument);
  opts = {};
  opts.max_iterations = 0;
  CHECK_THROWS_AS(allocate(s, opts), std::invalid_argument);
  opts = {};
  opts.damping = 1.5;
  CHECK_THROWS_AS(allocate(s, opts), std::invalid_argument);
}

TEST_CASE("power limits follow the coexistence condition exactly") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    Scenario s = make_scenario(1, 0.01 + 0.5 * u(rng));
    s.primary.power_p0 = std::pow(10.0, 4.0 * u(rng) - 1.0);
    s.primary.rate_rp = 0.5 + 2.0 * u(rng);
    s.users[0].var_g = 0.1 + u(rng);
    const double p_max = power_limits(s, CsiMode::Statistical).second;
    CHECK((p_max > 0.0) == (s.outage_margin > baseline_outage(s)));
  }
}

TEST_CASE("grid oracle") {
  auto one = make_scenario(1, 0.2);
  const auto g1 = grid_oracle(one, 200);
  const auto a1 = allocate(one);
  CHECK(g1.powers[0] == doctest::Approx(a1.powers[0]).epsilon(1e-12));

  // Symmetric users: the argmax set is symmetric under swapping users, and
  // every boundary point beats the interior.
  const auto two = make_scenario(2, 0.1);
  const auto g2 = grid_oracle(two, 200);
  const std::vector<double> swapped = {g2.powers[1], g2.powers[0]};
  CHECK(allocation_objective(swapped, two, CsiMode::Statistical) ==
        doctest::Approx(g2.objective).epsilon(1e-15));
  CHECK(constraint_f(swapped, two) <= 1e-12);
  const double p = symmetric_closed_form(two);
  const std::vector<double> diagonal = {p, p};
  CHECK(g2.objective >= allocation_objective(diagonal, two, CsiMode::Statistical));

  auto infeasible = make_scenario(2, 0.01);
  CHECK(grid_oracle(infeasible, 50).status == SolverStatus::SecondaryOff);
  CHECK_THROWS_AS(grid_oracle(make_scenario(4, 0.2), 10), std::invalid_argument);

  const auto axis = oracle_axis(2.0, 5);
  REQUIRE(axis.size() == 6);
  CHECK(axis.front() == 0.0);
  CHECK(axis.back() == 2.0);
  CHECK(axis[1] == doctest::Approx(2e-6));
}

TEST_CASE("grid argmax is the same under every OIC branch objective") {
  auto s = make_scenario(2, 0.2);
  s.users[1].var_h = 1.7;
  s.users[1].var_g = 0.6;
  const auto w = objective_weights(s, CsiMode::Statistical);
  const auto base = grid_oracle(s, 60);
  // gamma_p chosen so every branch is strictly increasing in psi.
  const double gamma_p = 4.0;
  for (auto regime : {OicRegime::Weak, OicRegime::Medium, OicRegime::Strong}) {
    const auto g = grid_oracle(s, 60, CsiMode::Statistical,
                               [&](std::span<const double> p) {
                                 double psi = 0.0;
                                 for (std::size_t k = 0; k < p.size(); ++k)
                                   psi += p[k] * w[k];
                                 return branch_rate(regime, gamma_p, psi,
                                                    s.primary.rate_rp);
                               });
    CHECK(g.powers == base.powers);
  }
}
