#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cogmac/experiments.hpp"
#include "cogmac/outage.hpp"

using namespace cogmac;

namespace {

Scenario make_scenario(std::size_t k) {
  Scenario s;
  s.primary = {100.0, 1.0, 1.0, 1.0, 1.0};
  s.noise_ns = 1.0;
  s.outage_margin = 0.1;
  s.users.assign(k, SecondaryUser{1.0, 1.0, std::nullopt, std::nullopt});
  return s;
}

ExperimentSpec make_spec(ExperimentKind kind, const std::string& sweep,
                         std::size_t k = 2) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.scenario = make_scenario(k);
  spec.sweep = parse_sweep(sweep);
  spec.samples = 5000;
  spec.seed = 3;
  return spec;
}

}  // namespace

TEST_CASE("sweep parsing uses exact decimal steps") {
  const auto a = parse_sweep("snr_p=0:1:0.1db");
  REQUIRE(a.values.size() == 11);
  CHECK(a.param == "snr_p");
  CHECK(a.db);
  CHECK(a.values[3] == 0.3);
  CHECK(a.values[7] == 0.7);
  CHECK(a.values.back() == 1.0);

  const auto b = parse_sweep("ratio=0.5:2:0.5lin");
  CHECK_FALSE(b.db);
  CHECK(b.values == std::vector<double>{0.5, 1.0, 1.5, 2.0});

  const auto c = parse_sweep("snr=-10:10:5db");
  CHECK(c.values == std::vector<double>{-10, -5, 0, 5, 10});

  // Stop not on the grid: truncates.
  CHECK(parse_sweep("snr=0:9:4db").values == std::vector<double>{0, 4, 8});

  CHECK_THROWS_AS(parse_sweep("snr0:10:1db"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("snr=0:10:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("snr=0:10db"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("snr=0:10:0db"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("snr=10:0:1db"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("snr=0:0.5:1db"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("snr=0:x:1db"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep("snr=-1:1:1lin"), std::invalid_argument);
}

TEST_CASE("ExperimentSpec validation") {
  auto spec = make_spec(ExperimentKind::OutageSweep, "snr=0:10:5db");
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.sweep = parse_sweep("ratio=0:10:5db");
  CHECK_NOTHROW(validate(spec));
  spec.samples = 0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  CHECK_THROWS_AS(run_experiment(spec), std::invalid_argument);
}

TEST_CASE("fingerprint changes with every input") {
  const auto base = make_spec(ExperimentKind::OutageSweep, "ratio=0:10:5db");
  const auto h = fingerprint(base);
  CHECK(fingerprint(base) == h);
  auto a = base;
  a.seed = 4;
  CHECK(fingerprint(a) != h);
  auto b = base;
  b.samples = 5001;
  CHECK(fingerprint(b) != h);
  auto c = base;
  c.scenario.outage_margin = 0.11;
  CHECK(fingerprint(c) != h);
  auto d = base;
  d.sweep = parse_sweep("ratio=0:10:2db");
  CHECK(fingerprint(d) != h);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(-1.5e-20) == "-1.5e-20");
  for (double v : {1.0 / 3.0, 3.14159265358979, 1e300, 4.9e-324}) {
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("outage sweep") {
  const auto spec = make_spec(ExperimentKind::OutageSweep, "ratio=0:40:20db", 3);
  const auto d = run_experiment(spec);
  REQUIRE(d.rows.size() == 3);
  const double rho0 = baseline_outage(spec.scenario);
  // ratio 0 dB: total interference SNR equal to SNR_p, split over 3 users.
  const std::vector<double> p(3, 100.0 / 3.0);
  CHECK(d.number(0, "closed_form") == doctest::Approx(outage_probability(p, spec.scenario)));
  CHECK(d.number(2, "closed_form") == doctest::Approx(rho0).epsilon(1e-3));
  CHECK(d.number(1, "rho0") == rho0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(d.number(i, "closed_form") - d.number(i, "mc_estimate")) <=
          4.0 * d.number(i, "mc_stderr") + 1e-12);
  }
  const auto csv = d.to_csv();
  CHECK(csv.rfind("# cogmac outage fingerprint=", 0) == 0);
  CHECK(csv.find("\nsweep_value,closed_form,mc_estimate,mc_stderr,rho0\n") !=
        std::string::npos);
}

TEST_CASE("bounds sweep") {
  auto spec = make_spec(ExperimentKind::BoundsSweep, "snr=0:20:10db", 3);
  const auto d = run_experiment(spec);
  REQUIRE(d.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double mc = d.number(i, "mc_rate");
    const double se = d.number(i, "mc_stderr");
    CHECK(d.number(i, "lower_noniid") <= mc + 4 * se);
    CHECK(d.number(i, "lower_iid") <= mc + 4 * se);
    CHECK(d.number(i, "upper") >= mc - 4 * se);
    CHECK(d.number(i, "gap_iid") == doctest::Approx(mc - d.number(i, "lower_iid")));
  }

  spec.scenario.users[1].var_h = 2.0;
  const auto mixed = run_experiment(spec);
  CHECK(std::isnan(mixed.number(0, "lower_iid")));
  CHECK(mixed.to_csv().find(",,") != std::string::npos);

  spec.regime = BoundsRegime::Weak;
  spec.scenario = make_scenario(2);
  spec.scenario.primary.power_p0 = 1.0;
  const auto w = run_experiment(spec);
  CHECK(w.columns.size() == 10);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(w.number(i, "upper") >= w.number(i, "mc_rate") - 4 * w.number(i, "mc_stderr"));
    const double pr = w.number(i, "weak_probability");
    CHECK(pr > 0.0);
    CHECK(w.number(i, "mc_weak_conditional") * pr ==
          doctest::Approx(w.number(i, "mc_weak_restricted")).epsilon(1e-12));
  }
}

TEST_CASE("allocation sweep") {
  auto spec = make_spec(ExperimentKind::AllocationSweep, "snr_p=0:30:10db", 2);
  const auto d = run_experiment(spec);
  REQUIRE(d.rows.size() == 4);
  CHECK(d.columns == std::vector<std::string>{"snr_p_db", "p_1", "p_2",
                                              "objective_bits", "outage_check",
                                              "status"});
  // 0 dB: rho_0 = 1 - e^-1 > 0.1, secondary off.
  CHECK(d.text(0, "status") == "secondary_off");
  CHECK(d.number(0, "objective_bits") == 0.0);
  for (std::size_t i = 2; i < 4; ++i) {
    CHECK(d.text(i, "status") == "converged");
    CHECK(d.number(i, "outage_check") == doctest::Approx(0.1).epsilon(1e-9));
  }
  CHECK(d.number(3, "objective_bits") > d.number(2, "objective_bits"));
}

TEST_CASE("slope fit") {
  auto spec = make_spec(ExperimentKind::SlopeFit, "snr_p=40:60:5db", 1);
  const auto d = run_experiment(spec);
  REQUIRE(d.fitted_slope.has_value());
  CHECK(std::abs(*d.fitted_slope - std::log2(10.0) / 10.0) < 0.01);
  CHECK(d.to_csv().find(" fitted_slope=") != std::string::npos);

  spec.sweep = parse_sweep("snr_p=0:10:5db");
  CHECK_THROWS_AS(run_experiment(spec), std::runtime_error);

  CHECK(least_squares_slope({0, 1, 2}, {1, 3, 5}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(least_squares_slope({1}, {1}), std::invalid_argument);
}

TEST_CASE("identical specs give identical CSV") {
  for (auto [kind, sweep] :
       {std::pair{ExperimentKind::OutageSweep, "ratio=0:20:10db"},
        std::pair{ExperimentKind::BoundsSweep, "snr=0:20:10db"},
        std::pair{ExperimentKind::AllocationSweep, "snr_p=10:30:10db"}}) {
    const auto spec = make_spec(kind, sweep);
    CHECK(run_experiment(spec).to_csv() == run_experiment(spec).to_csv());
  }
}
