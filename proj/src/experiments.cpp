#include "cogmac/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cogmac/ergodic_bounds.hpp"
#include "cogmac/montecarlo.hpp"
#include "cogmac/oic_rates.hpp"
#include "cogmac/outage.hpp"

namespace cogmac {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Decimal {
  long long scaled = 0;  // value * 10^decimals
  int decimals = 0;
};

Decimal parse_decimal(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty number in sweep");
  Decimal d;
  bool negative = false;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    i = 1;
  }
  bool seen_point = false;
  bool seen_digit = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
      d.scaled = d.scaled * 10 + (c - '0');
      if (seen_point) ++d.decimals;
    } else {
      throw std::invalid_argument("bad number '" + std::string(s) +
                                  "' in sweep");
    }
  }
  if (!seen_digit) {
    throw std::invalid_argument("bad number '" + std::string(s) +
                                "' in sweep");
  }
  if (negative) d.scaled = -d.scaled;
  return d;
}

long long rescale(const Decimal& d, int decimals) {
  long long v = d.scaled;
  for (int i = d.decimals; i < decimals; ++i) v *= 10;
  return v;
}

std::string_view expected_param(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::OutageSweep: return "ratio";
    case ExperimentKind::BoundsSweep: return "snr";
    case ExperimentKind::AllocationSweep:
    case ExperimentKind::SlopeFit: return "snr_p";
  }
  return "";
}

double to_linear(const SweepAxis& axis, double v) {
  return axis.db ? db_to_linear(v) : v;
}

double to_db(const SweepAxis& axis, double v) {
  return axis.db ? v : linear_to_db(v);
}

Dataset make_dataset(const ExperimentSpec& spec,
                     std::vector<std::string> columns) {
  validate(spec);
  Dataset d;
  d.kind = spec.kind;
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(fingerprint(spec)));
  d.provenance = "cogmac " + std::string(to_string(spec.kind)) +
                 " fingerprint=" + fp + " seed=" + std::to_string(spec.seed) +
                 " samples=" + std::to_string(spec.samples) +
                 " sweep=" + spec.sweep.text;
  d.columns = std::move(columns);
  return d;
}

Cell optional_number(double v) {
  if (std::isnan(v)) return std::monostate{};
  return v;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::OutageSweep: return "outage";
    case ExperimentKind::BoundsSweep: return "bounds";
    case ExperimentKind::AllocationSweep: return "allocate";
    case ExperimentKind::SlopeFit: return "slope";
  }
  return "?";
}

SweepAxis parse_sweep(std::string_view text) {
  SweepAxis axis;
  axis.text = std::string(text);
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("sweep must look like param=start:stop:step"
                                "<db|lin>, got '" + axis.text + "'");
  }
  axis.param = std::string(text.substr(0, eq));
  std::string_view range = text.substr(eq + 1);
  if (range.ends_with("db")) {
    axis.db = true;
    range.remove_suffix(2);
  } else if (range.ends_with("lin")) {
    axis.db = false;
    range.remove_suffix(3);
  } else {
    throw std::invalid_argument("sweep step needs a 'db' or 'lin' suffix");
  }
  const auto c1 = range.find(':');
  const auto c2 = range.find(':', c1 == std::string_view::npos ? c1 : c1 + 1);
  if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
    throw std::invalid_argument("sweep range must be start:stop:step");
  }
  const Decimal start = parse_decimal(range.substr(0, c1));
  const Decimal stop = parse_decimal(range.substr(c1 + 1, c2 - c1 - 1));
  const Decimal step = parse_decimal(range.substr(c2 + 1));
  const int decimals = std::max({start.decimals, stop.decimals, step.decimals});
  const long long a = rescale(start, decimals);
  const long long b = rescale(stop, decimals);
  const long long h = rescale(step, decimals);
  if (h <= 0) throw std::invalid_argument("sweep step must be positive");
  if (b < a) throw std::invalid_argument("sweep stop must be >= start");
  const long long count = (b - a) / h + 1;
  if (count < 2) throw std::invalid_argument("sweep needs at least 2 points");
  const double scale = std::pow(10.0, decimals);
  for (long long i = 0; i < count; ++i) {
    axis.values.push_back(static_cast<double>(a + i * h) / scale);
  }
  if (!axis.db) {
    for (double v : axis.values) {
      if (!(v > 0.0)) {
        throw std::invalid_argument("linear sweep values must be > 0");
      }
    }
  }
  return axis;
}

void validate(const ExperimentSpec& spec) {
  if (spec.samples == 0) throw std::invalid_argument("samples must be >= 1");
  if (spec.sweep.values.size() < 2) {
    throw std::invalid_argument("sweep needs at least 2 points");
  }
  const auto want = expected_param(spec.kind);
  if (spec.sweep.param != want) {
    throw std::invalid_argument("sweep parameter '" + spec.sweep.param +
                                "' does not exist for " +
                                std::string(to_string(spec.kind)) +
                                " (expected '" + std::string(want) + "')");
  }
  cogmac::validate(spec.scenario);
}

std::uint64_t fingerprint(const ExperimentSpec& spec) {
  std::ostringstream canon;
  canon << to_string(spec.kind) << '\n'
        << dump_scenario(spec.scenario) << '\n'
        << spec.sweep.text << '\n'
        << spec.samples << '\n'
        << spec.seed << '\n'
        << (spec.regime == BoundsRegime::Strong ? "strong" : "weak") << '\n'
        << to_string(spec.mode) << '\n';
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t Dataset::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    throw std::out_of_range("no column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - columns.begin());
}

double Dataset::number(std::size_t row, std::string_view column_name) const {
  const Cell& c = rows.at(row).at(column(column_name));
  if (std::holds_alternative<std::monostate>(c)) return kNaN;
  return std::get<double>(c);
}

const std::string& Dataset::text(std::size_t row,
                                 std::string_view column_name) const {
  return std::get<std::string>(rows.at(row).at(column(column_name)));
}

void Dataset::write_csv(std::ostream& out) const {
  out << '#' << ' ' << provenance;
  if (fitted_slope) out << " fitted_slope=" << format_number(*fitted_slope);
  out << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "," : "") << columns[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const auto* d = std::get_if<double>(&row[i])) {
        out << format_number(*d);
      } else if (const auto* s = std::get_if<std::string>(&row[i])) {
        out << *s;
      }
    }
    out << '\n';
  }
}

std::string Dataset::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

Dataset run_outage(const ExperimentSpec& spec) {
  Dataset d = make_dataset(spec, {"sweep_value", "closed_form", "mc_estimate",
                                  "mc_stderr", "rho0"});
  const Scenario& s = spec.scenario;
  const double k = static_cast<double>(s.users.size());
  const double rho0 = baseline_outage(s);
  for (double v : spec.sweep.values) {
    // Total secondary interference SNR_sp = SNR_p / ratio, split evenly.
    const double snr_sp = s.snr_p() / to_linear(spec.sweep, v);
    std::vector<double> powers;
    for (const auto& u : s.users) {
      powers.push_back(snr_sp * s.primary.noise_np / (k * u.var_g));
    }
    const auto mc = estimate_outage(powers, s, spec.samples, spec.seed);
    d.rows.push_back({v, outage_probability(powers, s), mc.mean, mc.std_error,
                      rho0});
  }
  return d;
}

Dataset run_bounds(const ExperimentSpec& spec) {
  const bool weak = spec.regime == BoundsRegime::Weak;
  std::vector<std::string> cols = {"snr_db",       "mc_rate", "mc_stderr",
                                   "upper",        "lower_noniid",
                                   "lower_iid",    "gap_iid"};
  if (weak) {
    cols.insert(cols.end(), {"mc_weak_restricted", "mc_weak_conditional",
                             "weak_probability"});
  }
  Dataset d = make_dataset(spec, std::move(cols));
  const Scenario& s = spec.scenario;
  const std::size_t k = s.users.size();

  for (double v : spec.sweep.values) {
    const double snr = to_linear(spec.sweep, v);
    const std::vector<double> powers(k, snr * s.noise_ns);
    const bool iid = is_iid(powers, s);

    EstimateWithCI mc;
    double upper = 0.0;
    double lower = 0.0;
    double lower_iid = kNaN;
    if (weak) {
      mc = estimate_mean(s, spec.samples, spec.seed, [&](const GainSample& g) {
        return capacity(secondary_snr(g, powers, s) /
                        (1.0 + primary_snr_at_secondary(g, s)));
      });
      upper = upper_bound_weak(powers, s);
      lower = approx_lower_weak(powers, s, false);
      if (iid) lower_iid = approx_lower_weak(powers, s, true);
    } else {
      mc = estimate_mean(s, spec.samples, spec.seed, [&](const GainSample& g) {
        return capacity(secondary_snr(g, powers, s));
      });
      upper = upper_bound_strong(powers, s);
      lower = lower_bound_strong(powers, s);
      if (iid) {
        lower_iid = lower_bound_strong_iid(powers[0], s.users[0].var_h, k,
                                           s.noise_ns);
      }
    }
    std::vector<Cell> row = {to_db(spec.sweep, v), mc.mean, mc.std_error,
                             upper, lower, optional_number(lower_iid),
                             optional_number(mc.mean - lower_iid)};
    if (weak) {
      double restricted = kNaN;
      double conditional = kNaN;
      double prob = 0.0;
      try {
        const auto r = estimate_ergodic_rate(powers, s, spec.samples,
                                             spec.seed, OicRegime::Weak,
                                             FilterConvention::Restricted);
        const auto c = estimate_ergodic_rate(powers, s, spec.samples,
                                             spec.seed, OicRegime::Weak,
                                             FilterConvention::Conditional);
        restricted = r.mean;
        conditional = c.mean;
        prob = r.conditioning->probability;
      } catch (const EmptyEventError&) {
      }
      row.insert(row.end(), {optional_number(restricted),
                             optional_number(conditional), prob});
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

Dataset run_allocation(const ExperimentSpec& spec) {
  const std::size_t k = spec.scenario.users.size();
  std::vector<std::string> cols = {"snr_p_db"};
  for (std::size_t i = 1; i <= k; ++i) cols.push_back("p_" + std::to_string(i));
  cols.insert(cols.end(), {"objective_bits", "outage_check", "status"});
  Dataset d = make_dataset(spec, std::move(cols));

  for (double v : spec.sweep.values) {
    const Scenario s = with_snr_p(spec.scenario, to_linear(spec.sweep, v));
    const auto a = allocate(s, SolverOptions{}, spec.mode);
    std::vector<Cell> row = {to_db(spec.sweep, v)};
    for (double p : a.powers) row.emplace_back(p);
    row.emplace_back(a.objective);
    row.emplace_back(outage_probability(a.powers, s));
    row.emplace_back(std::string(to_string(a.status)));
    d.rows.push_back(std::move(row));
  }
  return d;
}

Dataset run_slope(const ExperimentSpec& spec) {
  Dataset d = make_dataset(spec, {"snr_p_db", "objective_bits"});
  std::vector<double> x;
  std::vector<double> y;
  for (double v : spec.sweep.values) {
    const Scenario s = with_snr_p(spec.scenario, to_linear(spec.sweep, v));
    const auto a = allocate(s, SolverOptions{}, spec.mode);
    if (a.status != SolverStatus::Converged) {
      throw std::runtime_error(
          "slope fit: allocation at snr_p=" + format_number(v) + " is " +
          std::string(to_string(a.status)) +
          "; choose a range above the turn-on threshold");
    }
    x.push_back(to_db(spec.sweep, v));
    y.push_back(a.objective);
    d.rows.push_back({x.back(), y.back()});
  }
  d.fitted_slope = least_squares_slope(x, y);
  return d;
}

Dataset run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::OutageSweep: return run_outage(spec);
    case ExperimentKind::BoundsSweep: return run_bounds(spec);
    case ExperimentKind::AllocationSweep: return run_allocation(spec);
    case ExperimentKind::SlopeFit: return run_slope(spec);
  }
  throw std::logic_error("unknown experiment kind");
}

double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope fit needs >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace cogmac
