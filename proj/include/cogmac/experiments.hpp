#ifndef COGMAC_EXPERIMENTS_HPP
#define COGMAC_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cogmac/power_alloc.hpp"
#include "cogmac/scenario.hpp"

namespace cogmac {

// Sweep experiments behind the `cogmac` CLI. Each produces a Dataset that
// serializes to CSV: one '#' provenance line (kind, fingerprint, seed,
// samples, sweep), one header line, then one row per sweep point in sweep
// order.
//
//   outage    ratio = SNR_p / SNR_sp         primary outage vs interference
//   bounds    snr   = P_k / N_s per user     ergodic rate vs closed bounds
//   allocate  snr_p = P_0 var_gp / N_p       KKT allocation vs primary SNR
//   slope     snr_p                          high-SNR slope of the objective

enum class ExperimentKind { OutageSweep, BoundsSweep, AllocationSweep, SlopeFit };

std::string_view to_string(ExperimentKind k);

enum class BoundsRegime { Strong, Weak };

struct SweepAxis {
  std::string param;
  std::vector<double> values;  // in the unit given by `db`
  bool db = true;
  std::string text;            // as given on the command line
};

/// Parses "<param>=<start>:<stop>:<step><db|lin>". Points are generated in
/// exact decimal steps. Throws std::invalid_argument on malformed input or
/// fewer than two points.
SweepAxis parse_sweep(std::string_view text);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::OutageSweep;
  Scenario scenario;
  SweepAxis sweep;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  BoundsRegime regime = BoundsRegime::Strong;
  CsiMode mode = CsiMode::Statistical;
};

/// Throws std::invalid_argument if the sweep parameter does not belong to
/// the experiment kind or samples == 0.
void validate(const ExperimentSpec& spec);

/// FNV-1a over a canonical rendering of an ExperimentSpec, seed included.
std::uint64_t fingerprint(const ExperimentSpec& spec);

using Cell = std::variant<std::monostate, double, std::string>;

struct Dataset {
  ExperimentKind kind = ExperimentKind::OutageSweep;
  std::string provenance;  // without the leading '#'
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::optional<double> fitted_slope;

  std::size_t column(std::string_view name) const;
  /// Numeric cell; NaN for empty cells. Throws on text cells.
  double number(std::size_t row, std::string_view column_name) const;
  const std::string& text(std::size_t row, std::string_view column_name) const;

  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

/// Shortest round-trip decimal form.
std::string format_number(double v);

Dataset run_outage(const ExperimentSpec& spec);
Dataset run_bounds(const ExperimentSpec& spec);
Dataset run_allocation(const ExperimentSpec& spec);
/// Throws std::runtime_error if any sweep point leaves the secondary off or
/// fails to converge.
Dataset run_slope(const ExperimentSpec& spec);

Dataset run_experiment(const ExperimentSpec& spec);

/// Ordinary least-squares slope of y on x.
double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y);

}  // namespace cogmac

#endif  // COGMAC_EXPERIMENTS_HPP
