#ifndef COGMAC_SCENARIO_HPP
#define COGMAC_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cogmac {

/// Euler-Mascheroni constant, full double precision.
inline constexpr double kEulerKappa = 0.5772156649015329;

/// Malformed scenario document (bad JSON, wrong value types, unreadable file).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scenario field violates its invariant. field() names the offending key.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct PrimaryConfig {
  double power_p0 = 1.0;  // linear
  double rate_rp = 1.0;   // bits/s/Hz
  double noise_np = 1.0;  // primary BS noise variance
  double var_gp = 1.0;    // E|g_p|^2
  double var_hp = 0.0;    // E|h_p|^2, primary -> secondary BS

  bool operator==(const PrimaryConfig&) const = default;
};

struct SecondaryUser {
  double var_h = 1.0;  // E|h_k|^2, uplink to secondary BS
  double var_g = 1.0;  // E|g_k|^2, interference to primary BS
  std::optional<double> power_cap;
  std::optional<double> inst_h_sq;

  bool operator==(const SecondaryUser&) const = default;
};

/// Full network parameterization. Only power/noise ratios affect any result;
/// absolute units are whatever the caller chooses consistently.
struct Scenario {
  PrimaryConfig primary;
  std::vector<SecondaryUser> users;  // users[0] is the iteration pivot
  double noise_ns = 1.0;
  double outage_margin = 0.1;  // rho_m

  std::size_t num_users() const noexcept { return users.size(); }
  /// P_0 * var_gp / N_p (linear).
  double snr_p() const noexcept {
    return primary.power_p0 * primary.var_gp / primary.noise_np;
  }

  bool operator==(const Scenario&) const = default;
};

struct DerivedConstants {
  double gamma_th = 0.0;
  double zeta = 0.0;
  std::vector<double> beta;        // var_g * gamma_th / (P_0 * var_gp)
  std::vector<double> alpha_stat;  // var_h / (N_s * e^kappa)
  double c_p = 0.0;                // N_s * gamma_th / P_0
  double euler_kappa = kEulerKappa;

  bool operator==(const DerivedConstants&) const = default;
};

/// Throws ValidationError on the first violated invariant.
void validate(const Scenario& s);

DerivedConstants derive_constants(const Scenario& s);

/// 2^R_p - 1.
double gamma_threshold(double rate_rp);

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Serialized form always carries power_p0 (never snr_p_db) so that
/// load(save(s)) == s for finite doubles.
std::string dump_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

double db_to_linear(double db);
double linear_to_db(double lin);

/// Copy of s with P_0 rescaled so that snr_p() == snr_lin.
Scenario with_snr_p(Scenario s, double snr_lin);

}  // namespace cogmac

#endif  // COGMAC_SCENARIO_HPP
