#include "cogmac/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cogmac {
namespace {

using nlohmann::json;

bool finite(double x) { return std::isfinite(x); }

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

std::optional<double> number_at(const json& obj, const char* key,
                                const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw ParseError(path + key + ": expected a number");
  }
  return it->get<double>();
}

double required_number(const json& obj, const char* key,
                       const std::string& path) {
  auto v = number_at(obj, key, path);
  if (!v) throw ValidationError(path + key, "missing required field");
  return *v;
}

}  // namespace

double gamma_threshold(double rate_rp) { return std::exp2(rate_rp) - 1.0; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

void validate(const Scenario& s) {
  const auto& p = s.primary;
  require(finite(p.power_p0) && p.power_p0 > 0, "primary.power_p0",
          "must be > 0");
  require(finite(p.rate_rp) && p.rate_rp > 0, "primary.rate_rp", "must be > 0");
  require(finite(p.noise_np) && p.noise_np > 0, "primary.noise_np",
          "must be > 0");
  require(finite(p.var_gp) && p.var_gp > 0, "primary.var_gp", "must be > 0");
  require(finite(p.var_hp) && p.var_hp >= 0, "primary.var_hp", "must be >= 0");
  require(finite(s.noise_ns) && s.noise_ns > 0, "noise_ns", "must be > 0");
  require(finite(s.outage_margin) && s.outage_margin > 0 &&
              s.outage_margin < 1,
          "outage_margin", "must lie in (0, 1)");
  require(!s.users.empty(), "users", "at least one secondary user required");
  for (std::size_t k = 0; k < s.users.size(); ++k) {
    const auto& u = s.users[k];
    const std::string at = "users[" + std::to_string(k) + "].";
    require(finite(u.var_h) && u.var_h > 0, at + "var_h", "must be > 0");
    require(finite(u.var_g) && u.var_g > 0, at + "var_g", "must be > 0");
    if (u.power_cap) {
      require(!std::isnan(*u.power_cap) && *u.power_cap >= 0,
              at + "power_cap", "must be >= 0");
    }
    if (u.inst_h_sq) {
      require(finite(*u.inst_h_sq) && *u.inst_h_sq >= 0, at + "inst_h_sq",
              "must be >= 0");
    }
  }
}

DerivedConstants derive_constants(const Scenario& s) {
  const auto& p = s.primary;
  DerivedConstants d;
  d.gamma_th = gamma_threshold(p.rate_rp);
  const double primary_gain = p.power_p0 * p.var_gp;
  d.zeta = std::exp(-d.gamma_th * p.noise_np / primary_gain);
  d.c_p = s.noise_ns * d.gamma_th / p.power_p0;
  const double objective_noise = s.noise_ns * std::exp(kEulerKappa);
  d.beta.reserve(s.users.size());
  d.alpha_stat.reserve(s.users.size());
  for (const auto& u : s.users) {
    d.beta.push_back(u.var_g * d.gamma_th / primary_gain);
    d.alpha_stat.push_back(u.var_h / objective_noise);
  }
  return d;
}

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario root must be an object");

  Scenario s;
  auto prim = doc.find("primary");
  if (prim == doc.end()) throw ValidationError("primary", "missing section");
  if (!prim->is_object()) throw ParseError("primary: expected an object");

  const std::string pp = "primary.";
  auto power = number_at(*prim, "power_p0", pp);
  auto snr_db = number_at(*prim, "snr_p_db", pp);
  if (power.has_value() == snr_db.has_value()) {
    throw ValidationError("primary.power_p0",
                          "exactly one of power_p0 / snr_p_db is required");
  }
  s.primary.rate_rp = required_number(*prim, "rate_rp", pp);
  s.primary.var_hp = required_number(*prim, "var_hp", pp);
  if (snr_db) {
    s.primary.noise_np = number_at(*prim, "noise_np", pp).value_or(1.0);
    s.primary.var_gp = number_at(*prim, "var_gp", pp).value_or(1.0);
    require(finite(*snr_db), "primary.snr_p_db", "must be finite");
    s.primary.power_p0 =
        db_to_linear(*snr_db) * s.primary.noise_np / s.primary.var_gp;
  } else {
    s.primary.noise_np = required_number(*prim, "noise_np", pp);
    s.primary.var_gp = required_number(*prim, "var_gp", pp);
    s.primary.power_p0 = *power;
  }

  s.noise_ns = required_number(doc, "noise_ns", "");
  s.outage_margin = required_number(doc, "outage_margin", "");

  auto users = doc.find("users");
  if (users == doc.end()) throw ValidationError("users", "missing section");
  if (!users->is_array()) throw ParseError("users: expected an array");
  for (std::size_t k = 0; k < users->size(); ++k) {
    const auto& entry = (*users)[k];
    const std::string at = "users[" + std::to_string(k) + "].";
    if (!entry.is_object()) throw ParseError(at + ": expected an object");
    SecondaryUser u;
    u.var_h = required_number(entry, "var_h", at);
    u.var_g = required_number(entry, "var_g", at);
    u.power_cap = number_at(entry, "power_cap", at);
    u.inst_h_sq = number_at(entry, "inst_h_sq", at);
    s.users.push_back(u);
  }

  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) {
  json doc;
  doc["primary"] = {{"power_p0", s.primary.power_p0},
                    {"rate_rp", s.primary.rate_rp},
                    {"noise_np", s.primary.noise_np},
                    {"var_gp", s.primary.var_gp},
                    {"var_hp", s.primary.var_hp}};
  doc["noise_ns"] = s.noise_ns;
  doc["outage_margin"] = s.outage_margin;
  json users = json::array();
  for (const auto& u : s.users) {
    json e = {{"var_h", u.var_h}, {"var_g", u.var_g}};
    if (u.power_cap) e["power_cap"] = *u.power_cap;
    if (u.inst_h_sq) e["inst_h_sq"] = *u.inst_h_sq;
    users.push_back(std::move(e));
  }
  doc["users"] = std::move(users);
  return doc.dump(2);
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump_scenario(s) << '\n';
}

Scenario with_snr_p(Scenario s, double snr_lin) {
  s.primary.power_p0 = snr_lin * s.primary.noise_np / s.primary.var_gp;
  return s;
}

}  // namespace cogmac
