#pragma once

// Scenario files: JSON, schema_version 1, lab units spelled out in every key.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vlens/lattice.hpp"

namespace vlens {

/// Schema violation. `where` is a line:column for syntax errors or a JSON
/// pointer such as /beamline/1/H0_gauss for field errors.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ScenarioDrift {
  double duration_ns = 0;
  bool operator==(const ScenarioDrift&) const = default;
};

struct ScenarioLens {
  double H0_gauss = 0;
  double E0_V_per_m = 0;
  double kappa_M = 0;
  double kappa_E = 0;
  double L_m = 1;
  double duration_ns = 0;
  int n_prime = 0;
  bool operator==(const ScenarioLens&) const = default;
};

struct ScenarioTransition {
  int n = 0;
  bool operator==(const ScenarioTransition&) const = default;
};

using ScenarioElement = std::variant<ScenarioDrift, ScenarioLens, ScenarioTransition>;

struct Scenario {
  int schema_version = 1;
  double mass_eV = codata::electron_mass_eV;
  int charge_sign = -1;
  int n = 0;
  int l = 0;
  double sigma_r_um = 0;
  double focus_time_ns = 0;
  double p0_eV = 0;
  double start_time_ns = 0;
  std::vector<ScenarioElement> beamline;
  double sample_dt_ns = 0.01;
  std::optional<std::string> trajectory_csv;
  bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
/// Canonical form: every key present, fixed key order, 2-space indent.
std::string serialize_scenario(const Scenario& scenario);

Beamline to_beamline(const Scenario& scenario);
LensConfig to_lens(const ScenarioLens& lens);
ScenarioLens from_lens(const LensConfig& lens);

}  // namespace vlens
