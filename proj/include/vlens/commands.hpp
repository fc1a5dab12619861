#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace vlens {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int schema = 1;
inline constexpr int overfocus = 2;
inline constexpr int check_failed = 3;
inline constexpr int relativistic_abort = 4;
inline constexpr int design_failed = 5;
}  // namespace exit_code

struct GlobalOptions {
  bool strict = false;
  std::optional<double> sample_dt_ns;
};

/// Writes the trajectory table to `output`, else to the scenario's
/// output.trajectory_csv, else to `out`.
int cmd_propagate(const std::string& scenario_path, const std::optional<std::string>& output,
                  const GlobalOptions& opts, std::ostream& out, std::ostream& err);

int cmd_check(const std::string& scenario_path, const GlobalOptions& opts, std::ostream& out,
              std::ostream& err);

enum class DesignMode { matching_field, capture };

int cmd_design(const std::string& scenario_path, DesignMode mode,
               const std::optional<std::string>& append_path, std::optional<double> duration_ns,
               const GlobalOptions& opts, std::ostream& out, std::ostream& err);

int cmd_sweep(const std::string& scenario_path, const std::string& parameter, const std::string& range,
              int steps, const GlobalOptions& opts, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vlens
