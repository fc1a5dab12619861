#include "vlens/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vlens/errors.hpp"
#include "vlens/lattice.hpp"
#include "vlens/perturbation.hpp"
#include "vlens/scenario.hpp"
#include "vlens/trajectory_csv.hpp"

namespace vlens {

namespace {

const char* yes_no(bool b) { return b ? "true" : "false"; }

std::string rational(const Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

double sample_dt(const Scenario& s, const GlobalOptions& opts) {
  const double ns = opts.sample_dt_ns.value_or(s.sample_dt_ns);
  if (!(ns > 0)) throw SchemaError("--sample-dt-ns", "must be positive");
  return units::time_to_natural(ns * 1e-9);
}

void warn_kappa(const Beamline& line, std::ostream& err) {
  for (std::size_t i = 0; i < line.elements.size(); ++i) {
    if (const auto* lens = std::get_if<LensConfig>(&line.elements[i]); lens && lens->kappa_warning()) {
      err << "warning: element " << i << " has |kappa| > " << kappa_soft_limit << '\n';
    }
  }
}

void report_events(const Trajectory& t, std::ostream& err) {
  for (const auto& e : t.events) {
    if (e.kind == EventKind::overfocus) {
      err << "overfocus: element " << e.element_index << " at t_ns " << format_number(time_to_ns(e.t)) << '\n';
    } else if (e.kind == EventKind::relativistic_warning) {
      err << "warning: p_z/m exceeds " << relativistic_velocity << " at t_ns "
          << format_number(time_to_ns(e.t)) << '\n';
    }
  }
  if (t.perturbation_limit_time) {
    err << "warning: first-order correction exceeds " << validity_fraction << " of <rho^2> at t_ns "
        << format_number(time_to_ns(*t.perturbation_limit_time)) << '\n';
  }
}

double default_duration(const LensConfig& lens, double mass) {
  return 3.0 * 2.0 * std::numbers::pi / lens.omega0(mass);
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return exit_code::schema;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::schema;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return exit_code::schema;
  }
}

}  // namespace

int cmd_propagate(const std::string& path, const std::optional<std::string>& output,
                  const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    const Beamline line = to_beamline(s);
    warn_kappa(line, err);
    const Trajectory t = run(line, sample_dt(s, opts), {opts.strict});
    const std::optional<std::string> target = output ? output : s.trajectory_csv;
    if (target) {
      std::ofstream f(*target);
      if (!f) throw SchemaError(*target, "cannot write trajectory file");
      write_trajectory_csv(f, t);
    } else {
      write_trajectory_csv(out, t);
    }
    report_events(t, err);
    if (t.aborted) return exit_code::relativistic_abort;
    if (t.truncated) return exit_code::overfocus;
    return exit_code::ok;
  });
}

int cmd_check(const std::string& path, const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    const Beamline line = to_beamline(s);
    warn_kappa(line, err);
    const Trajectory t = run(line, sample_dt(s, opts), {opts.strict});
    const double mass = line.particle.mass;
    bool pass = true;
    for (std::size_t i = 0; i < line.elements.size(); ++i) {
      if (const auto* lens = std::get_if<LensConfig>(&line.elements[i])) {
        const std::string key = "lens[" + std::to_string(i) + "].";
        if (i >= t.element_entry.size()) {
          out << key << "reached: false\n";
          pass = false;
          continue;
        }
        const MomentState& entry = t.element_entry[i];
        const TransportReport r = transport_check(entry, *lens, mass, t.element_radial_n[i]);
        out << key << "entry_t_ns: " << format_number(time_to_ns(entry.t)) << '\n'
            << key << "H0_gauss: " << format_number(units::magnetic_from_natural(lens->field)) << '\n'
            << key << "radial_n: " << t.element_radial_n[i] << '\n'
            << key << "n_prime: " << lens->n_prime << '\n'
            << key << "matching_ratio_required: " << rational(r.matching_ratio_required) << '\n'
            << key << "matching_ratio_actual: " << format_number(r.matching_ratio_actual) << '\n'
            << key << "matched: " << yes_no(r.matched) << '\n'
            << key << "rho_sq_st_um2: " << format_number(rho_sq_to_um2(r.rho_sq_st)) << '\n'
            << key << "rho_sq_min_um2: " << format_number(rho_sq_to_um2(r.rho_sq_min)) << '\n'
            << key << "transportable: " << yes_no(r.transportable) << '\n'
            << key << "transportable_solved_form: " << yes_no(r.transportable_solved) << '\n';
        pass = pass && r.matched && r.transportable;
      }
    }
    for (const auto& tr : t.transitions) {
      const std::string key = "transition[" + std::to_string(tr.element_index) + "].";
      out << key << "n: " << tr.n_before << " -> " << tr.n_after << '\n';
      if (tr.has_next_lens) {
        out << key << "matching_ratio_required: " << rational(tr.required) << '\n'
            << key << "matching_ratio_actual: " << format_number(tr.actual) << '\n'
            << key << "matched: " << yes_no(tr.matched) << '\n';
        pass = pass && tr.matched;
      }
    }
    out << "summary.truncated: " << yes_no(t.truncated) << '\n' << "summary.pass: " << yes_no(pass) << '\n';
    return pass ? exit_code::ok : exit_code::check_failed;
  });
}

int cmd_design(const std::string& path, DesignMode mode, const std::optional<std::string>& append_path,
               std::optional<double> duration_ns, const GlobalOptions& opts, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&]() -> int {
    Scenario s = load_scenario(path);
    const Beamline line = to_beamline(s);
    const double mass = line.particle.mass;
    try {
      if (mode == DesignMode::matching_field) {
        int n_prime = 0;
        for (const auto& e : s.beamline) {
          if (const auto* l = std::get_if<ScenarioLens>(&e)) {
            n_prime = l->n_prime;
            break;
          }
        }
        LensConfig lens;
        lens.field = solve_matching(line.packet, n_prime);
        lens.n_prime = n_prime;
        lens.duration = duration_ns ? units::time_to_natural(*duration_ns * 1e-9) : default_duration(lens, mass);
        out << "design.mode: matching-field\n"
            << "design.matching_ratio: " << rational(matching_ratio(s.n, s.l, n_prime)) << '\n'
            << "design.H0_gauss: " << format_number(units::magnetic_from_natural(lens.field)) << '\n';
        if (append_path) s.beamline.push_back(from_lens(lens));
      } else {
        const Trajectory t = run(line, sample_dt(s, opts), {opts.strict});
        const Event* focal = nullptr;
        for (const auto& e : t.events) {
          if (e.kind == EventKind::focal_point) focal = &e;
        }
        if (!focal) throw NoFocusError("no focal point in any drift of the beamline");
        const int idx = focal->element_index;
        const MomentState& entry = t.element_entry[idx];
        const MomentState at_focus = propagate_drift(entry, focal->t - entry.t, mass);
        LensConfig lens = design_direct_capture(at_focus, 0, 1.0, mass);
        lens.duration = duration_ns ? units::time_to_natural(*duration_ns * 1e-9) : default_duration(lens, mass);

        // Rebuild the line up to the focus and close it with the capture lens.
        Scenario designed = s;
        designed.beamline.resize(idx + 1);
        const double shortened = units::ns(units::time_from_natural(focal->t - entry.t));
        bool capture_at_entry = !(shortened > 0);
        if (capture_at_entry) {
          designed.beamline.pop_back();
        } else {
          std::get<ScenarioDrift>(designed.beamline.back()).duration_ns = shortened;
        }
        designed.beamline.push_back(from_lens(lens));
        Beamline check_line = to_beamline(designed);
        // use the exact designed lens rather than its lab-unit round trip
        check_line.elements.back() = lens;
        if (designed.beamline.size() > 1 && !capture_at_entry) {
          std::get<Drift>(check_line.elements[idx]).duration = focal->t - entry.t;
        }
        const Trajectory closure = run(check_line, sample_dt(s, opts), {});
        double worst = 0;
        const int lens_index = int(check_line.elements.size()) - 1;
        for (const auto& smp : closure.samples) {
          if (smp.element_index == lens_index) {
            worst = std::max(worst, std::abs(smp.state.rho_sq / at_focus.rho_sq - 1.0));
          }
        }
        out << "design.mode: capture\n"
            << "design.focal_time_ns: " << format_number(time_to_ns(focal->t)) << '\n'
            << "design.focal_rho_sq_um2: " << format_number(rho_sq_to_um2(at_focus.rho_sq)) << '\n'
            << "design.H0_gauss: " << format_number(units::magnetic_from_natural(lens.field)) << '\n'
            << "design.closure_max_rel_deviation: " << format_number(worst) << '\n'
            << "design.closure_pass: " << yes_no(worst <= 1e-12 && !closure.truncated) << '\n';
        if (append_path) s = designed;
      }
    } catch (const NoFocusError& e) {
      err << "no focus: " << e.what() << '\n';
      return exit_code::design_failed;
    } catch (const NoCaptureFieldError& e) {
      err << "no capture field: " << e.what() << '\n';
      return exit_code::design_failed;
    }
    if (append_path) {
      std::ofstream f(*append_path);
      if (!f) throw SchemaError(*append_path, "cannot write scenario file");
      f << serialize_scenario(s);
      out << "design.appended_to: " << *append_path << '\n';
    }
    return exit_code::ok;
  });
}

int cmd_sweep(const std::string& path, const std::string& parameter, const std::string& range, int steps,
              const GlobalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (parameter != "H0_gauss" && parameter != "sigma_r_um" && parameter != "t1_ns" &&
        parameter != "n_prime") {
      throw SchemaError("--param", "unknown sweep parameter '" + parameter + "'");
    }
    const auto colon = range.find(':');
    double a = 0, b = 0;
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      a = std::stod(range.substr(0, colon));
      b = std::stod(range.substr(colon + 1));
    } catch (const std::exception&) {
      throw SchemaError("--range", "expected a:b");
    }
    if (steps < 1) throw SchemaError("--steps", "must be at least 1");
    const Scenario base = load_scenario(path);
    std::size_t lens_index = base.beamline.size();
    for (std::size_t i = 0; i < base.beamline.size(); ++i) {
      if (std::holds_alternative<ScenarioLens>(base.beamline[i])) {
        lens_index = i;
        break;
      }
    }
    if (lens_index == base.beamline.size()) throw SchemaError("/beamline", "sweep needs a lens");
    std::size_t drift_index = lens_index;
    for (std::size_t i = lens_index; i-- > 0;) {
      if (std::holds_alternative<ScenarioDrift>(base.beamline[i])) {
        drift_index = i;
        break;
      }
    }
    if (parameter == "t1_ns" && drift_index == lens_index) {
      throw SchemaError("/beamline", "t1_ns sweep needs a drift before the first lens");
    }

    const int rows = (a == b) ? 1 : steps;
    out << parameter << ",transportable,rho_sq_min_um2\n";
    for (int i = 0; i < rows; ++i) {
      const double v = rows == 1 ? a : a + (b - a) * double(i) / double(rows - 1);
      Scenario s = base;
      auto& lens = std::get<ScenarioLens>(s.beamline[lens_index]);
      if (parameter == "H0_gauss") lens.H0_gauss = v;
      if (parameter == "sigma_r_um") s.sigma_r_um = v;
      if (parameter == "t1_ns") std::get<ScenarioDrift>(s.beamline[drift_index]).duration_ns = v;
      if (parameter == "n_prime") lens.n_prime = int(std::lround(v));
      const Beamline line = to_beamline(s);
      line.validate();
      MomentState entry = free_state(line.packet, line.p0, line.start_time, line.particle.mass);
      int radial_n = line.packet.n;
      if (lens_index > 0) {
        Beamline prefix = line;
        prefix.elements.resize(lens_index);
        const Trajectory t = run(prefix, sample_dt(s, opts), {});
        entry = t.final_state;
        for (const auto& e : prefix.elements) {
          if (const auto* tr = std::get_if<Transition>(&e)) radial_n = tr->n;
        }
      }
      const TransportReport r =
          transport_check(entry, std::get<LensConfig>(line.elements[lens_index]), line.particle.mass, radial_n);
      out << format_number(v) << ',' << yes_no(r.transportable) << ',' << format_number(rho_sq_to_um2(r.rho_sq_min))
          << '\n';
    }
    return exit_code::ok;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moment dynamics of vortex wave packets in drift/lens beamlines", "vlens"};
  app.require_subcommand(1);
  GlobalOptions opts;
  double dt_ns = 0;
  app.add_flag("--strict", opts.strict, "abort at the relativistic bound (exit 4)");
  auto* dt_opt = app.add_option("--sample-dt-ns", dt_ns, "override output.sample_dt_ns");
  app.fallthrough();

  std::string scenario, output, append, param, range, mode;
  std::optional<double> duration;
  int steps = 11;

  auto* prop = app.add_subcommand("propagate", "run a beamline and write the trajectory table");
  prop->add_option("scenario", scenario)->required();
  auto* out_opt = prop->add_option("-o,--output", output, "trajectory CSV path");

  auto* check = app.add_subcommand("check", "matching and transport report for every lens");
  check->add_option("scenario", scenario)->required();

  auto* design = app.add_subcommand("design", "solve for a matching or direct-capture field");
  design->add_option("scenario", scenario)->required();
  design->add_option("--mode", mode, "matching-field | capture")->required();
  auto* append_opt = design->add_option("--append", append, "write the scenario with the designed lens");
  design->add_option("--duration-ns", duration, "designed lens duration (default three periods)");

  auto* sweep = app.add_subcommand("sweep", "transport predicate over a parameter grid");
  sweep->add_option("scenario", scenario)->required();
  sweep->add_option("--param", param, "H0_gauss | sigma_r_um | t1_ns | n_prime")->required();
  sweep->add_option("--range", range, "a:b")->required();
  sweep->add_option("--steps", steps, "grid points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return exit_code::schema;
  }
  if (dt_opt->count()) opts.sample_dt_ns = dt_ns;

  if (*prop) {
    return cmd_propagate(scenario, out_opt->count() ? std::optional(output) : std::nullopt, opts, out, err);
  }
  if (*check) return cmd_check(scenario, opts, out, err);
  if (*design) {
    DesignMode m;
    if (mode == "matching-field") {
      m = DesignMode::matching_field;
    } else if (mode == "capture") {
      m = DesignMode::capture;
    } else {
      err << "unknown design mode '" << mode << "'\n";
      return exit_code::schema;
    }
    return cmd_design(scenario, m, append_opt->count() ? std::optional(append) : std::nullopt, duration, opts,
                      out, err);
  }
  return cmd_sweep(scenario, param, range, steps, opts, out, err);
}

}  // namespace vlens
