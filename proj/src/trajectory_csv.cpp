#include "vlens/trajectory_csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vlens/units.hpp"

namespace vlens {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_flags(unsigned flags) {
  std::string s;
  auto add = [&](unsigned bit, const char* name) {
    if (!(flags & bit)) return;
    if (!s.empty()) s += ';';
    s += name;
  };
  add(FOCAL, "FOCAL");
  add(OVERFOCUS, "OVERFOCUS");
  add(RELATIVISTIC, "RELATIVISTIC");
  return s;
}

double rho_sq_to_um2(double rho_sq) {
  const double um = units::um(units::length_from_natural(1.0));
  return rho_sq * um * um;
}

double drho_sq_dt_to_um2_per_ns(double drho_sq_dt) {
  return rho_sq_to_um2(drho_sq_dt) / units::ns(units::time_from_natural(1.0));
}

double time_to_ns(double t) { return units::ns(units::time_from_natural(t)); }

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << trajectory_header << '\n';
  for (const auto& s : trajectory.samples) {
    const auto& m = s.state;
    const double rho2 = rho_sq_to_um2(m.rho_sq);
    out << format_number(time_to_ns(m.t)) << ',' << s.element_index << ','
        << format_number(units::um(units::length_from_natural(m.z))) << ',' << format_number(m.p_z) << ','
        << format_number(rho2) << ',' << format_number(std::sqrt(std::max(rho2, 0.0))) << ','
        << format_number(drho_sq_dt_to_um2_per_ns(m.drho_sq_dt)) << ',' << format_number(m.u_perp_sq) << ','
        << format_number(rho_sq_to_um2(s.rho_sq_1)) << ',' << format_flags(s.flags) << '\n';
  }
}

}  // namespace vlens
