#pragma once

#include <ostream>
#include <string>

#include "vlens/lattice.hpp"

namespace vlens {

inline constexpr const char* trajectory_header =
    "t_ns,element_index,z_um,pz_eV,rho2_um2,rho_rms_um,drho2_dt_um2_per_ns,u2_over_c2,rho2_corr1_um2,"
    "flags";

/// %.12g, the fixed numeric format of every table the tool writes.
std::string format_number(double v);
std::string format_flags(unsigned flags);

// Natural-unit moments to table units.
double rho_sq_to_um2(double rho_sq);
double drho_sq_dt_to_um2_per_ns(double drho_sq_dt);
double time_to_ns(double t);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace vlens
