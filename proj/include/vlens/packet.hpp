#pragma once

// Free Laguerre-Gaussian packet: quantum numbers, focal waist, optical functions.
// Everything here is in natural units (lengths and times in 1/eV).

namespace vlens {

struct LGPacket {
  int n = 0;               // radial quantum number
  int l = 0;               // orbital angular momentum
  double sigma_r = 0;      // sigma_r^2 = <rho^2> at the focus
  double focus_time = 0;   // t0

  /// Throws DomainError on n < 0 or sigma_r not positive and finite.
  void validate() const;
  int mode_index() const;  // 2n + |l| + 1
};

struct OpticalFunctions {
  double sigma_perp_sq;  // envelope width squared
  double gouy_phase;     // radians
  double curvature_sq;   // +inf at the focus (flat wavefront)
};

/// Envelope sigma_perp^2(t) = sigma_r^2 (1 + (t-t0)^2/t_d^2), t_d = m sigma_r^2.
/// The envelope is anchored so that it coincides with sigma_r^2 at the focus.
OpticalFunctions optical_functions(const LGPacket& packet, double t, double mass);

/// <u_perp^2> = (2n + |l| + 1) / (m^2 sigma_r^2).
double transverse_velocity_sq(const LGPacket& packet, double mass);

/// <rho^2>(t) = sigma_r^2 + <u_perp^2> (t - t0)^2.
double rho_sq_free(const LGPacket& packet, double t, double mass);

}  // namespace vlens
