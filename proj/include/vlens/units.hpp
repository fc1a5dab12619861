#pragma once

// Physical constants and lab <-> natural unit conversion.
//
// Natural units: hbar = c = 1, energies in eV. Lengths and times are then in
// 1/eV. A magnetic field is carried as e*H (eV^2) and an electric field as
// e*|E| (eV^2); the particle charge magnitude is always one elementary charge.

namespace vlens {

namespace codata {
// CODATA 2018, exact or to 10 significant figures.
inline constexpr double speed_of_light = 299792458.0;          // m/s (exact)
inline constexpr double elementary_charge = 1.602176634e-19;   // C (exact)
inline constexpr double hbar_si = 1.054571817e-34;             // J s
inline constexpr double hbar_eV_s = 6.582119569e-16;           // eV s
inline constexpr double hbar_c_eV_m = 1.973269804e-7;          // eV m
inline constexpr double electron_mass_eV = 0.51099895000e6;    // eV
inline constexpr double proton_mass_eV = 938.27208816e6;       // eV
}  // namespace codata

struct Particle {
  double mass;      // rest energy, eV
  int charge_sign;  // -1 or +1 (units of e)

  static Particle electron() { return {codata::electron_mass_eV, -1}; }
  static Particle positron() { return {codata::electron_mass_eV, +1}; }
  static Particle proton() { return {codata::proton_mass_eV, +1}; }

  /// Throws DomainError unless mass > 0 and charge_sign is +-1.
  void validate() const;
};

struct Constants {
  double compton_length;  // m, hbar/(m c)
  double compton_time;    // s, compton_length / c
};

Constants constants_for(const Particle& particle);

namespace units {

inline constexpr double gauss_to_tesla = 1e-4;
// e*B in eV^2 for B = 1 T: hbar[eV s] * c^2.
inline constexpr double tesla_to_natural =
    codata::hbar_eV_s * codata::speed_of_light * codata::speed_of_light;

inline constexpr double length_to_natural(double metres) { return metres / codata::hbar_c_eV_m; }
inline constexpr double length_from_natural(double inv_eV) { return inv_eV * codata::hbar_c_eV_m; }
inline constexpr double time_to_natural(double seconds) { return seconds / codata::hbar_eV_s; }
inline constexpr double time_from_natural(double inv_eV) { return inv_eV * codata::hbar_eV_s; }
inline constexpr double gauss_to_natural = gauss_to_tesla * tesla_to_natural;
inline constexpr double magnetic_to_natural(double gauss) { return gauss * gauss_to_natural; }
inline constexpr double magnetic_from_natural(double eV2) { return eV2 / gauss_to_natural; }
inline constexpr double electric_to_natural(double volt_per_metre) {
  return volt_per_metre * codata::hbar_c_eV_m;
}
inline constexpr double electric_from_natural(double eV2) { return eV2 / codata::hbar_c_eV_m; }
inline constexpr double angular_frequency_from_natural(double eV) { return eV / codata::hbar_eV_s; }

inline constexpr double um(double metres) { return metres * 1e6; }
inline constexpr double ns(double seconds) { return seconds * 1e9; }

}  // namespace units

// Lab-unit entry points. H0 in gauss, lengths in metres, times in seconds.

/// omega_0 = |q| H0 / m, rad/s. H0 must be finite and >= 0; reversed fields are
/// expressed by flipping the sign of l instead.
double cyclotron_frequency(double H0_gauss, const Particle& particle);

/// rho_H = sqrt(4 hbar / (|q| H0)), metres.
double magnetic_radius(double H0_gauss, const Particle& particle);

/// t_d = m sigma_r^2 / hbar, seconds.
double diffraction_time(double sigma_r_m, const Particle& particle);

/// z_R = <u> t_c sigma_r^2 / lambda_c^2 with <u> a fraction of c in (0, 1).
double rayleigh_length(double mean_velocity, double sigma_r_m, const Particle& particle);

// Natural-unit counterparts used by the core.

double cyclotron_frequency_natural(double eH0, double mass);
double magnetic_radius_sq_natural(double eH0);
double diffraction_time_natural(double sigma_r, double mass);

}  // namespace vlens
