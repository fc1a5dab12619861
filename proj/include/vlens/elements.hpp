#pragma once

// Beamline elements, the linearized lens fields and the Landau reference state.
//
// Lens fields are stored in natural units as e*H and e*|E| (eV^2); lengths and
// durations in 1/eV. The electric field magnitude always accelerates the
// particle, whatever its charge sign.

#include <cmath>

namespace vlens {

struct Particle;

struct Drift {
  double duration = 0;
  void validate() const;
};

struct LensConfig {
  double field = 0;     // e H0
  double e_field = 0;   // e |E0|
  double kappa_M = 0;   // L H1 / H0
  double kappa_E = 0;   // L E1 / E0
  double length = 1;    // L, inhomogeneity scale only
  double duration = 0;
  int n_prime = 0;      // target Landau radial number for matching reports

  static LensConfig from_lab(double H0_gauss, double E0_V_per_m, double kappa_M, double kappa_E,
                             double L_m, double duration_s, int n_prime = 0);

  /// H0 > 0, E0 >= 0, L > 0, duration > 0, |kappa| <= 0.2.
  void validate() const;
  /// True when either |kappa| exceeds 0.1 (first-order theory getting strained).
  bool kappa_warning() const;
  bool homogeneous() const { return kappa_M == 0 && kappa_E == 0; }

  double omega0(double mass) const { return field / mass; }
  double h1() const { return kappa_M * field / length; }
  double e1() const { return kappa_E * e_field / length; }
};

inline constexpr double kappa_hard_limit = 0.2;
inline constexpr double kappa_soft_limit = 0.1;

template <typename Scalar>
struct FieldComponents {
  Scalar E_rho, E_z, H_rho, H_z;
};

/// Linear fields E_rho = -E1 rho/2, E_z = E0 + E1 z, H_rho = -H1 rho/2, H_z = H0 + H1 z.
template <typename Scalar>
FieldComponents<Scalar> field_components(const LensConfig& lens, Scalar rho, Scalar z) {
  const Scalar e1 = Scalar(lens.kappa_E) * Scalar(lens.e_field) / Scalar(lens.length);
  const Scalar h1 = Scalar(lens.kappa_M) * Scalar(lens.field) / Scalar(lens.length);
  return {-e1 * rho / Scalar(2), Scalar(lens.e_field) + e1 * z, -h1 * rho / Scalar(2),
          Scalar(lens.field) + h1 * z};
}

template <typename Scalar>
struct PotentialValues {
  Scalar phi;    // e * scalar potential
  Scalar A_phi;  // e * azimuthal vector potential
};

/// phi = E1 rho^2/4 - E0 z - E1 z^2/2, A_phi = (H0 + H1 z) rho / 2.
template <typename Scalar>
PotentialValues<Scalar> potential_values(const LensConfig& lens, Scalar rho, Scalar z) {
  const Scalar e1 = Scalar(lens.kappa_E) * Scalar(lens.e_field) / Scalar(lens.length);
  const Scalar h1 = Scalar(lens.kappa_M) * Scalar(lens.field) / Scalar(lens.length);
  return {e1 * rho * rho / Scalar(4) - Scalar(lens.e_field) * z - e1 * z * z / Scalar(2),
          (Scalar(lens.field) + h1 * z) * rho / Scalar(2)};
}

struct FieldSample {
  double E_rho, E_z, H_rho, H_z;
  bool outside_linear_region;  // |rho| or |z| beyond L
};

FieldSample fields_at(const LensConfig& lens, double rho, double z);
PotentialValues<double> potentials_at(const LensConfig& lens, double rho, double z);

struct MaxwellResidual {
  // Finite-difference residuals, each scaled as |r| L / |F|.
  double div_E, curl_E, div_H, curl_H;
  // |grad(-phi) - E| / |E| and |curl A - H| / |H|.
  double potential_E, potential_H;
  double max_field() const;
  double max_potential() const;
};

/// Central differences in extended precision with step h = L * rel_step.
MaxwellResidual maxwell_residual(const LensConfig& lens, double rho, double z,
                                 double rel_step = 1e-6);

/// omega_c(z) = omega0 (1 + kappa_M z / L).
double omega_c_of_z(const LensConfig& lens, double z, double mass);

/// (rho_H^2 / 2)(2n' + |l| + 1).
double landau_rho_sq_st(const LensConfig& lens, int n_prime, int l);

/// (omega0 / 2)(2n' + |l| + l + 1).
double landau_energy(const LensConfig& lens, int n_prime, int l, double mass);

}  // namespace vlens
