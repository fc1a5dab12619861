#pragma once

// First-order corrections to <rho^2> and <u_perp^2> inside a weakly
// inhomogeneous lens, kappa = kappa_M = kappa_E.
//
// Two routes: the printed closed form for <rho^2>^(1), and RK4 integration of
// the driven first-order system. The ODE system is the reference.

#include <cmath>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "vlens/elements.hpp"
#include "vlens/moments.hpp"

namespace vlens {

/// Homogeneous-lens quantities at entry from which the zeroth order is rebuilt.
struct ZerothOrderInputs {
  double rho_sq_in = 0;
  double rho_sq_st = 0;
  double drho_sq_dt_in = 0;
  double p0 = 0;
  double e_field = 0;  // e |E0|
  double omega0 = 0;
  double length = 0;   // L
  double mass = 0;
  int l = 0;

  static ZerothOrderInputs at_entry(const MomentState& entry, const LensConfig& lens, double mass);

  template <typename Scalar>
  Scalar rho_sq(Scalar dt) const {
    using std::cos;
    using std::sin;
    const Scalar w(omega0);
    return Scalar(rho_sq_st) + Scalar(rho_sq_in - rho_sq_st) * cos(w * dt) +
           Scalar(drho_sq_dt_in / omega0) * sin(w * dt);
  }
  template <typename Scalar>
  Scalar z(Scalar dt) const {
    return Scalar(p0) * dt / Scalar(mass) + Scalar(e_field) * dt * dt / Scalar(2 * mass);
  }
  template <typename Scalar>
  Scalar p_z(Scalar dt) const {
    return Scalar(p0) + Scalar(e_field) * dt;
  }
  double period() const;
};

struct Assumption {
  std::string_view id;
  std::string_view statement;
  std::string_view anchor;
};

/// The three factorizations behind the first-order system.
std::span<const Assumption> approximation_ledger();

struct CorrectionState {
  double rho_sq_1 = 0;
  double drho_sq_1_dt = 0;
  double u_perp_sq_1 = 0;
  double kappa = 0;
  bool valid = true;  // |rho_sq_1| <= validity_fraction * rho_sq_0
  std::span<const Assumption> assumptions;
};

inline constexpr double validity_fraction = 0.3;

/// Single kappa of a lens; ConfigError if kappa_M != kappa_E.
double common_kappa(const LensConfig& lens);

/// Bracket of the printed closed form with kappa factored out; the correction is
/// kappa times this value, so it is exactly linear in kappa.
template <typename Scalar>
Scalar correction_bracket(const ZerothOrderInputs& in, Scalar dt) {
  using std::cos;
  using std::sin;
  const Scalar w(in.omega0), L(in.length), m(in.mass), eE(in.e_field), p0(in.p0);
  const Scalar ri(in.rho_sq_in), S(in.rho_sq_st), di(in.drho_sq_dt_in);
  const Scalar sn = sin(w * dt), cs = cos(w * dt);
  const Scalar w3 = w * w * w;
  const Scalar w4 = w3 * w;
  const Scalar g1 = -sn / (Scalar(2) * L * m * w) *
                    (eE * dt * (di * dt - Scalar(4) * (ri - S)) + Scalar(2) * p0 * (di * dt - ri));
  const Scalar g2 = -sn / (Scalar(6) * L * m * w3) *
                    (w4 * dt * dt * (ri - S) * (eE * dt + Scalar(3) * p0) - Scalar(12) * eE * di);
  const Scalar g3 = cs / (L * m * w * w) * (eE * (ri - Scalar(4) * S - Scalar(2) * di * dt) - p0 * di);
  const Scalar g4 = cs * dt / (Scalar(6) * L * m) *
                    (eE * dt * (di * dt - Scalar(3) * (ri - S)) +
                     Scalar(3) * p0 * (di * dt - Scalar(2) * (ri - S)));
  const Scalar g5 = -Scalar(1) / (Scalar(2) * L * m * w3) *
                    (Scalar(2) * w * (eE * (ri - Scalar(4) * S) - p0 * di) +
                     S * w3 * dt * (eE * dt + Scalar(2) * p0));
  return g1 + g2 + g3 + g4 + g5;
}

template <typename Scalar>
Scalar correction_closed_form(const ZerothOrderInputs& in, double kappa, Scalar dt) {
  return Scalar(kappa) * correction_bracket(in, dt);
}

/// d<rho^2>^(1)/dt of the closed form by complex-step differentiation.
double correction_closed_form_rate(const ZerothOrderInputs& in, double kappa, double dt);

/// <u^2>^(1)(dt) = (kappa omega0 / (m^2 L)) int_0^dt (l + m omega0 rho0 / 2) p_z0 ds, in closed form.
template <typename Scalar>
Scalar velocity_correction(const ZerothOrderInputs& in, double kappa, Scalar t) {
  using std::cos;
  using std::sin;
  const Scalar w(in.omega0), m(in.mass), eE(in.e_field), p0(in.p0);
  const Scalar a(in.rho_sq_in - in.rho_sq_st), b(in.drho_sq_dt_in / in.omega0), S(in.rho_sq_st);
  const Scalar sn = sin(w * t), cs = cos(w * t);
  const Scalar i0 = p0 * t + eE * t * t / Scalar(2);
  const Scalar ic = p0 * sn / w + eE * (t * sn / w + (cs - Scalar(1)) / (w * w));
  const Scalar is = p0 * (Scalar(1) - cs) / w + eE * (-t * cs / w + sn / (w * w));
  const Scalar half_mw = m * w / Scalar(2);
  const Scalar pref = Scalar(kappa) * w / (m * m * Scalar(in.length));
  return pref * ((Scalar(in.l) + half_mw * S) * i0 + half_mw * (a * ic + b * is));
}

/// Right-hand side of the oscillator: rho1'' + omega0^2 rho1 = drive.
template <typename Scalar>
Scalar correction_drive(const ZerothOrderInputs& in, double kappa, Scalar t, Scalar u1) {
  const Scalar k(kappa), w(in.omega0), m(in.mass), L(in.length);
  const Scalar z0 = in.z(t), r0 = in.rho_sq(t);
  return Scalar(2) * u1 - k * Scalar(2) * w * Scalar(in.l) / (m * L) * z0 -
         k * Scalar(2) * w * w / L * z0 * r0 + k * Scalar(2) * Scalar(in.e_field) / (m * L) * r0;
}

/// Closed-form correction packaged with its rate, <u^2>^(1) and the ledger.
CorrectionState correction_state(const ZerothOrderInputs& in, double kappa, double dt);

/// RK4 integration of the first-order system from zero initial conditions.
/// step must not exceed period/200 (PrecisionError otherwise).
CorrectionState correction_by_quadrature(const ZerothOrderInputs& in, double kappa, double dt,
                                         double step);

struct CorrectionSample {
  double t, rho_sq_1, drho_sq_1_dt, u_perp_sq_1;
};

std::vector<CorrectionSample> correction_trajectory(const ZerothOrderInputs& in, double kappa,
                                                    double span, double step);

struct DiscrepancyReport {
  double peak = 0;           // max |closed form| over the span
  double max_abs_diff = 0;   // max |closed form - RK4|
  double at_time = 0;        // where the largest difference occurs
  double relative() const { return peak > 0 ? max_abs_diff / peak : max_abs_diff; }
  bool consistent(double tol) const { return relative() <= tol; }
};

DiscrepancyReport compare_closed_form(const ZerothOrderInputs& in, double kappa, double span,
                                      double step);

/// Max over a uniform grid of |rho1'' + omega^2 rho1 - drive| / max |drive|, with
/// the second derivative by extended-precision central differences.
double closed_form_ode_residual(const ZerothOrderInputs& in, double kappa, double span, int points);

}  // namespace vlens
