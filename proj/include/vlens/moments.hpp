#pragma once

// Second-order transverse moments and longitudinal centroid through drifts and
// homogeneous lenses.
//
// The transverse triplet (<rho^2>, d<rho^2>/dt, <u_perp^2>) evolves linearly in
// both element types, so each element is a 4x4 transfer matrix acting on the
// homogeneous vector (rho_sq, drho_sq_dt, u_perp_sq, 1).

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "vlens/elements.hpp"
#include "vlens/packet.hpp"

namespace vlens {

struct MomentState {
  double rho_sq = 0;
  double drho_sq_dt = 0;
  double u_perp_sq = 0;
  double p_z = 0;
  double z = 0;
  double t = 0;
  int l = 0;

  Eigen::Vector4d transverse() const { return {rho_sq, drho_sq_dt, u_perp_sq, 1.0}; }
  void set_transverse(const Eigen::Vector4d& v) {
    rho_sq = v[0];
    drho_sq_dt = v[1];
    u_perp_sq = v[2];
  }
};

template <typename Scalar>
using Transfer = Eigen::Matrix<Scalar, 4, 4>;

template <typename Scalar>
Transfer<Scalar> drift_transfer(Scalar dt) {
  Transfer<Scalar> M = Transfer<Scalar>::Identity();
  M(0, 1) = dt;
  M(0, 2) = dt * dt;
  M(1, 2) = Scalar(2) * dt;
  return M;
}

/// Homogeneous lens of cyclotron frequency omega for OAM l and mass m.
template <typename Scalar>
Transfer<Scalar> lens_transfer(Scalar omega, int l, Scalar mass, Scalar dt) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(omega * dt), s = sin(omega * dt);
  const Scalar lm = Scalar(l) / mass;
  Transfer<Scalar> M = Transfer<Scalar>::Identity();
  M(0, 0) = c;
  M(0, 1) = s / omega;
  M(0, 2) = Scalar(2) * (Scalar(1) - c) / (omega * omega);
  M(0, 3) = -Scalar(2) * lm * (Scalar(1) - c) / omega;
  M(1, 0) = -omega * s;
  M(1, 1) = c;
  M(1, 2) = Scalar(2) * s / omega;
  M(1, 3) = -Scalar(2) * lm * s;
  return M;
}

MomentState free_state(const LGPacket& packet, double p0, double t, double mass);

MomentState propagate_drift(const MomentState& state, double dt, double mass);

/// Closed-form propagation through a lens with kappa_M = kappa_E = 0.
/// Throws OverFocusError (time measured from entry) if <rho^2> reaches
/// lambda_c^2 = 1/m^2 anywhere in [0, dt].
MomentState propagate_lens_homogeneous(const MomentState& state, const LensConfig& lens, double dt,
                                       double mass);

/// Zeroth-order <rho^2> in the lens dt after entry, without floor checks.
double lens_rho_sq(const MomentState& entry, const LensConfig& lens, double dt, double mass);

struct Stationary {
  double rho_sq;
  bool valid;  // false when no stable orbit exists (rho_sq <= 0)
};

/// (2 <u^2> - 2 omega0 l / m) / omega0^2.
Stationary stationary_rho_sq(double u_perp_sq, int l, double omega0, double mass);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return double(num) / double(den); }
  bool operator==(const Rational&) const = default;
};

Rational make_rational(std::int64_t num, std::int64_t den);

/// rho_H^2 / sigma_r^2 = 4(2n' + |l| + l + 1) / (2n + |l| + 1), reduced.
Rational matching_ratio(int n, int l, int n_prime);

/// Large-|l| limit 4(1 + sgn l) for n = n'.
Rational matching_ratio_large_l(int l);

struct TransportReport {
  double rho_sq_st = 0;
  double rho_sq_min = 0;
  bool stationary_valid = true;
  bool matched = false;
  bool transportable = false;
  bool transportable_solved = false;
  Rational matching_ratio_required;
  double matching_ratio_actual = 0;
};

inline constexpr double matched_rel_tolerance = 5e-3;

/// Lens entry analysis. radial_n is the free-packet quantum number used for the
/// required matching ratio; the actual ratio is rho_H^2 over the focal <rho^2>
/// of the incoming beam, <rho^2> - (d<rho^2>/dt)^2 / (4 <u^2>).
TransportReport transport_check(const MomentState& entry, const LensConfig& lens, double mass,
                                int radial_n);

/// Amplitude form: st - sqrt((in - st)^2 + (d/omega)^2) > 0.
bool transport_amplitude_form(double rho_in, double drho_in, double rho_st, double omega0);
/// Solved form: st > in/2 + d^2 / (2 omega^2 in).
bool transport_solved_form(double rho_in, double drho_in, double rho_st, double omega0);

/// sqrt(<rho^2><u^2> - <rho.u>^2) with <rho.u> = d<rho^2>/dt / 2.
double emittance(const MomentState& state);

/// rho (u^2 - omega l / m) - omega^2 rho^2 / 4 - (d rho / dt)^2 / 4, conserved in
/// a homogeneous lens; equal to emittance^2 at zero field.
double lens_invariant(const MomentState& state, double omega0, double mass);

/// Third time derivative of <rho^2> dt after lens entry.
double quadrupole_drive(const MomentState& entry, const LensConfig& lens, double dt, double mass);

inline constexpr double relativistic_velocity = 0.1;
bool relativistic(const MomentState& state, double mass);

}  // namespace vlens
