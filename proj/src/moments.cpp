#include "vlens/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "vlens/errors.hpp"
#include "vlens/units.hpp"

namespace vlens {

MomentState free_state(const LGPacket& packet, double p0, double t, double mass) {
  MomentState s;
  s.u_perp_sq = transverse_velocity_sq(packet, mass);
  s.rho_sq = rho_sq_free(packet, t, mass);
  s.drho_sq_dt = 2.0 * s.u_perp_sq * (t - packet.focus_time);
  s.p_z = p0;
  s.z = 0;
  s.t = t;
  s.l = packet.l;
  return s;
}

MomentState propagate_drift(const MomentState& state, double dt, double mass) {
  if (!(dt >= 0)) throw DomainError("drift step must be non-negative");
  MomentState out = state;
  out.set_transverse(drift_transfer(dt) * state.transverse());
  out.z = state.z + state.p_z / mass * dt;
  out.t = state.t + dt;
  return out;
}

double lens_rho_sq(const MomentState& entry, const LensConfig& lens, double dt, double mass) {
  const double w = lens.omega0(mass);
  const Eigen::Vector4d v = lens_transfer(w, entry.l, mass, dt) * entry.transverse();
  return v[0];
}

namespace {

// First tau >= 0 at which st + a cos(w tau) + b sin(w tau) drops to floor, or
// a negative value if it never does.
double first_floor_crossing(double rho_in, double st, double b, double w, double floor) {
  if (rho_in <= floor) return 0.0;
  const double a = rho_in - st;
  const double A = std::hypot(a, b);
  if (!(st - A <= floor) || A == 0.0) return -1.0;
  const double alpha = std::acos(std::clamp((floor - st) / A, -1.0, 1.0));
  const double two_pi = 2.0 * std::numbers::pi;
  double theta0 = std::fmod(-std::atan2(b, a), two_pi);
  if (theta0 < 0) theta0 += two_pi;
  const double dtheta = theta0 < alpha ? alpha - theta0 : alpha + two_pi - theta0;
  return dtheta / w;
}

}  // namespace

MomentState propagate_lens_homogeneous(const MomentState& state, const LensConfig& lens, double dt,
                                       double mass) {
  if (!(dt >= 0)) throw DomainError("lens step must be non-negative");
  if (!lens.homogeneous()) {
    throw ConfigError("homogeneous propagation called on an inhomogeneous lens");
  }
  const double w = lens.omega0(mass);
  if (!(w > 0)) throw DomainError("lens field must be positive");

  const Stationary st = stationary_rho_sq(state.u_perp_sq, state.l, w, mass);
  const double floor = 1.0 / (mass * mass);
  const double tau = first_floor_crossing(state.rho_sq, st.rho_sq, state.drho_sq_dt / w, w, floor);
  if (tau >= 0 && tau <= dt) {
    throw OverFocusError("<rho^2> reached the Compton floor inside the lens", tau);
  }

  MomentState out = state;
  out.set_transverse(lens_transfer(w, state.l, mass, dt) * state.transverse());
  out.p_z = state.p_z + lens.e_field * dt;
  out.z = state.z + state.p_z * dt / mass + lens.e_field * dt * dt / (2.0 * mass);
  out.t = state.t + dt;
  return out;
}

Stationary stationary_rho_sq(double u_perp_sq, int l, double omega0, double mass) {
  if (!(omega0 > 0)) throw DomainError("stationary radius requires omega0 > 0");
  const double st = (2.0 * u_perp_sq - 2.0 * omega0 * l / mass) / (omega0 * omega0);
  return {st, st > 0};
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return {num / (g ? g : 1), den / (g ? g : 1)};
}

Rational matching_ratio(int n, int l, int n_prime) {
  if (n < 0 || n_prime < 0) throw DomainError("radial numbers must be non-negative");
  const std::int64_t al = std::abs(l);
  const std::int64_t num = 4 * (2 * std::int64_t(n_prime) + al + l + 1);
  return make_rational(num, 2 * std::int64_t(n) + al + 1);
}

Rational matching_ratio_large_l(int l) { return {l > 0 ? 8 : (l < 0 ? 0 : 4), 1}; }

bool transport_amplitude_form(double rho_in, double drho_in, double rho_st, double omega0) {
  return rho_st - std::hypot(rho_in - rho_st, drho_in / omega0) > 0;
}

bool transport_solved_form(double rho_in, double drho_in, double rho_st, double omega0) {
  return rho_st > rho_in / 2.0 + drho_in * drho_in / (2.0 * omega0 * omega0 * rho_in);
}

TransportReport transport_check(const MomentState& entry, const LensConfig& lens, double mass,
                                int radial_n) {
  if (!(entry.rho_sq > 0) || !(entry.u_perp_sq > 0)) throw DomainError("invalid entry state");
  const double w = lens.omega0(mass);
  const Stationary st = stationary_rho_sq(entry.u_perp_sq, entry.l, w, mass);
  TransportReport r;
  r.rho_sq_st = st.rho_sq;
  r.stationary_valid = st.valid;
  r.rho_sq_min = st.rho_sq - std::hypot(entry.rho_sq - st.rho_sq, entry.drho_sq_dt / w);
  r.transportable = r.rho_sq_min > 0;
  r.transportable_solved = transport_solved_form(entry.rho_sq, entry.drho_sq_dt, st.rho_sq, w);
  r.matching_ratio_required = matching_ratio(radial_n, entry.l, lens.n_prime);
  const double focal = entry.rho_sq - entry.drho_sq_dt * entry.drho_sq_dt / (4.0 * entry.u_perp_sq);
  r.matching_ratio_actual = magnetic_radius_sq_natural(lens.field) / focal;
  const double req = r.matching_ratio_required.value();
  r.matched = std::abs(r.matching_ratio_actual - req) <= matched_rel_tolerance * req;
  return r;
}

double emittance(const MomentState& state) {
  const double corr = state.drho_sq_dt / 2.0;
  const double rad = state.rho_sq * state.u_perp_sq - corr * corr;
  if (rad < 0) {
    // Allow rounding-level negatives at (near) zero emittance.
    if (rad > -1e-12 * state.rho_sq * state.u_perp_sq) return 0.0;
    throw std::logic_error("emittance radicand is negative");
  }
  return std::sqrt(rad);
}

double lens_invariant(const MomentState& state, double omega0, double mass) {
  const double r = state.rho_sq, d = state.drho_sq_dt;
  return r * (state.u_perp_sq - omega0 * state.l / mass) - omega0 * omega0 * r * r / 4.0 - d * d / 4.0;
}

double quadrupole_drive(const MomentState& entry, const LensConfig& lens, double dt, double mass) {
  if (!lens.homogeneous()) throw ConfigError("quadrupole drive needs a homogeneous lens");
  const double w = lens.omega0(mass);
  if (w == 0) return 0.0;
  const double st = stationary_rho_sq(entry.u_perp_sq, entry.l, w, mass).rho_sq;
  const double x = w * dt;
  return w * w * w * ((entry.rho_sq - st) * std::sin(x) - entry.drho_sq_dt / w * std::cos(x));
}

bool relativistic(const MomentState& state, double mass) {
  return std::abs(state.p_z) / mass > relativistic_velocity;
}

}  // namespace vlens
