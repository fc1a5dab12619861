#include "vlens/perturbation.hpp"

#include <algorithm>
#include <array>
#include <numbers>

#include "vlens/errors.hpp"
#include "vlens/oracle.hpp"

namespace vlens {

ZerothOrderInputs ZerothOrderInputs::at_entry(const MomentState& entry, const LensConfig& lens,
                                              double mass) {
  ZerothOrderInputs in;
  in.omega0 = lens.omega0(mass);
  in.rho_sq_in = entry.rho_sq;
  in.rho_sq_st = stationary_rho_sq(entry.u_perp_sq, entry.l, in.omega0, mass).rho_sq;
  in.drho_sq_dt_in = entry.drho_sq_dt;
  in.p0 = entry.p_z;
  in.e_field = lens.e_field;
  in.length = lens.length;
  in.mass = mass;
  in.l = entry.l;
  return in;
}

double ZerothOrderInputs::period() const { return 2.0 * std::numbers::pi / omega0; }

namespace {

constexpr std::array<Assumption, 3> ledger{{
    {"omega_c_rho_split",
     "<omega_c^2(z) rho^2> ~ omega0^2 <rho^2>^(0) + omega0^2 <rho^2>^(1) + 2 omega0 omega1 <z>^(0) "
     "<rho^2>^(0), with omega1 = kappa omega0 / L",
     "<omega_c^2(z) rho^2> approx omega_0^2 <rho^2>^(0) + (omega_0^2 <rho^2>^(1) + 2 omega_0 "
     "omega_1 <z>^(0) <rho^2>^(0))"},
    {"rho_pz2_factorization", "kappa <rho^2 p_z^2> ~ kappa <rho^2>^(0) <p_z^2>^(0)",
     "kappa <rho^2 p_z^2> approx kappa <rho^2>^(0) <p_z^2>^(0)"},
    {"rho_pz_symmetrized",
     "symmetrized <rho^2 p_z> terms ~ (omega0 omega1 / 2m) <rho^2>^(0) <p_z>^(0), dropping "
     "omega1 z / omega0 against 1",
     "approx (omega_0 omega_1 / 4m) 2 <rho^2 p_z>^(0) approx (omega_0 omega_1 / 2m) <rho^2>^(0) "
     "<p_z>^(0)"},
}};

}  // namespace

std::span<const Assumption> approximation_ledger() { return ledger; }

double common_kappa(const LensConfig& lens) {
  if (lens.kappa_M != lens.kappa_E) {
    throw ConfigError("first-order corrections need kappa_M == kappa_E");
  }
  return lens.kappa_M;
}

double correction_closed_form_rate(const ZerothOrderInputs& in, double kappa, double dt) {
  const double h = 1e-20 / in.omega0;
  return correction_closed_form(in, kappa, std::complex<double>(dt, h)).imag() / h;
}

CorrectionState correction_state(const ZerothOrderInputs& in, double kappa, double dt) {
  CorrectionState c;
  c.kappa = kappa;
  c.rho_sq_1 = correction_closed_form(in, kappa, dt);
  c.drho_sq_1_dt = correction_closed_form_rate(in, kappa, dt);
  c.u_perp_sq_1 = velocity_correction(in, kappa, dt);
  c.valid = std::abs(c.rho_sq_1) <= validity_fraction * in.rho_sq(dt);
  c.assumptions = approximation_ledger();
  return c;
}

namespace {

OdeSpec<double, 3> first_order_system(const ZerothOrderInputs& in, double kappa, double span,
                                      double step) {
  if (!(step > 0) || step > in.period() / 200.0 * (1 + 1e-12)) {
    throw PrecisionError("first-order quadrature step must be at most period/200");
  }
  const double w2 = in.omega0 * in.omega0;
  const double pref = kappa * in.omega0 / (in.mass * in.mass * in.length);
  OdeSpec<double, 3> spec;
  // y = (rho1, rho1', u1)
  spec.rhs = [in, kappa, w2, pref](double t, const OdeVector<double, 3>& y) {
    OdeVector<double, 3> d;
    d[0] = y[1];
    d[1] = correction_drive(in, kappa, t, y[2]) - w2 * y[0];
    d[2] = pref * (in.l + in.mass * in.omega0 / 2.0 * in.rho_sq(t)) * in.p_z(t);
    return d;
  };
  spec.initial.setZero();
  spec.t0 = 0;
  spec.span = span;
  spec.step = step;
  return spec;
}

}  // namespace

std::vector<CorrectionSample> correction_trajectory(const ZerothOrderInputs& in, double kappa,
                                                    double span, double step) {
  const auto samples = integrate_rk4(first_order_system(in, kappa, span, step));
  std::vector<CorrectionSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({s.t, s.y[0], s.y[1], s.y[2]});
  return out;
}

CorrectionState correction_by_quadrature(const ZerothOrderInputs& in, double kappa, double dt,
                                         double step) {
  const auto traj = correction_trajectory(in, kappa, dt, step);
  CorrectionState c;
  c.kappa = kappa;
  c.rho_sq_1 = traj.back().rho_sq_1;
  c.drho_sq_1_dt = traj.back().drho_sq_1_dt;
  c.u_perp_sq_1 = traj.back().u_perp_sq_1;
  c.valid = std::abs(c.rho_sq_1) <= validity_fraction * in.rho_sq(dt);
  c.assumptions = approximation_ledger();
  return c;
}

DiscrepancyReport compare_closed_form(const ZerothOrderInputs& in, double kappa, double span,
                                      double step) {
  DiscrepancyReport r;
  for (const auto& s : correction_trajectory(in, kappa, span, step)) {
    const double cf = correction_closed_form(in, kappa, s.t);
    r.peak = std::max(r.peak, std::abs(cf));
    const double d = std::abs(cf - s.rho_sq_1);
    if (d > r.max_abs_diff) {
      r.max_abs_diff = d;
      r.at_time = s.t;
    }
  }
  return r;
}

double closed_form_ode_residual(const ZerothOrderInputs& in, double kappa, double span, int points) {
  using ld = long double;
  if (points < 2) throw DomainError("residual grid needs at least two points");
  const ld w = in.omega0;
  const ld h = ld(1e-5) / w;
  double worst = 0, drive_peak = 0;
  for (int i = 0; i < points; ++i) {
    // keep the stencil inside [0, span]
    const ld t = h + (ld(span) - 2 * h) * ld(i) / ld(points - 1);
    const ld fm = correction_closed_form<ld>(in, kappa, t - h);
    const ld f0 = correction_closed_form<ld>(in, kappa, t);
    const ld fp = correction_closed_form<ld>(in, kappa, t + h);
    const ld second = (fp - 2 * f0 + fm) / (h * h);
    const ld drive = correction_drive<ld>(in, kappa, t, velocity_correction<ld>(in, kappa, t));
    worst = std::max(worst, double(std::abs(second + w * w * f0 - drive)));
    drive_peak = std::max(drive_peak, double(std::abs(drive)));
  }
  return drive_peak > 0 ? worst / drive_peak : worst;
}

}  // namespace vlens
