// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "vlens/elements.hpp"
#include "vlens/lattice.hpp"
#include "vlens/moments.hpp"
#include "vlens/oracle.hpp"
#include "vlens/perturbation.hpp"
#include "vlens/units.hpp"

using namespace vlens;

namespace {

const double m = codata::electron_mass_eV;
const double ns = units::time_to_natural(1e-9);
const double um = units::length_to_natural(1e-6);

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("criterion %2d %s  %s  [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

LGPacket packet(double sigma_um) { return {0, -4, sigma_um * um, 0}; }

LensConfig lens(double H, double duration_ns, double E0 = 0, double kappa = 0) {
  return LensConfig::from_lab(H, E0, kappa, kappa, 0.1, duration_ns * 1e-9);
}

void criterion_1() {
  const bool ratio = matching_ratio(0, -4, 0) == Rational{4, 5};
  double worst = 0;
  for (auto [H, s] : {std::pair{100.0, 0.574}, {85.0, 0.622}}) {
    worst = std::max(worst, rel(units::magnetic_from_natural(solve_matching(packet(s), 0)), H));
    worst = std::max(worst, rel(solve_matching_sigma_r(units::magnetic_to_natural(H), 0, -4, 0) / um, s));
  }
  report(1, ratio && worst <= 5e-3, "matching ratio 4/5 and field/waist pairs",
         std::string("ratio ") + (ratio ? "4/5" : "wrong") + ", worst pair deviation " + fmt("%.3e", worst) +
             " (tol 5e-3)");
}

void criterion_2() {
  const double s10 = large_l_matched_sigma_r(units::magnetic_to_natural(10)) / um * 1e3;
  const double s1e4 = large_l_matched_sigma_r(units::magnetic_to_natural(1e4)) / um * 1e3;
  const bool ok = s10 >= 573 * 0.99 && s10 <= 574 * 1.01 && rel(s1e4, 18.0) <= 0.01;
  report(2, ok, "large-l matched waist", fmt("10 G: %.3f nm", s10) + fmt(", 1e4 G: %.3f nm (tol 1%%)", s1e4));
}

void criterion_3() {
  const MomentState s = propagate_drift(free_state(packet(0.574), 0.43, 0, m), ns, m);
  const double z = units::length_from_natural(s.z) * 1e6;
  report(3, rel(z, 0.253) <= 0.01, "drift of 1 ns at p0 = 0.43 eV", fmt("z = %.5f um (target 0.253, tol 1%%)", z));
}

void criterion_4() {
  double worst = 0;
  for (int n = 0; n <= 5; ++n) {
    for (int l = -5; l <= 5; ++l) {
      worst = std::max(worst, rel(velocity_assembly_quadrature(n, l), 2.0 * n + std::abs(l) + 1));
    }
  }
  bool y_ok = true, x_zero = true, x_corrected = true, x_printed = true;
  int printed_bad = 0, printed_total = 0;
  for (int n = 0; n <= 8; ++n) {
    for (int l = 0; l <= 8; ++l) {
      y_ok = y_ok && lg_moment_exact(n, l, l, 0) == y_l_identity(n, l);
      x_zero = x_zero && lg_moment_exact(n, l, l, 1) == 0 && lg_moment_exact(n, l, l + 1, 2) == 0;
      if (n >= 1 && l >= 1) {
        const int128 exact = lg_moment_exact(n, l, l - 1, 1);
        const int128 corrected = -factorial_i128(n + l) / (factorial_i128(n - 1) * l * (l + 1));
        x_corrected = x_corrected && exact == corrected;
        ++printed_total;
        if (exact != x_lm1_printed(n, l)) {
          x_printed = false;
          ++printed_bad;
        }
      }
    }
  }
  const bool quad = worst <= 1e-10;
  report(4, quad && y_ok && x_zero && x_printed, "mode-integral oracle",
         fmt("assembly worst %.2e (tol 1e-10)", worst) + ", Y_l " + (y_ok ? "exact" : "FAILS") +
             ", X_{l,1} = X_{l+1,2} = 0 " + (x_zero ? "exact" : "FAILS") + ", printed X_{l-1,1} = -(n+l)!/(n-1)! " +
             (x_printed ? "exact" : "false in " + std::to_string(printed_bad) + "/" + std::to_string(printed_total)) +
             " cases (e.g. n=2 l=3: " + to_string(lg_moment_exact(2, 3, 2, 1)) + " vs " +
             to_string(x_lm1_printed(2, 3)) + "), corrected -(n+l)!/((n-1)! l (l+1)) " +
             (x_corrected ? "exact" : "FAILS"));
}

void criterion_5() {
  const MomentState s = free_state(packet(0.622), 0.43, ns, m);
  double worst = 0;
  for (double H : {85.0, 100.0}) {
    const LensConfig k = lens(H, 30);
    const double w = k.omega0(m), T = 2 * std::numbers::pi / w;
    OdeSpec<double, 5> spec = moment_system(w, s.l, m, 0);
    spec.initial << s.rho_sq, s.drho_sq_dt, s.u_perp_sq, s.p_z, s.z;
    spec.span = 5 * T;
    spec.step = T / 1000;
    double scale = 0, diff = 0;
    const auto traj = integrate_rk4(spec);
    for (const auto& p : traj) scale = std::max(scale, std::abs(p.y[0]));
    for (const auto& p : traj) diff = std::max(diff, std::abs(propagate_lens_homogeneous(s, k, p.t, m).rho_sq - p.y[0]));
    worst = std::max(worst, diff / scale);
  }
  OdeSpec<double, 5> free = moment_system(0, s.l, m, 0);
  free.initial << s.rho_sq, s.drho_sq_dt, s.u_perp_sq, s.p_z, s.z;
  free.span = 5 * ns;
  free.step = 0.013 * ns;
  double free_worst = 0;
  for (const auto& p : integrate_rk4(free)) {
    free_worst = std::max(free_worst, rel(p.y[0], propagate_drift(s, p.t, m).rho_sq));
  }
  report(5, worst <= 1e-8 && free_worst <= 1e-13, "closed form against RK4",
         fmt("lens worst %.2e over 5 periods (tol 1e-8)", worst) + fmt(", free space %.2e", free_worst));
}

// Drift time t1 at which the lens entry stops being transportable.
double threshold(const LGPacket& p, double eH0) {
  LensConfig k;
  k.field = eH0;
  k.duration = ns;
  auto ok = [&](double t1) { return transport_check(free_state(p, 0.43, t1, m), k, m, 0).transportable; };
  double lo = 0, hi = 20 * diffraction_time_natural(p.sigma_r, m);
  if (!ok(lo) || ok(hi)) return std::nan("");
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void criterion_6() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u01(0, 1);
  int agree = 0;
  const int total = 10000;
  for (int i = 0; i < total; ++i) {
    const double w = std::pow(10.0, -8 + 2 * u01(rng));
    const double rin = std::pow(10.0, 10 + 4 * u01(rng));
    const double st = rin * std::pow(10.0, -1.5 + 3 * u01(rng));
    const double din = (2 * u01(rng) - 1) * rin * w * 3;
    agree += transport_amplitude_form(rin, din, st, w) == transport_solved_form(rin, din, st, w);
  }
  const double tau_exact = std::sqrt((6 + std::sqrt(336.0)) / 10);
  double tau_worst = 0;
  for (double s : {0.3, 0.574, 0.622, 2.0}) {
    const LGPacket p = packet(s);
    const double ts = diffraction_time_natural(p.sigma_r, m) / std::sqrt(5.0);
    tau_worst = std::max(tau_worst, rel(threshold(p, solve_matching(p, 0)) / ts, tau_exact));
  }
  // nominal pairs at their exactly matched field; the rounded lab fields are shown alongside
  const double t574 = threshold(packet(0.574), solve_matching(packet(0.574), 0)) / ns;
  const double t622 = threshold(packet(0.622), solve_matching(packet(0.622), 0)) / ns;
  const double t100 = threshold(packet(0.574), units::magnetic_to_natural(100)) / ns;
  const double t85 = threshold(packet(0.622), units::magnetic_to_natural(85)) / ns;
  const bool ok = agree == total && tau_worst <= 1e-6 && std::abs(t574 - 1.99) <= 0.005 &&
                  std::abs(t622 - 2.33) <= 0.005;
  report(6, ok, "transport predicate",
         std::to_string(agree) + "/" + std::to_string(total) + " forms agree, threshold " +
             fmt("%.7f t_s", tau_exact) + fmt(" (rounds to 1.56) reproduced to %.1e (tol 1e-6)", tau_worst) +
             fmt(", matched 0.574 um: %.4f ns", t574) + fmt(", matched 0.622 um: %.4f ns (tol 0.005 ns)", t622) +
             fmt("; at 100 G exactly %.4f ns", t100) + fmt(", at 85 G exactly %.4f ns", t85));
}

void criterion_7() {
  const Rational expanded = make_rational(matching_ratio(0, -4, 0).num, matching_ratio(0, -4, 0).den * 21);
  const auto n = required_radial_number(expanded, -4, 0);
  report(7, n && *n == 50, "radial number after 21-fold expansion",
         "ratio " + std::to_string(expanded.num) + "/" + std::to_string(expanded.den) + ", n = " +
             (n ? std::to_string(*n) : std::string("none")));
}

// Drift t1, first lens until lens_exit, then a drift with the focus inside.
struct CaptureProbe {
  MomentState exit;
  double focal_rho_sq, focal_time;
};

CaptureProbe capture_probe(double H, double t1, double lens_exit) {
  const MomentState a = free_state(packet(0.574), 0.43, t1, m);
  const MomentState b = propagate_lens_homogeneous(a, lens(H, 10), lens_exit - t1, m);
  return {b, b.rho_sq - b.drho_sq_dt * b.drho_sq_dt / (4 * b.u_perp_sq), b.t - b.drho_sq_dt / (2 * b.u_perp_sq)};
}

void criterion_8() {
  // closure on the bundled geometry: drift 1 ns, 100 G for 1.5 ns, capture at the next focus
  Beamline b;
  b.packet = packet(0.574);
  b.p0 = 0.43;
  b.elements = {Drift{ns}, lens(100, 1.5), Drift{ns}};
  const Trajectory t = run(b, 0.01 * ns);
  double tf = -1;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::focal_point && e.element_index == 2) tf = e.t;
  }
  double closure = INFINITY;
  if (tf > 0) {
    const MomentState f = propagate_drift(t.element_entry[2], tf - t.element_entry[2].t, m);
    LensConfig cap = design_direct_capture(f, 0, 1, m);
    cap.duration = 3 * 2 * std::numbers::pi / cap.omega0(m);
    Beamline c = b;
    c.elements = {Drift{ns}, lens(100, 1.5), Drift{tf - t.element_entry[2].t}, cap};
    const Trajectory ct = run(c, 0.002 * ns);
    closure = 0;
    for (const auto& s : ct.samples) {
      if (s.element_index == 3) closure = std::max(closure, std::abs(s.state.rho_sq / f.rho_sq - 1));
    }
    if (ct.truncated) closure = INFINITY;
  }
  const bool closure_ok = closure <= 1e-12;

  // 97.8 G pairing: choose t1 so the focal <rho^2> after the first lens is the stationary
  // radius of a 97.8 G lens, then compare the focal time with 3.32 ns.
  const double H = 97.8, exit = 2.5 * ns;
  const double u2 = transverse_velocity_sq(packet(0.574), m);
  const double st = stationary_rho_sq(u2, -4, lens(H, 1).omega0(m), m).rho_sq;
  double lo = 0, hi = ns;
  auto g = [&](double t1) { return capture_probe(H, t1, exit).focal_rho_sq - st; };
  bool bracket = g(lo) * g(hi) < 0;
  if (bracket) {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * ns; ++i) {
      const double mid = 0.5 * (lo + hi);
      (g(lo) * g(mid) <= 0 ? hi : lo) = mid;
    }
  }
  const double t1 = 0.5 * (lo + hi);
  const CaptureProbe p = capture_probe(H, t1, exit);
  const bool focus_after = bracket && p.exit.drho_sq_dt < 0;
  MomentState at_focus = propagate_drift(p.exit, p.focal_time - p.exit.t, m);
  at_focus.drho_sq_dt = 0;
  const double field = focus_after ? units::magnetic_from_natural(design_direct_capture(at_focus, 0, 1, m).field) : 0;
  const double time = p.focal_time / ns;
  const bool pair_ok = focus_after && rel(field, H) <= 0.02 && rel(time, 3.32) <= 0.02;
  report(8, closure_ok && pair_ok, "direct capture",
         fmt("closure over 3 periods %.2e (tol 1e-12)", closure) + fmt(", 97.8 G pairing: t1 = %.4f ns", t1 / ns) +
             fmt(", capture field %.3f G", field) + fmt(", focal time %.4f ns", time) +
             fmt(" vs 3.32 ns (deviation %.2f%%, tol 2%%)", 100 * rel(time, 3.32)));
}

void criterion_9() {
  bool linear = true, vanish = true;
  double residual = 0, discrepancy = 0;
  for (double kappa : {0.081, -0.081}) {
    const MomentState s = free_state(packet(0.622), 0.43, ns, m);
    const LensConfig k = lens(85, 16.8, 1e4, kappa);
    const ZerothOrderInputs in = ZerothOrderInputs::at_entry(s, k, m);
    const double T = in.period();
    double peak = 0;
    for (int i = 1; i <= 400; ++i) {
      const double dt = 4 * T * i / 400;
      const double a = correction_closed_form(in, kappa, dt);
      linear = linear && correction_closed_form(in, 2 * kappa, dt) == 2 * a &&
               correction_closed_form(in, -kappa, dt) == -a && correction_closed_form(in, 0.0, dt) == 0.0;
      peak = std::max(peak, std::abs(a));
    }
    vanish = vanish && std::abs(correction_closed_form(in, kappa, 0.0)) <= 1e-12 * peak &&
             std::abs(correction_closed_form_rate(in, kappa, 0.0)) * T <= 1e-10 * peak;
    residual = std::max(residual, closed_form_ode_residual(in, kappa, 4 * T, 400));
    discrepancy = std::max(discrepancy, compare_closed_form(in, kappa, 4 * T, T / 2000).relative());
  }
  report(9, linear && vanish && residual <= 1e-6, "first-order correction",
         std::string("linear in kappa ") + (linear ? "exactly" : "NO") + ", value and slope at entry " +
             (vanish ? "vanish" : "DO NOT vanish") + fmt(", ODE residual %.2e (tol 1e-6)", residual) +
             fmt(", closed form vs RK4 %.2e of peak", discrepancy));
}

void criterion_10() {
  const MomentState s = free_state(packet(0.574), 0.43, -1.2 * ns, m);
  bool exact = true;
  for (double t : {0.3, 1.0, 4.0}) {
    const MomentState d = propagate_drift(s, t * ns, m);
    const MomentState l = propagate_lens_homogeneous(free_state(packet(0.622), 0.43, ns, m), lens(85, 10), t * ns, m);
    exact = exact && d.l == s.l && l.l == s.l && d.u_perp_sq == s.u_perp_sq &&
            l.u_perp_sq == transverse_velocity_sq(packet(0.622), m);
  }
  // drift into the focus, direct-capture lens, drift out
  const LensConfig cap = design_direct_capture(free_state(packet(0.574), 0.43, 0, m), 0, 6 * ns, m);
  Beamline b;
  b.packet = packet(0.574);
  b.p0 = 0.43;
  b.start_time = -1.2 * ns;
  b.elements = {Drift{1.2 * ns}, cap, Drift{1.7 * ns}};
  const Trajectory t = run(b, 0.01 * ns);
  const double e0 = emittance(t.samples.front().state);
  double emit = 0;
  for (const auto& smp : t.samples) {
    emit = std::max(emit, std::abs(emittance(smp.state) / e0 - 1));
    exact = exact && smp.state.l == -4;
  }
  const MomentState q = free_state(packet(0.622), 0.43, ns, m);
  const LensConfig k = lens(85, 30);
  const double T = 2 * std::numbers::pi / k.omega0(m);
  double period = 0;
  for (int r = 1; r <= 5; ++r) period = std::max(period, rel(propagate_lens_homogeneous(q, k, r * T, m).rho_sq, q.rho_sq));
  report(10, exact && emit <= 1e-10 && period <= 1e-12, "conservation",
         std::string("OAM and <u^2> ") + (exact ? "exact" : "NOT exact") +
             fmt(", emittance over drift/capture/drift %.2e (tol 1e-10)", emit) +
             fmt(", periodicity %.2e (tol 1e-12)", period));
}

void criterion_11() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.02, 1.0), sym(-1.0, 1.0);
  double worst = 0;
  for (const LensConfig& k : {lens(85, 1, 1e4, 0.081), lens(85, 1, 1e4, -0.081), lens(100, 1, 2.5e7, 0.15),
                              LensConfig::from_lab(10, 0, 0.2, 0, 0.5, 1e-9),
                              LensConfig::from_lab(1e4, 1e6, 0, -0.2, 3.0, 1e-9)}) {
    for (int i = 0; i < 10; ++i) {
      worst = std::max(worst, maxwell_residual(k, unit(rng) * k.length, sym(rng) * k.length).max_field());
    }
  }
  report(11, worst <= 1e-12, "Maxwell residuals of the linearized fields",
         fmt("worst %.2e over 5 lenses x 10 probes (tol 1e-12)", worst));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d of 11 criteria pass\n", 11 - failures);
  return failures ? 1 : 0;
}
