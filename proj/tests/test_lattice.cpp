#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vlens/errors.hpp"
#include "vlens/lattice.hpp"

using namespace vlens;

namespace {
const double m = codata::electron_mass_eV;
const double ns = units::time_to_natural(1e-9);

LGPacket make(double sigma_um, int n = 0, int l = -4) {
  return {n, l, units::length_to_natural(sigma_um * 1e-6), 0};
}
LensConfig lens(double H, double duration_ns, int n_prime = 0) {
  return LensConfig::from_lab(H, 0, 0, 0, 0.1, duration_ns * 1e-9, n_prime);
}
Beamline line(double sigma_um, std::vector<Element> els) {
  Beamline b;
  b.packet = make(sigma_um);
  b.p0 = 0.43;
  b.elements = std::move(els);
  return b;
}
int count(const Trajectory& t, EventKind k) {
  int c = 0;
  for (const auto& e : t.events) c += e.kind == k;
  return c;
}
}  // namespace

TEST_CASE("drift-only line reproduces the free packet") {
  Beamline b = line(0.574, {Drift{2 * ns}, Drift{1.5 * ns}});
  b.start_time = -1 * ns;
  const Trajectory t = run(b, 0.05 * ns);
  REQUIRE(t.samples.size() > 10);
  for (const auto& s : t.samples) {
    CHECK(s.state.rho_sq == doctest::Approx(rho_sq_free(b.packet, s.state.t, m)).epsilon(1e-12));
  }
  CHECK(t.final_state.t == doctest::Approx(2.5 * ns).epsilon(1e-14));
  CHECK(count(t, EventKind::focal_point) == 1);
  CHECK(count(t, EventKind::boundary) == 2);
  CHECK_FALSE(t.truncated);
}

TEST_CASE("samples are strictly increasing in time") {
  const Trajectory t = run(line(0.574, {Drift{2 * ns}, lens(100, 0.5), Drift{0.4 * ns}, lens(100, 7.2)}), 0.01 * ns);
  for (std::size_t i = 1; i < t.samples.size(); ++i) CHECK(t.samples[i].state.t > t.samples[i - 1].state.t);
  for (std::size_t i = 1; i < t.events.size(); ++i) CHECK(t.events[i].t >= t.events[i - 1].t);
}

TEST_CASE("focal point between two lenses") {
  const Trajectory t = run(line(0.574, {Drift{2 * ns}, lens(100, 0.5), Drift{0.4 * ns}, lens(100, 7.2)}), 0.01 * ns);
  int focal_in_gap = 0;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::focal_point && e.element_index == 2) {
      ++focal_in_gap;
      CHECK(e.t / ns == doctest::Approx(2.840).epsilon(1e-3));
    }
  }
  CHECK(focal_in_gap == 1);
  REQUIRE(t.element_entry.size() == 4);
  const TransportReport r = transport_check(t.element_entry[3], lens(100, 7.2), m, 0);
  CHECK(r.transportable);
  CHECK_FALSE(t.truncated);
  // exits of the previous element and entries of the next coincide
  for (std::size_t i = 1; i < t.element_entry.size(); ++i) CHECK(t.element_entry[i].t > t.element_entry[i - 1].t);
}

TEST_CASE("over-focusing truncates the run") {
  const Trajectory t = run(line(0.574, {Drift{2.1 * ns}, lens(100, 7.2)}), 0.01 * ns);
  CHECK(t.truncated);
  CHECK(count(t, EventKind::overfocus) == 1);
  CHECK((t.samples.back().flags & OVERFOCUS) != 0u);
  CHECK(t.samples.back().state.rho_sq == doctest::Approx(1 / (m * m)).epsilon(1e-6));
  const Trajectory ok = run(line(0.622, {Drift{2.1 * ns}, lens(85, 8.4)}), 0.01 * ns);
  CHECK_FALSE(ok.truncated);
  CHECK(count(ok, EventKind::overfocus) == 0);
}

TEST_CASE("halving the sample step keeps the event classification") {
  const Beamline b = line(0.574, {Drift{2 * ns}, lens(100, 0.5), Drift{0.4 * ns}, lens(100, 2.0)});
  const Trajectory a = run(b, 0.02 * ns), c = run(b, 0.01 * ns);
  REQUIRE(a.events.size() == c.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].kind == c.events[i].kind);
    CHECK(a.events[i].element_index == c.events[i].element_index);
    CHECK(a.events[i].t == doctest::Approx(c.events[i].t).epsilon(1e-12));
  }
}

TEST_CASE("boundary continuity") {
  const Beamline b = line(0.574, {Drift{1 * ns}, lens(100, 1.5), Drift{1 * ns}});
  const Trajectory t = run(b, 0.01 * ns);
  REQUIRE(t.element_entry.size() == 3);
  const MomentState lens_exit = propagate_lens_homogeneous(t.element_entry[1], lens(100, 1.5), 1.5 * ns, m);
  CHECK(t.element_entry[2].rho_sq == doctest::Approx(lens_exit.rho_sq).epsilon(1e-14));
  CHECK(t.element_entry[2].drho_sq_dt == doctest::Approx(lens_exit.drho_sq_dt).epsilon(1e-14));
  CHECK(t.element_entry[2].u_perp_sq == doctest::Approx(lens_exit.u_perp_sq).epsilon(1e-14));
}

TEST_CASE("focal time finder") {
  const MomentState s = free_state(make(0.574), 0.43, -0.7 * ns, m);
  CHECK(find_focal_time(s, 2 * ns) == doctest::Approx(0.0).epsilon(1e-12).scale(ns));
  CHECK_THROWS_AS(find_focal_time(s, 0.5 * ns), NoFocusError);
  const MomentState after = free_state(make(0.574), 0.43, 0.1 * ns, m);
  CHECK_THROWS_AS(find_focal_time(after, 2 * ns), NoFocusError);
  const MomentState at = free_state(make(0.574), 0.43, 0.0, m);
  CHECK(find_focal_time(at, 1 * ns) == at.t);
}

TEST_CASE("direct capture") {
  const Beamline b = line(0.574, {Drift{1 * ns}, lens(100, 1.5), Drift{1 * ns}});
  const Trajectory t = run(b, 0.01 * ns);
  double tf = -1;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::focal_point && e.element_index == 2) tf = e.t;
  }
  REQUIRE(tf > 0);
  CHECK(tf / ns == doctest::Approx(3.1148).epsilon(1e-4));
  const MomentState f = propagate_drift(t.element_entry[2], tf - t.element_entry[2].t, m);
  const LensConfig cap = design_direct_capture(f, 0, 10 * ns, m);
  CHECK(units::magnetic_from_natural(cap.field) == doctest::Approx(84.92).epsilon(1e-3));
  // closure: the captured state is stationary
  const double T = 2 * std::numbers::pi / cap.omega0(m);
  for (int i = 1; i <= 30; ++i) {
    CHECK(std::abs(lens_rho_sq(f, cap, 3 * T * i / 30, m) / f.rho_sq - 1) <= 1e-12);
  }
  MomentState moving = f;
  moving.drho_sq_dt = 1e-3 * std::sqrt(f.rho_sq * f.u_perp_sq);
  CHECK_THROWS_AS(design_direct_capture(moving, 0, ns, m), DomainError);
  MomentState dead = f;
  dead.u_perp_sq = 0;
  CHECK_THROWS_AS(design_direct_capture(dead, 0, ns, m), NoCaptureFieldError);
}

TEST_CASE("emittance across drift, capture lens, drift") {
  const Beamline probe = line(0.574, {Drift{3 * ns}});
  const MomentState f = free_state(probe.packet, probe.p0, 0.0, m);
  const LensConfig cap = design_direct_capture(f, 0, 6 * ns, m);
  Beamline b = line(0.574, {Drift{1.2 * ns}, cap, Drift{1.7 * ns}});
  b.start_time = -1.2 * ns;
  const Trajectory t = run(b, 0.01 * ns);
  const double e0 = emittance(t.samples.front().state);
  for (const auto& s : t.samples) CHECK(std::abs(emittance(s.state) / e0 - 1) <= 1e-10);
}

TEST_CASE("matching solvers") {
  CHECK(units::magnetic_from_natural(solve_matching(make(0.574), 0)) == doctest::Approx(99.89).epsilon(5e-3));
  CHECK(units::magnetic_from_natural(solve_matching(make(0.622), 0)) == doctest::Approx(85.07).epsilon(5e-3));
  for (double s : {0.3, 0.574, 1.1}) {
    for (int l : {-4, 0, 3}) {
      const LGPacket p = make(s, 1, l);
      const double h = solve_matching(p, 2);
      CHECK(solve_matching_sigma_r(h, 1, l, 2) == doctest::Approx(p.sigma_r).epsilon(1e-12));
    }
  }
  const double h = units::magnetic_to_natural(100);
  CHECK(large_l_matched_sigma_r(h) * large_l_matched_sigma_r(h) == doctest::Approx(1 / (2 * h)).epsilon(1e-14));
  CHECK(required_radial_number({4, 105}, -4, 0) == 50);
  CHECK(required_radial_number({4, 5}, -4, 0) == 0);
  CHECK_FALSE(required_radial_number({3, 7}, -4, 0).has_value());
}

TEST_CASE("declared transition") {
  const Trajectory t = run(line(0.574, {Drift{2 * ns}, Transition{50}, lens(100, 1)}), 0.01 * ns);
  REQUIRE(t.transitions.size() == 1);
  CHECK(t.transitions[0].n_before == 0);
  CHECK(t.transitions[0].n_after == 50);
  CHECK(t.transitions[0].has_next_lens);
  CHECK(t.transitions[0].required == Rational{4, 105});
  CHECK(t.element_radial_n.back() == 50);
}

TEST_CASE("relativistic bound") {
  Beamline b = line(0.574, {Drift{1 * ns}, LensConfig::from_lab(100, 5e5, 0, 0, 0.1, 20e-9)});
  const Trajectory soft = run(b, 0.05 * ns);
  CHECK(count(soft, EventKind::relativistic_warning) == 1);
  CHECK_FALSE(soft.aborted);
  const Trajectory hard = run(b, 0.05 * ns, {true});
  CHECK(hard.aborted);
  CHECK(hard.final_state.t < soft.final_state.t);
}

TEST_CASE("validation") {
  Beamline empty = line(0.574, {});
  CHECK_THROWS_AS(run(empty, ns), ConfigError);
  CHECK_THROWS_AS(run(line(0.574, {Drift{-1}}), ns), ConfigError);
  CHECK_THROWS_AS(run(line(0.574, {Drift{1}}), 0), ConfigError);
  CHECK_THROWS_AS(run(line(0.574, {Transition{-2}}), ns), ConfigError);
}
