#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vlens/errors.hpp"
#include "vlens/oracle.hpp"
#include "vlens/packet.hpp"
#include "vlens/units.hpp"

using namespace vlens;

namespace {
const double m = codata::electron_mass_eV;
LGPacket make(int n, int l, double sigma_um, double t0_ns = 0) {
  return {n, l, units::length_to_natural(sigma_um * 1e-6), units::time_to_natural(t0_ns * 1e-9)};
}
}  // namespace

TEST_CASE("optical functions") {
  const LGPacket p = make(1, -2, 0.574, 0.3);
  const double td = diffraction_time_natural(p.sigma_r, m);
  const auto at_focus = optical_functions(p, p.focus_time, m);
  CHECK(at_focus.gouy_phase == 0.0);
  CHECK(at_focus.sigma_perp_sq == doctest::Approx(p.sigma_r * p.sigma_r).epsilon(1e-15));
  CHECK(std::isinf(at_focus.curvature_sq));

  const auto one = optical_functions(p, p.focus_time + td, m);
  CHECK(one.gouy_phase == doctest::Approx(p.mode_index() * std::numbers::pi / 4).epsilon(1e-14));
  CHECK(one.sigma_perp_sq == doctest::Approx(2 * p.sigma_r * p.sigma_r).epsilon(1e-14));
  CHECK(one.curvature_sq == doctest::Approx(one.sigma_perp_sq).epsilon(1e-14));

  const auto far = optical_functions(p, p.focus_time + 1e9 * td, m);
  CHECK(far.gouy_phase == doctest::Approx(p.mode_index() * std::numbers::pi / 2).epsilon(1e-8));

  double last = -10;
  for (int k = -20; k <= 20; ++k) {
    const double g = optical_functions(p, p.focus_time + 0.3 * k * td, m).gouy_phase;
    CHECK(g > last);
    last = g;
  }
  CHECK_THROWS_AS(optical_functions(p, std::nan(""), m), DomainError);
}

TEST_CASE("free transverse velocity") {
  const LGPacket g = make(0, 0, 0.574);
  const double s2 = g.sigma_r * g.sigma_r;
  CHECK(transverse_velocity_sq(g, m) == doctest::Approx(1 / (m * m * s2)).epsilon(1e-15));
  CHECK(transverse_velocity_sq(make(0, -4, 0.574), m) == doctest::Approx(5 / (m * m * s2)).epsilon(1e-15));
  CHECK(transverse_velocity_sq(make(1, 2, 0.574), m) == doctest::Approx(5 / (m * m * s2)).epsilon(1e-15));
  for (int l = 0; l <= 6; ++l) {
    CHECK(transverse_velocity_sq(make(2, l, 0.6), m) == transverse_velocity_sq(make(2, -l, 0.6), m));
  }
  CHECK_THROWS_AS(transverse_velocity_sq(make(-1, 0, 0.5), m), DomainError);
  CHECK_THROWS_AS(transverse_velocity_sq(make(0, 0, 0.0), m), DomainError);
}

TEST_CASE("free expansion") {
  const LGPacket p = make(0, -4, 0.622);
  CHECK(rho_sq_free(p, p.focus_time, m) == p.sigma_r * p.sigma_r);
  const double r1 = units::length_from_natural(1.0);
  const double at1 = rho_sq_free(p, units::time_to_natural(1e-9), m) * r1 * r1;
  CHECK(at1 == doctest::Approx(5.60e-13).epsilon(2e-3));
  const double s2 = p.sigma_r * p.sigma_r;
  const double t = units::time_to_natural(0.7e-9);
  CHECK(rho_sq_free(p, 2 * t, m) - s2 == doctest::Approx(4 * (rho_sq_free(p, t, m) - s2)).epsilon(1e-14));
}

TEST_CASE("closed form against mode-integral quadrature") {
  for (int n = 0; n <= 5; ++n) {
    for (int l = -5; l <= 5; ++l) {
      const double closed = transverse_velocity_sq(make(n, l, 1.0), 1.0) *
                            std::pow(units::length_to_natural(1e-6), 2);
      CHECK(velocity_assembly_quadrature(n, l) == doctest::Approx(closed).epsilon(1e-10));
      CHECK(velocity_gradient_quadrature(n, l) == doctest::Approx(closed).epsilon(1e-10));
    }
  }
}

TEST_CASE("mode-integral identities") {
  for (int n = 0; n <= 8; ++n) {
    for (int l = 0; l <= 8; ++l) {
      CHECK(lg_moment_exact(n, l, l, 0) == y_l_identity(n, l));
      if (n >= 1 && l >= 1) {
        CHECK(lg_moment_exact(n, l, l, 1) == 0);
        CHECK(lg_moment_exact(n, l, l + 1, 2) == 0);
        // X_{l-1,1} = -(n + l)! / ((n - 1)! l (l + 1))
        const int128 expected = -(factorial_i128(n + l) / (factorial_i128(n - 1) * l * (l + 1)));
        CHECK(lg_moment_exact(n, l, l - 1, 1) == expected);
      }
    }
  }
}
