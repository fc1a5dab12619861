#pragma once

// Independent numerical paths used to cross-check the closed forms:
// fixed-step RK4 for the moment ODE systems, and quadrature plus exact integer
// evaluation of the Laguerre mode integrals Y_m and X_{m,k}.

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "vlens/errors.hpp"

namespace vlens {

__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;

// ---------------------------------------------------------------- RK4

template <typename Scalar, int N>
using OdeVector = Eigen::Matrix<Scalar, N, 1>;

template <typename Scalar, int N>
struct OdeSpec {
  std::function<OdeVector<Scalar, N>(Scalar, const OdeVector<Scalar, N>&)> rhs;
  OdeVector<Scalar, N> initial;
  Scalar t0 = 0;
  Scalar span = 0;
  Scalar step = 0;
};

template <typename Scalar, int N>
struct OdeSample {
  Scalar t;
  OdeVector<Scalar, N> y;
};

/// Classical RK4. The span is cut into ceil(span/step) equal steps and the
/// state is recorded after every one of them (plus the initial point).
template <typename Scalar, int N>
std::vector<OdeSample<Scalar, N>> integrate_rk4(const OdeSpec<Scalar, N>& spec) {
  using std::ceil;
  using std::isfinite;
  if (!(spec.step > 0)) throw DomainError("RK4 step must be positive");
  if (!(spec.span >= 0)) throw DomainError("RK4 span must be non-negative");
  const long steps = spec.span == 0 ? 0 : long(ceil(spec.span / spec.step * (1 - Scalar(1e-12))));
  const Scalar h = steps ? spec.span / Scalar(steps) : Scalar(0);
  std::vector<OdeSample<Scalar, N>> out;
  out.reserve(steps + 1);
  OdeVector<Scalar, N> y = spec.initial;
  out.push_back({spec.t0, y});
  for (long i = 0; i < steps; ++i) {
    const Scalar t = spec.t0 + Scalar(i) * h;
    const auto k1 = spec.rhs(t, y);
    const auto k2 = spec.rhs(t + h / 2, (y + h / 2 * k1).eval());
    const auto k3 = spec.rhs(t + h / 2, (y + h / 2 * k2).eval());
    const auto k4 = spec.rhs(t + h, (y + h * k3).eval());
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    const Scalar tn = spec.t0 + Scalar(i + 1) * h;
    for (int j = 0; j < y.size(); ++j) {
      if (!isfinite(double(y[j]))) {
        throw IntegrationError("non-finite state at t = " + std::to_string(double(tn)), double(tn));
      }
    }
    out.push_back({tn, y});
  }
  return out;
}

/// Moment system (rho^2, d rho^2/dt, u^2, p_z, z) in a homogeneous lens of
/// cyclotron frequency omega (omega = 0 is free space).
OdeSpec<double, 5> moment_system(double omega, int l, double mass, double e_field);

// ---------------------------------------------------------------- Laguerre

/// Generalized Laguerre L_n^alpha(y) by the three-term recurrence.
template <typename Scalar>
Scalar laguerre(int n, int alpha, Scalar y) {
  if (n < 0) return Scalar(0);
  Scalar prev(1);
  if (n == 0) return prev;
  Scalar cur = Scalar(1 + alpha) - y;
  for (int k = 1; k < n; ++k) {
    const Scalar next = ((Scalar(2 * k + 1 + alpha) - y) * cur - Scalar(k + alpha) * prev) / Scalar(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// d^k/dy^k L_n^alpha = (-1)^k L_{n-k}^{alpha+k}.
template <typename Scalar>
Scalar laguerre_derivative(int n, int alpha, int k, Scalar y) {
  if (k > n) return Scalar(0);
  const Scalar v = laguerre(n - k, alpha + k, y);
  return (k % 2) ? -v : v;
}

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Nodes by Newton iteration on P_points, weights 2 / ((1 - x^2) P'(x)^2).
GaussLegendreRule gauss_legendre(int points);

/// Composite Gauss-Legendre over [a, b] with equal panels.
double integrate_composite(const std::function<double(double)>& f, double a, double b, int panels,
                           const GaussLegendreRule& rule);

struct QuadratureSpec {
  std::function<double(double)> integrand;  // on [0, inf), decays like exp(-y) poly(y)
  double y_max = 80;
  int panels = 64;
};

double integrate(const QuadratureSpec& spec);

inline constexpr int lg_index_limit = 12;

/// max(80, 20 + 10 (n + |l|)); the exp(-y) tail beyond it is below 1e-16 of the peak.
double lg_y_max(int n, int l);

/// Y_m (k_deriv = 0) or X_{m,k} (k_deriv > 0) for the mode (n, |l|) by quadrature:
///   Y_m     = int y^m (L_n^|l|)^2 e^-y dy
///   X_{m,k} = int y^m L_n^|l| d^k L_n^|l| / dy^k e^-y dy
double lg_quadrature(int n, int l, int m_power, int k_deriv);

/// The same integrals evaluated exactly from the Laguerre power series.
/// Throws DomainError if an intermediate would overflow 128 bits.
int128 lg_moment_exact(int n, int l, int m_power, int k_deriv);

std::string to_string(int128 v);

int128 factorial_i128(int k);
int128 binomial_i128(int n, int k);

/// Y_l = l! C(n + l, n).
int128 y_l_identity(int n, int l);
/// Printed value -(l + n)! / (n - 1)! for X_{l-1,1}, n >= 1.
int128 x_lm1_printed(int n, int l);

/// m^2 sigma^2 <u^2> assembled from the mode integrals (|l| = a):
///   [2 a^2 Y_{a-1} - 2 a Y_a + Y_{a+1} - 4 X_{a,1} - 4 X_{a+1,2}] / Y_a
double velocity_assembly_quadrature(int n, int l);
/// m^2 sigma^2 <u^2> from int |grad psi|^2 / int |psi|^2 with y = rho^2/sigma^2.
double velocity_gradient_quadrature(int n, int l);

/// Generating function U_alpha(s, y) = exp(-y s / (1 - s)) / (1 - s)^(alpha + 1)
/// and its partial sum sum_{k <= terms} s^k L_k^alpha(y).
double laguerre_generating(int alpha, double s, double y);
double laguerre_partial_sum(int alpha, double s, double y, int terms);

/// Z_{alpha,beta,p}(s1, s2) = int y^p U_alpha(s1, y) U_beta(s2, y) e^-y dy
///                        = p! (1-s1)^(p-alpha) (1-s2)^(p-beta) / (1 - s1 s2)^(p+1).
double z_closed_form(int alpha, int beta, int p, double s1, double s2);
/// Same integral with both generating functions replaced by their partial sums.
double z_from_partial_sums(int alpha, int beta, int p, double s1, double s2, int terms);
/// Coefficient of (s1 s2)^n in Z_{alpha,alpha,alpha}: alpha! C(alpha + n, n), equal to Y_alpha.
double z_diagonal_coefficient(int alpha, int n);

}  // namespace vlens
