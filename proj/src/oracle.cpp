#include "vlens/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace vlens {

OdeSpec<double, 5> moment_system(double omega, int l, double mass, double e_field) {
  OdeSpec<double, 5> spec;
  const double w2 = omega * omega;
  const double drift = 2.0 * omega * l / mass;
  spec.rhs = [=](double, const OdeVector<double, 5>& y) {
    OdeVector<double, 5> d;
    d[0] = y[1];
    d[1] = 2.0 * y[2] - w2 * y[0] - drift;
    d[2] = 0.0;
    d[3] = e_field;
    d[4] = y[3] / mass;
    return d;
  };
  return spec;
}

GaussLegendreRule gauss_legendre(int points) {
  if (points < 1) throw DomainError("Gauss-Legendre needs at least one point");
  GaussLegendreRule rule;
  rule.nodes.assign(points, 0.0);
  rule.weights.assign(points, 0.0);
  if (points == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < (points + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 1;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = rule.weights[points - 1 - i] = 2.0 / ((1 - x * x) * dp * dp);
  }
  return rule;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b, int panels,
                           const GaussLegendreRule& rule) {
  if (panels < 1) throw DomainError("need at least one panel");
  const double width = (b - a) / panels;
  double total = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double part = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      part += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
    }
    total += 0.5 * width * part;
  }
  return total;
}

double integrate(const QuadratureSpec& spec) {
  static const GaussLegendreRule rule = gauss_legendre(24);
  return integrate_composite(spec.integrand, 0.0, spec.y_max, spec.panels, rule);
}

double lg_y_max(int n, int l) { return std::max(80.0, 20.0 + 10.0 * (n + std::abs(l))); }

namespace {

void guard(int n, int l, int m_power, int k_deriv) {
  if (n < 0 || n > lg_index_limit || std::abs(l) > lg_index_limit) {
    throw DomainError("mode integrals limited to 0 <= n, |l| <= 12");
  }
  if (m_power < 0 || k_deriv < 0) throw DomainError("m and k must be non-negative");
}

}  // namespace

double lg_quadrature(int n, int l, int m_power, int k_deriv) {
  guard(n, l, m_power, k_deriv);
  const int a = std::abs(l);
  QuadratureSpec spec;
  spec.y_max = lg_y_max(n, l);
  spec.panels = int(spec.y_max / 2);
  spec.integrand = [=](double y) {
    const double base = laguerre(n, a, y);
    const double other = k_deriv == 0 ? base : laguerre_derivative(n, a, k_deriv, y);
    return std::pow(y, m_power) * base * other * std::exp(-y);
  };
  return integrate(spec);
}

namespace {

int128 mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw DomainError("128-bit overflow in exact mode integral");
  return r;
}

int128 add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw DomainError("128-bit overflow in exact mode integral");
  return r;
}

}  // namespace

int128 factorial_i128(int k) {
  if (k < 0) throw DomainError("negative factorial");
  int128 r = 1;
  for (int i = 2; i <= k; ++i) r = mul(r, i);
  return r;
}

int128 binomial_i128(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  int128 r = 1;
  for (int i = 1; i <= k; ++i) r = mul(r, n - k + i) / i;
  return r;
}

int128 lg_moment_exact(int n, int l, int m_power, int k_deriv) {
  guard(n, l, m_power, k_deriv);
  const int a = std::abs(l);
  if (k_deriv > n) return 0;
  const int n2 = n - k_deriv;
  int128 total = 0;
  for (int i = 0; i <= n; ++i) {
    const int128 ci = binomial_i128(n + a, n - i);
    for (int j = 0; j <= n2; ++j) {
      const int128 dj = binomial_i128(n + a, n2 - j);
      // (i + j + m)! / (i! j!) = C(i + j, i) (i + j + 1) ... (i + j + m)
      int128 w = binomial_i128(i + j, i);
      for (int q = i + j + 1; q <= i + j + m_power; ++q) w = mul(w, q);
      int128 term = mul(mul(ci, dj), w);
      if ((i + j) % 2) term = -term;
      total = add(total, term);
    }
  }
  return (k_deriv % 2) ? -total : total;
}

std::string to_string(int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  uint128 u = neg ? -(uint128)v : (uint128)v;
  std::string s;
  while (u) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

int128 y_l_identity(int n, int l) {
  const int a = std::abs(l);
  return mul(factorial_i128(a), binomial_i128(n + a, n));
}

int128 x_lm1_printed(int n, int l) {
  if (n < 1) throw DomainError("X_{l-1,1} identity stated for n >= 1");
  return -(factorial_i128(std::abs(l) + n) / factorial_i128(n - 1));
}

double velocity_assembly_quadrature(int n, int l) {
  const int a = std::abs(l);
  const double ya = lg_quadrature(n, a, a, 0);
  const double low = a > 0 ? 2.0 * a * a * lg_quadrature(n, a, a - 1, 0) : 0.0;
  const double num = low - 2.0 * a * ya + lg_quadrature(n, a, a + 1, 0) -
                     4.0 * lg_quadrature(n, a, a, 1) - 4.0 * lg_quadrature(n, a, a + 1, 2);
  return num / ya;
}

double velocity_gradient_quadrature(int n, int l) {
  guard(n, l, 0, 0);
  const int a = std::abs(l);
  QuadratureSpec num, den;
  num.y_max = den.y_max = lg_y_max(n, l);
  num.panels = den.panels = int(num.y_max / 2);
  // psi = y^(a/2) L e^(-y/2); |grad psi|^2 rho d rho collapses to
  // y^(a-1) e^-y [4 g^2 + a^2 L^2] with g = (a/2) L + y (L' - L/2).
  num.integrand = [=](double y) {
    const double L = laguerre(n, a, y);
    const double dL = laguerre_derivative(n, a, 1, y);
    if (a == 0) {
      const double h = dL - 0.5 * L;
      return 4.0 * y * h * h * std::exp(-y);
    }
    const double g = 0.5 * a * L + y * (dL - 0.5 * L);
    return std::pow(y, a - 1) * (4.0 * g * g + double(a) * a * L * L) * std::exp(-y);
  };
  den.integrand = [=](double y) {
    const double L = laguerre(n, a, y);
    return std::pow(y, a) * L * L * std::exp(-y);
  };
  return integrate(num) / integrate(den);
}

double laguerre_generating(int alpha, double s, double y) {
  if (!(std::abs(s) < 1)) throw DomainError("generating function needs |s| < 1");
  return std::exp(-y * s / (1 - s)) / std::pow(1 - s, alpha + 1);
}

double laguerre_partial_sum(int alpha, double s, double y, int terms) {
  // Run the recurrence once, accumulating the series.
  double prev = 1, sum = 1, sk = 1;
  if (terms == 0) return sum;
  double cur = 1 + alpha - y;
  sk *= s;
  sum += sk * cur;
  for (int k = 1; k < terms; ++k) {
    const double next = ((2 * k + 1 + alpha - y) * cur - (k + alpha) * prev) / (k + 1);
    prev = cur;
    cur = next;
    sk *= s;
    sum += sk * cur;
  }
  return sum;
}

double z_closed_form(int alpha, int beta, int p, double s1, double s2) {
  return std::tgamma(p + 1.0) * std::pow(1 - s1, p - alpha) * std::pow(1 - s2, p - beta) /
         std::pow(1 - s1 * s2, p + 1);
}

double z_from_partial_sums(int alpha, int beta, int p, double s1, double s2, int terms) {
  QuadratureSpec spec;
  spec.y_max = 200;
  spec.panels = 200;
  spec.integrand = [=](double y) {
    return std::pow(y, p) * laguerre_partial_sum(alpha, s1, y, terms) *
           laguerre_partial_sum(beta, s2, y, terms) * std::exp(-y);
  };
  return integrate(spec);
}

double z_diagonal_coefficient(int alpha, int n) {
  // Z_{a,a,a} = a! / (1 - s1 s2)^(a+1) = a! sum_k C(a + k, k) (s1 s2)^k
  return double(factorial_i128(alpha)) * double(binomial_i128(alpha + n, n));
}

}  // namespace vlens
