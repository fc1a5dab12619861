#include "vlens/elements.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "vlens/errors.hpp"
#include "vlens/units.hpp"

namespace vlens {

void Drift::validate() const {
  if (!std::isfinite(duration) || duration <= 0) throw ConfigError("drift duration must be positive");
}

LensConfig LensConfig::from_lab(double H0_gauss, double E0_V_per_m, double kappa_M, double kappa_E,
                                double L_m, double duration_s, int n_prime) {
  LensConfig lens;
  lens.field = units::magnetic_to_natural(H0_gauss);
  lens.e_field = units::electric_to_natural(E0_V_per_m);
  lens.kappa_M = kappa_M;
  lens.kappa_E = kappa_E;
  lens.length = units::length_to_natural(L_m);
  lens.duration = units::time_to_natural(duration_s);
  lens.n_prime = n_prime;
  return lens;
}

void LensConfig::validate() const {
  if (!std::isfinite(field) || field <= 0) throw ConfigError("lens H0 must be positive");
  if (!std::isfinite(e_field) || e_field < 0) throw ConfigError("lens E0 must be non-negative");
  if (!std::isfinite(length) || length <= 0) throw ConfigError("lens L must be positive");
  if (!std::isfinite(duration) || duration <= 0) throw ConfigError("lens duration must be positive");
  if (n_prime < 0) throw ConfigError("lens n_prime must be non-negative");
  if (!(std::abs(kappa_M) <= kappa_hard_limit) || !(std::abs(kappa_E) <= kappa_hard_limit)) {
    throw ConfigError("|kappa| above " + std::to_string(kappa_hard_limit) +
                      " is outside first-order theory");
  }
}

bool LensConfig::kappa_warning() const {
  return std::abs(kappa_M) > kappa_soft_limit || std::abs(kappa_E) > kappa_soft_limit;
}

FieldSample fields_at(const LensConfig& lens, double rho, double z) {
  const auto f = field_components<double>(lens, rho, z);
  const bool outside = std::abs(rho) > lens.length || std::abs(z) > lens.length;
  return {f.E_rho, f.E_z, f.H_rho, f.H_z, outside};
}

PotentialValues<double> potentials_at(const LensConfig& lens, double rho, double z) {
  return potential_values<double>(lens, rho, z);
}

double MaxwellResidual::max_field() const { return std::max({div_E, curl_E, div_H, curl_H}); }
double MaxwellResidual::max_potential() const { return std::max(potential_E, potential_H); }

namespace {

using ld = long double;

ld scale_of(ld a, ld b) {
  const ld s = std::sqrt(a * a + b * b);
  return s > 0 ? s : 1;
}

}  // namespace

MaxwellResidual maxwell_residual(const LensConfig& lens, double rho_d, double z_d, double rel_step) {
  if (!(rho_d > 0)) throw DomainError("cylindrical divergence needs rho > 0");
  const ld rho = rho_d, z = z_d;
  const ld L = lens.length;
  const ld h = L * ld(rel_step);
  auto F = [&](ld r, ld zz) { return field_components<ld>(lens, r, zz); };
  auto P = [&](ld r, ld zz) { return potential_values<ld>(lens, r, zz); };

  const auto c = F(rho, z);
  const auto rp = F(rho + h, z), rm = F(rho - h, z);
  const auto zp = F(rho, z + h), zm = F(rho, z - h);
  const ld two_h = 2 * h;

  // div F = (1/rho) d(rho F_rho)/drho + dF_z/dz ; curl_phi F = dF_rho/dz - dF_z/drho
  const ld divE = ((rho + h) * rp.E_rho - (rho - h) * rm.E_rho) / (two_h * rho) +
                  (zp.E_z - zm.E_z) / two_h;
  const ld curlE = (zp.E_rho - zm.E_rho) / two_h - (rp.E_z - rm.E_z) / two_h;
  const ld divH = ((rho + h) * rp.H_rho - (rho - h) * rm.H_rho) / (two_h * rho) +
                  (zp.H_z - zm.H_z) / two_h;
  const ld curlH = (zp.H_rho - zm.H_rho) / two_h - (rp.H_z - rm.H_z) / two_h;

  const ld sE = scale_of(c.E_rho, c.E_z);
  const ld sH = scale_of(c.H_rho, c.H_z);

  // E = -grad phi ; H_rho = -dA/dz, H_z = (1/rho) d(rho A)/drho
  const auto prp = P(rho + h, z), prm = P(rho - h, z), pzp = P(rho, z + h), pzm = P(rho, z - h);
  const ld Er = -(prp.phi - prm.phi) / two_h;
  const ld Ez = -(pzp.phi - pzm.phi) / two_h;
  const ld Hr = -(pzp.A_phi - pzm.A_phi) / two_h;
  const ld Hz = ((rho + h) * prp.A_phi - (rho - h) * prm.A_phi) / (two_h * rho);
  const ld dE = std::sqrt((Er - c.E_rho) * (Er - c.E_rho) + (Ez - c.E_z) * (Ez - c.E_z));
  const ld dH = std::sqrt((Hr - c.H_rho) * (Hr - c.H_rho) + (Hz - c.H_z) * (Hz - c.H_z));

  MaxwellResidual r;
  r.div_E = double(std::abs(divE) * L / sE);
  r.curl_E = double(std::abs(curlE) * L / sE);
  r.div_H = double(std::abs(divH) * L / sH);
  r.curl_H = double(std::abs(curlH) * L / sH);
  r.potential_E = double(dE / sE);
  r.potential_H = double(dH / sH);
  return r;
}

double omega_c_of_z(const LensConfig& lens, double z, double mass) {
  if (!std::isfinite(z)) throw DomainError("z must be finite");
  return lens.omega0(mass) * (1.0 + lens.kappa_M * z / lens.length);
}

double landau_rho_sq_st(const LensConfig& lens, int n_prime, int l) {
  if (n_prime < 0) throw DomainError("n' must be non-negative");
  return magnetic_radius_sq_natural(lens.field) / 2.0 * (2 * n_prime + std::abs(l) + 1);
}

double landau_energy(const LensConfig& lens, int n_prime, int l, double mass) {
  if (n_prime < 0) throw DomainError("n' must be non-negative");
  if (!(lens.field > 0)) throw DomainError("Landau energy requires H0 > 0");
  return lens.omega0(mass) / 2.0 * (2 * n_prime + std::abs(l) + l + 1);
}

}  // namespace vlens
