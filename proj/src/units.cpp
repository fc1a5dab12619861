#include "vlens/units.hpp"

#include <cmath>
#include <string>

#include "vlens/errors.hpp"

namespace vlens {

void Particle::validate() const {
  if (!(std::isfinite(mass) && mass > 0)) {
    throw DomainError("particle mass must be positive, got " + std::to_string(mass));
  }
  if (charge_sign != -1 && charge_sign != 1) {
    throw DomainError("charge_sign must be -1 or +1, got " + std::to_string(charge_sign));
  }
}

Constants constants_for(const Particle& particle) {
  particle.validate();
  const double lambda_c = codata::hbar_c_eV_m / particle.mass;
  return {lambda_c, lambda_c / codata::speed_of_light};
}

double cyclotron_frequency_natural(double eH0, double mass) {
  if (!std::isfinite(eH0) || eH0 < 0) {
    throw DomainError("magnetic field must be finite and non-negative");
  }
  return eH0 / mass;
}

double magnetic_radius_sq_natural(double eH0) {
  if (!std::isfinite(eH0) || eH0 <= 0) {
    throw DomainError("magnetic radius requires H0 > 0");
  }
  return 4.0 / eH0;
}

double diffraction_time_natural(double sigma_r, double mass) {
  if (!std::isfinite(sigma_r) || sigma_r <= 0) {
    throw DomainError("diffraction time requires sigma_r > 0");
  }
  return mass * sigma_r * sigma_r;
}

double cyclotron_frequency(double H0_gauss, const Particle& particle) {
  particle.validate();
  const double omega = cyclotron_frequency_natural(units::magnetic_to_natural(H0_gauss), particle.mass);
  return units::angular_frequency_from_natural(omega);
}

double magnetic_radius(double H0_gauss, const Particle& particle) {
  particle.validate();
  if (!std::isfinite(H0_gauss) || H0_gauss <= 0) {
    throw DomainError("magnetic radius requires H0 > 0");
  }
  return units::length_from_natural(
      std::sqrt(magnetic_radius_sq_natural(units::magnetic_to_natural(H0_gauss))));
}

double diffraction_time(double sigma_r_m, const Particle& particle) {
  particle.validate();
  if (!std::isfinite(sigma_r_m) || sigma_r_m <= 0) {
    throw DomainError("diffraction time requires sigma_r > 0");
  }
  return units::time_from_natural(
      diffraction_time_natural(units::length_to_natural(sigma_r_m), particle.mass));
}

double rayleigh_length(double mean_velocity, double sigma_r_m, const Particle& particle) {
  if (!(mean_velocity > 0 && mean_velocity < 1)) {
    throw DomainError("mean velocity must lie in (0, 1) as a fraction of c");
  }
  const Constants k = constants_for(particle);
  if (!std::isfinite(sigma_r_m) || sigma_r_m <= 0) {
    throw DomainError("Rayleigh length requires sigma_r > 0");
  }
  // <u> t_c sigma^2 / lambda_c^2, with <u> t_c in metres once multiplied by c.
  return mean_velocity * codata::speed_of_light * k.compton_time * sigma_r_m * sigma_r_m /
         (k.compton_length * k.compton_length);
}

}  // namespace vlens
