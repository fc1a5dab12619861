#include "vlens/packet.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "vlens/errors.hpp"
#include "vlens/units.hpp"

namespace vlens {

void LGPacket::validate() const {
  if (n < 0) throw DomainError("radial quantum number must be non-negative");
  if (!std::isfinite(sigma_r) || sigma_r <= 0) throw DomainError("sigma_r must be positive");
  if (!std::isfinite(focus_time)) throw DomainError("focus time must be finite");
}

int LGPacket::mode_index() const { return 2 * n + std::abs(l) + 1; }

OpticalFunctions optical_functions(const LGPacket& packet, double t, double mass) {
  packet.validate();
  if (!std::isfinite(t)) throw DomainError("time must be finite");
  const double td = diffraction_time_natural(packet.sigma_r, mass);
  const double tau = (t - packet.focus_time) / td;
  OpticalFunctions out;
  out.sigma_perp_sq = packet.sigma_r * packet.sigma_r * (1.0 + tau * tau);
  out.gouy_phase = packet.mode_index() * std::atan(tau);
  out.curvature_sq = tau == 0.0 ? std::numeric_limits<double>::infinity() : out.sigma_perp_sq / tau;
  return out;
}

double transverse_velocity_sq(const LGPacket& packet, double mass) {
  packet.validate();
  const double ms = mass * packet.sigma_r;
  return packet.mode_index() / (ms * ms);
}

double rho_sq_free(const LGPacket& packet, double t, double mass) {
  const double u2 = transverse_velocity_sq(packet, mass);
  const double dt = t - packet.focus_time;
  return packet.sigma_r * packet.sigma_r + u2 * dt * dt;
}

}  // namespace vlens
