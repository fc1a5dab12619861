#include "vlens/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "vlens/errors.hpp"
#include "vlens/perturbation.hpp"

namespace vlens {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::boundary: return "boundary";
    case EventKind::focal_point: return "focal_point";
    case EventKind::overfocus: return "overfocus";
    case EventKind::relativistic_warning: return "relativistic_warning";
  }
  return "unknown";
}

void Beamline::validate() const {
  particle.validate();
  packet.validate();
  if (elements.empty()) throw ConfigError("beamline has no elements");
  if (!std::isfinite(p0)) throw ConfigError("p0 must be finite");
  if (!std::isfinite(start_time)) throw ConfigError("start time must be finite");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    try {
      std::visit(
          [](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Transition>) {
              if (e.n < 0) throw ConfigError("transition n must be non-negative");
            } else {
              e.validate();
            }
          },
          elements[i]);
    } catch (const ConfigError& err) {
      throw ConfigError("element " + std::to_string(i) + ": " + err.what());
    }
  }
}

double find_focal_time(const MomentState& entry, double duration, double tolerance) {
  const double d0 = entry.drho_sq_dt;
  const double slope = 2.0 * entry.u_perp_sq;
  if (d0 == 0) return entry.t;
  const double d1 = d0 + slope * duration;
  if (!(d0 < 0 && d1 >= 0)) throw NoFocusError("d<rho^2>/dt does not change sign in the segment");
  double lo = 0, hi = duration;
  const double tol = tolerance > 0 ? tolerance : duration * 1e-12;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (d0 + slope * mid < 0 ? lo : hi) = mid;
  }
  // The derivative is linear in a drift, so one Newton step lands on the root.
  double tau = 0.5 * (lo + hi);
  tau -= (d0 + slope * tau) / slope;
  return entry.t + tau;
}

namespace {

struct Runner {
  const Beamline& line;
  double dt;
  RunOptions opts;
  double mass;
  double floor;
  Trajectory traj;
  bool relativistic_seen = false;
  bool stop = false;

  void push(const MomentState& s, double rho1, int idx, unsigned flags) {
    if (relativistic(s, mass)) flags |= RELATIVISTIC;
    if (!traj.samples.empty()) {
      auto& last = traj.samples.back();
      if (s.t <= last.state.t) {
        // coincident instants: keep one sample, merge flags
        last.flags |= flags;
        return;
      }
    }
    traj.samples.push_back({s, rho1, idx, flags});
  }

  // Grid instants of the global sampling clock strictly inside (a, b).
  std::vector<double> grid(double a, double b) const {
    std::vector<double> ts;
    const double origin = line.start_time;
    long k = long(std::floor((a - origin) / dt)) + 1;
    for (;; ++k) {
      const double t = origin + double(k) * dt;
      if (t >= b - 1e-9 * dt) break;
      if (t > a + 1e-9 * dt) ts.push_back(t);
    }
    return ts;
  }

  // Time after which p_z / m exceeds the bound, within [0, duration], for a
  // uniformly accelerating segment.
  std::optional<double> relativistic_crossing(const MomentState& entry, double accel,
                                              double duration) const {
    if (relativistic(entry, mass)) return 0.0;
    if (accel <= 0) return std::nullopt;
    const double tau = (relativistic_velocity * mass - std::abs(entry.p_z)) / accel;
    if (tau >= 0 && tau <= duration) return tau;
    return std::nullopt;
  }

  // Shortens the segment at the relativistic bound when strict; records the warning once.
  double handle_relativistic(const MomentState& entry, double accel, double duration, int idx) {
    const auto tau = relativistic_crossing(entry, accel, duration);
    if (!tau) return duration;
    if (!relativistic_seen) {
      relativistic_seen = true;
      traj.events.push_back({entry.t + *tau, EventKind::relativistic_warning, idx});
    }
    if (opts.strict) {
      traj.aborted = true;
      stop = true;
      return *tau;
    }
    return duration;
  }

  void drift(const MomentState& entry, const Drift& d, int idx, MomentState& out) {
    double duration = handle_relativistic(entry, 0.0, d.duration, idx);
    std::vector<std::pair<double, unsigned>> marks;

    // Over-focus in free space: rho + d tau + u tau^2 = floor.
    const double a = entry.u_perp_sq, b = entry.drho_sq_dt, c = entry.rho_sq - floor;
    std::optional<double> over;
    if (c <= 0) {
      over = 0.0;
    } else if (b < 0 && b * b - 4 * a * c >= 0) {
      const double tau = (2 * c) / (-b + std::sqrt(b * b - 4 * a * c));
      if (tau <= duration) over = tau;
    }
    if (over) duration = *over;

    try {
      const double tf = find_focal_time(entry, duration, 1e-6 * dt);
      if (!over) marks.push_back({tf - entry.t, FOCAL});
    } catch (const NoFocusError&) {
    }
    for (double t : grid(entry.t, entry.t + duration)) marks.push_back({t - entry.t, 0u});
    std::sort(marks.begin(), marks.end());
    for (const auto& [tau, flag] : marks) {
      const MomentState s = propagate_drift(entry, tau, mass);
      if (flag & FOCAL) traj.events.push_back({s.t, EventKind::focal_point, idx});
      push(s, 0, idx, flag);
    }
    out = propagate_drift(entry, duration, mass);
    if (over) {
      out.rho_sq = std::max(out.rho_sq, floor);
      overfocus(out, 0, idx);
    } else {
      push(out, 0, idx, 0);
    }
  }

  void overfocus(const MomentState& s, double rho1, int idx) {
    traj.events.push_back({s.t, EventKind::overfocus, idx});
    push(s, rho1, idx, OVERFOCUS);
    traj.truncated = true;
    stop = true;
  }

  void lens_homogeneous(const MomentState& entry, const LensConfig& lens, int idx, MomentState& out) {
    double duration = handle_relativistic(entry, lens.e_field, lens.duration, idx);
    std::optional<double> over;
    try {
      (void)propagate_lens_homogeneous(entry, lens, duration, mass);
    } catch (const OverFocusError& e) {
      over = e.time();
      duration = e.time();
    }
    for (double t : grid(entry.t, entry.t + duration)) {
      push(propagate_lens_homogeneous(entry, lens, t - entry.t, mass), 0, idx, 0);
    }
    if (over) {
      // Evaluate without the floor check at the crossing itself.
      MomentState s = entry;
      s.set_transverse(lens_transfer(lens.omega0(mass), entry.l, mass, duration) * entry.transverse());
      s.p_z = entry.p_z + lens.e_field * duration;
      s.z = entry.z + entry.p_z * duration / mass + lens.e_field * duration * duration / (2 * mass);
      s.t = entry.t + duration;
      out = s;
      overfocus(s, 0, idx);
      return;
    }
    out = propagate_lens_homogeneous(entry, lens, duration, mass);
    push(out, 0, idx, 0);
  }

  MomentState corrected(const MomentState& entry, const ZerothOrderInputs& in,
                        double kappa, double tau, double* rho1) const {
    MomentState s = entry;
    s.set_transverse(lens_transfer(in.omega0, entry.l, mass, tau) * entry.transverse());
    s.p_z = in.p_z(tau);
    s.z = entry.z + in.z(tau);
    s.t = entry.t + tau;
    const CorrectionState c = correction_state(in, kappa, tau);
    s.rho_sq += c.rho_sq_1;
    s.drho_sq_dt += c.drho_sq_1_dt;
    s.u_perp_sq += c.u_perp_sq_1;
    if (rho1) *rho1 = c.rho_sq_1;
    return s;
  }

  void lens_inhomogeneous(const MomentState& entry, const LensConfig& lens, int idx, MomentState& out) {
    const double kappa = common_kappa(lens);
    const ZerothOrderInputs in = ZerothOrderInputs::at_entry(entry, lens, mass);
    double duration = handle_relativistic(entry, lens.e_field, lens.duration, idx);

    // Scan a fine internal grid for the floor and the validity horizon.
    auto total = [&](double tau) { return in.rho_sq(tau) + correction_closed_form(in, kappa, tau); };
    const int fine = std::max(64, int(std::ceil(duration / (in.period() / 400.0))));
    std::optional<double> over;
    double prev = 0;
    for (int i = 0; i <= fine; ++i) {
      const double tau = duration * i / fine;
      const double r1 = correction_closed_form(in, kappa, tau);
      if (!traj.perturbation_limit_time && std::abs(r1) > validity_fraction * in.rho_sq(tau)) {
        traj.perturbation_limit_time = entry.t + tau;
      }
      if (total(tau) <= floor) {
        double lo = prev, hi = tau;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * duration; ++it) {
          const double mid = 0.5 * (lo + hi);
          (total(mid) <= floor ? hi : lo) = mid;
        }
        over = i == 0 ? 0.0 : hi;
        break;
      }
      prev = tau;
    }
    if (over) duration = *over;

    for (double t : grid(entry.t, entry.t + duration)) {
      double r1 = 0;
      const MomentState s = corrected(entry, in, kappa, t - entry.t, &r1);
      push(s, r1, idx, 0);
    }
    double r1 = 0;
    out = corrected(entry, in, kappa, duration, &r1);
    if (over) {
      overfocus(out, r1, idx);
    } else {
      push(out, r1, idx, 0);
    }
  }
};

}  // namespace

Trajectory run(const Beamline& line, double sample_dt, RunOptions options) {
  line.validate();
  if (!(sample_dt > 0) || !std::isfinite(sample_dt)) throw ConfigError("sample_dt must be positive");
  const double mass = line.particle.mass;
  Runner r{line, sample_dt, options, mass, 1.0 / (mass * mass), {}, false, false};

  MomentState state = free_state(line.packet, line.p0, line.start_time, mass);
  int radial_n = line.packet.n;
  r.push(state, 0, 0, 0);
  if (relativistic(state, mass)) {
    r.relativistic_seen = true;
    r.traj.events.push_back({state.t, EventKind::relativistic_warning, 0});
    if (options.strict) {
      r.traj.aborted = true;
      r.stop = true;
    }
  }

  for (std::size_t i = 0; i < line.elements.size() && !r.stop; ++i) {
    const int idx = int(i);
    r.traj.element_entry.push_back(state);
    r.traj.element_radial_n.push_back(radial_n);
    MomentState out = state;
    if (const auto* d = std::get_if<Drift>(&line.elements[i])) {
      r.drift(state, *d, idx, out);
    } else if (const auto* lens = std::get_if<LensConfig>(&line.elements[i])) {
      if (lens->homogeneous()) {
        r.lens_homogeneous(state, *lens, idx, out);
      } else {
        r.lens_inhomogeneous(state, *lens, idx, out);
      }
    } else {
      const auto& tr = std::get<Transition>(line.elements[i]);
      TransitionCheck check{idx, radial_n, tr.n, false, false, {}, 0};
      for (std::size_t j = i + 1; j < line.elements.size(); ++j) {
        if (const auto* next = std::get_if<LensConfig>(&line.elements[j])) {
          check.has_next_lens = true;
          check.required = matching_ratio(tr.n, state.l, next->n_prime);
          const double focal =
              state.rho_sq - state.drho_sq_dt * state.drho_sq_dt / (4.0 * state.u_perp_sq);
          check.actual = magnetic_radius_sq_natural(next->field) / focal;
          check.matched = std::abs(check.actual - check.required.value()) <=
                          matched_rel_tolerance * check.required.value();
          break;
        }
      }
      r.traj.transitions.push_back(check);
      radial_n = tr.n;
    }
    state = out;
    if (!r.stop) r.traj.events.push_back({state.t, EventKind::boundary, idx});
  }
  r.traj.final_state = state;
  return std::move(r.traj);
}

LensConfig design_direct_capture(const MomentState& s, int n_prime, double duration, double mass) {
  if (!(s.rho_sq > 0) || !(s.u_perp_sq > 0) || !std::isfinite(s.rho_sq) ||
      !std::isfinite(s.u_perp_sq)) {
    throw NoCaptureFieldError("capture needs positive <rho^2> and <u^2>");
  }
  const double corr = std::abs(s.drho_sq_dt) / (2.0 * std::sqrt(s.rho_sq * s.u_perp_sq));
  if (corr > 1e-9) throw DomainError("direct capture needs a focal state (d<rho^2>/dt = 0)");
  // Positive root of rho w^2 + (2 l / m) w - 2 u^2 = 0 in cancellation-free form.
  const double lm = s.l / mass;
  const double omega = 2.0 * s.u_perp_sq / (lm + std::sqrt(lm * lm + 2.0 * s.rho_sq * s.u_perp_sq));
  if (!(omega > 0) || !std::isfinite(omega)) throw NoCaptureFieldError("no positive capture field");
  LensConfig lens;
  lens.field = mass * omega;
  lens.duration = duration;
  lens.n_prime = n_prime;
  return lens;
}

double solve_matching(const LGPacket& packet, int n_prime) {
  packet.validate();
  const Rational ratio = matching_ratio(packet.n, packet.l, n_prime);
  // ratio numerator 4(2n' + |l| + l + 1) >= 4 for any integers with n' >= 0.
  if (ratio.num <= 0) throw std::logic_error("matching ratio must be positive");
  return 4.0 * double(ratio.den) / (double(ratio.num) * packet.sigma_r * packet.sigma_r);
}

double solve_matching_sigma_r(double eH0, int n, int l, int n_prime) {
  const Rational ratio = matching_ratio(n, l, n_prime);
  return std::sqrt(magnetic_radius_sq_natural(eH0) * double(ratio.den) / double(ratio.num));
}

double large_l_matched_sigma_r(double eH0) { return std::sqrt(magnetic_radius_sq_natural(eH0) / 8.0); }

std::optional<int> required_radial_number(Rational ratio, int l, int n_prime) {
  if (ratio.num <= 0 || ratio.den <= 0 || n_prime < 0) return std::nullopt;
  // 2n + |l| + 1 = 4 (2n' + |l| + l + 1) den / num
  const std::int64_t top = 4 * (2 * std::int64_t(n_prime) + std::abs(l) + l + 1) * ratio.den;
  if (top % ratio.num) return std::nullopt;
  const std::int64_t index = top / ratio.num - std::abs(l) - 1;
  if (index < 0 || index % 2) return std::nullopt;
  return int(index / 2);
}

}  // namespace vlens
