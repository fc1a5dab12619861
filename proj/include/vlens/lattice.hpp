#pragma once

// Beamlines of drifts, lenses and declared quantum-number transitions; the
// piecewise forward model and the inverse-design solvers built on it.
// Natural units throughout.

#include <optional>
#include <variant>
#include <vector>

#include "vlens/elements.hpp"
#include "vlens/moments.hpp"
#include "vlens/packet.hpp"
#include "vlens/units.hpp"

namespace vlens {

/// User-declared relabelling of the radial quantum number between elements.
/// The moments are untouched; only the n used for matching changes.
struct Transition {
  int n = 0;
};

using Element = std::variant<Drift, LensConfig, Transition>;

struct Beamline {
  std::vector<Element> elements;
  Particle particle = Particle::electron();
  LGPacket packet;
  double p0 = 0;
  double start_time = 0;

  /// Throws ConfigError on an empty line or an invalid element.
  void validate() const;
};

enum class EventKind { boundary, focal_point, overfocus, relativistic_warning };

const char* to_string(EventKind kind);

struct Event {
  double t;
  EventKind kind;
  int element_index;
};

enum SampleFlag : unsigned { FOCAL = 1u, OVERFOCUS = 2u, RELATIVISTIC = 4u };

struct Sample {
  MomentState state;  // rho_sq includes rho_sq_1 inside inhomogeneous lenses
  double rho_sq_1 = 0;
  int element_index = 0;
  unsigned flags = 0;
};

struct TransitionCheck {
  int element_index;
  int n_before, n_after;
  bool has_next_lens;
  bool matched;
  Rational required;
  double actual;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<Event> events;
  std::vector<MomentState> element_entry;  // state entering each traversed element
  std::vector<int> element_radial_n;       // radial number in force at each element
  std::vector<TransitionCheck> transitions;
  bool truncated = false;  // stopped at an over-focus event
  bool aborted = false;    // stopped at the relativistic bound in strict mode
  std::optional<double> perturbation_limit_time;
  MomentState final_state;
};

struct RunOptions {
  bool strict = false;
};

Trajectory run(const Beamline& beamline, double sample_dt, RunOptions options = {});

/// Zero of d<rho^2>/dt within a drift of the given duration starting at entry.
/// Absolute time; NoFocusError if the derivative keeps its sign.
double find_focal_time(const MomentState& entry, double duration, double tolerance = 0);

/// Lens whose stationary radius equals the current <rho^2> of a focal state.
/// Solves rho omega^2 + (2 l / m) omega - 2 u^2 = 0 for its positive root.
LensConfig design_direct_capture(const MomentState& state_at_focus, int n_prime, double duration,
                                 double mass);

/// e H0 with rho_H^2 / sigma_r^2 equal to the required matching ratio.
double solve_matching(const LGPacket& packet, int n_prime);

/// sigma_r matched to a field for mode (n, l) and target n'.
double solve_matching_sigma_r(double eH0, int n, int l, int n_prime);

/// sigma_r^2 = rho_H^2 / 8, the l > 0, |l| >> 1 limit (sigma_r^2 = 1 / (2 e H0)).
double large_l_matched_sigma_r(double eH0);

/// n such that matching_ratio(n, l, n') equals the given ratio, if one exists.
std::optional<int> required_radial_number(Rational ratio, int l, int n_prime);

}  // namespace vlens
