// Single-parameter wire calibration: recover the characteristic per-segment
// bend angle from the measured end-to-end chord of a constant-curvature arc.
//
// For a chain of n segments of length l all bent by the same angle theta, the
// end-to-end chord is l * sin(n*theta/2) / sin(theta/2). The chord decreases
// strictly from n*l (straight) to 0 (closed polygon) as theta sweeps
// [0, 2*pi/n], so the inverse problem has a unique solution found here by
// bisection. Pure functions, thread-safe.

#pragma once

#include <vector>

namespace wireshaper {

struct CalibrationInput {
  double segment_length_mm = 2.0;
  int segments = 10;
  std::vector<double> measured_chords_mm;  // one entry per trial

  void validate() const;
};

struct CalibrationResult {
  double theta_star_rad = 0.0;  // characteristic per-segment bend angle
  double chord_mean_mm = 0.0;
  double chord_std_mm = 0.0;  // sample standard deviation across trials
  double residual_mm = 0.0;   // |chord(theta_star) - chord_mean|
};

/// Closed-form chord of an n-segment constant-angle chain. Valid for
/// bend_angle_rad in [0, 2*pi/n]; the endpoints use the analytic limits
/// (n*l at zero, 0 at the closed polygon).
double chord_closed_form(double segment_length_mm, int segments, double bend_angle_rad);

/// Solves chord_closed_form(l, n, theta) == mean(measured chords) for theta
/// on [0, 2*pi/n) by bisection to 1e-12 rad. Trials are averaged before
/// solving; the per-trial spread is reported as chord_std_mm.
CalibrationResult solve_bend_angle(const CalibrationInput& input);

}  // namespace wireshaper
