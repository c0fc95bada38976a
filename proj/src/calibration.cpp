#include "wireshaper/calibration.hpp"

#include "wireshaper/geometry.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wireshaper {

void CalibrationInput::validate() const {
  if (segments < 2) throw std::invalid_argument("calibration: needs at least 2 segments");
  if (!(segment_length_mm > 0.0) || !std::isfinite(segment_length_mm)) {
    throw std::invalid_argument("calibration: segment length must be > 0");
  }
  if (measured_chords_mm.empty()) throw std::invalid_argument("calibration: no chord measurements");
  const double straight = segments * segment_length_mm;
  for (double c : measured_chords_mm) {
    if (!std::isfinite(c) || c <= 0.0) {
      throw std::invalid_argument("calibration: chords must be positive and finite");
    }
    if (c > straight) {
      std::ostringstream os;
      os << "calibration: chord " << c << " exceeds n*l = " << straight;
      throw std::invalid_argument(os.str());
    }
  }
}

double chord_closed_form(double segment_length_mm, int segments, double bend_angle_rad) {
  if (segments < 1) throw std::invalid_argument("chord_closed_form: segments must be >= 1");
  if (!(segment_length_mm > 0.0)) throw std::invalid_argument("chord_closed_form: segment length must be > 0");
  const double top = 2.0 * kPi / segments;
  if (!(bend_angle_rad >= 0.0) || bend_angle_rad > top) {
    throw std::invalid_argument("chord_closed_form: angle outside [0, 2*pi/n]");
  }
  if (bend_angle_rad == 0.0) return segments * segment_length_mm;
  if (bend_angle_rad == top) return 0.0;
  return segment_length_mm * std::sin(segments * bend_angle_rad / 2.0) / std::sin(bend_angle_rad / 2.0);
}

CalibrationResult solve_bend_angle(const CalibrationInput& input) {
  input.validate();
  const double l = input.segment_length_mm;
  const int n = input.segments;
  const auto& chords = input.measured_chords_mm;

  CalibrationResult result;
  result.chord_mean_mm =
      std::accumulate(chords.begin(), chords.end(), 0.0) / static_cast<double>(chords.size());
  if (chords.size() > 1) {
    double ss = 0.0;
    for (double c : chords) ss += (c - result.chord_mean_mm) * (c - result.chord_mean_mm);
    result.chord_std_mm = std::sqrt(ss / static_cast<double>(chords.size() - 1));
  }

  const double straight = n * l;
  if (result.chord_mean_mm >= straight) {
    result.theta_star_rad = 0.0;  // boundary: already straight
    result.residual_mm = std::abs(straight - result.chord_mean_mm);
    return result;
  }

  // chord_closed_form is strictly decreasing on [0, 2*pi/n], so plain
  // bisection converges to the unique root.
  double lo = 0.0;
  double hi = 2.0 * kPi / n;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (chord_closed_form(l, n, mid) > result.chord_mean_mm) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.theta_star_rad = 0.5 * (lo + hi);
  result.residual_mm = std::abs(chord_closed_form(l, n, result.theta_star_rad) - result.chord_mean_mm);
  return result;
}

}  // namespace wireshaper
