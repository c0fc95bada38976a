// Comparing measured centerlines against model predictions: arc-length
// resampling, base-frame registration, per-joint errors and report summaries.

#pragma once

#include "wireshaper/wire_model.hpp"

#include <string>
#include <vector>

namespace wireshaper {

enum class AlignMode {
  BaseFrame,     // translate measured base onto the prediction's base and
                 // rotate the initial tangent to match
  BaseFrameRoll  // additionally roll about the initial tangent, minimizing
                 // the sum of squared point distances (closed form)
};

struct AlignmentOptions {
  AlignMode mode = AlignMode::BaseFrame;
};

/// Arc-length resampling of a polyline to segments+1 points spaced
/// segment_length_mm apart. The input must cover at least 90% of the
/// requested length; a short tail is extrapolated along the final direction.
Centerline resample(const std::vector<Vec3>& points, int segments, double segment_length_mm);

/// Rigid registration of `measured` into the prediction's base frame; the
/// prediction itself is never moved. For a prediction based at the origin
/// with its first chord along e3 this is exactly "translate the base to the
/// origin and rotate the initial tangent onto e3".
Centerline align(const Centerline& measured, const Centerline& predicted,
                 const AlignmentOptions& options);

/// Index-matched pointwise Euclidean distances. Curves must have equal
/// point counts.
std::vector<double> per_segment_error(const Centerline& measured, const Centerline& predicted);

/// As per_segment_error, but with both curves first projected onto the
/// prediction's dominant bending plane (planar validation protocol).
std::vector<double> per_segment_error_planar(const Centerline& measured,
                                             const Centerline& predicted);

struct ErrorReport {
  std::string shape_label;
  std::vector<double> per_segment_mm;
  double e_min_mm = 0.0;
  double e_max_mm = 0.0;
  double e_mean_mm = 0.0;
  double e_rms_mm = 0.0;
  std::vector<double> percent_of_shapeable;  // per_segment / shapeable length * 100
};

ErrorReport summarize(const std::vector<double>& errors_mm, const WireSpec& wire,
                      const std::string& label);

// Cross-shape aggregate. Mean-of-means and rms-of-means are both reported;
// they answer slightly different questions and summaries often quote either.
struct AggregateSummary {
  size_t shape_count = 0;
  double mean_of_means_mm = 0.0;
  double rms_of_means_mm = 0.0;
};

AggregateSummary aggregate(const std::vector<ErrorReport>& reports);

}  // namespace wireshaper
