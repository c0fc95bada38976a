// Forward kinematics of a segment-wise shaped guidewire tip.
//
// A wire's shapeable zone is discretized into `segments` joints. An
// ActionProgram lists one roll/pinch/advance step per joint; pushing the
// program through a calibrated BendLaw yields the predicted 3D centerline.
//
// Ordering convention: steps are listed in execution order (k = 1, 2, ...)
// and the centerline is reconstructed in that same order starting at the
// base joint, i.e. list position 1 is the joint adjacent to the base frame.
// Rolls are stored as absolute commanded angles; the kinematics consumes the
// increment from the previous bent joint's roll (0 before the first bend).
// Unpinched steps advance the wire without rolling or bending it.

#pragma once

#include "wireshaper/geometry.hpp"

#include <string>
#include <vector>

namespace wireshaper {

struct WireSpec {
  double diameter_mm = 0.64;
  double shapeable_length_mm = 20.0;
  double total_length_mm = 680.0;
  double segment_length_mm = 2.0;
  int segments = 10;

  void validate() const;
};

struct ActionStep {
  int k = 0;            // 1-based execution index, base joint first
  double phi_rad = 0.0; // absolute commanded roll
  bool pinch = false;   // whether the bend phase runs for this segment
  double beta = 0.0;    // normalized pinch command in [0, 1]
  double delta_mm = 0.0;

  void validate() const;
};

struct ActionProgram {
  WireSpec wire;
  std::vector<ActionStep> steps;

  void validate() const;
};

// Calibrated mapping from normalized pinch command to realized bend angle.
// Piecewise linear between entries, clamped at both ends. A single entry is
// the common case: every pinch realizes the wire's characteristic angle.
struct BendLawEntry {
  double beta = 0.0;
  double theta_rad = 0.0;
};

struct BendLaw {
  std::vector<BendLawEntry> entries;

  void validate() const;
  double nominal_beta() const;   // beta of the strongest entry
  double nominal_theta() const;  // bend realized by nominal_beta
};

double apply_bend_law(const BendLaw& law, double beta);

/// Inverse of apply_bend_law: smallest beta realizing the requested angle,
/// clamped to the law's representable range.
double invert_bend_law(const BendLaw& law, double theta_rad);

struct Centerline {
  std::vector<Vec3> points;  // base joint first, distal tip last, millimeters
  std::string frame = "base";
};

enum class ForwardMode { RigidLink, Arc };

/// Predicted centerline of the shaped wire, segments + 1 joint points in the
/// base frame. Rigid-link mode concentrates each bend at its joint; arc mode
/// distributes it along the segment as a circular arc of the same arc length.
/// Programs covering fewer steps than wire.segments are padded with straight
/// segments of segment_length_mm at the distal end.
Centerline forward_shape(const ActionProgram& program, const BendLaw& law,
                         ForwardMode mode = ForwardMode::RigidLink);

/// Euclidean distance from the base joint to the distal tip.
double chord_of(const Centerline& centerline);

/// Content hash of a program ("fnv1a:" + 16 hex digits); used as provenance
/// for compiled machine programs. Identical programs hash identically.
std::string program_fingerprint(const ActionProgram& program);

}  // namespace wireshaper
