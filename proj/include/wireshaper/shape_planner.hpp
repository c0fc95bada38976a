// Action-program generation for the built-in clinical tip recipes and a
// greedy inverse fitter that recovers a program from a target centerline.
//
// Recipe counts are listed base-first, matching program execution order:
// e.g. hook(2, 4, 4) leaves the 2 joints nearest the base straight, bends the
// next 4 in the reference plane and the final 4 in the flipped (180 deg)
// plane. The plane flip is encoded as a single whole-plane roll increment.

#pragma once

#include "wireshaper/wire_model.hpp"

#include <optional>
#include <vector>

namespace wireshaper {

struct CustomStep {
  double phi_rad = 0.0;
  bool pinch = true;
};

struct ShapeRecipe {
  enum class Kind { C, S, Angled, Hook, Helix, Custom };

  Kind kind = Kind::C;
  int n1 = 0;  // C: bent | S: first arc | Angled/Hook: straight run | Helix: turns
  int n2 = 0;  // S: second arc | Angled: bent | Hook: primary bend
  int n3 = 0;  // Hook: recurve bend
  double dphi_rad = 0.0;  // Helix: per-segment roll increment, in (-pi, pi]
  std::vector<CustomStep> custom;
  double segment_length_mm = 2.0;
  double beta_nominal = 0.8;

  static ShapeRecipe c(int n_bent, double segment_length_mm, double beta);
  static ShapeRecipe s(int n_first, int n_second, double segment_length_mm, double beta);
  static ShapeRecipe angled(int n_straight, int n_bent, double segment_length_mm, double beta);
  static ShapeRecipe hook(int n_straight, int n_primary, int n_recurve,
                          double segment_length_mm, double beta);
  static ShapeRecipe helix(int segments, double dphi_rad, double segment_length_mm, double beta);
  static ShapeRecipe custom_steps(std::vector<CustomStep> steps, double segment_length_mm,
                                  double beta);

  int total_steps() const;
  void validate() const;
};

/// Deterministic expansion of a recipe into an ActionProgram. Throws if the
/// recipe needs more steps than the wire has segments.
ActionProgram plan(const ShapeRecipe& recipe, const WireSpec& wire);

struct FitOptions {
  enum class PinchMode {
    Binary,     // pinch realizes the law's nominal bend or nothing
    Continuous  // bend tracks the measured turning via bend-law inversion
  };
  PinchMode pinch_mode = PinchMode::Binary;
  // Turning below this is treated as an unbent joint. Defaults to half the
  // law's nominal bend angle.
  std::optional<double> curvature_threshold_rad;
  int max_segments = 0;  // 0 = wire.segments
};

struct FitResult {
  ActionProgram program;
  double residual_rms_mm = 0.0;
  std::vector<double> per_joint_residual_mm;
};

/// Greedy inverse of forward_shape. Walks the target base-to-tip, measures
/// the discrete turning angle and turning plane at each joint, and emits one
/// step per target segment: pinch where the turning clears the threshold,
/// roll chosen so the model's bend axis matches the measured one. The target
/// must already be in the base frame with joints spaced segment_length_mm
/// (within 10%); see resample().
FitResult fit_actions(const Centerline& target, const WireSpec& wire, const BendLaw& law,
                      const FitOptions& options);

}  // namespace wireshaper
