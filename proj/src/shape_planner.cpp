#include "wireshaper/shape_planner.hpp"

#include "wireshaper/eval.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wireshaper {

ShapeRecipe ShapeRecipe::c(int n_bent, double segment_length_mm, double beta) {
  ShapeRecipe r;
  r.kind = Kind::C;
  r.n1 = n_bent;
  r.segment_length_mm = segment_length_mm;
  r.beta_nominal = beta;
  return r;
}

ShapeRecipe ShapeRecipe::s(int n_first, int n_second, double segment_length_mm, double beta) {
  ShapeRecipe r;
  r.kind = Kind::S;
  r.n1 = n_first;
  r.n2 = n_second;
  r.segment_length_mm = segment_length_mm;
  r.beta_nominal = beta;
  return r;
}

ShapeRecipe ShapeRecipe::angled(int n_straight, int n_bent, double segment_length_mm, double beta) {
  ShapeRecipe r;
  r.kind = Kind::Angled;
  r.n1 = n_straight;
  r.n2 = n_bent;
  r.segment_length_mm = segment_length_mm;
  r.beta_nominal = beta;
  return r;
}

ShapeRecipe ShapeRecipe::hook(int n_straight, int n_primary, int n_recurve,
                              double segment_length_mm, double beta) {
  ShapeRecipe r;
  r.kind = Kind::Hook;
  r.n1 = n_straight;
  r.n2 = n_primary;
  r.n3 = n_recurve;
  r.segment_length_mm = segment_length_mm;
  r.beta_nominal = beta;
  return r;
}

ShapeRecipe ShapeRecipe::helix(int segments, double dphi_rad, double segment_length_mm,
                               double beta) {
  ShapeRecipe r;
  r.kind = Kind::Helix;
  r.n1 = segments;
  r.dphi_rad = dphi_rad;
  r.segment_length_mm = segment_length_mm;
  r.beta_nominal = beta;
  return r;
}

ShapeRecipe ShapeRecipe::custom_steps(std::vector<CustomStep> steps, double segment_length_mm,
                                      double beta) {
  ShapeRecipe r;
  r.kind = Kind::Custom;
  r.custom = std::move(steps);
  r.segment_length_mm = segment_length_mm;
  r.beta_nominal = beta;
  return r;
}

int ShapeRecipe::total_steps() const {
  switch (kind) {
    case Kind::C:
    case Kind::Helix:
      return n1;
    case Kind::S:
    case Kind::Angled:
      return n1 + n2;
    case Kind::Hook:
      return n1 + n2 + n3;
    case Kind::Custom:
      return static_cast<int>(custom.size());
  }
  return 0;
}

void ShapeRecipe::validate() const {
  if (n1 < 0 || n2 < 0 || n3 < 0) throw std::invalid_argument("recipe: counts must be >= 0");
  if (total_steps() < 1) throw std::invalid_argument("recipe: needs at least one step");
  if (!(segment_length_mm > 0.0)) throw std::invalid_argument("recipe: segment length must be > 0");
  if (beta_nominal < 0.0 || beta_nominal > 1.0) {
    throw std::invalid_argument("recipe: beta must be in [0, 1]");
  }
  if (kind == Kind::Helix && (dphi_rad <= -kPi || dphi_rad > kPi)) {
    throw std::invalid_argument("recipe: helix roll increment must be in (-pi, pi]");
  }
}

ActionProgram plan(const ShapeRecipe& recipe, const WireSpec& wire) {
  recipe.validate();
  wire.validate();
  if (recipe.total_steps() > wire.segments) {
    std::ostringstream os;
    os << "plan: recipe needs " << recipe.total_steps() << " steps but the wire has "
       << wire.segments << " segments";
    throw std::invalid_argument(os.str());
  }

  ActionProgram program;
  program.wire = wire;
  double phi_carry = 0.0;
  auto push = [&](double phi, bool pinch) {
    ActionStep step;
    step.k = static_cast<int>(program.steps.size()) + 1;
    step.phi_rad = pinch ? phi : phi_carry;  // unbent joints keep the current roll
    step.pinch = pinch;
    step.beta = recipe.beta_nominal;
    step.delta_mm = recipe.segment_length_mm;
    phi_carry = step.phi_rad;
    program.steps.push_back(step);
  };

  switch (recipe.kind) {
    case ShapeRecipe::Kind::C:
      for (int i = 0; i < recipe.n1; ++i) push(0.0, true);
      break;
    case ShapeRecipe::Kind::S:
      for (int i = 0; i < recipe.n1; ++i) push(0.0, true);
      for (int i = 0; i < recipe.n2; ++i) push(kPi, true);
      break;
    case ShapeRecipe::Kind::Angled:
      for (int i = 0; i < recipe.n1; ++i) push(0.0, false);
      for (int i = 0; i < recipe.n2; ++i) push(0.0, true);
      break;
    case ShapeRecipe::Kind::Hook:
      for (int i = 0; i < recipe.n1; ++i) push(0.0, false);
      for (int i = 0; i < recipe.n2; ++i) push(0.0, true);
      for (int i = 0; i < recipe.n3; ++i) push(kPi, true);
      break;
    case ShapeRecipe::Kind::Helix:
      for (int i = 1; i <= recipe.n1; ++i) push(i * recipe.dphi_rad, true);
      break;
    case ShapeRecipe::Kind::Custom:
      for (const CustomStep& s : recipe.custom) push(s.phi_rad, s.pinch);
      break;
  }
  program.validate();
  return program;
}

FitResult fit_actions(const Centerline& target, const WireSpec& wire, const BendLaw& law,
                      const FitOptions& options) {
  wire.validate();
  law.validate();
  if (target.points.size() < 3) {
    throw std::invalid_argument("fit_actions: target needs at least 3 points");
  }
  const int max_steps = options.max_segments > 0 ? options.max_segments : wire.segments;
  const int m = static_cast<int>(target.points.size()) - 1;
  if (m > max_steps) throw std::invalid_argument("fit_actions: target has more joints than allowed");

  const double l = wire.segment_length_mm;
  const double theta_nominal = law.nominal_theta();
  const double threshold = options.curvature_threshold_rad.value_or(theta_nominal / 2.0);
  if (!(threshold > 0.0)) throw std::invalid_argument("fit_actions: threshold must be > 0");

  ActionProgram program;
  program.wire = wire;
  Mat3 r = Mat3::Identity();
  Vec3 chord_prev = Vec3::UnitZ();  // the unshaped shaft points along e3
  double phi_abs = 0.0;

  for (int j = 1; j <= m; ++j) {
    const Vec3 chord = target.points[j] - target.points[j - 1];
    const double chord_len = chord.norm();
    if (std::abs(chord_len - l) > 0.1 * l) {
      std::ostringstream os;
      os << "fit_actions: joint spacing " << chord_len << " deviates more than 10% from " << l;
      throw std::invalid_argument(os.str());
    }
    const Vec3 dir = chord / chord_len;
    const double turning = angle_between(chord_prev, dir);

    ActionStep step;
    step.k = j;
    step.delta_mm = chord_len;
    step.beta = law.nominal_beta();
    if (turning >= threshold && turning >= 1e-8) {
      // Roll so the model's bend axis lands on the measured turning axis.
      const Vec3 axis = chord_prev.cross(dir).normalized();
      const Vec3 local = r.transpose() * axis;
      double dphi = std::atan2(local.y(), local.x());
      if (dphi <= -kPi + 1e-12) dphi = kPi;  // plane flips are +180 by convention

      double theta = theta_nominal;
      if (options.pinch_mode == FitOptions::PinchMode::Continuous) {
        step.beta = invert_bend_law(law, turning);
        theta = apply_bend_law(law, step.beta);
      }
      phi_abs += dphi;
      step.pinch = true;
      step.phi_rad = phi_abs;
      r = r * rot_z(dphi) * rot_x(theta);
    } else {
      step.pinch = false;
      step.phi_rad = phi_abs;
    }
    program.steps.push_back(step);
    chord_prev = dir;
  }
  program.validate();

  FitResult result;
  result.program = program;
  const Centerline predicted = forward_shape(program, law, ForwardMode::RigidLink);
  const Centerline aligned = align(target, predicted, AlignmentOptions{AlignMode::BaseFrame});
  double ss = 0.0;
  result.per_joint_residual_mm.reserve(target.points.size());
  for (size_t i = 0; i < target.points.size(); ++i) {
    const double e = (aligned.points[i] - predicted.points[i]).norm();
    result.per_joint_residual_mm.push_back(e);
    ss += e * e;
  }
  result.residual_rms_mm = std::sqrt(ss / static_cast<double>(result.per_joint_residual_mm.size()));
  return result;
}

}  // namespace wireshaper
