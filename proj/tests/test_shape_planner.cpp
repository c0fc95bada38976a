#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wireshaper/shape_planner.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace wireshaper;

namespace {

const WireSpec kWire{};  // reference wire: l = 2 mm, 10 segments
const double kThetaStar = 0.12676733707782939;  // calibrated reference bend
const BendLaw kLaw{{{0.8, kThetaStar}}};

// Turning angles at every joint, the chord before the base joint being the
// unshaped shaft along e3. Signed variant projects onto the +e1 bend axis,
// meaningful for planar curves only.
std::vector<double> turning_angles(const Centerline& line, bool signed_about_e1) {
  std::vector<double> turns;
  Vec3 prev = Vec3::UnitZ();
  for (size_t i = 1; i < line.points.size(); ++i) {
    const Vec3 dir = (line.points[i] - line.points[i - 1]).normalized();
    const double magnitude = angle_between(prev, dir);
    if (signed_about_e1) {
      const double sign = prev.cross(dir).x() >= 0.0 ? 1.0 : -1.0;
      turns.push_back(sign * magnitude);
    } else {
      turns.push_back(magnitude);
    }
    prev = dir;
  }
  return turns;
}

bool is_planar_yz(const Centerline& line) {
  for (const Vec3& p : line.points) {
    if (std::abs(p.x()) > 1e-10) return false;
  }
  return true;
}

// Independent cylinder oracle for constant-increment programs: the per-joint
// map p -> G p + G (l e3) is a fixed screw motion, so every joint must sit at
// the same radius from its axis. The axis is recovered from G alone.
struct CylinderFit {
  Vec3 axis_point;
  Vec3 axis_dir;
};

CylinderFit screw_axis(double dphi, double theta, double l) {
  const Mat3 g = rot_z(dphi) * rot_x(theta);
  Vec3 axis(g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1));
  axis.normalize();
  const Vec3 t = g * (l * Vec3::UnitZ());
  const Vec3 t_perp = t - axis * axis.dot(t);
  const Mat3 m = Mat3::Identity() - g + axis * axis.transpose();
  return {m.inverse() * t_perp, axis};
}

double radius_about(const CylinderFit& fit, const Vec3& p) {
  const Vec3 d = p - fit.axis_point;
  return (d - fit.axis_dir * fit.axis_dir.dot(d)).norm();
}

void check_roundtrip(const ShapeRecipe& recipe) {
  const ActionProgram planned = plan(recipe, kWire);
  const Centerline target = forward_shape(planned, kLaw);
  const FitResult fit = fit_actions(target, kWire, kLaw, FitOptions{});

  REQUIRE(fit.program.steps.size() >= planned.steps.size());
  // Trailing steps (distal padding of short programs) must come back unbent;
  // everything covered by the recipe must match exactly.
  for (size_t i = 0; i < fit.program.steps.size(); ++i) {
    if (i < planned.steps.size()) {
      CHECK(fit.program.steps[i].pinch == planned.steps[i].pinch);
    } else {
      CHECK_FALSE(fit.program.steps[i].pinch);
    }
  }
  double phi_prev_plan = 0.0;
  double phi_prev_fit = 0.0;
  for (size_t i = 0; i < planned.steps.size(); ++i) {
    const double want = wrap_angle(planned.steps[i].phi_rad - phi_prev_plan);
    const double got = wrap_angle(fit.program.steps[i].phi_rad - phi_prev_fit);
    if (planned.steps[i].pinch) {
      CHECK(std::abs(wrap_angle(got - want)) < 1e-6);
    }
    phi_prev_plan = planned.steps[i].phi_rad;
    phi_prev_fit = fit.program.steps[i].phi_rad;
  }
  CHECK(fit.residual_rms_mm < 1e-9);
}

}  // namespace

TEST_CASE("plan is deterministic") {
  const ShapeRecipe recipe = ShapeRecipe::helix(10, deg2rad(45.0), 2.0, 0.8);
  CHECK(program_fingerprint(plan(recipe, kWire)) == program_fingerprint(plan(recipe, kWire)));
}

TEST_CASE("c recipe: planar constant-turning arc") {
  const ActionProgram p = plan(ShapeRecipe::c(10, 2.0, 0.8), kWire);
  REQUIRE(p.steps.size() == 10);
  for (const ActionStep& s : p.steps) {
    CHECK(s.pinch);
    CHECK(s.phi_rad == 0.0);
    CHECK(s.delta_mm == 2.0);
  }
  const Centerline line = forward_shape(p, kLaw);
  CHECK(is_planar_yz(line));
  for (double t : turning_angles(line, false)) {
    CHECK(t == doctest::Approx(kThetaStar).epsilon(1e-12));
  }
}

TEST_CASE("s recipe: planar with a sign flip at the midpoint") {
  const ActionProgram p = plan(ShapeRecipe::s(5, 5, 2.0, 0.8), kWire);
  const Centerline line = forward_shape(p, kLaw);
  CHECK(is_planar_yz(line));
  const std::vector<double> turns = turning_angles(line, true);
  REQUIRE(turns.size() == 10);
  for (int j = 0; j < 5; ++j) {
    CHECK(turns[5 + j] == doctest::Approx(-turns[j]).epsilon(1e-12));
    CHECK(turns[j] > 0.0);
  }
}

TEST_CASE("angled recipe: collinear proximal run of exactly the straight count") {
  const ActionProgram p = plan(ShapeRecipe::angled(4, 6, 2.0, 0.8), kWire);
  const Centerline line = forward_shape(p, kLaw);
  for (int i = 0; i <= 4; ++i) {
    CHECK((line.points[i] - Vec3(0, 0, 2.0 * i)).norm() < 1e-12);
  }
  const std::vector<double> turns = turning_angles(line, false);
  for (int j = 0; j < 4; ++j) CHECK(turns[j] < 1e-12);
  CHECK(turns[4] == doctest::Approx(kThetaStar).epsilon(1e-12));  // the run ends here
}

TEST_CASE("hook recipe: straight, positive, then negative turning") {
  const ActionProgram p = plan(ShapeRecipe::hook(2, 4, 4, 2.0, 0.8), kWire);
  REQUIRE(p.steps.size() == 10);
  CHECK_FALSE(p.steps[0].pinch);
  CHECK_FALSE(p.steps[1].pinch);
  for (int i = 2; i < 6; ++i) CHECK(p.steps[i].phi_rad == 0.0);
  for (int i = 6; i < 10; ++i) CHECK(p.steps[i].phi_rad == kPi);

  const std::vector<double> turns = turning_angles(forward_shape(p, kLaw), true);
  for (int j = 0; j < 2; ++j) CHECK(std::abs(turns[j]) < 1e-12);
  for (int j = 2; j < 6; ++j) CHECK(turns[j] == doctest::Approx(kThetaStar).epsilon(1e-12));
  for (int j = 6; j < 10; ++j) CHECK(turns[j] == doctest::Approx(-kThetaStar).epsilon(1e-12));
}

TEST_CASE("helix recipe: ascending rolls and a common cylinder") {
  const double dphi = deg2rad(45.0);
  const ActionProgram p = plan(ShapeRecipe::helix(10, dphi, 2.0, 0.8), kWire);
  REQUIRE(p.steps.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(p.steps[i].phi_rad == doctest::Approx((i + 1) * dphi).epsilon(1e-15));
    CHECK(p.steps[i].pinch);
  }
  const Centerline line = forward_shape(p, kLaw);
  const CylinderFit fit = screw_axis(dphi, kThetaStar, 2.0);
  std::vector<double> radii;
  for (const Vec3& pt : line.points) radii.push_back(radius_about(fit, pt));
  const double mean = std::accumulate(radii.begin(), radii.end(), 0.0) / radii.size();
  double ss = 0.0;
  for (double r : radii) ss += (r - mean) * (r - mean);
  const double std_dev = std::sqrt(ss / radii.size());
  CHECK(std_dev < 1e-9 * mean);
}

TEST_CASE("plan rejects recipes beyond the wire's capacity") {
  CHECK_THROWS_AS(plan(ShapeRecipe::c(11, 2.0, 0.8), kWire), std::invalid_argument);
  CHECK_THROWS_AS(plan(ShapeRecipe::hook(4, 4, 4, 2.0, 0.8), kWire), std::invalid_argument);
  CHECK_THROWS_AS(plan(ShapeRecipe::c(0, 2.0, 0.8), kWire), std::invalid_argument);
  CHECK_THROWS_AS(plan(ShapeRecipe::helix(10, 4.0, 2.0, 0.8), kWire), std::invalid_argument);
}

TEST_CASE("custom recipe keeps the listed rolls and pinches") {
  std::vector<CustomStep> steps = {{0.0, true}, {deg2rad(90.0), true}, {0.0, false}};
  const ActionProgram p = plan(ShapeRecipe::custom_steps(steps, 2.0, 0.7), kWire);
  REQUIRE(p.steps.size() == 3);
  CHECK(p.steps[1].phi_rad == deg2rad(90.0));
  CHECK_FALSE(p.steps[2].pinch);
  CHECK(p.steps[2].phi_rad == deg2rad(90.0));  // unbent joints carry the roll
}

TEST_CASE("fit recovers every built-in recipe exactly") {
  check_roundtrip(ShapeRecipe::c(10, 2.0, 0.8));
  check_roundtrip(ShapeRecipe::s(5, 5, 2.0, 0.8));
  check_roundtrip(ShapeRecipe::s(3, 7, 2.0, 0.8));
  check_roundtrip(ShapeRecipe::angled(4, 6, 2.0, 0.8));
  check_roundtrip(ShapeRecipe::hook(2, 4, 4, 2.0, 0.8));
  check_roundtrip(ShapeRecipe::helix(10, deg2rad(45.0), 2.0, 0.8));
  check_roundtrip(ShapeRecipe::helix(8, deg2rad(-60.0), 2.0, 0.8));
  check_roundtrip(ShapeRecipe::c(6, 2.0, 0.8));  // short program, padded tail
}

TEST_CASE("fit of a straight target turns every pinch off") {
  Centerline target;
  for (int i = 0; i <= 10; ++i) target.points.push_back(Vec3(0, 0, 2.0 * i));
  const FitResult fit = fit_actions(target, kWire, kLaw, FitOptions{});
  for (const ActionStep& s : fit.program.steps) CHECK_FALSE(s.pinch);
  CHECK(fit.residual_rms_mm < 1e-12);
}

TEST_CASE("fit input validation") {
  Centerline tiny;
  tiny.points = {Vec3(0, 0, 0), Vec3(0, 0, 2)};
  CHECK_THROWS_AS(fit_actions(tiny, kWire, kLaw, FitOptions{}), std::invalid_argument);

  Centerline bad_spacing;
  for (int i = 0; i <= 10; ++i) bad_spacing.points.push_back(Vec3(0, 0, 2.6 * i));
  CHECK_THROWS_AS(fit_actions(bad_spacing, kWire, kLaw, FitOptions{}), std::invalid_argument);
}

TEST_CASE("continuous mode tracks distinct bend magnitudes through the law") {
  const BendLaw ramp{{{0.0, 0.0}, {1.0, 0.2}}};
  std::vector<CustomStep> steps;
  for (int i = 0; i < 10; ++i) steps.push_back({0.0, true});
  ActionProgram p = plan(ShapeRecipe::custom_steps(steps, 2.0, 0.9), kWire);
  p.steps[4].beta = 0.6;  // one shallower bend mid-curve
  const Centerline target = forward_shape(p, ramp);

  FitOptions options;
  options.pinch_mode = FitOptions::PinchMode::Continuous;
  options.curvature_threshold_rad = 0.05;
  const FitResult fit = fit_actions(target, kWire, ramp, options);
  CHECK(fit.residual_rms_mm < 1e-9);
  CHECK(fit.program.steps[4].beta == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(fit.program.steps[5].beta == doctest::Approx(0.9).epsilon(1e-9));
}
