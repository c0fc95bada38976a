#include "wireshaper/wire_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wireshaper {

namespace {

bool all_finite(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void WireSpec::validate() const {
  if (!all_finite({diameter_mm, shapeable_length_mm, total_length_mm, segment_length_mm})) {
    throw std::invalid_argument("wire spec: fields must be finite");
  }
  if (segments < 1) throw std::invalid_argument("wire spec: segments must be >= 1");
  if (segment_length_mm <= 0.0) throw std::invalid_argument("wire spec: segment length must be > 0");
  if (diameter_mm <= 0.0) throw std::invalid_argument("wire spec: diameter must be > 0");
  const double discretized = segments * segment_length_mm;
  if (discretized > shapeable_length_mm * (1.0 + 1e-12) + 1e-12) {
    throw std::invalid_argument("wire spec: segments * segment_length exceeds shapeable length");
  }
  if (shapeable_length_mm > total_length_mm) {
    throw std::invalid_argument("wire spec: shapeable length exceeds total length");
  }
}

void ActionStep::validate() const {
  if (!all_finite({phi_rad, beta, delta_mm})) {
    throw std::invalid_argument("action step: fields must be finite");
  }
  if (delta_mm <= 0.0) throw std::invalid_argument("action step: delta must be > 0");
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("action step: beta must be in [0, 1]");
}

void ActionProgram::validate() const {
  wire.validate();
  if (steps.size() > static_cast<size_t>(wire.segments)) {
    throw std::invalid_argument("action program: more steps than wire segments");
  }
  double advance = 0.0;
  for (size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].k != static_cast<int>(i) + 1) {
      throw std::invalid_argument("action program: step indices must run 1, 2, ... in order");
    }
    steps[i].validate();
    advance += steps[i].delta_mm;
  }
  // Small slop so that quantized achieved programs (half a stage increment
  // per step) still validate against the nominal shapeable length.
  const double slop = 1e-3 * wire.shapeable_length_mm + 1e-9;
  if (advance > wire.shapeable_length_mm + slop) {
    throw std::invalid_argument("action program: total advance exceeds shapeable length");
  }
}

void BendLaw::validate() const {
  if (entries.empty()) throw std::invalid_argument("bend law: table has no entries");
  double prev_beta = -1.0;
  double prev_theta = 0.0;
  for (const BendLawEntry& e : entries) {
    if (!all_finite({e.beta, e.theta_rad})) throw std::invalid_argument("bend law: entries must be finite");
    if (e.beta < 0.0 || e.beta > 1.0) throw std::invalid_argument("bend law: beta must be in [0, 1]");
    if (e.beta <= prev_beta) throw std::invalid_argument("bend law: betas must be strictly increasing");
    if (e.theta_rad < 0.0) throw std::invalid_argument("bend law: thetas must be non-negative");
    if (e.theta_rad < prev_theta) throw std::invalid_argument("bend law: thetas must be non-decreasing");
    prev_beta = e.beta;
    prev_theta = e.theta_rad;
  }
}

double BendLaw::nominal_beta() const {
  validate();
  return entries.back().beta;
}

double BendLaw::nominal_theta() const {
  validate();
  return entries.back().theta_rad;
}

double apply_bend_law(const BendLaw& law, double beta) {
  law.validate();
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("apply_bend_law: beta must be in [0, 1]");
  }
  const auto& t = law.entries;
  if (beta <= t.front().beta) return t.front().theta_rad;
  if (beta >= t.back().beta) return t.back().theta_rad;
  for (size_t i = 1; i < t.size(); ++i) {
    if (beta <= t[i].beta) {
      const double span = t[i].beta - t[i - 1].beta;
      const double w = (beta - t[i - 1].beta) / span;
      return t[i - 1].theta_rad + w * (t[i].theta_rad - t[i - 1].theta_rad);
    }
  }
  return t.back().theta_rad;
}

double invert_bend_law(const BendLaw& law, double theta_rad) {
  law.validate();
  const auto& t = law.entries;
  if (theta_rad <= t.front().theta_rad) return t.front().beta;
  if (theta_rad >= t.back().theta_rad) return t.back().beta;
  for (size_t i = 1; i < t.size(); ++i) {
    if (theta_rad <= t[i].theta_rad) {
      const double span = t[i].theta_rad - t[i - 1].theta_rad;
      if (span <= 0.0) return t[i - 1].beta;  // flat run: pick its left edge
      const double w = (theta_rad - t[i - 1].theta_rad) / span;
      return t[i - 1].beta + w * (t[i].beta - t[i - 1].beta);
    }
  }
  return t.back().beta;
}

Centerline forward_shape(const ActionProgram& program, const BendLaw& law, ForwardMode mode) {
  program.validate();
  const double pad_length = program.wire.segment_length_mm;
  const int n = program.wire.segments;

  Centerline line;
  line.points.reserve(static_cast<size_t>(n) + 1);

  Vec3 p = Vec3::Zero();
  Mat3 r = Mat3::Identity();
  line.points.push_back(p);

  // Roll reference: the commanded roll of the last bent joint. Rolling an
  // unbent segment has no geometric effect, so unpinched steps neither apply
  // nor shift it; this keeps a constant roll offset equivalent to rigidly
  // rotating the whole shape about the base tangent.
  double phi_prev = 0.0;
  for (const ActionStep& step : program.steps) {
    double dphi = 0.0;
    double theta = 0.0;
    if (step.pinch) {
      dphi = step.phi_rad - phi_prev;
      theta = apply_bend_law(law, step.beta);
      phi_prev = step.phi_rad;
    }

    if (mode == ForwardMode::RigidLink) {
      r = r * rot_z(dphi) * rot_x(theta);
      p += r * (step.delta_mm * Vec3::UnitZ());
    } else {
      r = r * rot_z(dphi);
      if (theta == 0.0) {
        p += r * (step.delta_mm * Vec3::UnitZ());
      } else {
        const double chord = step.delta_mm * std::sin(theta / 2.0) / (theta / 2.0);
        p += r * (rot_x(theta / 2.0) * (chord * Vec3::UnitZ()));
        r = r * rot_x(theta);
      }
    }
    line.points.push_back(p);
  }

  // Unshaped remainder of the shapeable zone stays straight.
  for (int i = static_cast<int>(program.steps.size()); i < n; ++i) {
    p += r * (pad_length * Vec3::UnitZ());
    line.points.push_back(p);
  }
  return line;
}

double chord_of(const Centerline& centerline) {
  if (centerline.points.size() < 2) {
    throw std::invalid_argument("chord_of: centerline needs at least 2 points");
  }
  return (centerline.points.back() - centerline.points.front()).norm();
}

namespace {

class Fnv1a64 {
 public:
  void feed(uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (v >> (8 * i)) & 0xffu;
      state_ *= 0x100000001b3ull;
    }
  }
  void feed(double v) { feed(std::bit_cast<uint64_t>(v)); }
  void feed(bool v) { feed(static_cast<uint64_t>(v)); }
  uint64_t value() const { return state_; }

 private:
  uint64_t state_ = 0xcbf29ce484222325ull;
};

}  // namespace

std::string program_fingerprint(const ActionProgram& program) {
  Fnv1a64 h;
  h.feed(program.wire.diameter_mm);
  h.feed(program.wire.shapeable_length_mm);
  h.feed(program.wire.total_length_mm);
  h.feed(program.wire.segment_length_mm);
  h.feed(static_cast<uint64_t>(program.wire.segments));
  h.feed(static_cast<uint64_t>(program.steps.size()));
  for (const ActionStep& s : program.steps) {
    h.feed(static_cast<uint64_t>(s.k));
    h.feed(s.phi_rad);
    h.feed(s.pinch);
    h.feed(s.beta);
    h.feed(s.delta_mm);
  }
  std::ostringstream os;
  os << "fnv1a:" << std::hex;
  os.width(16);
  os.fill('0');
  os << h.value();
  return os.str();
}

}  // namespace wireshaper
