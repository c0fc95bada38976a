#include "wireshaper/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wireshaper {

namespace {

std::vector<double> cumulative_lengths(const std::vector<Vec3>& points) {
  std::vector<double> cum(points.size(), 0.0);
  for (size_t i = 1; i < points.size(); ++i) {
    cum[i] = cum[i - 1] + (points[i] - points[i - 1]).norm();
  }
  return cum;
}

Vec3 unit_first_chord(const Centerline& line, const char* who) {
  const Vec3 d = line.points[1] - line.points[0];
  const double norm = d.norm();
  if (norm < 1e-12) {
    throw std::invalid_argument(std::string(who) + ": degenerate initial tangent");
  }
  return d / norm;
}

/// Normal of the least-squares plane through the points (smallest principal
/// axis), with a deterministic sign.
Vec3 plane_normal(const std::vector<Vec3>& points) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  Vec3 normal = solver.eigenvectors().col(0);  // eigenvalues ascending
  int imax = 0;
  normal.cwiseAbs().maxCoeff(&imax);
  if (normal[imax] < 0.0) normal = -normal;
  return normal;
}

std::vector<double> pointwise_errors(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  std::vector<double> errors(a.size());
  for (size_t i = 0; i < a.size(); ++i) errors[i] = (a[i] - b[i]).norm();
  return errors;
}

}  // namespace

Centerline resample(const std::vector<Vec3>& points, int segments, double segment_length_mm) {
  if (points.size() < 2) throw std::invalid_argument("resample: need at least 2 input points");
  if (segments < 1) throw std::invalid_argument("resample: segments must be >= 1");
  if (!(segment_length_mm > 0.0)) throw std::invalid_argument("resample: segment length must be > 0");

  // Collapse zero-length input chords so direction lookups stay defined.
  std::vector<Vec3> pts;
  pts.reserve(points.size());
  pts.push_back(points.front());
  for (const Vec3& p : points) {
    if ((p - pts.back()).norm() > 1e-12) pts.push_back(p);
  }
  if (pts.size() < 2) throw std::invalid_argument("resample: input polyline has zero length");

  const std::vector<double> cum = cumulative_lengths(pts);
  const double total = cum.back();
  const double wanted = segments * segment_length_mm;
  if (total < 0.9 * wanted) {
    throw std::invalid_argument("resample: input polyline shorter than 90% of requested length");
  }

  Centerline out;
  out.points.reserve(static_cast<size_t>(segments) + 1);
  const Vec3 tail_dir = (pts.back() - pts[pts.size() - 2]).normalized();
  for (int k = 0; k <= segments; ++k) {
    const double s = k * segment_length_mm;
    if (s >= total) {
      out.points.push_back(pts.back() + (s - total) * tail_dir);
      continue;
    }
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const size_t i = static_cast<size_t>(std::distance(cum.begin(), it));
    const double span = cum[i] - cum[i - 1];
    const double w = (s - cum[i - 1]) / span;
    out.points.push_back(pts[i - 1] + w * (pts[i] - pts[i - 1]));
  }
  return out;
}

Centerline align(const Centerline& measured, const Centerline& predicted,
                 const AlignmentOptions& options) {
  if (measured.points.size() < 2 || predicted.points.size() < 2) {
    throw std::invalid_argument("align: both centerlines need at least 2 points");
  }
  const Vec3 u_meas = unit_first_chord(measured, "align(measured)");
  const Vec3 u_pred = unit_first_chord(predicted, "align(predicted)");
  const Vec3 base = predicted.points.front();

  const Mat3 r = rotation_between(u_meas, u_pred);
  Centerline out;
  out.frame = predicted.frame;
  out.points.reserve(measured.points.size());
  for (const Vec3& p : measured.points) {
    out.points.push_back(base + r * (p - measured.points.front()));
  }

  if (options.mode == AlignMode::BaseFrameRoll) {
    if (out.points.size() != predicted.points.size()) {
      throw std::invalid_argument("align: roll optimization needs equal point counts");
    }
    // Closed-form least-squares roll about the shared initial tangent.
    double s_cos = 0.0;
    double s_sin = 0.0;
    for (size_t i = 0; i < out.points.size(); ++i) {
      const Vec3 m = out.points[i] - base;
      const Vec3 p = predicted.points[i] - base;
      const Vec3 m_perp = m - u_pred * u_pred.dot(m);
      const Vec3 p_perp = p - u_pred * u_pred.dot(p);
      s_cos += m_perp.dot(p_perp);
      s_sin += u_pred.cross(m_perp).dot(p_perp);
    }
    if (std::abs(s_cos) > 0.0 || std::abs(s_sin) > 0.0) {
      const Mat3 roll = exp_so3(u_pred, std::atan2(s_sin, s_cos));
      for (Vec3& p : out.points) p = base + roll * (p - base);
    }
  }
  return out;
}

std::vector<double> per_segment_error(const Centerline& measured, const Centerline& predicted) {
  if (measured.points.size() != predicted.points.size()) {
    throw std::invalid_argument("per_segment_error: point counts differ");
  }
  return pointwise_errors(measured.points, predicted.points);
}

std::vector<double> per_segment_error_planar(const Centerline& measured,
                                             const Centerline& predicted) {
  if (measured.points.size() != predicted.points.size()) {
    throw std::invalid_argument("per_segment_error: point counts differ");
  }
  const Vec3 normal = plane_normal(predicted.points);
  const Vec3 base = predicted.points.front();
  auto project = [&](const std::vector<Vec3>& pts) {
    std::vector<Vec3> out;
    out.reserve(pts.size());
    for (const Vec3& p : pts) out.push_back(p - normal * normal.dot(p - base));
    return out;
  };
  return pointwise_errors(project(measured.points), project(predicted.points));
}

ErrorReport summarize(const std::vector<double>& errors_mm, const WireSpec& wire,
                      const std::string& label) {
  if (errors_mm.empty()) throw std::invalid_argument("summarize: empty error list");
  wire.validate();
  ErrorReport report;
  report.shape_label = label;
  report.per_segment_mm = errors_mm;
  report.e_min_mm = *std::min_element(errors_mm.begin(), errors_mm.end());
  report.e_max_mm = *std::max_element(errors_mm.begin(), errors_mm.end());
  report.e_mean_mm =
      std::accumulate(errors_mm.begin(), errors_mm.end(), 0.0) / static_cast<double>(errors_mm.size());
  double ss = 0.0;
  for (double e : errors_mm) ss += e * e;
  report.e_rms_mm = std::sqrt(ss / static_cast<double>(errors_mm.size()));
  report.percent_of_shapeable.reserve(errors_mm.size());
  for (double e : errors_mm) {
    report.percent_of_shapeable.push_back(e / wire.shapeable_length_mm * 100.0);
  }
  return report;
}

AggregateSummary aggregate(const std::vector<ErrorReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: no reports");
  AggregateSummary summary;
  summary.shape_count = reports.size();
  double sum = 0.0;
  double ss = 0.0;
  for (const ErrorReport& r : reports) {
    sum += r.e_mean_mm;
    ss += r.e_mean_mm * r.e_mean_mm;
  }
  summary.mean_of_means_mm = sum / static_cast<double>(reports.size());
  summary.rms_of_means_mm = std::sqrt(ss / static_cast<double>(reports.size()));
  return summary;
}

}  // namespace wireshaper
