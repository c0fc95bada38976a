// Minimal 3D rigid-body geometry used throughout the library: skew matrices,
// the SO(3) exponential map, and small angle/rotation helpers.
//
// Conventions (fixed for the whole project):
//   * right-handed frames, column vectors, active rotations
//   * angles are radians everywhere inside the library; degrees appear only
//     at file/CLI boundaries
//   * exp_so3(e1, +pi/2) maps e3 onto -e2 (standard Rodrigues sign)
//
// Everything here is a pure function on value types and safe to call from
// any number of threads.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace wireshaper {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Skew-symmetric (cross-product) matrix: hat(v) * w == v.cross(w).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> hat(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  Eigen::Matrix<Scalar, 3, 3> m;
  // clang-format off
  m <<  Scalar(0), -v.z(),      v.y(),
        v.z(),      Scalar(0), -v.x(),
       -v.y(),      v.x(),      Scalar(0);
  // clang-format on
  return m;
}

/// Rodrigues rotation about a unit axis. Throws if the axis is not unit
/// length (|norm - 1| > 1e-9). exp_so3(axis, 0) is the identity.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> exp_so3(const Eigen::MatrixBase<Derived>& axis,
                                                      typename Derived::Scalar angle) {
  using Scalar = typename Derived::Scalar;
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  if (std::abs(axis.norm() - Scalar(1)) > Scalar(1e-9)) {
    throw std::invalid_argument("exp_so3: axis must be unit length");
  }
  const Eigen::Matrix<Scalar, 3, 3> k = hat(axis);
  return Eigen::Matrix<Scalar, 3, 3>::Identity() + std::sin(angle) * k +
         (Scalar(1) - std::cos(angle)) * (k * k);
}

/// Rotation about the base axes; shorthand for exp_so3 on a basis vector.
inline Mat3 rot_x(double angle) { return exp_so3(Vec3::UnitX(), angle); }
inline Mat3 rot_z(double angle) { return exp_so3(Vec3::UnitZ(), angle); }

/// True when R is orthonormal with determinant +1 within tol.
inline bool is_rotation(const Mat3& r, double tol = 1e-12) {
  const Mat3 residual = r.transpose() * r - Mat3::Identity();
  return residual.cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// Unsigned angle between two nonzero vectors, robust near 0 and pi.
inline double angle_between(const Vec3& u, const Vec3& v) {
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

/// Shortest rotation taking unit vector `from` onto unit vector `to`.
/// The antiparallel case picks a deterministic perpendicular axis.
inline Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  const Vec3 axis = from.cross(to);
  const double s = axis.norm();
  const double c = from.dot(to);
  if (s < 1e-15) {
    if (c > 0.0) return Mat3::Identity();
    Vec3 seed = std::abs(from.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 perp = (seed - from * seed.dot(from)).normalized();
    return exp_so3(perp, kPi);
  }
  return exp_so3((axis / s).eval(), std::atan2(s, c));
}

}  // namespace wireshaper
