#pragma once

#include <array>
#include <cmath>

namespace motiondrift {

/// Axis convention: +x right, +y up, +z forward. Positions in meters.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;

  [[nodiscard]] constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  [[nodiscard]] constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  [[nodiscard]] double norm() const { return std::sqrt(dot(*this)); }
  [[nodiscard]] bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline constexpr Vec3 kForward{0.0, 0.0, 1.0};
inline constexpr Vec3 kUp{0.0, 1.0, 0.0};
inline constexpr Vec3 kRight{1.0, 0.0, 0.0};

/// Unit quaternion (x, y, z, w) in Hamilton convention. The constructor
/// normalizes and picks the canonical sign of the double cover: w > 0, or
/// for w == 0 the first nonzero of x, y, z positive.
class UnitQuaternion {
 public:
  constexpr UnitQuaternion() = default;
  /// Throws InvalidInput for non-finite or (near) zero-norm components.
  UnitQuaternion(double x, double y, double z, double w);

  static constexpr UnitQuaternion identity() { return {}; }
  /// Right-hand rotation of `radians` about `axis` (need not be unit).
  static UnitQuaternion from_axis_angle(const Vec3& axis, double radians);
  static UnitQuaternion yaw(double radians) { return from_axis_angle(kUp, radians); }
  static UnitQuaternion pitch(double radians) { return from_axis_angle(kRight, radians); }
  static UnitQuaternion roll(double radians) { return from_axis_angle(kForward, radians); }

  [[nodiscard]] constexpr double x() const { return x_; }
  [[nodiscard]] constexpr double y() const { return y_; }
  [[nodiscard]] constexpr double z() const { return z_; }
  [[nodiscard]] constexpr double w() const { return w_; }
  [[nodiscard]] constexpr std::array<double, 4> xyzw() const { return {x_, y_, z_, w_}; }

  [[nodiscard]] Vec3 rotate(const Vec3& v) const;
  /// Row-major 3x3 rotation matrix.
  [[nodiscard]] std::array<double, 9> matrix() const;
  /// Rotation angle in [0, pi].
  [[nodiscard]] double angle() const;

  constexpr bool operator==(const UnitQuaternion&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
  double w_ = 1.0;
};

struct DevicePose {
  Vec3 position;
  UnitQuaternion rotation;

  constexpr bool operator==(const DevicePose&) const = default;
};

/// Composition a then b applied in the local frame of a (a * b).
UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b);
UnitQuaternion quat_inverse(const UnitQuaternion& q);
/// Shorter-arc spherical interpolation; u = 0 and u = 1 return the
/// endpoints exactly.
UnitQuaternion quat_slerp(const UnitQuaternion& a, const UnitQuaternion& b, double u);
/// Distance on the rotation group, 1 - |<a, b>|; zero iff same rotation.
double quat_distance(const UnitQuaternion& a, const UnitQuaternion& b);

/// Pose of `child` expressed in the local frame of `parent`.
DevicePose relative_pose(const DevicePose& child, const DevicePose& parent);
/// Applies the rigid transform `transform` to `pose` (world <- transform * pose).
DevicePose apply_transform(const DevicePose& transform, const DevicePose& pose);

/// Elevation of the rotated forward axis in degrees; positive looks down.
double pitch_angle(const UnitQuaternion& q);
/// Heading of the rotated forward axis about +y in radians (0 = +z, +pi/2 = +x).
double yaw_angle(const UnitQuaternion& q);

inline Vec3 lerp(const Vec3& a, const Vec3& b, double u) { return a + (b - a) * u; }

}  // namespace motiondrift
