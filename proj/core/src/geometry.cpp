#include "motiondrift/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "motiondrift/errors.hpp"

namespace motiondrift {

UnitQuaternion::UnitQuaternion(double x, double y, double z, double w) {
  if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(w))) {
    throw InvalidInput("quaternion has non-finite components");
  }
  const double n2 = x * x + y * y + z * z + w * w;
  if (n2 < 1e-24) throw InvalidInput("quaternion has zero norm");
  // Already unit up to rounding: leave the bits alone so normalization is
  // idempotent (exact CSV and checkpoint round trips).
  if (std::abs(n2 - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    const double n = std::sqrt(n2);
    x /= n;
    y /= n;
    z /= n;
    w /= n;
  }
  bool flip = w < 0.0;
  if (w == 0.0) {
    const double lead = x != 0.0 ? x : (y != 0.0 ? y : z);
    flip = lead < 0.0;
  }
  if (flip) {
    x = -x;
    y = -y;
    z = -z;
    w = -w;
  }
  // -0.0 would make bitwise comparisons of equal rotations fail.
  x_ = x + 0.0;
  y_ = y + 0.0;
  z_ = z + 0.0;
  w_ = w + 0.0;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double radians) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(radians)) throw InvalidInput("degenerate rotation axis");
  const double s = std::sin(radians / 2.0) / n;
  return {axis.x * s, axis.y * s, axis.z * s, std::cos(radians / 2.0)};
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
  const Vec3 q{x_, y_, z_};
  const Vec3 t = q.cross(v) * 2.0;
  return v + t * w_ + q.cross(t);
}

std::array<double, 9> UnitQuaternion::matrix() const {
  const double xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  return {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
          2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
          2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
}

double UnitQuaternion::angle() const {
  const double v = std::sqrt(x_ * x_ + y_ * y_ + z_ * z_);
  return 2.0 * std::atan2(v, std::abs(w_));
}

UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b) {
  return {a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
          a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
          a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w(),
          a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z()};
}

UnitQuaternion quat_inverse(const UnitQuaternion& q) { return {-q.x(), -q.y(), -q.z(), q.w()}; }

UnitQuaternion quat_slerp(const UnitQuaternion& a, const UnitQuaternion& b, double u) {
  if (u <= 0.0) return a;
  if (u >= 1.0) return b;
  auto bc = b.xyzw();
  const auto ac = a.xyzw();
  double d = ac[0] * bc[0] + ac[1] * bc[1] + ac[2] * bc[2] + ac[3] * bc[3];
  if (d < 0.0) {
    for (auto& c : bc) c = -c;
    d = -d;
  }
  double wa, wb;
  if (d > 0.9995) {
    wa = 1.0 - u;
    wb = u;
  } else {
    const double theta = std::acos(std::min(d, 1.0));
    const double s = std::sin(theta);
    wa = std::sin((1.0 - u) * theta) / s;
    wb = std::sin(u * theta) / s;
  }
  return {wa * ac[0] + wb * bc[0], wa * ac[1] + wb * bc[1], wa * ac[2] + wb * bc[2],
          wa * ac[3] + wb * bc[3]};
}

double quat_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double d = a.x() * b.x() + a.y() * b.y() + a.z() * b.z() + a.w() * b.w();
  return 1.0 - std::abs(d);
}

DevicePose relative_pose(const DevicePose& child, const DevicePose& parent) {
  const UnitQuaternion inv = quat_inverse(parent.rotation);
  return {inv.rotate(child.position - parent.position), quat_multiply(inv, child.rotation)};
}

DevicePose apply_transform(const DevicePose& transform, const DevicePose& pose) {
  return {transform.rotation.rotate(pose.position) + transform.position,
          quat_multiply(transform.rotation, pose.rotation)};
}

double pitch_angle(const UnitQuaternion& q) {
  const Vec3 f = q.rotate(kForward);
  return std::atan2(-f.y, std::hypot(f.x, f.z)) * 180.0 / std::numbers::pi;
}

double yaw_angle(const UnitQuaternion& q) {
  const Vec3 f = q.rotate(kForward);
  return std::atan2(f.x, f.z);
}

}  // namespace motiondrift
