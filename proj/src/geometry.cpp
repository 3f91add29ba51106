#include "indoorbev/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "indoorbev/errors.hpp"

namespace indoorbev {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPoseTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

double wrap_angle(double a) {
  if (a >= -kPi && a < kPi) return a;
  double w = std::fmod(a + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (w >= kPi) w -= kTwoPi;
  return w;
}

double wrap_angle_residual(double a) {
  const double w = wrap_angle(a);
  return w == -kPi ? kPi : w;
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  const double ortho = (rotation * rotation.transpose() - Mat3::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  const double det = rotation.determinant();
  if (!(ortho <= kPoseTolerance) || !(std::abs(det - 1.0) <= kPoseTolerance)) {
    throw ConfigError("pose rotation is not a proper orthonormal matrix");
  }
  if (!translation.allFinite()) {
    throw ConfigError("pose translation is not finite");
  }
}

Pose Pose::from_ypr(double yaw, double pitch, double roll,
                    const Vec3& translation) {
  const Mat3 r = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                  Eigen::AngleAxisd(roll, Vec3::UnitX()))
                     .toRotationMatrix();
  return Pose(r, translation);
}

Vec3 Pose::ypr() const {
  const Mat3& r = rotation_;
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double yaw = 0.0;
  double roll = 0.0;
  if (std::abs(r(2, 0)) < 1.0 - 1e-12) {
    yaw = std::atan2(r(1, 0), r(0, 0));
    roll = std::atan2(r(2, 1), r(2, 2));
  } else {
    // Gimbal lock: fold everything into yaw.
    yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return {yaw, pitch, roll};
}

Pose Pose::compose(const Pose& other) const {
  Pose out;
  out.rotation_ = rotation_ * other.rotation_;
  out.translation_ = rotation_ * other.translation_ + translation_;
  return out;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

PrimitiveKind kind_of(const GeometryPrimitive& g) {
  return static_cast<PrimitiveKind>(g.index());
}

std::string_view kind_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::plane: return "plane";
    case PrimitiveKind::sphere: return "sphere";
    case PrimitiveKind::box: return "box";
    case PrimitiveKind::cylinder: return "cylinder";
    case PrimitiveKind::capsule: return "capsule";
    case PrimitiveKind::ellipsoid: return "ellipsoid";
  }
  return "unknown";
}

PrimitiveKind kind_from_name(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    const auto k = static_cast<PrimitiveKind>(i);
    if (kind_name(k) == name) return k;
  }
  throw ConfigError("unknown primitive kind '" + std::string(name) + "'");
}

void validate(const GeometryPrimitive& g) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto all_positive = [&](const Vec3& v) {
    return positive(v.x()) && positive(v.y()) && positive(v.z());
  };
  const bool ok = std::visit(
      Overloaded{
          [](const Plane& p) {
            return p.normal.allFinite() && std::isfinite(p.offset) &&
                   std::abs(p.normal.norm() - 1.0) <= 1e-9;
          },
          [&](const Sphere& s) { return positive(s.radius); },
          [&](const Box& b) { return all_positive(b.half_extents); },
          [&](const Cylinder& c) {
            return positive(c.radius) && positive(c.half_height);
          },
          [&](const Capsule& c) {
            return positive(c.radius) && positive(c.half_length);
          },
          [&](const Ellipsoid& e) { return all_positive(e.radii); },
      },
      g);
  if (!ok) {
    throw ConfigError("invalid " + std::string(kind_name(kind_of(g))) +
                      " parameters");
  }
}

Vec3 local_half_extents(const GeometryPrimitive& g) {
  static constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      Overloaded{
          [](const Plane&) { return Vec3(inf, inf, inf); },
          [](const Sphere& s) { return Vec3(s.radius, s.radius, s.radius); },
          [](const Box& b) { return Vec3(b.half_extents); },
          [](const Cylinder& c) {
            return Vec3(c.radius, c.radius, c.half_height);
          },
          [](const Capsule& c) {
            return Vec3(c.radius, c.radius, c.half_length + c.radius);
          },
          [](const Ellipsoid& e) { return Vec3(e.radii); },
      },
      g);
}

BoundingSphere bounding_sphere(const GeometryPrimitive& g, const Pose& pose) {
  const double radius = std::visit(
      Overloaded{
          [](const Plane&) { return std::numeric_limits<double>::infinity(); },
          [](const Sphere& s) { return s.radius; },
          [](const Box& b) { return b.half_extents.norm(); },
          [](const Cylinder& c) { return std::hypot(c.radius, c.half_height); },
          [](const Capsule& c) { return c.half_length + c.radius; },
          [](const Ellipsoid& e) { return e.radii.maxCoeff(); },
      },
      g);
  return {pose.translation(), radius};
}

}  // namespace indoorbev
