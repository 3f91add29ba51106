#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <string_view>
#include <variant>

namespace indoorbev {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Wrap an angle to [-pi, pi).
double wrap_angle(double a);

/// Wrap an angle to (-pi, pi]. Used for yaw residuals.
double wrap_angle_residual(double a);

/// Rigid transform (rotation + translation). Maps local points to the parent
/// frame as p_parent = R * p_local + t.
class Pose {
 public:
  Pose() = default;

  /// Throws ConfigError unless `rotation` is orthonormal with det +1 (1e-9).
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return {}; }

  /// Intrinsic Z-Y-X (yaw, pitch, roll): R = Rz(yaw) * Ry(pitch) * Rx(roll).
  static Pose from_ypr(double yaw, double pitch, double roll,
                       const Vec3& translation);

  static Pose from_yaw(double yaw, const Vec3& translation) {
    return from_ypr(yaw, 0.0, 0.0, translation);
  }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  /// (yaw, pitch, roll) matching from_ypr.
  Vec3 ypr() const;

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 rotate(const Vec3& v) const { return rotation_ * v; }

  Vec3 apply_inverse(const Vec3& p) const {
    return rotation_.transpose() * (p - translation_);
  }
  Vec3 rotate_inverse(const Vec3& v) const {
    return rotation_.transpose() * v;
  }

  /// this ∘ other: first `other`, then `this`.
  Pose compose(const Pose& other) const;
  Pose inverse() const;

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
};

inline Pose operator*(const Pose& a, const Pose& b) { return a.compose(b); }

// Primitives are expressed in their local frame, centred at the origin.
// Cylinders and capsules are aligned with local z.

/// Points p with normal·p + offset = 0.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
};

struct Sphere {
  double radius = 1.0;
};

struct Box {
  Vec3 half_extents = Vec3::Ones();
};

struct Cylinder {
  double radius = 1.0;
  double half_height = 1.0;
};

/// Segment from (0,0,-half_length) to (0,0,+half_length), swept by radius.
struct Capsule {
  double radius = 1.0;
  double half_length = 1.0;
};

struct Ellipsoid {
  Vec3 radii = Vec3::Ones();
};

using GeometryPrimitive =
    std::variant<Plane, Sphere, Box, Cylinder, Capsule, Ellipsoid>;

enum class PrimitiveKind { plane, sphere, box, cylinder, capsule, ellipsoid };

PrimitiveKind kind_of(const GeometryPrimitive& g);
std::string_view kind_name(PrimitiveKind k);
/// Throws ConfigError on unknown names.
PrimitiveKind kind_from_name(std::string_view name);

/// Throws ConfigError when radii/extents are not strictly positive or a
/// plane normal is not unit length within 1e-9.
void validate(const GeometryPrimitive& g);

/// Local-frame axis-aligned half extents of the primitive's bounding box.
/// Infinite for planes.
Vec3 local_half_extents(const GeometryPrimitive& g);

struct BoundingSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Sphere containing the primitive placed at `pose`. Exact for spheres,
/// capsules, cylinders and ellipsoids (max radius); boxes use the half-extent
/// norm. Planes get an infinite radius.
BoundingSphere bounding_sphere(const GeometryPrimitive& g, const Pose& pose);

}  // namespace indoorbev
