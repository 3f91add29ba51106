#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "indoorbev/geometry.hpp"
#include "indoorbev/point_cloud.hpp"
#include "indoorbev/scene.hpp"

namespace indoorbev {

/// Minimum accepted hit distance; rejects self-hits at the ray origin.
inline constexpr double kHitEpsilon = 1e-6;

/// Spherical scan grid.
///
/// Azimuth samples are half-open, theta_i = start + i * (end - start) / count,
/// so a full turn does not repeat its first beam. Elevation samples are
/// closed, phi_j = start + j * (end - start) / (count - 1), or `start` when
/// count is 1. Rays are ordered row-major over (elevation, azimuth).
struct ScanPattern {
  double azimuth_start = 0.0;
  double azimuth_end = 6.283185307179586;
  int azimuth_count = 1800;
  double elevation_start = -0.12217304763960307;  // -7 deg
  double elevation_end = 0.9075712110370514;      // +52 deg
  int elevation_count = 64;
  double max_range = 20.0;

  std::size_t ray_count() const {
    return static_cast<std::size_t>(azimuth_count) *
           static_cast<std::size_t>(elevation_count);
  }

  static ScanPattern single(double azimuth, double elevation,
                            double max_range = 20.0);
};

/// Throws ConfigError.
void validate(const ScanPattern& p);

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
};

/// Range noise is additive Gaussian along the ray; dropout removes returns
/// independently per ray. Both are applied after closest-hit selection.
struct NoiseModel {
  double range_sigma = 0.0;
  double dropout_prob = 0.0;
  std::uint64_t seed = 0;
};

void validate(const NoiseModel& n);

/// (cos(el) cos(az), cos(el) sin(az), sin(el)).
Vec3 ray_direction(double azimuth, double elevation);

std::vector<Vec3> ray_directions(const ScanPattern& pattern);

/// Smallest t > kHitEpsilon where the ray meets the primitive's surface.
/// The ray must be expressed in the primitive's local frame with a unit
/// direction. Rays starting inside a solid return the exit distance.
std::optional<double> intersect(const Ray& ray, const GeometryPrimitive& geom);

/// Per-ray detail kept alongside the point cloud.
struct ScanResult {
  PointCloud cloud;
  /// Scene object index (not id) that produced each point.
  std::vector<std::size_t> point_object;
  /// Per scene object: rays for which it was the closest hit (before noise).
  std::vector<std::size_t> visible_hits;
  /// Per scene object: rays that would hit it were it alone in the scene.
  /// Only filled when requested; otherwise empty.
  std::vector<std::size_t> unoccluded_hits;
};

struct CastOptions {
  int workers = 1;
  bool count_unoccluded = false;
};

/// Casts the full pattern from `sensor_pose` (sensor-to-world) and returns
/// returns within max_range as sensor-frame points, in ray order. Intensity
/// is clamp(1 - range / max_range, 0, 1) of the reported (noisy) range.
/// Deterministic for any worker count.
ScanResult cast_scan_detailed(const Scene& scene, const Pose& sensor_pose,
                              const ScanPattern& pattern,
                              const NoiseModel& noise,
                              const CastOptions& options = {});

PointCloud cast_scan(const Scene& scene, const Pose& sensor_pose,
                     const ScanPattern& pattern, const NoiseModel& noise,
                     int workers = 1);

}  // namespace indoorbev
