#include "indoorbev/raycast.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "indoorbev/errors.hpp"
#include "indoorbev/rng.hpp"

namespace indoorbev {

namespace {

constexpr double kNoHit = std::numeric_limits<double>::infinity();
// Relative slack on rim / bound tests so rays through edges are not lost.
constexpr double kBoundSlack = 1e-12;

struct Roots {
  int count = 0;
  double t[2] = {0.0, 0.0};
};

/// Roots of a t^2 + 2 half_b t + c = 0, ascending. Uses the cancellation-free
/// form q = -(half_b + sign(half_b) sqrt(disc)).
Roots solve_quadratic(double a, double half_b, double c) {
  Roots r;
  if (!(a > 0.0)) return r;
  const double disc = half_b * half_b - a * c;
  if (disc < 0.0) return r;
  const double sq = std::sqrt(disc);
  const double q = -(half_b + std::copysign(sq, half_b));
  if (q == 0.0) {
    r.count = 1;
    r.t[0] = 0.0;
    return r;
  }
  double t0 = q / a;
  double t1 = c / q;
  if (t0 > t1) std::swap(t0, t1);
  r.count = 2;
  r.t[0] = t0;
  r.t[1] = t1;
  return r;
}

struct Closest {
  double t = kNoHit;
  void offer(double candidate) {
    if (candidate > kHitEpsilon && candidate < t) t = candidate;
  }
  std::optional<double> result() const {
    return t < kNoHit ? std::optional<double>(t) : std::nullopt;
  }
};

std::optional<double> hit_plane(const Ray& ray, const Plane& p) {
  const double denom = p.normal.dot(ray.direction);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  Closest best;
  best.offer(-(p.normal.dot(ray.origin) + p.offset) / denom);
  return best.result();
}

std::optional<double> hit_sphere(const Ray& ray, const Sphere& s) {
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction;
  const Roots r =
      solve_quadratic(d.squaredNorm(), o.dot(d), o.squaredNorm() - s.radius * s.radius);
  Closest best;
  for (int i = 0; i < r.count; ++i) best.offer(r.t[i]);
  return best.result();
}

std::optional<double> hit_box(const Ray& ray, const Box& b) {
  double t_near = -kNoHit;
  double t_far = kNoHit;
  for (int axis = 0; axis < 3; ++axis) {
    const double o = ray.origin[axis];
    const double d = ray.direction[axis];
    const double h = b.half_extents[axis];
    if (d == 0.0) {
      if (o < -h || o > h) return std::nullopt;
      continue;
    }
    double t0 = (-h - o) / d;
    double t1 = (h - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  Closest best;
  best.offer(t_near);
  if (best.t == kNoHit) best.offer(t_far);
  return best.result();
}

/// Infinite-cylinder body roots restricted to |z| <= half_height.
void offer_cylinder_body(const Ray& ray, double radius, double half_height,
                         Closest& best) {
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction;
  const double a = d.x() * d.x() + d.y() * d.y();
  const Roots r = solve_quadratic(a, o.x() * d.x() + o.y() * d.y(),
                                  o.x() * o.x() + o.y() * o.y() - radius * radius);
  const double z_bound = half_height * (1.0 + kBoundSlack) + kBoundSlack;
  for (int i = 0; i < r.count; ++i) {
    const double z = o.z() + r.t[i] * d.z();
    if (std::abs(z) <= z_bound) best.offer(r.t[i]);
  }
}

std::optional<double> hit_cylinder(const Ray& ray, const Cylinder& c) {
  Closest best;
  offer_cylinder_body(ray, c.radius, c.half_height, best);
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction;
  if (d.z() != 0.0) {
    const double r2 = c.radius * c.radius * (1.0 + kBoundSlack);
    for (const double cap : {-c.half_height, c.half_height}) {
      const double t = (cap - o.z()) / d.z();
      const double x = o.x() + t * d.x();
      const double y = o.y() + t * d.y();
      if (x * x + y * y <= r2) best.offer(t);
    }
  }
  return best.result();
}

std::optional<double> hit_capsule(const Ray& ray, const Capsule& c) {
  Closest best;
  offer_cylinder_body(ray, c.radius, c.half_length, best);
  const Vec3& d = ray.direction;
  for (const double side : {-1.0, 1.0}) {
    const Vec3 o = ray.origin - Vec3(0.0, 0.0, side * c.half_length);
    const Roots r =
        solve_quadratic(d.squaredNorm(), o.dot(d), o.squaredNorm() - c.radius * c.radius);
    for (int i = 0; i < r.count; ++i) {
      // Keep only the outward hemisphere of each end cap.
      const double z = o.z() + r.t[i] * d.z();
      if (side * z >= -kBoundSlack * c.radius) best.offer(r.t[i]);
    }
  }
  return best.result();
}

std::optional<double> hit_ellipsoid(const Ray& ray, const Ellipsoid& e) {
  // Scale into unit-sphere space; t is preserved by the linear map.
  const Vec3 o = ray.origin.cwiseQuotient(e.radii);
  const Vec3 d = ray.direction.cwiseQuotient(e.radii);
  const Roots r = solve_quadratic(d.squaredNorm(), o.dot(d), o.squaredNorm() - 1.0);
  Closest best;
  for (int i = 0; i < r.count; ++i) best.offer(r.t[i]);
  return best.result();
}

struct PreparedObject {
  Mat3 world_to_local;
  Vec3 translation;
  Vec3 sphere_center;
  double sphere_radius;
  bool bounded;
  const GeometryPrimitive* geometry;
};

/// Ray-vs-bounding-sphere reject. Returns false when the ray provably misses.
bool may_hit(const PreparedObject& obj, const Vec3& origin, const Vec3& dir,
             double t_limit) {
  if (!obj.bounded) return true;
  const Vec3 oc = obj.sphere_center - origin;
  const double tca = oc.dot(dir);
  const double r = obj.sphere_radius * (1.0 + 1e-9) + 1e-9;
  const double d2 = oc.squaredNorm() - tca * tca;
  if (d2 > r * r) return false;
  if (tca + r < kHitEpsilon) return false;
  if (tca - r > t_limit) return false;
  return true;
}

}  // namespace

ScanPattern ScanPattern::single(double azimuth, double elevation,
                                double max_range) {
  ScanPattern p;
  p.azimuth_start = azimuth;
  p.azimuth_end = azimuth;
  p.azimuth_count = 1;
  p.elevation_start = elevation;
  p.elevation_end = elevation;
  p.elevation_count = 1;
  p.max_range = max_range;
  return p;
}

void validate(const ScanPattern& p) {
  if (p.azimuth_count < 1 || p.elevation_count < 1) {
    throw ConfigError("scan pattern counts must be >= 1");
  }
  if (!(p.max_range > 0.0) || !std::isfinite(p.max_range)) {
    throw ConfigError("scan max_range must be positive");
  }
  for (double v : {p.azimuth_start, p.azimuth_end, p.elevation_start,
                   p.elevation_end}) {
    if (!std::isfinite(v)) throw ConfigError("scan angles must be finite");
  }
}

void validate(const NoiseModel& n) {
  if (!(n.range_sigma >= 0.0) || !std::isfinite(n.range_sigma)) {
    throw ConfigError("noise range_sigma must be >= 0");
  }
  if (!(n.dropout_prob >= 0.0 && n.dropout_prob <= 1.0)) {
    throw ConfigError("noise dropout_prob must lie in [0, 1]");
  }
}

Vec3 ray_direction(double azimuth, double elevation) {
  const double ce = std::cos(elevation);
  Vec3 d(ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation));
  // Already unit up to rounding; renormalise to hold |d| = 1 within 1e-15.
  return d / d.norm();
}

std::vector<Vec3> ray_directions(const ScanPattern& pattern) {
  validate(pattern);
  std::vector<Vec3> dirs;
  dirs.reserve(pattern.ray_count());
  const double az_step = (pattern.azimuth_end - pattern.azimuth_start) /
                         static_cast<double>(pattern.azimuth_count);
  const double el_step =
      pattern.elevation_count > 1
          ? (pattern.elevation_end - pattern.elevation_start) /
                static_cast<double>(pattern.elevation_count - 1)
          : 0.0;
  for (int e = 0; e < pattern.elevation_count; ++e) {
    const double el = pattern.elevation_start + e * el_step;
    for (int a = 0; a < pattern.azimuth_count; ++a) {
      dirs.push_back(ray_direction(pattern.azimuth_start + a * az_step, el));
    }
  }
  return dirs;
}

std::optional<double> intersect(const Ray& ray, const GeometryPrimitive& geom) {
  switch (kind_of(geom)) {
    case PrimitiveKind::plane: return hit_plane(ray, std::get<Plane>(geom));
    case PrimitiveKind::sphere: return hit_sphere(ray, std::get<Sphere>(geom));
    case PrimitiveKind::box: return hit_box(ray, std::get<Box>(geom));
    case PrimitiveKind::cylinder:
      return hit_cylinder(ray, std::get<Cylinder>(geom));
    case PrimitiveKind::capsule:
      return hit_capsule(ray, std::get<Capsule>(geom));
    case PrimitiveKind::ellipsoid:
      return hit_ellipsoid(ray, std::get<Ellipsoid>(geom));
  }
  return std::nullopt;
}

ScanResult cast_scan_detailed(const Scene& scene, const Pose& sensor_pose,
                              const ScanPattern& pattern,
                              const NoiseModel& noise,
                              const CastOptions& options) {
  validate(pattern);
  validate(noise);
  const std::vector<Vec3> sensor_dirs = ray_directions(pattern);
  const std::size_t n_rays = sensor_dirs.size();
  const std::size_t n_objects = scene.objects.size();

  std::vector<PreparedObject> prepared;
  prepared.reserve(n_objects);
  for (const auto& obj : scene.objects) {
    const BoundingSphere bs = bounding_sphere(obj);
    prepared.push_back({obj.pose.rotation().transpose(), obj.pose.translation(),
                        bs.center, bs.radius, std::isfinite(bs.radius),
                        &obj.geometry});
  }

  const Vec3 origin = sensor_pose.translation();
  const double max_range = pattern.max_range;
  const bool counting = options.count_unoccluded;

  std::vector<double> hit_t(n_rays, kNoHit);
  std::vector<std::size_t> hit_obj(n_rays, 0);

  const int workers = std::max(1, options.workers);
  constexpr std::size_t kChunk = 2048;
  std::atomic<std::size_t> next_chunk{0};
  std::vector<std::vector<std::size_t>> unoccluded(
      static_cast<std::size_t>(workers),
      std::vector<std::size_t>(counting ? n_objects : 0, 0));

  auto work = [&](int worker) {
    auto& local_unoccluded = unoccluded[static_cast<std::size_t>(worker)];
    for (;;) {
      const std::size_t begin = next_chunk.fetch_add(1) * kChunk;
      if (begin >= n_rays) break;
      const std::size_t end = std::min(n_rays, begin + kChunk);
      for (std::size_t i = begin; i < end; ++i) {
        const Vec3 dir = sensor_pose.rotate(sensor_dirs[i]);
        double best = kNoHit;
        std::size_t best_obj = 0;
        for (std::size_t k = 0; k < n_objects; ++k) {
          const PreparedObject& obj = prepared[k];
          const double limit = counting ? max_range : std::min(best, max_range);
          if (!may_hit(obj, origin, dir, limit)) continue;
          const Ray local{obj.world_to_local * (origin - obj.translation),
                          obj.world_to_local * dir};
          const auto t = intersect(local, *obj.geometry);
          if (!t || *t > max_range) continue;
          if (counting) ++local_unoccluded[k];
          if (*t < best) {
            best = *t;
            best_obj = k;
          }
        }
        hit_t[i] = best;
        hit_obj[i] = best_obj;
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  ScanResult result;
  result.visible_hits.assign(n_objects, 0);
  if (counting) {
    result.unoccluded_hits.assign(n_objects, 0);
    for (const auto& local : unoccluded) {
      for (std::size_t k = 0; k < n_objects; ++k) {
        result.unoccluded_hits[k] += local[k];
      }
    }
  }

  const bool noisy = noise.range_sigma > 0.0 || noise.dropout_prob > 0.0;
  auto& points = result.cloud.points;
  for (std::size_t i = 0; i < n_rays; ++i) {
    if (hit_t[i] == kNoHit) continue;
    ++result.visible_hits[hit_obj[i]];
    double range = hit_t[i];
    if (noisy) {
      SplitMix64 draw(stream_seed(noise.seed, i));
      if (noise.range_sigma > 0.0) range += noise.range_sigma * draw.normal();
      if (noise.dropout_prob > 0.0 && draw.uniform() < noise.dropout_prob) {
        continue;
      }
      if (range <= kHitEpsilon) continue;
    }
    const Vec3 p = range * sensor_dirs[i];
    const double intensity = std::clamp(1.0 - range / max_range, 0.0, 1.0);
    points.push_back({static_cast<float>(p.x()), static_cast<float>(p.y()),
                      static_cast<float>(p.z()),
                      static_cast<float>(intensity)});
    result.point_object.push_back(hit_obj[i]);
  }
  return result;
}

PointCloud cast_scan(const Scene& scene, const Pose& sensor_pose,
                     const ScanPattern& pattern, const NoiseModel& noise,
                     int workers) {
  CastOptions opts;
  opts.workers = workers;
  return cast_scan_detailed(scene, sensor_pose, pattern, noise, opts).cloud;
}

}  // namespace indoorbev
