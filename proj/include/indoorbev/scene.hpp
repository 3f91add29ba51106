#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "indoorbev/geometry.hpp"
#include "indoorbev/taxonomy.hpp"

namespace indoorbev {

struct SceneObject {
  int id = 1;
  int class_id = 0;
  GeometryPrimitive geometry = Sphere{};
  Pose pose;  // object-to-world
  bool dynamic = false;
};

struct Workspace {
  Vec3 min = Vec3(-5.0, -5.0, -0.4);
  Vec3 max = Vec3(5.0, 5.0, 2.6);

  bool contains(const BoundingSphere& s) const;
};

/// Immutable once built; safe to share between reader threads.
struct Scene {
  std::vector<SceneObject> objects;
  Workspace workspace;
  std::uint64_t seed = 0;
};

BoundingSphere bounding_sphere(const SceneObject& obj);

/// Placement rule for one foreground class. Size parameters are drawn
/// uniformly per component between `size_min` and `size_max` and read per
/// kind as:
///   sphere     radius = x
///   box        half extents = (x, y, z)
///   cylinder   radius = x, half_height = z
///   capsule    radius = x, half_length = z
///   ellipsoid  radii = (x, y, z)
struct ClassPlacement {
  int class_id = 0;
  PrimitiveKind kind = PrimitiveKind::box;
  int count_min = 0;
  int count_max = 0;
  Vec3 size_min = Vec3::Constant(0.2);
  Vec3 size_max = Vec3::Constant(0.5);
  bool dynamic = false;
};

struct SceneConfig {
  Workspace workspace;
  std::vector<ClassPlacement> classes;
  double yaw_min = -3.141592653589793;
  double yaw_max = 3.141592653589793;
  int max_attempts = 100;
  /// Adds an unlabelled floor plane at workspace.min.z.
  bool floor = true;
  int floor_class_id = 6;
  Taxonomy taxonomy = Taxonomy::indoor_default();

  /// Furniture-like defaults for the indoor taxonomy.
  static SceneConfig indoor_default();
};

/// Throws ConfigError on malformed configs.
void validate(const SceneConfig& cfg);

/// Uniform-random placement inside the workspace. Objects are upright
/// (yaw-only rotation) and rest their bounding sphere on the workspace floor.
/// No two bounding spheres touch. Pure function of (cfg, seed).
/// Throws PlacementError after cfg.max_attempts failed tries for one object.
Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed);

/// JSON text. Fields: seed, workspace{min,max}, objects[{id, class, kind,
/// params, translation, ypr, dynamic}]. Meters and radians.
std::string serialize_scene(const Scene& scene);

/// Throws DataError on malformed input.
Scene parse_scene(std::string_view json_text);

}  // namespace indoorbev
