#include "indoorbev/scene.hpp"

#include <cmath>
#include <string>

#include "indoorbev/errors.hpp"
#include "indoorbev/rng.hpp"
#include "json.hpp"

namespace indoorbev {

using nlohmann::json;

namespace {

GeometryPrimitive sample_geometry(PrimitiveKind kind, const Vec3& lo,
                                  const Vec3& hi, Rng& rng) {
  const Vec3 s(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()),
               rng.uniform(lo.z(), hi.z()));
  switch (kind) {
    case PrimitiveKind::sphere: return Sphere{s.x()};
    case PrimitiveKind::box: return Box{s};
    case PrimitiveKind::cylinder: return Cylinder{s.x(), s.z()};
    case PrimitiveKind::capsule: return Capsule{s.x(), s.z()};
    case PrimitiveKind::ellipsoid: return Ellipsoid{s};
    case PrimitiveKind::plane: break;
  }
  throw ConfigError("planes cannot be placed procedurally");
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw DataError("expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json geometry_params(const GeometryPrimitive& g) {
  switch (kind_of(g)) {
    case PrimitiveKind::plane: {
      const auto& p = std::get<Plane>(g);
      return {{"normal", vec_json(p.normal)}, {"offset", p.offset}};
    }
    case PrimitiveKind::sphere:
      return {{"radius", std::get<Sphere>(g).radius}};
    case PrimitiveKind::box:
      return {{"half_extents", vec_json(std::get<Box>(g).half_extents)}};
    case PrimitiveKind::cylinder: {
      const auto& c = std::get<Cylinder>(g);
      return {{"radius", c.radius}, {"half_height", c.half_height}};
    }
    case PrimitiveKind::capsule: {
      const auto& c = std::get<Capsule>(g);
      return {{"radius", c.radius}, {"half_length", c.half_length}};
    }
    case PrimitiveKind::ellipsoid:
      return {{"radii", vec_json(std::get<Ellipsoid>(g).radii)}};
  }
  return {};
}

GeometryPrimitive geometry_from(PrimitiveKind kind, const json& p) {
  switch (kind) {
    case PrimitiveKind::plane:
      return Plane{vec_from(p.at("normal")), p.at("offset").get<double>()};
    case PrimitiveKind::sphere: return Sphere{p.at("radius").get<double>()};
    case PrimitiveKind::box: return Box{vec_from(p.at("half_extents"))};
    case PrimitiveKind::cylinder:
      return Cylinder{p.at("radius").get<double>(),
                      p.at("half_height").get<double>()};
    case PrimitiveKind::capsule:
      return Capsule{p.at("radius").get<double>(),
                     p.at("half_length").get<double>()};
    case PrimitiveKind::ellipsoid: return Ellipsoid{vec_from(p.at("radii"))};
  }
  throw DataError("unknown geometry kind");
}

}  // namespace

bool Workspace::contains(const BoundingSphere& s) const {
  for (int a = 0; a < 3; ++a) {
    if (s.center[a] - s.radius < min[a] - 1e-12 ||
        s.center[a] + s.radius > max[a] + 1e-12) {
      return false;
    }
  }
  return true;
}

BoundingSphere bounding_sphere(const SceneObject& obj) {
  return bounding_sphere(obj.geometry, obj.pose);
}

SceneConfig SceneConfig::indoor_default() {
  SceneConfig cfg;
  using K = PrimitiveKind;
  // class ids follow Taxonomy::indoor_default().
  cfg.classes = {
      {0, K::capsule, 0, 2, {0.18, 0.18, 0.45}, {0.28, 0.28, 0.6}, true},
      {1, K::box, 1, 3, {0.4, 0.3, 0.35}, {0.8, 0.5, 0.4}, false},
      {2, K::box, 1, 4, {0.2, 0.2, 0.4}, {0.3, 0.3, 0.5}, false},
      {3, K::box, 0, 2, {0.3, 0.15, 0.6}, {0.6, 0.25, 0.9}, false},
      {4, K::box, 1, 3, {0.1, 0.1, 0.1}, {0.3, 0.3, 0.3}, false},
      {5, K::cylinder, 0, 2, {0.2, 0.2, 0.15}, {0.35, 0.35, 0.3}, true},
      {7, K::ellipsoid, 0, 2, {0.1, 0.1, 0.1}, {0.3, 0.3, 0.25}, false},
  };
  return cfg;
}

void validate(const SceneConfig& cfg) {
  if (!(cfg.workspace.max.array() > cfg.workspace.min.array()).all()) {
    throw ConfigError("workspace max must exceed min on every axis");
  }
  if (cfg.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (!(cfg.yaw_max >= cfg.yaw_min)) throw ConfigError("yaw range inverted");
  if (cfg.floor && !cfg.taxonomy.valid_id(cfg.floor_class_id)) {
    throw ConfigError("floor class id outside taxonomy");
  }
  for (const auto& c : cfg.classes) {
    if (!cfg.taxonomy.valid_id(c.class_id)) {
      throw ConfigError("class id " + std::to_string(c.class_id) +
                        " outside taxonomy");
    }
    if (c.kind == PrimitiveKind::plane) {
      throw ConfigError("planes cannot be placed procedurally");
    }
    if (c.count_min < 0 || c.count_max < c.count_min) {
      throw ConfigError("invalid count range for class " +
                        cfg.taxonomy.name_of(c.class_id));
    }
    if (!(c.size_min.array() > 0.0).all() ||
        !(c.size_max.array() >= c.size_min.array()).all()) {
      throw ConfigError("invalid size range for class " +
                        cfg.taxonomy.name_of(c.class_id));
    }
  }
}

Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Scene scene;
  scene.workspace = cfg.workspace;
  scene.seed = seed;

  Rng rng(seed);
  int next_id = 1;
  if (cfg.floor) {
    SceneObject floor;
    floor.id = next_id++;
    floor.class_id = cfg.floor_class_id;
    floor.geometry = Plane{Vec3::UnitZ(), -cfg.workspace.min.z()};
    scene.objects.push_back(floor);
  }

  std::vector<BoundingSphere> placed;
  const Vec3& lo = cfg.workspace.min;
  const Vec3& hi = cfg.workspace.max;

  for (const auto& cls : cfg.classes) {
    const auto count = rng.range(cls.count_min, cls.count_max);
    for (std::int64_t n = 0; n < count; ++n) {
      bool ok = false;
      for (int attempt = 0; attempt < cfg.max_attempts && !ok; ++attempt) {
        const auto geom =
            sample_geometry(cls.kind, cls.size_min, cls.size_max, rng);
        const double yaw = rng.uniform(cfg.yaw_min, cfg.yaw_max);
        const double r = bounding_sphere(geom, Pose{}).radius;
        const double ux = rng.uniform();
        const double uy = rng.uniform();
        if (lo.x() + r > hi.x() - r || lo.y() + r > hi.y() - r ||
            lo.z() + r > hi.z() - r) {
          continue;
        }
        const Vec3 center(lo.x() + r + ux * (hi.x() - lo.x() - 2.0 * r),
                          lo.y() + r + uy * (hi.y() - lo.y() - 2.0 * r),
                          lo.z() + r);
        bool clear = true;
        for (const auto& other : placed) {
          if ((other.center - center).norm() <= other.radius + r) {
            clear = false;
            break;
          }
        }
        if (!clear) continue;

        SceneObject obj;
        obj.id = next_id++;
        obj.class_id = cls.class_id;
        obj.geometry = geom;
        obj.pose = Pose::from_yaw(yaw, center);
        obj.dynamic = cls.dynamic;
        placed.push_back({center, r});
        scene.objects.push_back(std::move(obj));
        ok = true;
      }
      if (!ok) {
        throw PlacementError(cfg.taxonomy.name_of(cls.class_id),
                             cls.class_id);
      }
    }
  }
  return scene;
}

std::string serialize_scene(const Scene& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    const Vec3 ypr = o.pose.ypr();
    objects.push_back({
        {"id", o.id},
        {"class", o.class_id},
        {"kind", std::string(kind_name(kind_of(o.geometry)))},
        {"params", geometry_params(o.geometry)},
        {"translation", vec_json(o.pose.translation())},
        {"ypr", vec_json(ypr)},
        {"dynamic", o.dynamic},
    });
  }
  const json root = {
      {"seed", scene.seed},
      {"workspace",
       {{"min", vec_json(scene.workspace.min)},
        {"max", vec_json(scene.workspace.max)}}},
      {"objects", objects},
  };
  return root.dump(2);
}

Scene parse_scene(std::string_view json_text) {
  try {
    const json root = json::parse(json_text);
    Scene scene;
    scene.seed = root.value("seed", std::uint64_t{0});
    if (root.contains("workspace")) {
      scene.workspace.min = vec_from(root["workspace"].at("min"));
      scene.workspace.max = vec_from(root["workspace"].at("max"));
    }
    std::vector<int> seen;
    for (const auto& jo : root.at("objects")) {
      SceneObject o;
      o.id = jo.at("id").get<int>();
      if (o.id <= 0) throw DataError("object ids must be positive");
      for (int s : seen) {
        if (s == o.id) {
          throw DataError("duplicate object id " + std::to_string(o.id));
        }
      }
      seen.push_back(o.id);
      o.class_id = jo.at("class").get<int>();
      const auto kind = kind_from_name(jo.at("kind").get<std::string>());
      o.geometry = geometry_from(kind, jo.at("params"));
      validate(o.geometry);
      const Vec3 ypr = vec_from(jo.at("ypr"));
      o.pose = Pose::from_ypr(ypr.x(), ypr.y(), ypr.z(),
                              vec_from(jo.at("translation")));
      o.dynamic = jo.value("dynamic", false);
      scene.objects.push_back(std::move(o));
    }
    return scene;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scene JSON: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("invalid scene: ") + e.what());
  }
}

}  // namespace indoorbev
