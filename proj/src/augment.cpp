#include "indoorbev/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "indoorbev/errors.hpp"
#include "indoorbev/rng.hpp"

namespace indoorbev {

namespace {

double bounding_radius(const LabelEntry& e) {
  return 0.5 * std::sqrt(e.l * e.l + e.w * e.w + e.h * e.h);
}

bool inside_label_box(const LabelEntry& e, const Point& p) {
  const double dx = p.x - e.x;
  const double dy = p.y - e.y;
  const double c = std::cos(e.yaw), s = std::sin(e.yaw);
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= e.l / 2 && std::abs(ly) <= e.w / 2 &&
         std::abs(p.z - e.z) <= e.h / 2;
}

}  // namespace

AugmentConfig AugmentConfig::training_default() {
  AugmentConfig cfg;
  cfg.rotation_min = -std::numbers::pi / 4;
  cfg.rotation_max = std::numbers::pi / 4;
  cfg.jitter_sigma = 0.01;
  cfg.global_noise_sigma = 0.05;
  cfg.decimation_keep_prob = 0.9;
  cfg.drop_prob = 0.05;
  cfg.box_location_sigma = 0.02;
  cfg.box_size_sigma = 0.02;
  cfg.box_yaw_sigma = 0.02;
  cfg.insert_min = 0;
  cfg.insert_max = 3;
  cfg.mask_perturb_prob = 0.1;
  return cfg;
}

void validate(const AugmentConfig& cfg) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  auto sigma = [](double s) { return s >= 0.0 && std::isfinite(s); };
  if (!prob(cfg.decimation_keep_prob) || !prob(cfg.drop_prob) ||
      !prob(cfg.mask_perturb_prob)) {
    throw ConfigError("augment probabilities must lie in [0, 1]");
  }
  if (!sigma(cfg.jitter_sigma) || !sigma(cfg.global_noise_sigma) ||
      !sigma(cfg.box_location_sigma) || !sigma(cfg.box_size_sigma) ||
      !sigma(cfg.box_yaw_sigma)) {
    throw ConfigError("augment sigmas must be non-negative");
  }
  if (!(cfg.rotation_max >= cfg.rotation_min)) {
    throw ConfigError("augment rotation range is inverted");
  }
  if (cfg.insert_min < 0 || cfg.insert_max < cfg.insert_min ||
      cfg.insert_attempts < 1 || !(cfg.insert_extent >= 0.0)) {
    throw ConfigError("invalid augment insertion settings");
  }
}

ObjectDatabase harvest_objects(const PointCloud& cloud,
                               const std::vector<LabelEntry>& labels,
                               std::size_t min_points) {
  ObjectDatabase db;
  for (const auto& label : labels) {
    DatabaseObject obj{label, {}};
    for (const Point& p : cloud.points) {
      if (inside_label_box(label, p)) obj.points.points.push_back(p);
    }
    if (obj.points.size() >= min_points) db.objects.push_back(std::move(obj));
  }
  return db;
}

void write_object_db(const fs::path& dir, const ObjectDatabase& db) {
  fs::create_directories(dir);
  std::vector<LabelEntry> labels;
  for (std::size_t k = 0; k < db.objects.size(); ++k) {
    labels.push_back(db.objects[k].label);
    write_cloud(dir / (frame_id(k) + ".bin"), db.objects[k].points);
  }
  write_labels(dir / "index.txt", labels);
}

ObjectDatabase read_object_db(const fs::path& dir) {
  ObjectDatabase db;
  const auto labels = parse_labels(dir / "index.txt");
  for (std::size_t k = 0; k < labels.size(); ++k) {
    db.objects.push_back({labels[k], read_cloud(dir / (frame_id(k) + ".bin"))});
  }
  return db;
}

AugmentResult augment_frame(const PointCloud& cloud,
                            const std::vector<LabelEntry>& labels,
                            const AugmentConfig& cfg, std::uint64_t seed,
                            const ObjectDatabase* database) {
  validate(cfg);
  Rng rng(seed);
  AugmentResult out;
  std::vector<Point> pts = cloud.points;
  out.labels = labels;

  // 1. global rotation
  const double theta = cfg.rotation_max > cfg.rotation_min
                           ? rng.uniform(cfg.rotation_min, cfg.rotation_max)
                           : cfg.rotation_min;
  if (theta != 0.0) {
    const double c = std::cos(theta), s = std::sin(theta);
    for (Point& p : pts) {
      const double x = p.x, y = p.y;
      p.x = static_cast<float>(c * x - s * y);
      p.y = static_cast<float>(s * x + c * y);
    }
    for (auto& e : out.labels) {
      const double x = e.x, y = e.y;
      e.x = c * x - s * y;
      e.y = s * x + c * y;
      e.yaw = wrap_angle(e.yaw + theta);
    }
  }

  // 2. jitter, then global translation noise
  if (cfg.jitter_sigma > 0.0) {
    for (Point& p : pts) {
      p.x = static_cast<float>(p.x + cfg.jitter_sigma * rng.normal());
      p.y = static_cast<float>(p.y + cfg.jitter_sigma * rng.normal());
      p.z = static_cast<float>(p.z + cfg.jitter_sigma * rng.normal());
    }
  }
  if (cfg.global_noise_sigma > 0.0) {
    const double gx = cfg.global_noise_sigma * rng.normal();
    const double gy = cfg.global_noise_sigma * rng.normal();
    const double gz = cfg.global_noise_sigma * rng.normal();
    for (Point& p : pts) {
      p.x = static_cast<float>(p.x + gx);
      p.y = static_cast<float>(p.y + gy);
      p.z = static_cast<float>(p.z + gz);
    }
    for (auto& e : out.labels) {
      e.x += gx;
      e.y += gy;
      e.z += gz;
    }
  }

  // 3. decimation and random drop
  if (cfg.decimation_keep_prob < 1.0 || cfg.drop_prob > 0.0) {
    std::vector<Point> kept;
    kept.reserve(pts.size());
    for (const Point& p : pts) {
      const bool keep = rng.uniform() < cfg.decimation_keep_prob;
      const bool drop = rng.uniform() < cfg.drop_prob;
      if (keep && !drop) kept.push_back(p);
    }
    pts = std::move(kept);
  }

  // 4. box noise
  if (cfg.box_location_sigma > 0.0 || cfg.box_size_sigma > 0.0 ||
      cfg.box_yaw_sigma > 0.0) {
    for (auto& e : out.labels) {
      e.x += cfg.box_location_sigma * rng.normal();
      e.y += cfg.box_location_sigma * rng.normal();
      e.z += cfg.box_location_sigma * rng.normal();
      for (double* d : {&e.h, &e.w, &e.l}) {
        *d *= std::max(0.1, 1.0 + cfg.box_size_sigma * rng.normal());
      }
      e.yaw = wrap_angle(e.yaw + cfg.box_yaw_sigma * rng.normal());
    }
  }

  // 5. object insertion
  if (database != nullptr && !database->objects.empty() && cfg.insert_max > 0) {
    const auto wanted = rng.range(cfg.insert_min, cfg.insert_max);
    int inserted = 0;
    for (std::int64_t n = 0; n < wanted; ++n) {
      bool placed = false;
      for (int attempt = 0; attempt < cfg.insert_attempts && !placed; ++attempt) {
        const auto& src = database->objects[rng.below(database->objects.size())];
        const double nx = rng.uniform(-cfg.insert_extent, cfg.insert_extent);
        const double ny = rng.uniform(-cfg.insert_extent, cfg.insert_extent);
        const double dyaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
        LabelEntry label = src.label;
        label.x = nx;
        label.y = ny;
        label.yaw = wrap_angle(src.label.yaw + dyaw);
        const double r = bounding_radius(label);
        const bool clear = std::all_of(
            out.labels.begin(), out.labels.end(), [&](const LabelEntry& other) {
              const double d = std::sqrt((other.x - nx) * (other.x - nx) +
                                         (other.y - ny) * (other.y - ny) +
                                         (other.z - label.z) * (other.z - label.z));
              return d > r + bounding_radius(other);
            });
        if (!clear) continue;
        const double c = std::cos(dyaw), s = std::sin(dyaw);
        for (const Point& p : src.points.points) {
          const double dx = p.x - src.label.x;
          const double dy = p.y - src.label.y;
          pts.push_back({static_cast<float>(nx + c * dx - s * dy),
                         static_cast<float>(ny + s * dx + c * dy), p.z,
                         p.intensity});
        }
        out.labels.push_back(label);
        placed = true;
        ++inserted;
      }
    }
    if (inserted < wanted) {
      out.warnings.push_back("inserted " + std::to_string(inserted) + " of " +
                             std::to_string(wanted) +
                             " objects; retry budget exhausted");
    }
  }

  // 6. shuffle
  rng.shuffle(pts);
  out.cloud.points = std::move(pts);
  return out;
}

BinaryMask dilate_cross(const BinaryMask& mask) {
  BinaryMask out(mask.height, mask.width, 0);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      const bool on = mask(r, c) || (r > 0 && mask(r - 1, c)) ||
                      (r + 1 < mask.height && mask(r + 1, c)) ||
                      (c > 0 && mask(r, c - 1)) ||
                      (c + 1 < mask.width && mask(r, c + 1));
      out(r, c) = on ? 1 : 0;
    }
  }
  return out;
}

BinaryMask erode_cross(const BinaryMask& mask) {
  BinaryMask out(mask.height, mask.width, 0);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      const bool on = mask(r, c) && r > 0 && mask(r - 1, c) &&
                      r + 1 < mask.height && mask(r + 1, c) && c > 0 &&
                      mask(r, c - 1) && c + 1 < mask.width && mask(r, c + 1);
      out(r, c) = on ? 1 : 0;
    }
  }
  return out;
}

BinaryMask perturb_mask(const BinaryMask& mask, double prob, std::uint64_t seed) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw ConfigError("mask perturbation probability must lie in [0, 1]");
  }
  Rng rng(seed);
  if (!rng.bernoulli(prob)) return mask;
  return rng.bernoulli(0.5) ? dilate_cross(mask) : erode_cross(mask);
}

}  // namespace indoorbev
