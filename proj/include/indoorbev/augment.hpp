#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "indoorbev/dataio.hpp"
#include "indoorbev/point_cloud.hpp"
#include "indoorbev/raster.hpp"

namespace indoorbev {

struct AugmentConfig {
  // Global rotation about z, theta ~ U(rotation_min, rotation_max).
  double rotation_min = 0.0;
  double rotation_max = 0.0;
  // Per-point, per-axis Gaussian jitter (m).
  double jitter_sigma = 0.0;
  // One Gaussian translation per frame, applied to points and labels (m).
  double global_noise_sigma = 0.0;
  // A point survives when it passes decimation (keep) and is not dropped.
  double decimation_keep_prob = 1.0;
  double drop_prob = 0.0;
  // Label noise.
  double box_location_sigma = 0.0;  // m, per axis
  double box_size_sigma = 0.0;      // fraction of each dimension
  double box_yaw_sigma = 0.0;       // rad
  // Object insertion from the object database.
  int insert_min = 0;
  int insert_max = 0;
  int insert_attempts = 20;
  double insert_extent = 4.0;  // inserted centres land in [-e, e]^2
  // Probability that perturb_mask changes a mask.
  double mask_perturb_prob = 0.0;

  /// Leaves every frame unchanged apart from point order.
  static AugmentConfig identity() { return {}; }
  static AugmentConfig training_default();
};

/// Throws ConfigError on probabilities outside [0, 1] or negative sigmas.
void validate(const AugmentConfig& cfg);

/// Object crop used for insertion: the label plus the points inside its box.
struct DatabaseObject {
  LabelEntry label;
  PointCloud points;
};

struct ObjectDatabase {
  std::vector<DatabaseObject> objects;
};

/// Points inside each label's oriented box (footprint and |z - z_c| <= h/2).
/// Objects with fewer than `min_points` points are skipped.
ObjectDatabase harvest_objects(const PointCloud& cloud,
                               const std::vector<LabelEntry>& labels,
                               std::size_t min_points = 5);

/// {dir}/index.txt holds the labels (label format, one per object) and
/// {dir}/{k}.bin the k-th crop, k zero-padded to 6 digits.
void write_object_db(const fs::path& dir, const ObjectDatabase& db);
ObjectDatabase read_object_db(const fs::path& dir);

struct AugmentResult {
  PointCloud cloud;
  std::vector<LabelEntry> labels;
  std::vector<std::string> warnings;
};

/// Stages, in order:
///   1. global z rotation of points and labels (yaw re-wrapped to [-pi, pi))
///   2. per-point jitter, then one global translation
///   3. decimation and random drop
///   4. box noise on every label
///   5. insertion of database objects, rejected when bounding spheres touch
///      an existing label; running out of attempts inserts fewer and warns
///   6. shuffle of the point order
/// Deterministic for a given seed.
AugmentResult augment_frame(const PointCloud& cloud,
                            const std::vector<LabelEntry>& labels,
                            const AugmentConfig& cfg, std::uint64_t seed,
                            const ObjectDatabase* database = nullptr);

/// 3x3 cross structuring element; outside the grid counts as 0.
BinaryMask dilate_cross(const BinaryMask& mask);
BinaryMask erode_cross(const BinaryMask& mask);

/// With probability `prob`, one dilation or erosion (fair coin); otherwise
/// the mask is returned unchanged.
BinaryMask perturb_mask(const BinaryMask& mask, double prob, std::uint64_t seed);

}  // namespace indoorbev
