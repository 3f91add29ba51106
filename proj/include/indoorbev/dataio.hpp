#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "indoorbev/point_cloud.hpp"
#include "indoorbev/raster.hpp"
#include "indoorbev/taxonomy.hpp"

namespace indoorbev {

namespace fs = std::filesystem;

// Point clouds: N x 4 little-endian f32 (x, y, z, intensity), no header.

void write_cloud(std::ostream& out, const PointCloud& cloud);
/// Throws DataError when the byte length is not a multiple of 16.
PointCloud read_cloud(std::istream& in);
void write_cloud(const fs::path& path, const PointCloud& cloud);
PointCloud read_cloud(const fs::path& path);

/// One object annotation. A strict 10-field line:
///   type truncation occlusion h w l x y z yaw
/// `location` is the object centre.
struct LabelEntry {
  std::string type;
  double truncation = 0.0;
  int occlusion = 0;
  double h = 1.0, w = 1.0, l = 1.0;
  double x = 0.0, y = 0.0, z = 0.0;
  double yaw = 0.0;
};

inline constexpr const char* kDontCare = "DontCare";

/// Floats are rendered with 6 decimals.
void write_labels(std::ostream& out, const std::vector<LabelEntry>& entries);
void write_labels(const fs::path& path, const std::vector<LabelEntry>& entries);

/// Blank lines are ignored, extra trailing fields tolerated and DontCare
/// entries skipped. Throws DataError naming the 1-based line on malformed
/// input.
std::vector<LabelEntry> parse_labels(std::istream& in);
std::vector<LabelEntry> parse_labels(const fs::path& path);

/// (l, w, h) from the label's (h, w, l). Ids are id_offset + 1, + 2, ... in
/// order. DontCare entries are skipped; other unknown types throw DataError.
std::vector<FootprintBox> labels_to_footprints(
    const std::vector<LabelEntry>& entries, const Taxonomy& taxonomy,
    std::uint32_t id_offset = 0);

/// Occlusion band from the fraction of an object's unoccluded returns that
/// are actually visible: >= 0.5 -> 0, >= 0.25 -> 1, > 0 -> 2, else 3.
int occlusion_level(std::size_t visible, std::size_t unoccluded);

/// Zero-padded 6-digit frame id.
std::string frame_id(std::size_t index);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

/// Seeded shuffle followed by a contiguous partition. Sizes use largest
/// remainders of ratio * n and every split receives at least one frame.
/// Throws ConfigError for fewer than 3 frames or ratios that are not
/// positive and summing to 1 (1e-9).
DatasetSplit split_dataset(const std::vector<std::string>& frames,
                           const std::array<double, 3>& ratios,
                           std::uint64_t seed);

/// {"seed", "ratios", "train", "val", "test"}.
std::string serialize_splits(const DatasetSplit& split,
                             const std::array<double, 3>& ratios,
                             std::uint64_t seed);
DatasetSplit parse_splits(const std::string& json_text);

/// Layout helpers: {root}/{split}/points/{id}.bin and
/// {root}/{split}/labels/{id}.txt.
struct DatasetLayout {
  fs::path root;

  fs::path cloud_path(const std::string& split, const std::string& id) const {
    return root / split / "points" / (id + ".bin");
  }
  fs::path label_path(const std::string& split, const std::string& id) const {
    return root / split / "labels" / (id + ".txt");
  }
  fs::path splits_path() const { return root / "splits.json"; }
  fs::path object_db_dir() const { return root / "object_db"; }
};

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace indoorbev
