#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "indoorbev/augment.hpp"
#include "indoorbev/bevgrid.hpp"
#include "indoorbev/match_eval.hpp"
#include "indoorbev/raycast.hpp"
#include "indoorbev/scene.hpp"

namespace indoorbev {

struct EvalSettings {
  /// Detections whose best foreground probability is below this are dropped.
  double confidence_threshold = 0.8;
  std::vector<double> iou_thresholds = {0.25, 0.5};
  /// AP operating point whose true positives feed mIoU.
  double miou_iou_threshold = 0.5;
  double mask_threshold = 0.5;
  /// Maximum predictions per frame file.
  int max_queries = 30;
};

/// Everything a CLI run needs. Defaults mirror the reference setup:
/// 0.02 m cells over [-5, 5] x [-5, 5] x [-3, 3], 30 queries, 0.8 threshold.
struct RunConfig {
  std::uint64_t seed = 0;
  GridSpec grid;
  ScanPattern scan;
  Pose sensor_pose;
  NoiseModel noise{0.01, 0.0, 0};
  SceneConfig scene = SceneConfig::indoor_default();
  AugmentConfig augment = AugmentConfig::training_default();
  EvalSettings eval;
  MatchWeights weights;
  std::array<double, 3> split_ratios = {4.5 / 6.5, 1.0 / 6.5, 1.0 / 6.5};

  const Taxonomy& taxonomy() const { return scene.taxonomy; }
};

/// Throws ConfigError describing the first problem found.
void validate(const RunConfig& cfg);

/// Missing keys keep their defaults; unknown top-level keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string serialize_run_config(const RunConfig& cfg);

}  // namespace indoorbev
