#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "indoorbev/match_eval.hpp"
#include "indoorbev/taxonomy.hpp"

namespace indoorbev {

/// Run-length encoding of a binary mask: row-major, alternating run lengths
/// of 0s and 1s, always starting with a (possibly empty) run of 0s.
std::vector<std::uint32_t> rle_encode(const BinaryMask& mask);
/// Throws DataError unless the runs cover exactly height * width cells.
BinaryMask rle_decode(const std::vector<std::uint32_t>& runs, int height,
                      int width);

/// Predictions for one frame, stored as JSON:
///
///   {"frame_id": "000042", "height": 500, "width": 500,
///    "predictions": [
///      {"class_probs": [...], "dims": [l, w, h], "position": [x, y, z],
///       "yaw": 0.0, "mask": {"rle": [...]}},
///      {"class_probs": [...], ..., "mask": {"file": "m.bin", "id": 3}}]}
///
/// A "file" mask points at an instance-map file (relative paths resolve
/// against the prediction file's directory); the mask is cells == id, or
/// cells != 0 when id is omitted.
struct FramePredictions {
  std::string frame_id;
  int height = 0;
  int width = 0;
  std::vector<Prediction> predictions;
};

std::string serialize_predictions(const FramePredictions& frame);
/// Throws DataError on malformed content.
FramePredictions parse_predictions(const std::string& json_text,
                                   const std::filesystem::path& base_dir = {});

/// Ground-truth instance metadata written next to each rasterized mask.
struct GtInstanceInfo {
  std::uint32_t instance_id = 0;
  int class_id = 0;
  Vec3 dims = Vec3::Ones();  // (length, width, height)
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

struct FrameGroundTruth {
  std::string frame_id;
  int height = 0;
  int width = 0;
  std::vector<GtInstanceInfo> instances;
};

std::string serialize_ground_truth(const FrameGroundTruth& gt,
                                   const Taxonomy& taxonomy);
FrameGroundTruth parse_ground_truth(const std::string& json_text,
                                    const Taxonomy& taxonomy);

/// One certain query per instance present in `map` (one-hot class, exact
/// mask and box). Used to check that the evaluation saturates.
FramePredictions predictions_from_ground_truth(const FrameGroundTruth& gt,
                                               const InstanceMaskMap& map,
                                               const Taxonomy& taxonomy);

}  // namespace indoorbev
