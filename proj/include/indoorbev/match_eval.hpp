#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "indoorbev/geometry.hpp"
#include "indoorbev/raster.hpp"

namespace indoorbev {

using ProbMask = Grid2D<float>;

/// One query of a set-prediction head. class_probs has N_cls entries summing
/// to 1, the last being background.
struct Prediction {
  std::vector<double> class_probs;
  ProbMask mask_probs;
  Vec3 dims = Vec3::Ones();  // (length, width, height)
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

struct GroundTruth {
  int class_id = 0;
  BinaryMask mask;
  Vec3 dims = Vec3::Ones();
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

/// Matching weights (alpha_*) and loss weights (lambda_*). Defaults use the
/// published loss weight vector (2, 5, 2, 0.1, 0.1, 0.1); matching weights
/// mirror it.
struct MatchWeights {
  double cost_class = 2.0;
  double cost_dice = 5.0;
  double cost_focal = 2.0;
  double cost_box = 0.1;

  double loss_class = 2.0;
  double loss_dice = 5.0;
  double loss_mask = 2.0;
  double loss_dims = 0.1;
  double loss_position = 0.1;
  double loss_yaw = 0.1;

  double background_weight = 0.1;
  double focal_gamma = 2.0;
  double focal_alpha = 0.25;
};

/// Throws ConfigError when a weight is negative or not finite.
void validate(const MatchWeights& w);

inline constexpr double kDiceEpsilon = 1e-6;
inline constexpr double kProbClamp = 1e-7;

/// (2 sum(p g) + eps) / (sum p + sum g + eps). Throws ConfigError on shape
/// mismatch.
double dice_score(const ProbMask& pred, const BinaryMask& gt);

/// Mean over cells of -alpha_t (1 - p_t)^gamma log p_t with predictions
/// clamped to [1e-7, 1 - 1e-7].
double focal_loss(const ProbMask& pred, const BinaryMask& gt, double gamma,
                  double alpha);

/// sum |pred - gt| over (dims, position, yaw) with the yaw difference wrapped
/// to (-pi, pi].
double box_l1(const Prediction& pred, const GroundTruth& gt);

double match_cost(const Prediction& pred, const GroundTruth& gt,
                  const MatchWeights& w);

struct Assignment {
  /// (query, gt) sorted by query.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> unmatched_queries;
  std::vector<std::size_t> unmatched_gts;
  double total_cost = 0.0;
};

/// Row-major cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return values[r * cols + c];
  }
};

/// Minimum-cost assignment of min(N, M) pairs (queries = rows). Among optimal
/// assignments (costs equal within 1e-12 relative) the lexicographically
/// smallest list of (query, gt) pairs is returned. Throws ConfigError on
/// non-finite costs.
Assignment hungarian(const CostMatrix& cost);

struct LossBreakdown {
  double classification = 0.0;  // matched CE plus weighted background CE
  double dice = 0.0;
  double mask = 0.0;
  double dims = 0.0;
  double position = 0.0;
  double yaw = 0.0;
  double total = 0.0;
  Assignment assignment;
};

/// Hungarian matching under match_cost, then the weighted set loss over
/// matched pairs plus background_weight * loss_class * CE(background) for
/// every unmatched query. Each breakdown field already carries its weight.
/// Throws ConfigError when there are more ground truths than queries.
LossBreakdown set_loss(const std::vector<Prediction>& preds,
                       const std::vector<GroundTruth>& gts,
                       const MatchWeights& w);

// ---------------------------------------------------------------------------
// Metrics

/// |a ∩ b| / |a ∪ b|; 0 when both are empty. Throws ConfigError on shape
/// mismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

struct Detection {
  int class_id = 0;
  double confidence = 0.0;
  BinaryMask mask;
};

struct GtInstance {
  int class_id = 0;
  BinaryMask mask;
};

struct EvalFrame {
  std::vector<Detection> detections;
  std::vector<GtInstance> gts;
};

struct ApResult {
  std::map<int, double> per_class;  // classes with at least one gt
  double mean = 0.0;                // macro average over per_class
  /// IoU of every true positive, grouped by class.
  std::map<int, std::vector<double>> tp_ious;
};

/// Per class, detections across all frames are taken in descending
/// confidence (ties: frame, then detection index) and greedily matched to the
/// unmatched same-class gt of their frame with the highest IoU >= threshold.
/// AP is the exact area under the all-point interpolated PR curve.
ApResult average_precision(const std::vector<EvalFrame>& frames,
                           double iou_threshold);

/// Mean of per-class mean TP IoU over classes with at least one TP.
double mean_iou(const std::map<int, std::vector<double>>& tp_ious);

struct PqStats {
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct PqResult {
  std::map<int, PqStats> per_class;  // classes present in gts or detections
  /// sq and rq are class means; pq = sq * rq.
  PqStats overall;
};

/// Pairs with IoU > 0.5 are true positives (unique by construction).
PqResult panoptic_quality(const std::vector<EvalFrame>& frames);

/// Detection built from a query: class = argmax over foreground classes,
/// confidence = that probability, mask = mask_probs >= mask_threshold.
Detection to_detection(const Prediction& pred, double mask_threshold = 0.5);

}  // namespace indoorbev
