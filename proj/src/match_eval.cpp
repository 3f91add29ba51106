#include "indoorbev/match_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "indoorbev/errors.hpp"

namespace indoorbev {

namespace {

template <typename A, typename B>
void require_same_shape(const Grid2D<A>& a, const Grid2D<B>& b,
                        const char* what) {
  if (a.height != b.height || a.width != b.width) {
    throw ConfigError(std::string(what) + ": mask shapes differ (" +
                      std::to_string(a.height) + "x" + std::to_string(a.width) +
                      " vs " + std::to_string(b.height) + "x" +
                      std::to_string(b.width) + ")");
  }
}

double safe_log(double p) { return std::log(std::max(p, 1e-300)); }

// --- Hungarian core ---------------------------------------------------------

struct SubSolution {
  double total = 0.0;
  // row_to_col[i] = column index (into the sub-problem), or -1.
  std::vector<long> row_to_col;
};

/// Shortest augmenting path with potentials (Kuhn-Munkres, O(n^2 m)).
/// Requires rows <= cols; every row is assigned.
std::vector<long> solve_wide(const std::vector<double>& a, std::size_t n,
                             std::size_t m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<long> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<long>(j - 1);
  }
  return row_to_col;
}

/// Optimal assignment of the sub-matrix selected by `rows` x `cols`.
SubSolution solve_sub(const CostMatrix& cost, const std::vector<std::size_t>& rows,
                      const std::vector<std::size_t>& cols) {
  SubSolution out;
  out.row_to_col.assign(rows.size(), -1);
  if (rows.empty() || cols.empty()) return out;
  const bool transpose = rows.size() > cols.size();
  const std::size_t n = transpose ? cols.size() : rows.size();
  const std::size_t m = transpose ? rows.size() : cols.size();
  std::vector<double> a(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i * m + j] = transpose ? cost(rows[j], cols[i]) : cost(rows[i], cols[j]);
    }
  }
  const auto assign = solve_wide(a, n, m);
  if (transpose) {
    for (std::size_t c = 0; c < n; ++c) {
      out.row_to_col[static_cast<std::size_t>(assign[c])] = static_cast<long>(c);
    }
  } else {
    out.row_to_col = assign;
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (out.row_to_col[r] >= 0) {
      out.total += cost(rows[r], cols[static_cast<std::size_t>(out.row_to_col[r])]);
    }
  }
  return out;
}

std::vector<std::size_t> without(const std::vector<std::size_t>& v,
                                 std::size_t pos) {
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != pos) out.push_back(v[i]);
  }
  return out;
}

}  // namespace

void validate(const MatchWeights& w) {
  for (double x : {w.cost_class, w.cost_dice, w.cost_focal, w.cost_box,
                   w.loss_class, w.loss_dice, w.loss_mask, w.loss_dims,
                   w.loss_position, w.loss_yaw, w.background_weight,
                   w.focal_gamma, w.focal_alpha}) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ConfigError("match weights must be finite and non-negative");
    }
  }
}

double dice_score(const ProbMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt, "dice_score");
  double inter = 0.0, sp = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double p = pred.data[i];
    const double g = gt.data[i] ? 1.0 : 0.0;
    inter += p * g;
    sp += p;
    sg += g;
  }
  return (2.0 * inter + kDiceEpsilon) / (sp + sg + kDiceEpsilon);
}

double focal_loss(const ProbMask& pred, const BinaryMask& gt, double gamma,
                  double alpha) {
  require_same_shape(pred, gt, "focal_loss");
  if (pred.data.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double p = std::clamp(static_cast<double>(pred.data[i]), kProbClamp,
                                1.0 - kProbClamp);
    const bool positive = gt.data[i] != 0;
    const double pt = positive ? p : 1.0 - p;
    const double at = positive ? alpha : 1.0 - alpha;
    sum += -at * std::pow(1.0 - pt, gamma) * std::log(pt);
  }
  return sum / static_cast<double>(pred.data.size());
}

double box_l1(const Prediction& pred, const GroundTruth& gt) {
  return (pred.dims - gt.dims).cwiseAbs().sum() +
         (pred.position - gt.position).cwiseAbs().sum() +
         std::abs(wrap_angle_residual(pred.yaw - gt.yaw));
}

double match_cost(const Prediction& pred, const GroundTruth& gt,
                  const MatchWeights& w) {
  if (gt.class_id < 0 ||
      static_cast<std::size_t>(gt.class_id) >= pred.class_probs.size()) {
    throw ConfigError("ground-truth class outside the prediction's classes");
  }
  const double p_cls = pred.class_probs[static_cast<std::size_t>(gt.class_id)];
  return w.cost_class * (1.0 - p_cls) +
         w.cost_dice * (1.0 - dice_score(pred.mask_probs, gt.mask)) +
         w.cost_focal *
             focal_loss(pred.mask_probs, gt.mask, w.focal_gamma, w.focal_alpha) +
         w.cost_box * box_l1(pred, gt);
}

Assignment hungarian(const CostMatrix& cost) {
  for (double c : cost.values) {
    if (!std::isfinite(c)) throw ConfigError("hungarian: non-finite cost entry");
  }
  Assignment out;
  std::vector<std::size_t> rows(cost.rows), cols(cost.cols);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  if (rows.empty() || cols.empty()) {
    out.unmatched_queries = rows;
    out.unmatched_gts = cols;
    return out;
  }

  const double optimum = solve_sub(cost, rows, cols).total;
  const double tol = 1e-12 * std::max(1.0, std::abs(optimum));

  // Fix pairs query by query, taking the smallest gt that still admits an
  // optimal completion.
  double fixed_cost = 0.0;
  std::vector<std::size_t> free_rows = rows;
  std::vector<std::size_t> free_cols = cols;
  while (!free_rows.empty() && !free_cols.empty()) {
    const std::size_t q = free_rows.front();
    const auto rest_rows = without(free_rows, 0);
    const bool must_match = free_rows.size() <= free_cols.size();
    long chosen = -1;
    double best_candidate = std::numeric_limits<double>::infinity();
    long best_pos = -1;
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      const double candidate =
          fixed_cost + cost(q, free_cols[k]) +
          solve_sub(cost, rest_rows, without(free_cols, k)).total;
      if (candidate <= optimum + tol) {
        chosen = static_cast<long>(k);
        break;
      }
      if (candidate < best_candidate) {
        best_candidate = candidate;
        best_pos = static_cast<long>(k);
      }
    }
    if (chosen < 0 && must_match) chosen = best_pos;  // rounding fallback
    if (chosen >= 0) {
      const std::size_t g = free_cols[static_cast<std::size_t>(chosen)];
      out.pairs.emplace_back(q, g);
      fixed_cost += cost(q, g);
      free_cols = without(free_cols, static_cast<std::size_t>(chosen));
    } else {
      out.unmatched_queries.push_back(q);
    }
    free_rows = rest_rows;
  }
  for (auto q : free_rows) out.unmatched_queries.push_back(q);
  out.unmatched_gts = free_cols;
  std::sort(out.unmatched_queries.begin(), out.unmatched_queries.end());

  out.total_cost = 0.0;
  for (const auto& [q, g] : out.pairs) out.total_cost += cost(q, g);
  return out;
}

LossBreakdown set_loss(const std::vector<Prediction>& preds,
                       const std::vector<GroundTruth>& gts,
                       const MatchWeights& w) {
  validate(w);
  if (gts.size() > preds.size()) {
    throw ConfigError("set_loss: " + std::to_string(gts.size()) +
                      " ground truths exceed " + std::to_string(preds.size()) +
                      " queries");
  }
  CostMatrix cost(preds.size(), gts.size());
  for (std::size_t q = 0; q < preds.size(); ++q) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      cost(q, g) = match_cost(preds[q], gts[g], w);
    }
  }

  LossBreakdown loss;
  loss.assignment = hungarian(cost);
  for (const auto& [q, g] : loss.assignment.pairs) {
    const Prediction& p = preds[q];
    const GroundTruth& t = gts[g];
    loss.classification +=
        w.loss_class * -safe_log(p.class_probs[static_cast<std::size_t>(t.class_id)]);
    loss.dice += w.loss_dice * (1.0 - dice_score(p.mask_probs, t.mask));
    loss.mask += w.loss_mask *
                 focal_loss(p.mask_probs, t.mask, w.focal_gamma, w.focal_alpha);
    loss.dims += w.loss_dims * (p.dims - t.dims).cwiseAbs().sum();
    loss.position += w.loss_position * (p.position - t.position).cwiseAbs().sum();
    loss.yaw += w.loss_yaw * std::abs(wrap_angle_residual(p.yaw - t.yaw));
  }
  for (std::size_t q : loss.assignment.unmatched_queries) {
    const auto& probs = preds[q].class_probs;
    if (probs.empty()) throw ConfigError("set_loss: empty class_probs");
    loss.classification +=
        w.background_weight * w.loss_class * -safe_log(probs.back());
  }
  loss.total = loss.classification + loss.dice + loss.mask + loss.dims +
               loss.position + loss.yaw;
  return loss;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "mask_iou");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool x = a.data[i] != 0;
    const bool y = b.data[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

ApResult average_precision(const std::vector<EvalFrame>& frames,
                           double iou_threshold) {
  struct Ref {
    std::size_t frame;
    std::size_t index;
    double confidence;
  };
  std::map<int, std::vector<Ref>> dets_by_class;
  std::map<int, std::size_t> gt_count;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t i = 0; i < frames[f].detections.size(); ++i) {
      const auto& d = frames[f].detections[i];
      dets_by_class[d.class_id].push_back({f, i, d.confidence});
    }
    for (const auto& g : frames[f].gts) ++gt_count[g.class_id];
  }

  ApResult result;
  for (const auto& [cls, n_gt] : gt_count) {
    auto dets = dets_by_class[cls];
    std::stable_sort(dets.begin(), dets.end(), [](const Ref& a, const Ref& b) {
      return a.confidence > b.confidence;
    });
    std::vector<std::vector<char>> taken(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
      taken[f].assign(frames[f].gts.size(), 0);
    }
    std::vector<char> is_tp(dets.size(), 0);
    for (std::size_t k = 0; k < dets.size(); ++k) {
      const auto& frame = frames[dets[k].frame];
      const auto& det = frame.detections[dets[k].index];
      double best = -1.0;
      long best_gt = -1;
      for (std::size_t g = 0; g < frame.gts.size(); ++g) {
        if (frame.gts[g].class_id != cls || taken[dets[k].frame][g]) continue;
        const double iou = mask_iou(det.mask, frame.gts[g].mask);
        if (iou > best) {
          best = iou;
          best_gt = static_cast<long>(g);
        }
      }
      if (best_gt >= 0 && best >= iou_threshold) {
        taken[dets[k].frame][static_cast<std::size_t>(best_gt)] = 1;
        is_tp[k] = 1;
        result.tp_ious[cls].push_back(best);
      }
    }
    // All-point interpolation: each TP contributes 1/n_gt of recall at the
    // best precision achieved at or beyond its rank.
    std::vector<double> precision(dets.size());
    std::size_t tp = 0;
    for (std::size_t k = 0; k < dets.size(); ++k) {
      tp += is_tp[k] ? 1 : 0;
      precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    }
    for (std::size_t k = dets.size(); k-- > 1;) {
      precision[k - 1] = std::max(precision[k - 1], precision[k]);
    }
    double ap = 0.0;
    for (std::size_t k = 0; k < dets.size(); ++k) {
      if (is_tp[k]) ap += precision[k] / static_cast<double>(n_gt);
    }
    result.per_class[cls] = ap;
  }
  if (!result.per_class.empty()) {
    double s = 0.0;
    for (const auto& [cls, ap] : result.per_class) s += ap;
    result.mean = s / static_cast<double>(result.per_class.size());
  }
  return result;
}

double mean_iou(const std::map<int, std::vector<double>>& tp_ious) {
  double sum = 0.0;
  std::size_t classes = 0;
  for (const auto& [cls, ious] : tp_ious) {
    if (ious.empty()) continue;
    sum += std::accumulate(ious.begin(), ious.end(), 0.0) /
           static_cast<double>(ious.size());
    ++classes;
  }
  return classes == 0 ? 0.0 : sum / static_cast<double>(classes);
}

PqResult panoptic_quality(const std::vector<EvalFrame>& frames) {
  struct Acc {
    double iou_sum = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<int, Acc> acc;
  for (const auto& frame : frames) {
    std::vector<char> det_used(frame.detections.size(), 0);
    std::vector<char> gt_used(frame.gts.size(), 0);
    struct Candidate {
      double iou;
      std::size_t det, gt;
    };
    std::vector<Candidate> candidates;
    for (std::size_t d = 0; d < frame.detections.size(); ++d) {
      for (std::size_t g = 0; g < frame.gts.size(); ++g) {
        if (frame.detections[d].class_id != frame.gts[g].class_id) continue;
        const double iou = mask_iou(frame.detections[d].mask, frame.gts[g].mask);
        if (iou > 0.5) candidates.push_back({iou, d, g});
      }
    }
    // IoU > 0.5 is already one-to-one for non-overlapping masks; the sort
    // keeps it one-to-one when predicted masks overlap.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.iou > b.iou;
                     });
    for (const auto& c : candidates) {
      if (det_used[c.det] || gt_used[c.gt]) continue;
      det_used[c.det] = gt_used[c.gt] = 1;
      auto& a = acc[frame.gts[c.gt].class_id];
      a.iou_sum += c.iou;
      ++a.tp;
    }
    for (std::size_t d = 0; d < frame.detections.size(); ++d) {
      auto& a = acc[frame.detections[d].class_id];
      if (!det_used[d]) ++a.fp;
    }
    for (std::size_t g = 0; g < frame.gts.size(); ++g) {
      auto& a = acc[frame.gts[g].class_id];
      if (!gt_used[g]) ++a.fn;
    }
  }

  PqResult result;
  double sq_sum = 0.0, rq_sum = 0.0;
  for (const auto& [cls, a] : acc) {
    PqStats s;
    s.tp = a.tp;
    s.fp = a.fp;
    s.fn = a.fn;
    s.sq = a.tp == 0 ? 0.0 : a.iou_sum / static_cast<double>(a.tp);
    const double denom = static_cast<double>(a.tp) +
                         0.5 * static_cast<double>(a.fp) +
                         0.5 * static_cast<double>(a.fn);
    s.rq = denom == 0.0 ? 0.0 : static_cast<double>(a.tp) / denom;
    s.pq = s.sq * s.rq;
    result.per_class[cls] = s;
    sq_sum += s.sq;
    rq_sum += s.rq;
    result.overall.tp += a.tp;
    result.overall.fp += a.fp;
    result.overall.fn += a.fn;
  }
  if (!acc.empty()) {
    const auto n = static_cast<double>(acc.size());
    result.overall.sq = sq_sum / n;
    result.overall.rq = rq_sum / n;
    result.overall.pq = result.overall.sq * result.overall.rq;
  }
  return result;
}

Detection to_detection(const Prediction& pred, double mask_threshold) {
  if (pred.class_probs.size() < 2) {
    throw ConfigError("prediction needs at least one foreground class");
  }
  Detection d;
  const std::size_t fg = pred.class_probs.size() - 1;
  std::size_t best = 0;
  for (std::size_t k = 1; k < fg; ++k) {
    if (pred.class_probs[k] > pred.class_probs[best]) best = k;
  }
  d.class_id = static_cast<int>(best);
  d.confidence = pred.class_probs[best];
  d.mask = BinaryMask(pred.mask_probs.height, pred.mask_probs.width, 0);
  for (std::size_t i = 0; i < pred.mask_probs.data.size(); ++i) {
    d.mask.data[i] = pred.mask_probs.data[i] >= mask_threshold ? 1 : 0;
  }
  return d;
}

}  // namespace indoorbev
