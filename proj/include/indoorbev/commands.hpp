#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "indoorbev/config.hpp"
#include "indoorbev/dataio.hpp"

namespace indoorbev {

/// Sensor-frame labels for every labelled (non-plane) object in the scene.
/// Occlusion bands come from the scan's visible/unoccluded hit counts when
/// available.
std::vector<LabelEntry> scene_labels(const Scene& scene, const Pose& sensor_pose,
                                     const Taxonomy& taxonomy,
                                     const ScanResult* scan = nullptr);

struct GenerateReport {
  DatasetSplit split;
  std::vector<double> frame_seconds;  // indexed by frame
};

/// Writes `count` scanned scenes under `out` as {split}/points/{id}.bin and
/// {split}/labels/{id}.txt, plus splits.json and an object database built
/// from the training frames. Fewer than three frames all go to train.
GenerateReport cmd_generate(const RunConfig& cfg, int count,
                            const std::filesystem::path& out, int jobs,
                            std::ostream& log);

/// Scans one scene (loaded from `scene_path`, else generated from the seed)
/// and writes scene.json, cloud.bin, labels.txt and bev.bin into `out`.
void cmd_scan(const RunConfig& cfg,
              const std::optional<std::filesystem::path>& scene_path,
              const std::filesystem::path& out, int jobs, std::ostream& log);

struct RasterizeReport {
  std::size_t frames = 0;
  /// (relative frame path, message) per frame that could not be rasterized.
  std::vector<std::pair<std::string, std::string>> failures;
};

/// One instance map per labelled frame of `dataset`: {out}/{split}/{id}.bin,
/// a .pgm preview and a .json ground-truth description. A bad frame is
/// recorded and the rest still processed.
RasterizeReport cmd_rasterize(const RunConfig& cfg,
                              const std::filesystem::path& dataset,
                              const std::filesystem::path& out, int jobs,
                              std::ostream& log);

/// Augments every training frame of `dataset` into `out`. Validation and
/// test frames and the split manifest are copied unchanged.
std::size_t cmd_augment(const RunConfig& cfg,
                        const std::filesystem::path& dataset,
                        const std::filesystem::path& out, int jobs,
                        std::ostream& log);

struct EvalReport {
  std::size_t frames = 0;
  std::map<double, ApResult> ap;  // keyed by IoU threshold
  double miou = 0.0;
  PqResult pq;
};

/// Frames loaded from matching relative paths: predictions `{pred}/X.json`
/// against ground truth `{gt}/X.json` + `{gt}/X.bin`. Applies the confidence
/// threshold before computing metrics. Throws DataError listing offenders
/// when the two directories hold different frames.
EvalReport evaluate_dirs(const RunConfig& cfg, const std::filesystem::path& pred,
                         const std::filesystem::path& gt);

std::string eval_report_json(const EvalReport& report, const Taxonomy& taxonomy);
std::string eval_report_table(const EvalReport& report, const Taxonomy& taxonomy);

/// evaluate_dirs plus the JSON report and table on `log`; the JSON also goes
/// to {out}/metrics.json when `out` is set.
EvalReport cmd_eval(const RunConfig& cfg, const std::filesystem::path& pred,
                    const std::filesystem::path& gt,
                    const std::optional<std::filesystem::path>& out,
                    std::ostream& log);

struct BenchOptions {
  int objects = 50;
  int azimuth_count = 1000;
  int elevation_count = 100;
  std::vector<int> workers = {1, 2, 4, 8};
  int repeats = 3;
};

struct BenchRun {
  int workers = 1;
  double seconds = 0.0;  // best of the repeats
  double rays_per_second = 0.0;
};

struct BenchReport {
  std::size_t rays = 0;
  int objects = 0;
  unsigned hardware_concurrency = 0;
  std::vector<BenchRun> runs;
  /// Time with the fewest workers over time with the most.
  double scaling_ratio = 0.0;
};

/// Scene with exactly `objects` primitives (no floor) in the configured
/// workspace.
Scene bench_scene(const RunConfig& cfg, int objects);

BenchReport cmd_bench(const RunConfig& cfg, const BenchOptions& options,
                      std::ostream& log);
std::string bench_report_json(const BenchReport& report);

/// Full command line without the program name. Returns the process exit code:
/// 0 ok, 1 usage or config error, 2 data error, 3 internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace indoorbev
