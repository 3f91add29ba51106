#include "indoorbev/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "indoorbev/augment.hpp"
#include "indoorbev/errors.hpp"
#include "indoorbev/predictions_io.hpp"
#include "indoorbev/rng.hpp"
#include "json.hpp"

namespace indoorbev {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// (by index) is rethrown after all threads finish.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  if (threads == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Independent seed streams derived from the run seed.
constexpr std::uint64_t kSceneStream = 0x5343454e45ULL;
constexpr std::uint64_t kNoiseStream = 0x4e4f495345ULL;
constexpr std::uint64_t kSplitStream = 0x53504c4954ULL;
constexpr std::uint64_t kAugmentStream = 0x4155474dULL;

std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t stream, std::size_t i) {
  return stream_seed(stream_seed(seed, stream), i);
}

const char* kSplitNames[] = {"train", "val", "test"};

const std::vector<std::string>& split_list(const DatasetSplit& s, int k) {
  return k == 0 ? s.train : (k == 1 ? s.val : s.test);
}

void copy_file_into(const fs::path& from, const fs::path& to) {
  fs::create_directories(to.parent_path());
  std::error_code ec;
  fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
  if (ec) throw DataError("cannot copy " + from.string() + ": " + ec.message());
}

// Relative paths (without extension) of every `*.json` below `dir`.
std::set<std::string> json_stems(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::set<std::string> stems;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    auto rel = fs::relative(entry.path(), dir);
    rel.replace_extension();
    stems.insert(rel.generic_string());
  }
  return stems;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

}  // namespace

std::vector<LabelEntry> scene_labels(const Scene& scene, const Pose& sensor_pose,
                                     const Taxonomy& taxonomy,
                                     const ScanResult* scan) {
  const Pose to_sensor = sensor_pose.inverse();
  std::vector<LabelEntry> labels;
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto& obj = scene.objects[k];
    if (kind_of(obj.geometry) == PrimitiveKind::plane) continue;
    if (!taxonomy.valid_id(obj.class_id)) continue;
    const Vec3 he = local_half_extents(obj.geometry);
    const Pose rel = to_sensor.compose(obj.pose);
    LabelEntry e;
    e.type = taxonomy.name_of(obj.class_id);
    e.truncation = 0.0;
    e.occlusion = scan && !scan->unoccluded_hits.empty()
                      ? occlusion_level(scan->visible_hits[k], scan->unoccluded_hits[k])
                      : 0;
    e.h = 2.0 * he.z();
    e.w = 2.0 * he.y();
    e.l = 2.0 * he.x();
    e.x = rel.translation().x();
    e.y = rel.translation().y();
    e.z = rel.translation().z();
    e.yaw = wrap_angle(rel.ypr().x());
    labels.push_back(e);
  }
  return labels;
}

GenerateReport cmd_generate(const RunConfig& cfg, int count, const fs::path& out,
                            int jobs, std::ostream& log) {
  if (count < 1) throw ConfigError("--count must be >= 1");
  const auto n = static_cast<std::size_t>(count);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = frame_id(i);

  GenerateReport report;
  if (n < 3) {
    log << "warning: fewer than 3 frames, all assigned to train\n";
    report.split.train = ids;
  } else {
    report.split = split_dataset(ids, cfg.split_ratios, stream_seed(cfg.seed, kSplitStream));
  }
  std::vector<int> split_of(n, 0);
  for (int k = 0; k < 3; ++k) {
    for (const auto& id : split_list(report.split, k)) {
      split_of[static_cast<std::size_t>(std::stoul(id))] = k;
    }
  }

  const DatasetLayout layout{out};
  std::vector<PointCloud> train_clouds(n);
  std::vector<std::vector<LabelEntry>> train_labels(n);
  report.frame_seconds.assign(n, 0.0);

  parallel_for(n, jobs, [&](std::size_t i) {
    const auto start = Clock::now();
    const Scene scene = generate_scene(cfg.scene, frame_seed(cfg.seed, kSceneStream, i));
    NoiseModel noise = cfg.noise;
    noise.seed = frame_seed(cfg.seed, kNoiseStream, i);
    const ScanResult scan = cast_scan_detailed(scene, cfg.sensor_pose, cfg.scan, noise,
                                               {.workers = 1, .count_unoccluded = true});
    auto labels = scene_labels(scene, cfg.sensor_pose, cfg.taxonomy(), &scan);
    const std::string split = kSplitNames[split_of[i]];
    write_cloud(layout.cloud_path(split, ids[i]), scan.cloud);
    write_labels(layout.label_path(split, ids[i]), labels);
    if (split_of[i] == 0) {
      train_clouds[i] = scan.cloud;
      train_labels[i] = std::move(labels);
    }
    report.frame_seconds[i] = seconds_since(start);
  });

  write_text_file(layout.splits_path(),
                  serialize_splits(report.split, cfg.split_ratios, cfg.seed));

  ObjectDatabase db;
  for (std::size_t i = 0; i < n; ++i) {
    if (split_of[i] != 0) continue;
    auto part = harvest_objects(train_clouds[i], train_labels[i]);
    for (auto& o : part.objects) db.objects.push_back(std::move(o));
  }
  write_object_db(layout.object_db_dir(), db);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    log << "frame " << ids[i] << " (" << kSplitNames[split_of[i]] << ") "
        << fmt(report.frame_seconds[i] * 1000.0, 1) << " ms\n";
    total += report.frame_seconds[i];
  }
  log << "generated " << n << " frames, " << db.objects.size()
      << " database objects, mean " << fmt(total / static_cast<double>(n) * 1000.0, 1)
      << " ms/frame\n";
  return report;
}

void cmd_scan(const RunConfig& cfg, const std::optional<fs::path>& scene_path,
              const fs::path& out, int jobs, std::ostream& log) {
  const Scene scene = scene_path ? parse_scene(read_text_file(*scene_path))
                                 : generate_scene(cfg.scene, frame_seed(cfg.seed, kSceneStream, 0));
  NoiseModel noise = cfg.noise;
  noise.seed = frame_seed(cfg.seed, kNoiseStream, 0);
  const auto start = Clock::now();
  const ScanResult scan = cast_scan_detailed(
      scene, cfg.sensor_pose, cfg.scan, noise,
      {.workers = std::max(1, jobs), .count_unoccluded = true});
  const double elapsed = seconds_since(start);

  write_text_file(out / "scene.json", serialize_scene(scene));
  write_cloud(out / "cloud.bin", scan.cloud);
  write_labels(out / "labels.txt", scene_labels(scene, cfg.sensor_pose, cfg.taxonomy(), &scan));
  const BevFeatureMap bev = build_bev(scan.cloud, cfg.grid);
  std::ofstream bev_out(out / "bev.bin", std::ios::binary);
  if (!bev_out) throw DataError("cannot write " + (out / "bev.bin").string());
  write_bev(bev_out, bev);

  log << "scanned " << scene.objects.size() << " objects, " << cfg.scan.ray_count()
      << " rays, " << scan.cloud.points.size() << " points in "
      << fmt(elapsed * 1000.0, 1) << " ms\n";
}

RasterizeReport cmd_rasterize(const RunConfig& cfg, const fs::path& dataset,
                              const fs::path& out, int jobs, std::ostream& log) {
  const DatasetLayout layout{dataset};
  struct Frame {
    std::string split;
    std::string id;
  };
  std::vector<Frame> frames;
  if (fs::exists(layout.splits_path())) {
    const DatasetSplit split = parse_splits(read_text_file(layout.splits_path()));
    for (int k = 0; k < 3; ++k) {
      for (const auto& id : split_list(split, k)) frames.push_back({kSplitNames[k], id});
    }
  } else {
    throw DataError("missing split manifest " + layout.splits_path().string());
  }

  const GridDims dims = grid_dims(cfg.grid);
  std::vector<std::string> errors(frames.size());
  parallel_for(frames.size(), jobs, [&](std::size_t i) {
    const auto& f = frames[i];
    try {
      const auto labels = parse_labels(layout.label_path(f.split, f.id));
      const auto boxes = labels_to_footprints(labels, cfg.taxonomy());
      const InstanceMaskMap map = rasterize(boxes, cfg.grid);

      const fs::path base = out / f.split / f.id;
      fs::create_directories(base.parent_path());
      {
        std::ofstream bin(base.string() + ".bin", std::ios::binary);
        write_instance_map(bin, map);
        std::ofstream pgm(base.string() + ".pgm", std::ios::binary);
        write_instance_pgm(pgm, map);
        if (!bin || !pgm) throw DataError("cannot write " + base.string());
      }
      FrameGroundTruth gt{f.id, dims.height, dims.width, {}};
      for (const auto& b : boxes) {
        gt.instances.push_back({b.instance_id, b.class_id,
                                Vec3(b.length, b.width, b.height), b.position, b.yaw});
      }
      write_text_file(base.string() + ".json", serialize_ground_truth(gt, cfg.taxonomy()));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  RasterizeReport report;
  report.frames = frames.size();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!errors[i].empty()) {
      report.failures.emplace_back(frames[i].split + "/" + frames[i].id, errors[i]);
    }
  }
  log << "rasterized " << report.frames - report.failures.size() << "/" << report.frames
      << " frames\n";
  if (!report.failures.empty()) {
    log << "failures:\n";
    for (const auto& [frame, msg] : report.failures) log << "  " << frame << ": " << msg << "\n";
  }
  return report;
}

std::size_t cmd_augment(const RunConfig& cfg, const fs::path& dataset,
                        const fs::path& out, int jobs, std::ostream& log) {
  const DatasetLayout in{dataset};
  const DatasetLayout dst{out};
  const DatasetSplit split = parse_splits(read_text_file(in.splits_path()));

  ObjectDatabase db;
  const bool have_db = fs::is_directory(in.object_db_dir());
  if (have_db) db = read_object_db(in.object_db_dir());

  std::vector<std::string> warnings(split.train.size());
  parallel_for(split.train.size(), jobs, [&](std::size_t i) {
    const auto& id = split.train[i];
    const PointCloud cloud = read_cloud(in.cloud_path("train", id));
    const auto labels = parse_labels(in.label_path("train", id));
    const auto result = augment_frame(cloud, labels, cfg.augment,
                                      frame_seed(cfg.seed, kAugmentStream, i),
                                      have_db ? &db : nullptr);
    write_cloud(dst.cloud_path("train", id), result.cloud);
    write_labels(dst.label_path("train", id), result.labels);
    for (const auto& w : result.warnings) warnings[i] += "frame " + id + ": " + w + "\n";
  });

  for (int k = 1; k < 3; ++k) {
    for (const auto& id : split_list(split, k)) {
      copy_file_into(in.cloud_path(kSplitNames[k], id), dst.cloud_path(kSplitNames[k], id));
      copy_file_into(in.label_path(kSplitNames[k], id), dst.label_path(kSplitNames[k], id));
    }
  }
  copy_file_into(in.splits_path(), dst.splits_path());
  if (have_db) write_object_db(dst.object_db_dir(), db);

  for (const auto& w : warnings) log << w;
  log << "augmented " << split.train.size() << " training frames\n";
  return split.train.size();
}

EvalReport evaluate_dirs(const RunConfig& cfg, const fs::path& pred, const fs::path& gt) {
  const auto pred_frames = json_stems(pred);
  const auto gt_frames = json_stems(gt);
  if (pred_frames != gt_frames) {
    std::ostringstream msg;
    msg << "frame mismatch between prediction and ground-truth directories:";
    for (const auto& s : pred_frames) {
      if (!gt_frames.contains(s)) msg << "\n  no ground truth for " << s;
    }
    for (const auto& s : gt_frames) {
      if (!pred_frames.contains(s)) msg << "\n  no predictions for " << s;
    }
    throw DataError(msg.str());
  }

  const Taxonomy& tax = cfg.taxonomy();
  std::vector<EvalFrame> frames;
  for (const auto& stem : gt_frames) {
    const fs::path gt_json = gt / (stem + ".json");
    const fs::path gt_bin = gt / (stem + ".bin");
    const fs::path pred_json = pred / (stem + ".json");

    const FrameGroundTruth truth = parse_ground_truth(read_text_file(gt_json), tax);
    std::ifstream bin(gt_bin, std::ios::binary);
    if (!bin) throw DataError("missing instance map " + gt_bin.string());
    const InstanceMaskMap map = read_instance_map(bin);
    if (map.height != truth.height || map.width != truth.width) {
      throw DataError(gt_bin.string() + ": size disagrees with " + gt_json.string());
    }
    const FramePredictions p = parse_predictions(read_text_file(pred_json), pred_json.parent_path());
    if (std::cmp_greater(p.predictions.size(), cfg.eval.max_queries)) {
      throw DataError(pred_json.string() + ": " + std::to_string(p.predictions.size()) +
                      " predictions exceed the limit of " +
                      std::to_string(cfg.eval.max_queries));
    }
    if (p.height != map.height || p.width != map.width) {
      throw DataError(pred_json.string() + ": mask size disagrees with ground truth");
    }

    EvalFrame frame;
    for (const auto& inst : truth.instances) {
      BinaryMask mask = extract_binary(map, inst.instance_id);
      if (std::none_of(mask.data.begin(), mask.data.end(), [](auto v) { return v != 0; })) {
        continue;  // fully covered by a later box or off the grid
      }
      frame.gts.push_back({inst.class_id, std::move(mask)});
    }
    for (const auto& q : p.predictions) {
      if (static_cast<int>(q.class_probs.size()) != tax.class_count()) {
        throw DataError(pred_json.string() + ": class_probs must have " +
                        std::to_string(tax.class_count()) + " entries");
      }
      Detection d = to_detection(q, cfg.eval.mask_threshold);
      if (d.confidence < cfg.eval.confidence_threshold) continue;
      frame.detections.push_back(std::move(d));
    }
    frames.push_back(std::move(frame));
  }

  EvalReport report;
  report.frames = frames.size();
  for (double t : cfg.eval.iou_thresholds) report.ap[t] = average_precision(frames, t);
  const auto it = report.ap.find(cfg.eval.miou_iou_threshold);
  const ApResult miou_src = it != report.ap.end()
                                ? it->second
                                : average_precision(frames, cfg.eval.miou_iou_threshold);
  report.miou = mean_iou(miou_src.tp_ious);
  report.pq = panoptic_quality(frames);
  return report;
}

std::string eval_report_json(const EvalReport& report, const Taxonomy& taxonomy) {
  json ap = json::object();
  for (const auto& [t, r] : report.ap) {
    json per = json::object();
    for (const auto& [c, v] : r.per_class) per[taxonomy.name_of(c)] = v;
    ap[fmt(t, 2)] = {{"mean", r.mean}, {"per_class", per}};
  }
  auto stats = [](const PqStats& s) {
    return json{{"pq", s.pq}, {"sq", s.sq}, {"rq", s.rq},
                {"tp", s.tp}, {"fp", s.fp}, {"fn", s.fn}};
  };
  json pq_per = json::object();
  for (const auto& [c, s] : report.pq.per_class) pq_per[taxonomy.name_of(c)] = stats(s);
  const json root = {{"frames", report.frames},
                     {"ap", ap},
                     {"miou", report.miou},
                     {"pq", {{"overall", stats(report.pq.overall)}, {"per_class", pq_per}}}};
  return root.dump(2);
}

std::string eval_report_table(const EvalReport& report, const Taxonomy& taxonomy) {
  std::set<int> classes;
  for (const auto& [t, r] : report.ap) {
    for (const auto& [c, v] : r.per_class) classes.insert(c);
  }
  for (const auto& [c, s] : report.pq.per_class) classes.insert(c);

  std::vector<std::string> header = {"class"};
  for (const auto& [t, r] : report.ap) header.push_back("AP@" + fmt(t, 2));
  for (const char* h : {"PQ", "SQ", "RQ"}) header.emplace_back(h);

  std::vector<std::vector<std::string>> rows;
  auto row_for = [&](const std::string& name, auto ap_of, const PqStats* s) {
    std::vector<std::string> row = {name};
    for (const auto& [t, r] : report.ap) row.push_back(ap_of(r));
    for (double v : {s ? s->pq : 0.0, s ? s->sq : 0.0, s ? s->rq : 0.0}) {
      row.push_back(s ? fmt(v) : "-");
    }
    rows.push_back(row);
  };
  for (int c : classes) {
    const auto pq_it = report.pq.per_class.find(c);
    row_for(
        taxonomy.name_of(c),
        [c](const ApResult& r) {
          const auto it = r.per_class.find(c);
          return it == r.per_class.end() ? std::string("-") : fmt(it->second);
        },
        pq_it == report.pq.per_class.end() ? nullptr : &pq_it->second);
  }
  row_for("overall", [](const ApResult& r) { return fmt(r.mean); }, &report.pq.overall);

  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    width[j] = header[j].size();
    for (const auto& r : rows) width[j] = std::max(width[j], r[j].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j == 0) {
        out << std::left << std::setw(static_cast<int>(width[j])) << r[j];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width[j])) << r[j];
      }
    }
    out << "\n";
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  out << "mIoU " << fmt(report.miou) << "  frames " << report.frames << "\n";
  return out.str();
}

EvalReport cmd_eval(const RunConfig& cfg, const fs::path& pred, const fs::path& gt,
                    const std::optional<fs::path>& out, std::ostream& log) {
  EvalReport report = evaluate_dirs(cfg, pred, gt);
  const std::string text = eval_report_json(report, cfg.taxonomy());
  if (out) write_text_file(*out / "metrics.json", text + "\n");
  log << text << "\n\n" << eval_report_table(report, cfg.taxonomy());
  return report;
}

Scene bench_scene(const RunConfig& cfg, int objects) {
  if (objects < 1) throw ConfigError("bench needs at least one object");
  SceneConfig sc = cfg.scene;
  sc.floor = false;
  sc.classes.clear();
  const PrimitiveKind kinds[] = {PrimitiveKind::box, PrimitiveKind::sphere,
                                 PrimitiveKind::cylinder, PrimitiveKind::capsule,
                                 PrimitiveKind::ellipsoid};
  for (int k = 0; k < 5; ++k) {
    const int n = objects / 5 + (k < objects % 5 ? 1 : 0);
    if (n == 0) continue;
    ClassPlacement c;
    c.class_id = k % sc.taxonomy.foreground_count();
    c.kind = kinds[k];
    c.count_min = c.count_max = n;
    c.size_min = Vec3::Constant(0.1);
    c.size_max = Vec3::Constant(0.3);
    sc.classes.push_back(c);
  }
  return generate_scene(sc, frame_seed(cfg.seed, kSceneStream, 0));
}

BenchReport cmd_bench(const RunConfig& cfg, const BenchOptions& options, std::ostream& log) {
  if (options.workers.empty() || options.repeats < 1) {
    throw ConfigError("bench needs worker counts and at least one repeat");
  }
  ScanPattern pattern = cfg.scan;
  pattern.azimuth_count = options.azimuth_count;
  pattern.elevation_count = options.elevation_count;
  validate(pattern);
  const Scene scene = bench_scene(cfg, options.objects);
  NoiseModel noise = cfg.noise;
  noise.seed = frame_seed(cfg.seed, kNoiseStream, 0);

  BenchReport report;
  report.rays = pattern.ray_count();
  report.objects = options.objects;
  report.hardware_concurrency = std::thread::hardware_concurrency();
  for (int w : options.workers) {
    if (w < 1) throw ConfigError("worker counts must be >= 1");
    double best = 0.0;
    for (int r = 0; r < options.repeats; ++r) {
      const auto start = Clock::now();
      const PointCloud cloud = cast_scan(scene, cfg.sensor_pose, pattern, noise, w);
      const double s = seconds_since(start);
      if (r == 0 || s < best) best = s;
      if (cloud.points.empty()) throw std::logic_error("bench scan produced no points");
    }
    report.runs.push_back({w, best, static_cast<double>(report.rays) / best});
    log << "workers " << w << ": " << fmt(best * 1000.0, 1) << " ms, "
        << fmt(static_cast<double>(report.rays) / best / 1e6, 2) << " Mrays/s\n";
  }
  const auto [lo, hi] = std::minmax_element(
      report.runs.begin(), report.runs.end(),
      [](const BenchRun& a, const BenchRun& b) { return a.workers < b.workers; });
  report.scaling_ratio = lo->seconds / hi->seconds;
  log << "scaling " << fmt(report.scaling_ratio, 2) << "x (" << lo->workers << " -> "
      << hi->workers << " workers, " << report.hardware_concurrency
      << " hardware threads)\n";
  return report;
}

std::string bench_report_json(const BenchReport& report) {
  json runs = json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"workers", r.workers},
                    {"seconds", r.seconds},
                    {"rays_per_second", r.rays_per_second}});
  }
  return json{{"rays", report.rays},
              {"objects", report.objects},
              {"hardware_concurrency", report.hardware_concurrency},
              {"runs", runs},
              {"scaling_ratio", report.scaling_ratio}}
      .dump(2);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Indoor lidar simulation and BEV instance segmentation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int jobs = 1;
  auto add_globals = [&](CLI::App* a) {
    a->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    a->add_option("--seed", seed, "Override the configured seed");
    a->add_option("--out", out_dir, "Output directory");
    a->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  add_globals(&app);

  int count = 10;
  auto* generate = app.add_subcommand("generate", "Generate and scan random scenes");
  generate->add_option("--count", count, "Number of frames")->check(CLI::PositiveNumber);

  std::string scene_file;
  auto* scan = app.add_subcommand("scan", "Scan one scene");
  scan->add_option("--scene", scene_file, "Scene JSON (default: generate from seed)")
      ->check(CLI::ExistingFile);

  std::string dataset;
  auto* raster = app.add_subcommand("rasterize", "Rasterize dataset labels into instance maps");
  raster->add_option("--dataset", dataset, "Dataset root")->required();

  auto* augment = app.add_subcommand("augment", "Augment the training split");
  augment->add_option("--dataset", dataset, "Dataset root")->required();

  std::string pred_dir;
  std::string gt_dir;
  bool write_report = false;
  auto* eval = app.add_subcommand("eval", "Evaluate predictions against ground truth");
  eval->add_option("--pred", pred_dir, "Prediction directory")->required();
  eval->add_option("--gt", gt_dir, "Ground-truth directory (rasterize output)")->required();
  eval->add_flag("--write-report", write_report, "Also write {out}/metrics.json");

  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Time scanning across worker counts");
  bench->add_option("--objects", bench_opts.objects, "Objects in the scene");
  bench->add_option("--azimuth-count", bench_opts.azimuth_count);
  bench->add_option("--elevation-count", bench_opts.elevation_count);
  bench->add_option("--workers", bench_opts.workers, "Worker counts to time");
  bench->add_option("--repeats", bench_opts.repeats, "Timed repeats per worker count");

  for (auto* sub : {generate, scan, raster, augment, eval, bench}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 1;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed) cfg.seed = *seed;
    const fs::path out_path = out_dir;

    if (generate->parsed()) {
      cmd_generate(cfg, count, out_path, jobs, out);
    } else if (scan->parsed()) {
      std::optional<fs::path> scene_path;
      if (!scene_file.empty()) scene_path = scene_file;
      cmd_scan(cfg, scene_path, out_path, jobs, out);
    } else if (raster->parsed()) {
      const auto report = cmd_rasterize(cfg, dataset, out_path, jobs, out);
      if (!report.failures.empty()) {
        err << "error: " << report.failures.size() << " frame(s) failed\n";
        return 2;
      }
    } else if (augment->parsed()) {
      cmd_augment(cfg, dataset, out_path, jobs, out);
    } else if (eval->parsed()) {
      std::optional<fs::path> report_dir;
      if (write_report) report_dir = out_path;
      cmd_eval(cfg, pred_dir, gt_dir, report_dir, out);
    } else if (bench->parsed()) {
      const auto report = cmd_bench(cfg, bench_opts, err);
      out << bench_report_json(report) << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const PlacementError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace indoorbev
