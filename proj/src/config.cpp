#include "indoorbev/config.hpp"

#include <set>

#include "indoorbev/dataio.hpp"
#include "indoorbev/errors.hpp"
#include "json.hpp"

namespace indoorbev {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(std::string(what) + " must be a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void range2(const json& j, const char* what, double& lo, double& hi) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(std::string(what) + " must be a [min, max] array");
  }
  lo = j[0].get<double>();
  hi = j[1].get<double>();
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

int class_id_from(const json& j, const Taxonomy& taxonomy) {
  if (j.is_number_integer()) return j.get<int>();
  const auto name = j.get<std::string>();
  const auto id = taxonomy.find(name);
  if (!id) throw ConfigError("unknown class '" + name + "' in config");
  return *id;
}

void read_augment(const json& j, AugmentConfig& a) {
  if (j.contains("rotation_range")) {
    range2(j["rotation_range"], "augment.rotation_range", a.rotation_min,
           a.rotation_max);
  }
  maybe(j, "jitter_sigma", a.jitter_sigma);
  maybe(j, "global_noise_sigma", a.global_noise_sigma);
  maybe(j, "decimation_keep_prob", a.decimation_keep_prob);
  maybe(j, "drop_prob", a.drop_prob);
  maybe(j, "box_location_sigma", a.box_location_sigma);
  maybe(j, "box_size_sigma", a.box_size_sigma);
  maybe(j, "box_yaw_sigma", a.box_yaw_sigma);
  if (j.contains("insert_count")) {
    const auto& r = j["insert_count"];
    if (!r.is_array() || r.size() != 2) {
      throw ConfigError("augment.insert_count must be [min, max]");
    }
    a.insert_min = r[0].get<int>();
    a.insert_max = r[1].get<int>();
  }
  maybe(j, "insert_attempts", a.insert_attempts);
  maybe(j, "insert_extent", a.insert_extent);
  maybe(j, "mask_perturb_prob", a.mask_perturb_prob);
}

json write_augment(const AugmentConfig& a) {
  return {{"rotation_range", {a.rotation_min, a.rotation_max}},
          {"jitter_sigma", a.jitter_sigma},
          {"global_noise_sigma", a.global_noise_sigma},
          {"decimation_keep_prob", a.decimation_keep_prob},
          {"drop_prob", a.drop_prob},
          {"box_location_sigma", a.box_location_sigma},
          {"box_size_sigma", a.box_size_sigma},
          {"box_yaw_sigma", a.box_yaw_sigma},
          {"insert_count", {a.insert_min, a.insert_max}},
          {"insert_attempts", a.insert_attempts},
          {"insert_extent", a.insert_extent},
          {"mask_perturb_prob", a.mask_perturb_prob}};
}

}  // namespace

void validate(const RunConfig& cfg) {
  grid_dims(cfg.grid);
  validate(cfg.scan);
  validate(cfg.noise);
  validate(cfg.scene);
  validate(cfg.augment);
  validate(cfg.weights);
  const auto& e = cfg.eval;
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(e.confidence_threshold) || !unit(e.miou_iou_threshold) ||
      !unit(e.mask_threshold)) {
    throw ConfigError("eval thresholds must lie in [0, 1]");
  }
  if (e.iou_thresholds.empty()) throw ConfigError("eval needs at least one IoU threshold");
  for (double t : e.iou_thresholds) {
    if (!unit(t)) throw ConfigError("eval IoU thresholds must lie in [0, 1]");
  }
  if (e.max_queries < 1) throw ConfigError("eval.max_queries must be >= 1");
  double sum = 0.0;
  for (double r : cfg.split_ratios) {
    if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
}

RunConfig parse_run_config(const std::string& json_text) {
  RunConfig cfg;
  try {
    const json root = json::parse(json_text);
    if (!root.is_object()) throw ConfigError("config root must be an object");
    static const std::set<std::string> known = {
        "seed",    "grid",  "scan",         "sensor",        "noise",
        "taxonomy", "scene", "augment",     "eval",          "split_ratios",
        "match_weights"};
    for (const auto& [key, value] : root.items()) {
      if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }

    maybe(root, "seed", cfg.seed);
    if (root.contains("taxonomy")) {
      cfg.scene.taxonomy.names = root["taxonomy"].get<std::vector<std::string>>();
    }
    const Taxonomy& tax = cfg.scene.taxonomy;

    if (root.contains("grid")) {
      const auto& g = root["grid"];
      if (g.contains("x_range")) range2(g["x_range"], "grid.x_range", cfg.grid.x_min, cfg.grid.x_max);
      if (g.contains("y_range")) range2(g["y_range"], "grid.y_range", cfg.grid.y_min, cfg.grid.y_max);
      if (g.contains("z_range")) range2(g["z_range"], "grid.z_range", cfg.grid.z_min, cfg.grid.z_max);
      maybe(g, "cell_size", cfg.grid.cell_size);
    }
    if (root.contains("scan")) {
      const auto& s = root["scan"];
      if (s.contains("azimuth_range")) range2(s["azimuth_range"], "scan.azimuth_range", cfg.scan.azimuth_start, cfg.scan.azimuth_end);
      if (s.contains("elevation_range")) range2(s["elevation_range"], "scan.elevation_range", cfg.scan.elevation_start, cfg.scan.elevation_end);
      maybe(s, "azimuth_count", cfg.scan.azimuth_count);
      maybe(s, "elevation_count", cfg.scan.elevation_count);
      maybe(s, "max_range", cfg.scan.max_range);
    }
    if (root.contains("sensor")) {
      const auto& s = root["sensor"];
      const Vec3 t = s.contains("translation") ? vec3(s["translation"], "sensor.translation") : Vec3::Zero();
      const Vec3 ypr = s.contains("ypr") ? vec3(s["ypr"], "sensor.ypr") : Vec3::Zero();
      cfg.sensor_pose = Pose::from_ypr(ypr.x(), ypr.y(), ypr.z(), t);
    }
    if (root.contains("noise")) {
      maybe(root["noise"], "range_sigma", cfg.noise.range_sigma);
      maybe(root["noise"], "dropout_prob", cfg.noise.dropout_prob);
    }
    if (root.contains("scene")) {
      const auto& s = root["scene"];
      if (s.contains("workspace")) {
        cfg.scene.workspace.min = vec3(s["workspace"].at("min"), "scene.workspace.min");
        cfg.scene.workspace.max = vec3(s["workspace"].at("max"), "scene.workspace.max");
      }
      if (s.contains("yaw_range")) range2(s["yaw_range"], "scene.yaw_range", cfg.scene.yaw_min, cfg.scene.yaw_max);
      maybe(s, "max_attempts", cfg.scene.max_attempts);
      maybe(s, "floor", cfg.scene.floor);
      if (s.contains("floor_class")) cfg.scene.floor_class_id = class_id_from(s["floor_class"], tax);
      if (s.contains("classes")) {
        cfg.scene.classes.clear();
        for (const auto& jc : s["classes"]) {
          ClassPlacement c;
          c.class_id = class_id_from(jc.at("class"), tax);
          c.kind = kind_from_name(jc.at("kind").get<std::string>());
          const auto& count = jc.at("count");
          if (!count.is_array() || count.size() != 2) {
            throw ConfigError("scene class count must be [min, max]");
          }
          c.count_min = count[0].get<int>();
          c.count_max = count[1].get<int>();
          c.size_min = vec3(jc.at("size_min"), "size_min");
          c.size_max = vec3(jc.at("size_max"), "size_max");
          c.dynamic = jc.value("dynamic", false);
          cfg.scene.classes.push_back(c);
        }
      }
    }
    if (root.contains("augment")) read_augment(root["augment"], cfg.augment);
    if (root.contains("eval")) {
      const auto& e = root["eval"];
      maybe(e, "confidence_threshold", cfg.eval.confidence_threshold);
      maybe(e, "iou_thresholds", cfg.eval.iou_thresholds);
      maybe(e, "miou_iou_threshold", cfg.eval.miou_iou_threshold);
      maybe(e, "mask_threshold", cfg.eval.mask_threshold);
      maybe(e, "max_queries", cfg.eval.max_queries);
    }
    if (root.contains("split_ratios")) {
      cfg.split_ratios = root["split_ratios"].get<std::array<double, 3>>();
    }
    if (root.contains("match_weights")) {
      const auto& w = root["match_weights"];
      auto& m = cfg.weights;
      maybe(w, "cost_class", m.cost_class);
      maybe(w, "cost_dice", m.cost_dice);
      maybe(w, "cost_focal", m.cost_focal);
      maybe(w, "cost_box", m.cost_box);
      maybe(w, "loss_class", m.loss_class);
      maybe(w, "loss_dice", m.loss_dice);
      maybe(w, "loss_mask", m.loss_mask);
      maybe(w, "loss_dims", m.loss_dims);
      maybe(w, "loss_position", m.loss_position);
      maybe(w, "loss_yaw", m.loss_yaw);
      maybe(w, "background_weight", m.background_weight);
      maybe(w, "focal_gamma", m.focal_gamma);
      maybe(w, "focal_alpha", m.focal_alpha);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text);
}

std::string serialize_run_config(const RunConfig& cfg) {
  const Taxonomy& tax = cfg.scene.taxonomy;
  json classes = json::array();
  for (const auto& c : cfg.scene.classes) {
    classes.push_back({{"class", tax.name_of(c.class_id)},
                       {"kind", std::string(kind_name(c.kind))},
                       {"count", {c.count_min, c.count_max}},
                       {"size_min", vec_json(c.size_min)},
                       {"size_max", vec_json(c.size_max)},
                       {"dynamic", c.dynamic}});
  }
  const auto& w = cfg.weights;
  const json root = {
      {"seed", cfg.seed},
      {"grid",
       {{"x_range", {cfg.grid.x_min, cfg.grid.x_max}},
        {"y_range", {cfg.grid.y_min, cfg.grid.y_max}},
        {"z_range", {cfg.grid.z_min, cfg.grid.z_max}},
        {"cell_size", cfg.grid.cell_size}}},
      {"scan",
       {{"azimuth_range", {cfg.scan.azimuth_start, cfg.scan.azimuth_end}},
        {"azimuth_count", cfg.scan.azimuth_count},
        {"elevation_range", {cfg.scan.elevation_start, cfg.scan.elevation_end}},
        {"elevation_count", cfg.scan.elevation_count},
        {"max_range", cfg.scan.max_range}}},
      {"sensor",
       {{"translation", vec_json(cfg.sensor_pose.translation())},
        {"ypr", vec_json(cfg.sensor_pose.ypr())}}},
      {"noise",
       {{"range_sigma", cfg.noise.range_sigma},
        {"dropout_prob", cfg.noise.dropout_prob}}},
      {"taxonomy", tax.names},
      {"scene",
       {{"workspace",
         {{"min", vec_json(cfg.scene.workspace.min)},
          {"max", vec_json(cfg.scene.workspace.max)}}},
        {"yaw_range", {cfg.scene.yaw_min, cfg.scene.yaw_max}},
        {"max_attempts", cfg.scene.max_attempts},
        {"floor", cfg.scene.floor},
        {"floor_class", tax.name_of(cfg.scene.floor_class_id)},
        {"classes", classes}}},
      {"augment", write_augment(cfg.augment)},
      {"eval",
       {{"confidence_threshold", cfg.eval.confidence_threshold},
        {"iou_thresholds", cfg.eval.iou_thresholds},
        {"miou_iou_threshold", cfg.eval.miou_iou_threshold},
        {"mask_threshold", cfg.eval.mask_threshold},
        {"max_queries", cfg.eval.max_queries}}},
      {"split_ratios", cfg.split_ratios},
      {"match_weights",
       {{"cost_class", w.cost_class},
        {"cost_dice", w.cost_dice},
        {"cost_focal", w.cost_focal},
        {"cost_box", w.cost_box},
        {"loss_class", w.loss_class},
        {"loss_dice", w.loss_dice},
        {"loss_mask", w.loss_mask},
        {"loss_dims", w.loss_dims},
        {"loss_position", w.loss_position},
        {"loss_yaw", w.loss_yaw},
        {"background_weight", w.background_weight},
        {"focal_gamma", w.focal_gamma},
        {"focal_alpha", w.focal_alpha}}},
  };
  return root.dump(2);
}

}  // namespace indoorbev
