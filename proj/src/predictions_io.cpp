#include "indoorbev/predictions_io.hpp"

#include <fstream>

#include "indoorbev/errors.hpp"
#include "json.hpp"

namespace indoorbev {

using nlohmann::json;

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::vector<std::uint32_t> rle_encode(const BinaryMask& mask) {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (auto cell : mask.data) {
    const std::uint8_t v = cell ? 1 : 0;
    if (v != current) {
      runs.push_back(length);
      current = v;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

BinaryMask rle_decode(const std::vector<std::uint32_t>& runs, int height,
                      int width) {
  if (height < 0 || width < 0) throw DataError("negative mask dimensions");
  BinaryMask mask(height, width, 0);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (auto run : runs) {
    if (pos + run > mask.data.size()) {
      throw DataError("RLE runs exceed the mask size");
    }
    std::fill_n(mask.data.begin() + static_cast<long>(pos), run, value);
    pos += run;
    value ^= 1;
  }
  if (pos != mask.data.size()) {
    throw DataError("RLE runs cover " + std::to_string(pos) + " of " +
                    std::to_string(mask.data.size()) + " cells");
  }
  return mask;
}

std::string serialize_predictions(const FramePredictions& frame) {
  json preds = json::array();
  for (const auto& p : frame.predictions) {
    BinaryMask bin(p.mask_probs.height, p.mask_probs.width, 0);
    for (std::size_t i = 0; i < bin.data.size(); ++i) {
      bin.data[i] = p.mask_probs.data[i] >= 0.5f ? 1 : 0;
    }
    preds.push_back({{"class_probs", p.class_probs},
                     {"dims", vec_json(p.dims)},
                     {"position", vec_json(p.position)},
                     {"yaw", p.yaw},
                     {"mask", {{"rle", rle_encode(bin)}}}});
  }
  const json root = {{"frame_id", frame.frame_id},
                     {"height", frame.height},
                     {"width", frame.width},
                     {"predictions", preds}};
  return root.dump();
}

FramePredictions parse_predictions(const std::string& json_text,
                                   const std::filesystem::path& base_dir) {
  try {
    const json root = json::parse(json_text);
    FramePredictions frame;
    frame.frame_id = root.at("frame_id").get<std::string>();
    frame.height = root.at("height").get<int>();
    frame.width = root.at("width").get<int>();
    for (const auto& jp : root.at("predictions")) {
      Prediction p;
      p.class_probs = jp.at("class_probs").get<std::vector<double>>();
      double sum = 0.0;
      for (double v : p.class_probs) {
        if (!(v >= 0.0 && v <= 1.0)) throw DataError("class_probs outside [0, 1]");
        sum += v;
      }
      if (p.class_probs.size() < 2 || std::abs(sum - 1.0) > 1e-6) {
        throw DataError("class_probs must have >= 2 entries summing to 1");
      }
      p.dims = vec3(jp.at("dims"));
      p.position = vec3(jp.at("position"));
      p.yaw = jp.at("yaw").get<double>();
      const json& jm = jp.at("mask");
      BinaryMask bin;
      if (jm.contains("rle")) {
        bin = rle_decode(jm["rle"].get<std::vector<std::uint32_t>>(),
                         frame.height, frame.width);
      } else if (jm.contains("file")) {
        std::filesystem::path path = jm["file"].get<std::string>();
        if (path.is_relative()) path = base_dir / path;
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open mask file '" + path.string() + "'");
        const InstanceMaskMap map = read_instance_map(in);
        if (map.height != frame.height || map.width != frame.width) {
          throw DataError("mask file '" + path.string() + "' has the wrong shape");
        }
        const auto id = jm.value("id", std::uint32_t{0});
        bin = BinaryMask(map.height, map.width, 0);
        for (std::size_t i = 0; i < map.data.size(); ++i) {
          bin.data[i] = (id == 0 ? map.data[i] != 0 : map.data[i] == id) ? 1 : 0;
        }
      } else {
        throw DataError("mask needs an 'rle' or 'file' entry");
      }
      p.mask_probs = ProbMask(bin.height, bin.width, 0.0f);
      for (std::size_t i = 0; i < bin.data.size(); ++i) {
        p.mask_probs.data[i] = bin.data[i] ? 1.0f : 0.0f;
      }
      frame.predictions.push_back(std::move(p));
    }
    return frame;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed prediction file: ") + e.what());
  }
}

std::string serialize_ground_truth(const FrameGroundTruth& gt,
                                   const Taxonomy& taxonomy) {
  json instances = json::array();
  for (const auto& inst : gt.instances) {
    instances.push_back({{"instance_id", inst.instance_id},
                         {"class_id", inst.class_id},
                         {"class", taxonomy.name_of(inst.class_id)},
                         {"dims", vec_json(inst.dims)},
                         {"position", vec_json(inst.position)},
                         {"yaw", inst.yaw}});
  }
  const json root = {{"frame_id", gt.frame_id},
                     {"height", gt.height},
                     {"width", gt.width},
                     {"instances", instances}};
  return root.dump(2);
}

FrameGroundTruth parse_ground_truth(const std::string& json_text,
                                    const Taxonomy& taxonomy) {
  try {
    const json root = json::parse(json_text);
    FrameGroundTruth gt;
    gt.frame_id = root.at("frame_id").get<std::string>();
    gt.height = root.at("height").get<int>();
    gt.width = root.at("width").get<int>();
    for (const auto& ji : root.at("instances")) {
      GtInstanceInfo inst;
      inst.instance_id = ji.at("instance_id").get<std::uint32_t>();
      inst.class_id = ji.at("class_id").get<int>();
      if (!taxonomy.valid_id(inst.class_id)) {
        throw DataError("ground-truth class id outside the taxonomy");
      }
      inst.dims = vec3(ji.at("dims"));
      inst.position = vec3(ji.at("position"));
      inst.yaw = ji.at("yaw").get<double>();
      gt.instances.push_back(inst);
    }
    return gt;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ground-truth file: ") + e.what());
  }
}

FramePredictions predictions_from_ground_truth(const FrameGroundTruth& gt,
                                               const InstanceMaskMap& map,
                                               const Taxonomy& taxonomy) {
  FramePredictions out;
  out.frame_id = gt.frame_id;
  out.height = map.height;
  out.width = map.width;
  for (const auto& inst : gt.instances) {
    const BinaryMask bin = extract_binary(map, inst.instance_id);
    bool any = false;
    for (auto v : bin.data) any = any || v;
    if (!any) continue;
    Prediction p;
    p.class_probs.assign(static_cast<std::size_t>(taxonomy.class_count()), 0.0);
    p.class_probs[static_cast<std::size_t>(inst.class_id)] = 1.0;
    p.mask_probs = ProbMask(bin.height, bin.width, 0.0f);
    for (std::size_t i = 0; i < bin.data.size(); ++i) {
      p.mask_probs.data[i] = bin.data[i] ? 1.0f : 0.0f;
    }
    p.dims = inst.dims;
    p.position = inst.position;
    p.yaw = inst.yaw;
    out.predictions.push_back(std::move(p));
  }
  return out;
}

}  // namespace indoorbev
