#include "indoorbev/dataio.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "indoorbev/binary_io.hpp"
#include "indoorbev/errors.hpp"
#include "indoorbev/rng.hpp"
#include "json.hpp"

namespace indoorbev {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

bool parse_double(const std::string& tok, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    return used == tok.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_int(const std::string& tok, int& out) {
  try {
    std::size_t used = 0;
    out = std::stoi(tok, &used);
    return used == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

void write_cloud(std::ostream& out, const PointCloud& cloud) {
  for (const Point& p : cloud.points) {
    binary::put_f32(out, p.x);
    binary::put_f32(out, p.y);
    binary::put_f32(out, p.z);
    binary::put_f32(out, p.intensity);
  }
  if (!out) throw DataError("failed writing point cloud");
}

PointCloud read_cloud(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() % 16 != 0) {
    throw DataError("corrupt point cloud: " + std::to_string(bytes.size()) +
                    " bytes is not a multiple of 16");
  }
  PointCloud cloud;
  cloud.points.resize(bytes.size() / 16);
  const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < cloud.points.size(); ++i, b += 16) {
    cloud.points[i] = {std::bit_cast<float>(binary::decode_u32(b)),
                       std::bit_cast<float>(binary::decode_u32(b + 4)),
                       std::bit_cast<float>(binary::decode_u32(b + 8)),
                       std::bit_cast<float>(binary::decode_u32(b + 12))};
  }
  return cloud;
}

void write_cloud(const fs::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  write_cloud(out, cloud);
}

PointCloud read_cloud(const fs::path& path) {
  auto in = open_in(path);
  try {
    return read_cloud(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_labels(std::ostream& out, const std::vector<LabelEntry>& entries) {
  out << std::fixed << std::setprecision(6);
  for (const auto& e : entries) {
    out << e.type << ' ' << e.truncation << ' ' << e.occlusion << ' ' << e.h
        << ' ' << e.w << ' ' << e.l << ' ' << e.x << ' ' << e.y << ' ' << e.z
        << ' ' << e.yaw << '\n';
  }
  if (!out) throw DataError("failed writing labels");
}

void write_labels(const fs::path& path, const std::vector<LabelEntry>& entries) {
  auto out = open_out(path);
  write_labels(out, entries);
}

std::vector<LabelEntry> parse_labels(std::istream& in) {
  std::vector<LabelEntry> entries;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == kDontCare) continue;
    auto fail = [&](const std::string& why) {
      return DataError("label line " + std::to_string(line_no) + ": " + why);
    };
    if (tok.size() < 10) throw fail("expected 10 fields, got " + std::to_string(tok.size()));
    LabelEntry e;
    e.type = tok[0];
    double* fields[] = {&e.h, &e.w, &e.l, &e.x, &e.y, &e.z, &e.yaw};
    if (!parse_double(tok[1], e.truncation)) throw fail("bad truncation '" + tok[1] + "'");
    if (!parse_int(tok[2], e.occlusion)) throw fail("bad occlusion '" + tok[2] + "'");
    for (std::size_t k = 0; k < 7; ++k) {
      if (!parse_double(tok[3 + k], *fields[k])) {
        throw fail("non-numeric field '" + tok[3 + k] + "'");
      }
    }
    if (e.truncation < 0.0 || e.truncation > 1.0) throw fail("truncation outside [0, 1]");
    if (e.occlusion < 0 || e.occlusion > 3) throw fail("occlusion outside {0,1,2,3}");
    if (!(e.h > 0.0 && e.w > 0.0 && e.l > 0.0)) throw fail("dims must be positive");
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<LabelEntry> parse_labels(const fs::path& path) {
  auto in = open_in(path);
  try {
    return parse_labels(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<FootprintBox> labels_to_footprints(
    const std::vector<LabelEntry>& entries, const Taxonomy& taxonomy,
    std::uint32_t id_offset) {
  std::vector<FootprintBox> boxes;
  std::uint32_t next = id_offset;
  for (const auto& e : entries) {
    if (e.type == kDontCare) continue;
    const auto cls = taxonomy.find(e.type);
    if (!cls) throw DataError("unknown class name '" + e.type + "'");
    boxes.push_back(make_footprint(e.l, e.w, e.h, Vec3(e.x, e.y, e.z), e.yaw,
                                   *cls, ++next));
  }
  return boxes;
}

int occlusion_level(std::size_t visible, std::size_t unoccluded) {
  if (unoccluded == 0 || visible == 0) return 3;
  const double frac = static_cast<double>(visible) / static_cast<double>(unoccluded);
  if (frac >= 0.5) return 0;
  if (frac >= 0.25) return 1;
  return 2;
}

std::string frame_id(std::size_t index) {
  std::ostringstream ss;
  ss << std::setw(6) << std::setfill('0') << index;
  return ss.str();
}

DatasetSplit split_dataset(const std::vector<std::string>& frames,
                           const std::array<double, 3>& ratios,
                           std::uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  const std::size_t n = frames.size();
  if (n < ratios.size()) {
    throw ConfigError("need at least 3 frames to split, got " + std::to_string(n));
  }

  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = ratios[k] * static_cast<double>(n);
    // Guard against 0.1 * 10 = 0.9999999999999999 style rounding.
    sizes[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (remainder[k] > remainder[best]) best = k;
    }
    ++sizes[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (sizes[k] == 0) {
      std::size_t largest = 0;
      for (std::size_t j = 1; j < 3; ++j) {
        if (sizes[j] > sizes[largest]) largest = j;
      }
      --sizes[largest];
      ++sizes[k];
    }
  }

  std::vector<std::string> order = frames;
  Rng rng(seed);
  rng.shuffle(order);
  DatasetSplit split;
  auto it = order.begin();
  split.train.assign(it, it + static_cast<long>(sizes[0]));
  it += static_cast<long>(sizes[0]);
  split.val.assign(it, it + static_cast<long>(sizes[1]));
  it += static_cast<long>(sizes[1]);
  split.test.assign(it, order.end());
  return split;
}

std::string serialize_splits(const DatasetSplit& split,
                             const std::array<double, 3>& ratios,
                             std::uint64_t seed) {
  const nlohmann::json j = {
      {"seed", seed},
      {"ratios", ratios},
      {"train", split.train},
      {"val", split.val},
      {"test", split.test},
  };
  return j.dump(2);
}

DatasetSplit parse_splits(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    DatasetSplit s;
    s.train = j.at("train").get<std::vector<std::string>>();
    s.val = j.at("val").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed splits file: ") + e.what());
  }
}

std::string read_text_file(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace indoorbev
