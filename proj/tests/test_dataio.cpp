#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include "indoorbev/augment.hpp"
#include "indoorbev/dataio.hpp"
#include "indoorbev/errors.hpp"
#include "indoorbev/predictions_io.hpp"
#include "indoorbev/rng.hpp"

using namespace indoorbev;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("indoorbev_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

PointCloud random_cloud(Rng& rng, std::size_t n) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({static_cast<float>(rng.normal(0, 3)), static_cast<float>(rng.normal(0, 3)),
                        static_cast<float>(rng.normal(0, 1)), static_cast<float>(rng.uniform())});
  }
  return c;
}

std::vector<LabelEntry> sample_labels() {
  return {{"Person", 0.0, 0, 1.7, 0.5, 0.5, 1.0, 2.0, 0.85, 0.25},
          {"Table", 0.25, 1, 0.75, 0.8, 1.6, -2.123456, 0.5, 0.375, -3.0},
          {"Box", 1.0, 3, 0.3, 0.3, 0.3, 0.0, -1.0, 0.15, 3.1}};
}

}  // namespace

TEST(Cloud, EmptyAndSinglePointBytes) {
  std::stringstream ss;
  write_cloud(ss, PointCloud{});
  EXPECT_TRUE(ss.str().empty());
  EXPECT_TRUE(read_cloud(ss).points.empty());

  std::stringstream one;
  write_cloud(one, PointCloud{{{1, 2, 3, 0.5f}}});
  const std::string b = one.str();
  ASSERT_EQ(b.size(), 16u);
  const float want[4] = {1, 2, 3, 0.5f};
  EXPECT_EQ(std::memcmp(b.data(), want, 16), 0);  // little-endian host
}

TEST(Cloud, RoundTripBitwiseAndCorruptLength) {
  Rng rng(1);
  const auto cloud = random_cloud(rng, 10000);
  const fs::path dir = temp_dir("cloud");
  write_cloud(dir / "c.bin", cloud);
  EXPECT_EQ(fs::file_size(dir / "c.bin"), 160000u);
  const auto back = read_cloud(dir / "c.bin");
  ASSERT_EQ(back.points.size(), cloud.points.size());
  EXPECT_EQ(std::memcmp(back.points.data(), cloud.points.data(), 160000), 0);

  std::ofstream(dir / "bad.bin", std::ios::binary) << "0123456789";
  EXPECT_THROW(read_cloud(dir / "bad.bin"), DataError);
  EXPECT_THROW(read_cloud(dir / "missing.bin"), DataError);
}

TEST(Labels, RoundTripWithinSixDecimals) {
  std::stringstream ss;
  write_labels(ss, sample_labels());
  const auto back = parse_labels(ss);
  const auto want = sample_labels();
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& a = want[i];
    const auto& b = back[i];
    EXPECT_EQ(a.type, b.type);
    EXPECT_EQ(a.occlusion, b.occlusion);
    for (auto [x, y] : {std::pair{a.truncation, b.truncation}, {a.h, b.h}, {a.w, b.w},
                        {a.l, b.l}, {a.x, b.x}, {a.y, b.y}, {a.z, b.z}, {a.yaw, b.yaw}}) {
      EXPECT_NEAR(x, y, 1e-6);
    }
  }
}

TEST(Labels, ParserRules) {
  std::stringstream empty;
  EXPECT_TRUE(parse_labels(empty).empty());

  std::stringstream mixed(
      "Chair 0 0 1 0.5 0.5 1 2 0.5 0.1 extra fields\n"
      "\n"
      "DontCare -1 -1 1 1 1 0 0 0 0\n"
      "Robot 0 2 0.6 0.4 0.4 -1 -1 0.3 1.5\n");
  const auto got = parse_labels(mixed);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].type, "Chair");
  EXPECT_EQ(got[1].occlusion, 2);

  std::stringstream bad("Chair 0 0 abc 0.5 0.5 1 2 0.5 0.1\n");
  try {
    parse_labels(bad);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  std::stringstream short_line("Table 0 0 1 1 1\nChair 0 0 1 1 1 1 1 1 1\n");
  EXPECT_THROW(parse_labels(short_line), DataError);
  std::stringstream neg("Table 0 0 -1 1 1 0 0 0 0\n");
  EXPECT_THROW(parse_labels(neg), DataError);
}

TEST(Labels, ToFootprints) {
  const auto tax = Taxonomy::indoor_default();
  const std::vector<LabelEntry> e = {{"Table", 0, 0, 1.0, 0.5, 2.0, 1, 2, 0.5, 0.3},
                                     {"DontCare", 0, 0, 1, 1, 1, 0, 0, 0, 0},
                                     {"Chair", 0, 0, 1, 1, 1, 0, 0, 0, 0},
                                     {"Box", 0, 0, 1, 1, 1, 0, 0, 0, 0}};
  const auto f = labels_to_footprints(e, tax);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].length, 2.0);
  EXPECT_EQ(f[0].width, 0.5);
  EXPECT_EQ(f[0].height, 1.0);
  EXPECT_EQ(f[0].class_id, 1);
  EXPECT_EQ(f[0].instance_id, 1u);
  EXPECT_EQ(f[1].instance_id, 2u);
  EXPECT_EQ(f[2].instance_id, 3u);
  EXPECT_EQ(labels_to_footprints(e, tax, 10)[0].instance_id, 11u);
  EXPECT_THROW(labels_to_footprints({{"Sofa", 0, 0, 1, 1, 1, 0, 0, 0, 0}}, tax), DataError);
}

TEST(Labels, OcclusionBandsAndFrameIds) {
  EXPECT_EQ(occlusion_level(10, 10), 0);
  EXPECT_EQ(occlusion_level(5, 10), 0);
  EXPECT_EQ(occlusion_level(3, 10), 1);
  EXPECT_EQ(occlusion_level(1, 10), 2);
  EXPECT_EQ(occlusion_level(0, 10), 3);
  EXPECT_EQ(occlusion_level(0, 0), 3);
  EXPECT_EQ(frame_id(42), "000042");
}

TEST(Splits, SizesDeterminismPartition) {
  std::vector<std::string> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(frame_id(static_cast<std::size_t>(i)));
  const auto s = split_dataset(ten, {0.8, 0.1, 0.1}, 3);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.val.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
  const auto again = split_dataset(ten, {0.8, 0.1, 0.1}, 3);
  EXPECT_EQ(s.train, again.train);
  EXPECT_EQ(s.test, again.test);
  EXPECT_THROW(split_dataset({"a", "b"}, {0.8, 0.1, 0.1}, 3), ConfigError);
  EXPECT_THROW(split_dataset(ten, {0.8, 0.1, 0.2}, 3), ConfigError);

  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.range(3, 60));
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(frame_id(i));
    double a = rng.uniform(0.05, 1), b = rng.uniform(0.05, 1), c = rng.uniform(0.05, 1);
    const double sum = a + b + c;
    const auto sp = split_dataset(ids, {a / sum, b / sum, 1.0 - a / sum - b / sum}, rng.next_u64());
    std::multiset<std::string> all(sp.train.begin(), sp.train.end());
    all.insert(sp.val.begin(), sp.val.end());
    all.insert(sp.test.begin(), sp.test.end());
    EXPECT_EQ(all, std::multiset<std::string>(ids.begin(), ids.end()));
    EXPECT_FALSE(sp.train.empty() || sp.val.empty() || sp.test.empty());
  }
}

TEST(Splits, ManifestRoundTrip) {
  const auto s = split_dataset({"000000", "000001", "000002", "000003"}, {0.5, 0.25, 0.25}, 1);
  const auto back = parse_splits(serialize_splits(s, {0.5, 0.25, 0.25}, 1));
  EXPECT_EQ(back.train, s.train);
  EXPECT_EQ(back.val, s.val);
  EXPECT_EQ(back.test, s.test);
  EXPECT_THROW(parse_splits("[]"), DataError);
}

TEST(Augment, IdentityConfigOnlyShuffles) {
  Rng rng(2);
  const auto cloud = random_cloud(rng, 2000);
  const auto labels = sample_labels();
  const auto r = augment_frame(cloud, labels, AugmentConfig::identity(), 5);
  ASSERT_EQ(r.cloud.points.size(), cloud.points.size());
  auto key = [](const Point& p) { return std::tuple(p.x, p.y, p.z, p.intensity); };
  std::vector<std::tuple<float, float, float, float>> a, b;
  for (const auto& p : cloud.points) a.push_back(key(p));
  for (const auto& p : r.cloud.points) b.push_back(key(p));
  EXPECT_NE(a, b);  // order changed
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  ASSERT_EQ(r.labels.size(), labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    EXPECT_EQ(r.labels[i].x, labels[i].x);
    EXPECT_EQ(r.labels[i].yaw, labels[i].yaw);
    EXPECT_EQ(r.labels[i].l, labels[i].l);
  }
}

TEST(Augment, QuarterTurnRotation) {
  Rng rng(3);
  const auto cloud = random_cloud(rng, 500);
  auto cfg = AugmentConfig::identity();
  cfg.rotation_min = cfg.rotation_max = kPi / 2;
  const auto labels = sample_labels();
  const auto r = augment_frame(cloud, labels, cfg, 9);
  // Undo the shuffle by matching z and intensity, which rotation keeps.
  std::map<std::pair<float, float>, Point> by_key;
  for (const auto& p : r.cloud.points) by_key[{p.z, p.intensity}] = p;
  for (const auto& p : cloud.points) {
    const auto& q = by_key.at({p.z, p.intensity});
    EXPECT_NEAR(q.x, -p.y, 1e-5);
    EXPECT_NEAR(q.y, p.x, 1e-5);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    EXPECT_NEAR(r.labels[i].x, -labels[i].y, 1e-12);
    EXPECT_NEAR(r.labels[i].y, labels[i].x, 1e-12);
    const double want = std::remainder(labels[i].yaw + kPi / 2, 2 * kPi);
    EXPECT_NEAR(std::remainder(r.labels[i].yaw - want, 2 * kPi), 0.0, 1e-12);
    EXPECT_GE(r.labels[i].yaw, -kPi);
    EXPECT_LT(r.labels[i].yaw, kPi);
  }
}

TEST(Augment, DecimationBinomialBound) {
  Rng rng(4);
  const auto cloud = random_cloud(rng, 10000);
  auto cfg = AugmentConfig::identity();
  cfg.decimation_keep_prob = 0.5;
  const auto r = augment_frame(cloud, {}, cfg, 11);
  EXPECT_NEAR(static_cast<double>(r.cloud.points.size()), 5000.0, 5 * std::sqrt(2500.0));
}

TEST(Augment, DeterministicAndSeedSensitive) {
  Rng rng(5);
  const auto cloud = random_cloud(rng, 3000);
  const auto cfg = AugmentConfig::training_default();
  const auto a = augment_frame(cloud, sample_labels(), cfg, 1);
  const auto b = augment_frame(cloud, sample_labels(), cfg, 1);
  const auto c = augment_frame(cloud, sample_labels(), cfg, 2);
  EXPECT_EQ(a.cloud, b.cloud);
  EXPECT_NE(a.cloud, c.cloud);
  ASSERT_EQ(a.labels.size(), b.labels.size());
  for (std::size_t i = 0; i < a.labels.size(); ++i) EXPECT_EQ(a.labels[i].x, b.labels[i].x);
}

TEST(Augment, InsertionRespectsCollisionsAndWarns) {
  ObjectDatabase db;
  Rng rng(6);
  for (int k = 0; k < 4; ++k) {
    DatabaseObject o;
    o.label = {"Box", 0, 0, 0.4, 0.4, 0.4, 0, 0, 0.2, 0};
    for (int i = 0; i < 20; ++i) {
      o.points.points.push_back({static_cast<float>(rng.uniform(-0.2, 0.2)),
                                 static_cast<float>(rng.uniform(-0.2, 0.2)),
                                 static_cast<float>(rng.uniform(0, 0.4)), 0.5f});
    }
    db.objects.push_back(o);
  }
  auto cfg = AugmentConfig::identity();
  cfg.insert_min = cfg.insert_max = 3;
  const auto r = augment_frame(PointCloud{}, sample_labels(), cfg, 3, &db);
  EXPECT_EQ(r.labels.size(), sample_labels().size() + 3);
  EXPECT_EQ(r.cloud.points.size(), 60u);
  auto radius = [](const LabelEntry& e) { return 0.5 * std::sqrt(e.l * e.l + e.w * e.w + e.h * e.h); };
  for (std::size_t i = 3; i < r.labels.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = r.labels[i];
      const auto& b = r.labels[j];
      const double d = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                                 (a.z - b.z) * (a.z - b.z));
      EXPECT_GT(d, radius(a) + radius(b));
    }
  }

  // No room at all: fewer insertions and a warning, not an error.
  cfg.insert_extent = 0.0;
  cfg.insert_min = cfg.insert_max = 2;
  const std::vector<LabelEntry> blocker = {{"Wall", 0, 0, 2, 2, 2, 0, 0, 0.2, 0}};
  const auto crowded = augment_frame(PointCloud{}, blocker, cfg, 3, &db);
  EXPECT_EQ(crowded.labels.size(), 1u);
  EXPECT_FALSE(crowded.warnings.empty());
}

TEST(ObjectDb, HarvestAndRoundTrip) {
  PointCloud cloud{{{0, 0, 0.2f, 1}, {0.1f, 0.1f, 0.1f, 1}, {0.15f, -0.1f, 0.3f, 1},
                    {0.05f, 0, 0.05f, 1}, {-0.1f, 0.1f, 0.35f, 1}, {3, 3, 0, 1}}};
  const std::vector<LabelEntry> labels = {{"Box", 0, 0, 0.4, 0.4, 0.4, 0, 0, 0.2, 0},
                                          {"Chair", 0, 0, 1, 1, 1, -3, -3, 0.5, 0}};
  const auto db = harvest_objects(cloud, labels);
  ASSERT_EQ(db.objects.size(), 1u);
  EXPECT_EQ(db.objects[0].points.points.size(), 5u);

  const fs::path dir = temp_dir("objdb");
  write_object_db(dir, db);
  const auto back = read_object_db(dir);
  ASSERT_EQ(back.objects.size(), 1u);
  EXPECT_EQ(back.objects[0].points, db.objects[0].points);
  EXPECT_EQ(back.objects[0].label.type, "Box");
}

TEST(MaskPerturb, Morphology) {
  BinaryMask m(5, 5);
  m(2, 2) = 1;
  const auto d = dilate_cross(m);
  EXPECT_EQ(std::count(d.data.begin(), d.data.end(), 1), 5);
  EXPECT_EQ(d(1, 2), 1);
  EXPECT_EQ(d(1, 1), 0);

  BinaryMask line(5, 5);
  for (int c = 0; c < 5; ++c) line(2, c) = 1;
  const auto e = erode_cross(line);
  EXPECT_EQ(std::count(e.data.begin(), e.data.end(), 1), 0);

  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_EQ(perturb_mask(line, 0.0, s), line);
  int changed = 0;
  for (std::uint64_t s = 0; s < 20; ++s) changed += perturb_mask(m, 1.0, s) != m;
  EXPECT_EQ(changed, 20);
}

TEST(Predictions, RleRoundTrip) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    BinaryMask m(7, 9);
    for (auto& v : m.data) v = rng.bernoulli(0.4);
    const auto runs = rle_encode(m);
    EXPECT_EQ(rle_decode(runs, 7, 9), m);
  }
  BinaryMask starts_set(1, 3, 1);
  EXPECT_EQ(rle_encode(starts_set), (std::vector<std::uint32_t>{0, 3}));
  EXPECT_THROW(rle_decode({1, 1}, 1, 3), DataError);
}

TEST(Predictions, JsonRoundTripAndValidation) {
  FramePredictions f{"000001", 2, 3, {}};
  Prediction p;
  p.class_probs = {0.9, 0, 0, 0, 0, 0, 0, 0, 0.1};
  p.mask_probs = ProbMask(2, 3);
  p.mask_probs.data = {1, 0, 1, 0, 0, 1};
  p.dims = Vec3(1, 2, 3);
  p.position = Vec3(0.5, -0.5, 0.1);
  p.yaw = 0.7;
  f.predictions.push_back(p);
  const auto back = parse_predictions(serialize_predictions(f));
  ASSERT_EQ(back.predictions.size(), 1u);
  EXPECT_EQ(back.predictions[0].mask_probs, p.mask_probs);
  EXPECT_EQ(back.predictions[0].class_probs, p.class_probs);
  EXPECT_EQ(back.predictions[0].dims, p.dims);

  EXPECT_THROW(parse_predictions(R"({"frame_id": "1", "height": 1, "width": 1,
      "predictions": [{"class_probs": [0.5, 0.4], "dims": [1,1,1], "position": [0,0,0],
      "yaw": 0, "mask": {"rle": [1]}}]})"),
               DataError);
  EXPECT_THROW(parse_predictions("nope"), DataError);
}
