#pragma once

#include <cstddef>
#include <vector>

namespace indoorbev {

/// One lidar return in the sensor frame. Single precision matches the
/// on-disk format.
struct Point {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float intensity = 0.0f;

  friend bool operator==(const Point&, const Point&) = default;
};

struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

}  // namespace indoorbev
