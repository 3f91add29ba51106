#include "indoorbev/bevgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "indoorbev/binary_io.hpp"
#include "indoorbev/errors.hpp"

namespace indoorbev {

namespace {

int integral_ratio(double lo, double hi, double v, const char* axis) {
  if (!(hi > lo)) {
    throw ConfigError(std::string("grid ") + axis + " range must have max > min");
  }
  const double ratio = (hi - lo) / v;
  const double rounded = std::round(ratio);
  if (!(std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, rounded)) ||
      rounded < 1.0 || rounded > std::numeric_limits<int>::max()) {
    throw ConfigError(std::string("grid ") + axis +
                      " extent is not an integer multiple of the cell size");
  }
  return static_cast<int>(rounded);
}

bool point_less(const Point& a, const Point& b) {
  return std::tie(a.x, a.y, a.z, a.intensity) <
         std::tie(b.x, b.y, b.z, b.intensity);
}

}  // namespace

GridDims grid_dims(const GridSpec& spec) {
  if (!(spec.cell_size > 0.0) || !std::isfinite(spec.cell_size)) {
    throw ConfigError("grid cell size must be positive");
  }
  if (!(spec.z_max > spec.z_min)) {
    throw ConfigError("grid z range must have max > min");
  }
  GridDims d;
  d.height = integral_ratio(spec.y_min, spec.y_max, spec.cell_size, "y");
  d.width = integral_ratio(spec.x_min, spec.x_max, spec.cell_size, "x");
  return d;
}

CellIndex cell_of(const GridSpec& spec, const GridDims& dims, double x,
                  double y) {
  const auto row = static_cast<int>(std::floor((y - spec.y_min) / spec.cell_size));
  const auto col = static_cast<int>(std::floor((x - spec.x_min) / spec.cell_size));
  return {std::clamp(row, 0, dims.height - 1), std::clamp(col, 0, dims.width - 1)};
}

void cell_center(const GridSpec& spec, CellIndex cell, double& x, double& y) {
  x = spec.x_min + (cell.col + 0.5) * spec.cell_size;
  y = spec.y_min + (cell.row + 0.5) * spec.cell_size;
}

PointCloud filter_in_range(const PointCloud& cloud, const GridSpec& spec) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Point& p : cloud.points) {
    const double x = p.x, y = p.y, z = p.z;
    if (x >= spec.x_min && x < spec.x_max && y >= spec.y_min &&
        y < spec.y_max && z >= spec.z_min && z < spec.z_max) {
      out.points.push_back(p);
    }
  }
  return out;
}

ClusterSet cluster_divide(const PointCloud& cloud, const GridSpec& spec) {
  const GridDims dims = grid_dims(spec);
  const std::size_t n = cloud.size();
  std::vector<std::size_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = cloud.points[i];
    const CellIndex c = cell_of(spec, dims, p.x, p.y);
    keys[i] = static_cast<std::size_t>(c.row) * static_cast<std::size_t>(dims.width) +
              static_cast<std::size_t>(c.col);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return point_less(cloud.points[a], cloud.points[b]);
  });

  ClusterSet set;
  const auto width = static_cast<std::size_t>(dims.width);
  for (std::size_t i = 0; i < n;) {
    const std::size_t key = keys[order[i]];
    std::vector<Point> members;
    for (; i < n && keys[order[i]] == key; ++i) {
      members.push_back(cloud.points[order[i]]);
    }
    set.coords.push_back({static_cast<int>(key / width), static_cast<int>(key % width)});
    set.points.push_back(std::move(members));
  }
  return set;
}

ReducerSet default_reducers() {
  auto mean_of = [](const ClusterView& c, auto&& f) {
    double s = 0.0;
    for (const Point& p : c.points) s += f(p);
    return s / static_cast<double>(c.points.size());
  };
  return {
      {"log_count",
       [](const ClusterView& c) {
         return std::log1p(static_cast<double>(c.points.size()));
       }},
      {"mean_dx",
       [=](const ClusterView& c) {
         return mean_of(c, [&](const Point& p) { return p.x - c.center_x; });
       }},
      {"mean_dy",
       [=](const ClusterView& c) {
         return mean_of(c, [&](const Point& p) { return p.y - c.center_y; });
       }},
      {"mean_z",
       [=](const ClusterView& c) {
         return mean_of(c, [](const Point& p) { return double{p.z}; });
       }},
      {"max_z",
       [](const ClusterView& c) {
         double m = -std::numeric_limits<double>::infinity();
         for (const Point& p : c.points) m = std::max(m, double{p.z});
         return m;
       }},
      {"min_z",
       [](const ClusterView& c) {
         double m = std::numeric_limits<double>::infinity();
         for (const Point& p : c.points) m = std::min(m, double{p.z});
         return m;
       }},
      {"mean_range_xy",
       [=](const ClusterView& c) {
         return mean_of(c, [](const Point& p) {
           return std::hypot(double{p.x}, double{p.y});
         });
       }},
  };
}

std::vector<double> reduce_features(const ClusterView& cluster,
                                    const ReducerSet& reducers) {
  if (cluster.points.empty()) {
    throw std::invalid_argument("reduce_features requires a non-empty cluster");
  }
  std::vector<double> out;
  out.reserve(reducers.size());
  for (const auto& r : reducers) out.push_back(r.fn(cluster));
  return out;
}

BevFeatureMap bev_scatter(const std::vector<std::vector<double>>& features,
                          const std::vector<CellIndex>& coords,
                          const GridSpec& spec, int channels) {
  if (features.size() != coords.size()) {
    throw std::logic_error("bev_scatter: features and coords differ in length");
  }
  BevFeatureMap map;
  map.channels = channels;
  map.dims = grid_dims(spec);
  map.values.assign(static_cast<std::size_t>(channels) * map.dims.cells(), 0.0f);
  map.occupied.assign(map.dims.cells(), 0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const CellIndex c = coords[i];
    if (c.row < 0 || c.row >= map.dims.height || c.col < 0 ||
        c.col >= map.dims.width) {
      throw std::logic_error("bev_scatter: coordinate outside the grid");
    }
    if (features[i].size() != static_cast<std::size_t>(channels)) {
      throw std::logic_error("bev_scatter: feature vector has wrong length");
    }
    const std::size_t cell = map.index(0, c.row, c.col);
    if (map.occupied[cell]) {
      throw std::logic_error("bev_scatter: duplicate cluster coordinate");
    }
    map.occupied[cell] = 1;
    for (int ch = 0; ch < channels; ++ch) {
      map.values[map.index(ch, c.row, c.col)] = static_cast<float>(features[i][static_cast<std::size_t>(ch)]);
    }
  }
  return map;
}

BevFeatureMap normalize_map(const BevFeatureMap& map) {
  BevFeatureMap out = map;
  const std::size_t cells = map.dims.cells();
  std::size_t occupied = 0;
  for (auto o : map.occupied) occupied += o ? 1 : 0;
  if (occupied == 0) return out;
  for (int ch = 0; ch < map.channels; ++ch) {
    const std::size_t base = static_cast<std::size_t>(ch) * cells;
    double sum = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      if (map.occupied[i]) sum += map.values[base + i];
    }
    const double mean = sum / static_cast<double>(occupied);
    double ss = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      if (map.occupied[i]) {
        const double d = map.values[base + i] - mean;
        ss += d * d;
      }
    }
    const double var = ss / static_cast<double>(occupied);
    const double scale = var < 1e-12 ? 1.0 : 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < cells; ++i) {
      if (map.occupied[i]) {
        out.values[base + i] =
            static_cast<float>((map.values[base + i] - mean) * scale);
      }
    }
  }
  return out;
}

BevFeatureMap build_bev(const PointCloud& cloud, const GridSpec& spec,
                        const ReducerSet& reducers) {
  const ClusterSet clusters = cluster_divide(filter_in_range(cloud, spec), spec);
  std::vector<std::vector<double>> features;
  features.reserve(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    ClusterView view{clusters.points[i], 0.0, 0.0};
    cell_center(spec, clusters.coords[i], view.center_x, view.center_y);
    features.push_back(reduce_features(view, reducers));
  }
  return bev_scatter(features, clusters.coords, spec,
                     static_cast<int>(reducers.size()));
}

void write_bev(std::ostream& out, const BevFeatureMap& map) {
  binary::put_u32(out, static_cast<std::uint32_t>(map.channels));
  binary::put_u32(out, static_cast<std::uint32_t>(map.dims.height));
  binary::put_u32(out, static_cast<std::uint32_t>(map.dims.width));
  for (float v : map.values) binary::put_f32(out, v);
  if (!out) throw DataError("failed writing BEV feature map");
}

BevFeatureMap read_bev(std::istream& in) {
  BevFeatureMap map;
  map.channels = static_cast<int>(binary::get_u32(in));
  map.dims.height = static_cast<int>(binary::get_u32(in));
  map.dims.width = static_cast<int>(binary::get_u32(in));
  const std::size_t n = static_cast<std::size_t>(map.channels) * map.dims.cells();
  map.values.resize(n);
  for (auto& v : map.values) v = binary::get_f32(in);
  map.occupied.assign(map.dims.cells(), 0);
  for (int ch = 0; ch < map.channels; ++ch) {
    for (std::size_t i = 0; i < map.dims.cells(); ++i) {
      if (map.values[static_cast<std::size_t>(ch) * map.dims.cells() + i] != 0.0f) {
        map.occupied[i] = 1;
      }
    }
  }
  return map;
}

}  // namespace indoorbev
