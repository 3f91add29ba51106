#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "indoorbev/point_cloud.hpp"

namespace indoorbev {

/// BEV discretisation. Every axis uses half-open [min, max) intervals; z only
/// filters, there is no vertical discretisation.
struct GridSpec {
  double x_min = -5.0, x_max = 5.0;
  double y_min = -5.0, y_max = 5.0;
  double z_min = -3.0, z_max = 3.0;
  double cell_size = 0.02;
};

struct GridDims {
  int height = 0;  // rows, along y
  int width = 0;   // cols, along x

  std::size_t cells() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// H = (y_max - y_min) / v and W = (x_max - x_min) / v. Throws ConfigError
/// unless both ratios are integers within 1e-9.
GridDims grid_dims(const GridSpec& spec);

struct CellIndex {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Cell of (x, y): (floor((y - y_min) / v), floor((x - x_min) / v)), clamped
/// to the grid so that points rounding onto the upper bound stay inside.
CellIndex cell_of(const GridSpec& spec, const GridDims& dims, double x,
                  double y);

/// Centre of a cell in metres.
void cell_center(const GridSpec& spec, CellIndex cell, double& x, double& y);

/// Points with min <= coord < max on all three axes, order preserved.
PointCloud filter_in_range(const PointCloud& cloud, const GridSpec& spec);

/// Non-empty cells in canonical (row, col) order. Member points of a cluster
/// are sorted lexicographically by (x, y, z, intensity), so the result does
/// not depend on input order.
struct ClusterSet {
  std::vector<CellIndex> coords;
  std::vector<std::vector<Point>> points;

  std::size_t size() const { return coords.size(); }
  std::size_t count(std::size_t i) const { return points[i].size(); }
};

/// Expects range-filtered input.
ClusterSet cluster_divide(const PointCloud& cloud, const GridSpec& spec);

/// What a reducer sees of one cluster.
struct ClusterView {
  std::span<const Point> points;
  double center_x = 0.0;
  double center_y = 0.0;
};

struct Reducer {
  std::string name;
  std::function<double(const ClusterView&)> fn;
};

using ReducerSet = std::vector<Reducer>;

/// F = 7: log(1 + count), mean x offset from cell centre, mean y offset,
/// mean z, max z, min z, mean horizontal distance from the sensor.
ReducerSet default_reducers();

std::vector<double> reduce_features(const ClusterView& cluster,
                                    const ReducerSet& reducers);

/// Channel-major F x H x W map. Cells without a cluster are exactly 0 and
/// `occupied` is 0 there.
struct BevFeatureMap {
  int channels = 0;
  GridDims dims;
  std::vector<float> values;
  std::vector<std::uint8_t> occupied;

  float at(int c, int row, int col) const {
    return values[index(c, row, col)];
  }
  std::size_t index(int c, int row, int col) const {
    return (static_cast<std::size_t>(c) * dims.cells()) +
           static_cast<std::size_t>(row) * static_cast<std::size_t>(dims.width) +
           static_cast<std::size_t>(col);
  }
};

/// features[i] is placed at coords[i]. Throws std::logic_error on duplicate
/// or out-of-range coordinates, or ragged feature vectors.
BevFeatureMap bev_scatter(const std::vector<std::vector<double>>& features,
                          const std::vector<CellIndex>& coords,
                          const GridSpec& spec, int channels);

/// Per-channel standardisation over occupied cells (population variance).
/// Channels with variance below 1e-12 are only mean-shifted; empty cells stay
/// 0.
BevFeatureMap normalize_map(const BevFeatureMap& map);

/// filter -> cluster -> reduce -> scatter.
BevFeatureMap build_bev(const PointCloud& cloud, const GridSpec& spec,
                        const ReducerSet& reducers = default_reducers());

/// u32 F, H, W (little endian) followed by F*H*W little-endian f32,
/// channel-major.
void write_bev(std::ostream& out, const BevFeatureMap& map);
BevFeatureMap read_bev(std::istream& in);

}  // namespace indoorbev
