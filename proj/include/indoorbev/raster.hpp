#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "indoorbev/bevgrid.hpp"
#include "indoorbev/geometry.hpp"

namespace indoorbev {

/// Ground-plane annotation of one object.
struct FootprintBox {
  double length = 1.0;  // along local x
  double width = 1.0;   // along local y
  double height = 1.0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;  // kept in [-pi, pi)
  int class_id = 0;
  std::uint32_t instance_id = 1;
};

/// Wraps yaw and checks dims > 0 and instance_id > 0. Throws ConfigError.
FootprintBox make_footprint(double length, double width, double height,
                            const Vec3& position, double yaw, int class_id,
                            std::uint32_t instance_id);

struct Corner {
  double x = 0.0;
  double y = 0.0;
};

/// Counter-clockwise corners starting from local (+l/2, +w/2).
std::array<Corner, 4> footprint_polygon(const FootprintBox& box);

/// Inclusive point-in-rectangle test in the box frame.
bool footprint_contains(const FootprintBox& box, double x, double y);

/// Row-major H x W grid. Row index runs along y, column along x.
template <typename T>
struct Grid2D {
  int height = 0;
  int width = 0;
  std::vector<T> data;

  Grid2D() = default;
  Grid2D(int h, int w, T fill = T{})
      : height(h), width(w),
        data(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

  std::size_t size() const { return data.size(); }
  T& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(c)];
  }
  const T& operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(c)];
  }
  bool same_shape(const Grid2D<auto>& other) const {
    return height == other.height && width == other.width;
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

using BinaryMask = Grid2D<std::uint8_t>;
/// 0 is background, any other value an instance id.
using InstanceMaskMap = Grid2D<std::uint32_t>;

/// A cell takes a box's id when its centre lies inside or on the box
/// rectangle. Later boxes overwrite earlier ones; parts outside the grid are
/// dropped. Throws ConfigError on duplicate or zero instance ids.
InstanceMaskMap rasterize(const std::vector<FootprintBox>& boxes,
                          const GridSpec& spec);

BinaryMask extract_binary(const InstanceMaskMap& map, std::uint32_t id);

/// Distinct nonzero ids, ascending.
std::vector<std::uint32_t> instance_ids(const InstanceMaskMap& map);

/// u32 H, W (little endian) followed by H*W little-endian u32 ids, row-major.
void write_instance_map(std::ostream& out, const InstanceMaskMap& map);
InstanceMaskMap read_instance_map(std::istream& in);

/// Binary PGM (P5) for viewing. Row 0 of the grid (y_min) is written last
/// so +y points up in the image.
void write_instance_pgm(std::ostream& out, const InstanceMaskMap& map);

}  // namespace indoorbev
