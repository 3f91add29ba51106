#include "indoorbev/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

#include "indoorbev/binary_io.hpp"
#include "indoorbev/errors.hpp"

namespace indoorbev {

namespace {

// Absolute slack on the inclusive boundary test, far below any cell size.
constexpr double kInsideSlack = 1e-9;

/// Rectangles are symmetric under a half turn, so reduce yaw to
/// [-pi/2, pi/2) before taking sin/cos. yaw and yaw + pi then share the same
/// trigonometric values up to rounding of the reduction itself.
double half_turn_yaw(double yaw) {
  constexpr double pi = std::numbers::pi;
  double a = wrap_angle(yaw);
  if (a >= pi / 2) a -= pi;
  if (a < -pi / 2) a += pi;
  return a;
}

struct BoxFrame {
  double cx, cy, c, s, hl, hw;

  explicit BoxFrame(const FootprintBox& box)
      : cx(box.position.x()), cy(box.position.y()),
        hl(box.length / 2 + kInsideSlack), hw(box.width / 2 + kInsideSlack) {
    const double a = half_turn_yaw(box.yaw);
    c = std::cos(a);
    s = std::sin(a);
  }

  bool contains(double x, double y) const {
    const double dx = x - cx;
    const double dy = y - cy;
    const double lx = c * dx + s * dy;
    const double ly = -s * dx + c * dy;
    return std::abs(lx) <= hl && std::abs(ly) <= hw;
  }
};

}  // namespace

FootprintBox make_footprint(double length, double width, double height,
                            const Vec3& position, double yaw, int class_id,
                            std::uint32_t instance_id) {
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) {
    throw ConfigError("footprint dims must be positive");
  }
  if (instance_id == 0) throw ConfigError("instance ids must be positive");
  if (!position.allFinite() || !std::isfinite(yaw)) {
    throw ConfigError("footprint pose must be finite");
  }
  return {length, width, height, position, wrap_angle(yaw), class_id,
          instance_id};
}

std::array<Corner, 4> footprint_polygon(const FootprintBox& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = box.length / 2;
  const double hw = box.width / 2;
  const std::array<std::array<double, 2>, 4> local = {
      {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<Corner, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = {box.position.x() + c * local[i][0] - s * local[i][1],
              box.position.y() + s * local[i][0] + c * local[i][1]};
  }
  return out;
}

bool footprint_contains(const FootprintBox& box, double x, double y) {
  return BoxFrame(box).contains(x, y);
}

InstanceMaskMap rasterize(const std::vector<FootprintBox>& boxes,
                          const GridSpec& spec) {
  const GridDims dims = grid_dims(spec);
  std::set<std::uint32_t> seen;
  for (const auto& b : boxes) {
    if (b.instance_id == 0) throw ConfigError("instance ids must be positive");
    if (!seen.insert(b.instance_id).second) {
      throw ConfigError("duplicate instance id " + std::to_string(b.instance_id));
    }
  }

  InstanceMaskMap map(dims.height, dims.width, 0u);
  const double v = spec.cell_size;
  for (const auto& box : boxes) {
    const BoxFrame frame(box);
    // Cell range covering the rotated rectangle's bounding box.
    const double ex = std::abs(frame.c) * frame.hl + std::abs(frame.s) * frame.hw;
    const double ey = std::abs(frame.s) * frame.hl + std::abs(frame.c) * frame.hw;
    const auto col_lo = static_cast<long>(std::floor((frame.cx - ex - spec.x_min) / v)) - 1;
    const auto col_hi = static_cast<long>(std::floor((frame.cx + ex - spec.x_min) / v)) + 1;
    const auto row_lo = static_cast<long>(std::floor((frame.cy - ey - spec.y_min) / v)) - 1;
    const auto row_hi = static_cast<long>(std::floor((frame.cy + ey - spec.y_min) / v)) + 1;
    const int r0 = static_cast<int>(std::max(0L, row_lo));
    const int r1 = static_cast<int>(std::min<long>(dims.height - 1, row_hi));
    const int c0 = static_cast<int>(std::max(0L, col_lo));
    const int c1 = static_cast<int>(std::min<long>(dims.width - 1, col_hi));
    for (int r = r0; r <= r1; ++r) {
      const double y = spec.y_min + (r + 0.5) * v;
      for (int c = c0; c <= c1; ++c) {
        const double x = spec.x_min + (c + 0.5) * v;
        if (frame.contains(x, y)) map(r, c) = box.instance_id;
      }
    }
  }
  return map;
}

BinaryMask extract_binary(const InstanceMaskMap& map, std::uint32_t id) {
  BinaryMask out(map.height, map.width, 0);
  for (std::size_t i = 0; i < map.data.size(); ++i) {
    out.data[i] = (id != 0 && map.data[i] == id) ? 1 : 0;
  }
  return out;
}

std::vector<std::uint32_t> instance_ids(const InstanceMaskMap& map) {
  std::set<std::uint32_t> ids;
  for (auto v : map.data) {
    if (v != 0) ids.insert(v);
  }
  return {ids.begin(), ids.end()};
}

void write_instance_map(std::ostream& out, const InstanceMaskMap& map) {
  binary::put_u32(out, static_cast<std::uint32_t>(map.height));
  binary::put_u32(out, static_cast<std::uint32_t>(map.width));
  for (auto v : map.data) binary::put_u32(out, v);
  if (!out) throw DataError("failed writing instance mask map");
}

InstanceMaskMap read_instance_map(std::istream& in) {
  const auto h = binary::get_u32(in);
  const auto w = binary::get_u32(in);
  if (h > (1u << 16) || w > (1u << 16)) {
    throw DataError("instance mask map dimensions are implausible");
  }
  InstanceMaskMap map(static_cast<int>(h), static_cast<int>(w), 0u);
  for (auto& v : map.data) v = binary::get_u32(in);
  return map;
}

void write_instance_pgm(std::ostream& out, const InstanceMaskMap& map) {
  out << "P5\n" << map.width << ' ' << map.height << "\n255\n";
  for (int r = map.height - 1; r >= 0; --r) {
    for (int c = 0; c < map.width; ++c) {
      const std::uint32_t id = map(r, c);
      const auto grey = id == 0 ? 0u : 255u - ((id - 1u) * 47u) % 200u;
      out.put(static_cast<char>(grey));
    }
  }
  if (!out) throw DataError("failed writing PGM image");
}

}  // namespace indoorbev
