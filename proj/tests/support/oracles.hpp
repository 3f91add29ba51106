#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <variant>
#include <vector>

#include "indoorbev/geometry.hpp"
#include "indoorbev/match_eval.hpp"
#include "indoorbev/raycast.hpp"

namespace oracle {

using indoorbev::Vec3;

// Signed distance (or a 1-Lipschitz lower bound on it) to the primitive's
// surface, negative inside. Every function here has |grad| <= 1.
inline double sdf(const indoorbev::GeometryPrimitive& g, const Vec3& p) {
  using namespace indoorbev;
  if (const auto* pl = std::get_if<Plane>(&g)) return pl->normal.dot(p) + pl->offset;
  if (const auto* s = std::get_if<Sphere>(&g)) return p.norm() - s->radius;
  if (const auto* b = std::get_if<Box>(&g)) {
    const Vec3 q = p.cwiseAbs() - b->half_extents;
    return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
  }
  if (const auto* c = std::get_if<Cylinder>(&g)) {
    const double dx = std::hypot(p.x(), p.y()) - c->radius;
    const double dz = std::abs(p.z()) - c->half_height;
    return std::min(std::max(dx, dz), 0.0) +
           std::hypot(std::max(dx, 0.0), std::max(dz, 0.0));
  }
  if (const auto* c = std::get_if<Capsule>(&g)) {
    const double z = std::clamp(p.z(), -c->half_length, c->half_length);
    return (p - Vec3(0.0, 0.0, z)).norm() - c->radius;
  }
  const auto& e = std::get<Ellipsoid>(g);
  // min(r) * (|p / r| - 1): exact sign, never larger than the true distance.
  return e.radii.minCoeff() * (p.cwiseQuotient(e.radii).norm() - 1.0);
}

struct MarchResult {
  std::optional<double> t;
  double min_abs = std::numeric_limits<double>::infinity();  // over samples
};

// Samples f at t_k = t_min + k * step and reports the first sign change,
// refined by bisection. Samples that cannot differ in sign from the current
// one (|f| bounds the distance to the surface) are skipped without changing
// which lattice interval is found.
inline MarchResult ray_march(const indoorbev::Ray& ray,
                             const indoorbev::GeometryPrimitive& g, double step,
                             double t_max, double t_min = 1e-6,
                             bool skip = true) {
  auto f = [&](double t) { return sdf(g, ray.origin + t * ray.direction); };
  MarchResult out;
  double t_prev = t_min;
  double f_prev = f(t_prev);
  out.min_abs = std::abs(f_prev);
  if (f_prev == 0.0) {
    out.t = t_prev;
    return out;
  }
  const auto last = static_cast<long long>((t_max - t_min) / step);
  long long k = 0;
  while (k < last) {
    const long long jump =
        skip ? std::max<long long>(1, static_cast<long long>(std::abs(f_prev) / step)) : 1;
    const long long next = std::min(last, k + jump);
    const double t = t_min + static_cast<double>(next) * step;
    const double v = f(t);
    out.min_abs = std::min(out.min_abs, std::abs(v));
    if ((v <= 0.0) != (f_prev <= 0.0)) {
      // Skipped samples keep the sign of f_prev, so this is the first change.
      double lo = t_prev, hi = t, f_lo = f_prev;
      for (int i = 0; i < 80 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm <= 0.0) == (f_lo <= 0.0)) {
          lo = mid;
          f_lo = fm;
        } else {
          hi = mid;
        }
      }
      out.t = 0.5 * (lo + hi);
      return out;
    }
    k = next;
    t_prev = t;
    f_prev = v;
  }
  return out;
}

// Exhaustive minimum assignment cost over all injective matchings of the
// smaller side into the larger. The sum is accumulated in query order.
inline double brute_force_min_cost(const indoorbev::CostMatrix& c) {
  const std::size_t n = c.rows, m = c.cols;
  if (n == 0 || m == 0) return 0.0;
  const std::size_t big = std::max(n, m);
  std::vector<std::size_t> perm(big);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    if (n <= m) {
      for (std::size_t q = 0; q < n; ++q) sum += c(q, perm[q]);
    } else {
      // perm maps gts to queries; visit queries in ascending order.
      std::vector<std::ptrdiff_t> gt_of(n, -1);
      for (std::size_t g = 0; g < m; ++g) gt_of[perm[g]] = static_cast<std::ptrdiff_t>(g);
      for (std::size_t q = 0; q < n; ++q) {
        if (gt_of[q] >= 0) sum += c(q, static_cast<std::size_t>(gt_of[q]));
      }
    }
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracle
