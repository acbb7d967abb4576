#ifndef PERCOVOR_CELL_METRICS_HPP
#define PERCOVOR_CELL_METRICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/polygon.hpp"
#include "percovor/tessellation.hpp"

namespace percovor {

struct CellMetrics {
  SiteId site = 0;
  double inradius = 0.0;
  Point chebyshev_center{};
  double diameter = 0.0;
  int edge_count = 0;
  bool clipped = false;
};

namespace detail {

inline double det3(const std::array<std::array<double, 3>, 3>& m) noexcept {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace detail

struct ChebyshevBall {
  Point center{};
  double radius = 0.0;
};

/// Largest disk inside a convex polygon (counter-clockwise), found as the
/// best vertex of the 3-variable LP  max r  s.t.  n_k . x - r >= n_k . p_k.
/// Every feasible vertex is enumerated, so the optimum is exact up to
/// rounding of the 3x3 solves.
inline ChebyshevBall chebyshev_ball(std::span<const Point> poly) {
  struct Constraint {
    Point normal;  // inward unit normal
    double offset;
  };
  std::vector<Constraint> cons;
  const std::size_t n = poly.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, distance(poly[i], poly[(i + 1) % n]));
  for (std::size_t i = 0; i < n; ++i) {
    const Point e = poly[(i + 1) % n] - poly[i];
    const double len = norm(e);
    if (len <= 1e-14 * scale) continue;
    const Point normal = perp(e) * (1.0 / len);
    cons.push_back({normal, dot(normal, poly[i])});
  }
  ChebyshevBall best{{}, -1.0};
  const std::size_t m = cons.size();
  const double tol = 1e-12 * std::max(scale, 1e-300);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        // Rows (nx, ny, -1) . (x, y, r) = offset, solved by Cramer's rule.
        const Constraint* c[3] = {&cons[i], &cons[j], &cons[k]};
        std::array<std::array<double, 3>, 3> a{};
        std::array<double, 3> b{};
        for (std::size_t row = 0; row < 3; ++row) {
          a[row] = {c[row]->normal.x, c[row]->normal.y, -1.0};
          b[row] = c[row]->offset;
        }
        const double det = detail::det3(a);
        if (std::abs(det) < 1e-12) continue;
        std::array<double, 3> sol{};
        for (std::size_t col = 0; col < 3; ++col) {
          auto replaced = a;
          for (std::size_t row = 0; row < 3; ++row) replaced[row][col] = b[row];
          sol[col] = detail::det3(replaced) / det;
        }
        const Point x{sol[0], sol[1]};
        const double r = sol[2];
        if (r <= best.radius) continue;
        bool feasible = true;
        for (const Constraint& con : cons) {
          if (dot(con.normal, x) - r < con.offset - tol) {
            feasible = false;
            break;
          }
        }
        if (feasible) best = {x, r};
      }
    }
  }
  if (best.radius < 0.0) best = {{}, 0.0};
  return best;
}

inline double polygon_diameter(std::span<const Point> poly) noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.size(); ++j) best = std::max(best, squared_distance(poly[i], poly[j]));
  }
  return std::sqrt(best);
}

inline CellMetrics polygon_metrics(std::span<const Point> poly) {
  CellMetrics m;
  const ChebyshevBall ball = chebyshev_ball(poly);
  m.inradius = ball.radius;
  m.chebyshev_center = ball.center;
  m.diameter = polygon_diameter(poly);
  m.edge_count = static_cast<int>(poly.size());
  return m;
}

/// Inradius, diameter and edge count of the (possibly clipped) cell of `site`.
inline CellMetrics cell_metrics(const Tessellation& tess, SiteId site) {
  if (site >= tess.site_count()) throw Error(ErrorKind::invalid_argument, "no such site");
  const Cell& cell = tess.cells[site];
  if (cell.unbounded && !cell.clipped) throw Error(ErrorKind::unbounded_cell, "cell is unbounded and not clipped");
  if (cell.polygon.size() < 3) throw Error(ErrorKind::unbounded_cell, "cell has no polygon");
  CellMetrics m = polygon_metrics(cell.polygon);
  m.site = site;
  m.clipped = cell.clipped;
  // An unclipped cell has one side per Voronoi edge, including degenerate ones.
  if (!cell.clipped) m.edge_count = static_cast<int>(cell.ring.size());
  return m;
}

inline std::vector<CellMetrics> all_cell_metrics(const Tessellation& tess) {
  std::vector<CellMetrics> out(tess.site_count());
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    const Cell& cell = tess.cells[s];
    if (cell.polygon.size() < 3) {
      out[s].site = s;
      out[s].clipped = true;
      continue;
    }
    out[s] = cell_metrics(tess, s);
  }
  return out;
}

}  // namespace percovor

#endif  // PERCOVOR_CELL_METRICS_HPP
