#ifndef PERCOVOR_TESTS_ORACLES_HPP
#define PERCOVOR_TESTS_ORACLES_HPP

// Brute-force reference computations used only by the test suites. None of
// these share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "percovor/point.hpp"

namespace percovor::oracle {

/// In-circle sign in long double (adequate for random, well-separated inputs).
inline long double incircle_value(Point a, Point b, Point c, Point d) {
  const long double adx = (long double)a.x - d.x, ady = (long double)a.y - d.y;
  const long double bdx = (long double)b.x - d.x, bdy = (long double)b.y - d.y;
  const long double cdx = (long double)c.x - d.x, cdy = (long double)c.y - d.y;
  return (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
         (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
}

/// Voronoi cell of `sites[i]` as the box clipped by every bisector half-plane.
inline std::vector<Point> voronoi_cell_by_half_planes(const std::vector<Point>& sites, std::size_t i, Point lo,
                                                     Point hi) {
  std::vector<Point> poly{lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (j == i) continue;
    const Point p = sites[i], q = sites[j];
    const Point nrm = q - p;
    const double off = dot(nrm, 0.5 * (p + q));
    std::vector<Point> out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point cur = poly[k], nxt = poly[(k + 1) % poly.size()];
      const double dc = dot(nrm, cur) - off, dn = dot(nrm, nxt) - off;
      if (dc <= 0) out.push_back(cur);
      if ((dc < 0 && dn > 0) || (dc > 0 && dn < 0)) out.push_back(cur + (dc / (dc - dn)) * (nxt - cur));
    }
    poly = std::move(out);
  }
  return poly;
}

/// Largest inscribed disk radius of a convex CCW polygon by zooming grid search
/// on the concave function x -> min over edges of the signed distance.
inline double inradius_by_grid(const std::vector<Point>& poly, int resolution = 60, int levels = 80) {
  auto value = [&](Point x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point a = poly[k], b = poly[(k + 1) % poly.size()];
      const Point e = b - a;
      const double len = std::hypot(e.x, e.y);
      if (len == 0) continue;
      best = std::min(best, cross(e, x - a) / len);
    }
    return best;
  };
  double minx = poly[0].x, maxx = poly[0].x, miny = poly[0].y, maxy = poly[0].y;
  for (const Point& p : poly) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  Point center{(minx + maxx) / 2, (miny + maxy) / 2};
  double half = std::max(maxx - minx, maxy - miny) / 2;
  double best = value(center);
  for (int level = 0; level < levels; ++level) {
    Point arg = center;
    for (int i = 0; i <= resolution; ++i) {
      for (int j = 0; j <= resolution; ++j) {
        const Point x{center.x - half + 2 * half * i / resolution, center.y - half + 2 * half * j / resolution};
        const double v = value(x);
        if (v > best) {
          best = v;
          arg = x;
        }
      }
    }
    center = arg;
    half *= 0.5;
  }
  return best;
}

/// Unit-weight Dijkstra with a binary heap.
inline std::vector<long> dijkstra_unit(const std::vector<std::vector<int>>& adj, int source) {
  std::vector<long> dist(adj.size(), std::numeric_limits<long>::max());
  using Item = std::pair<long, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(source)] = 0;
  heap.push({0, source});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d != dist[static_cast<std::size_t>(v)]) continue;
    for (const int w : adj[static_cast<std::size_t>(v)]) {
      if (d + 1 < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = d + 1;
        heap.push({d + 1, w});
      }
    }
  }
  return dist;
}

/// Component labels by iterative flood fill.
inline std::vector<int> flood_fill_labels(const std::vector<std::vector<int>>& adj, const std::vector<bool>& member) {
  std::vector<int> label(adj.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (!member[s] || label[s] >= 0) continue;
    std::deque<int> queue{static_cast<int>(s)};
    label[s] = next;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (const int w : adj[static_cast<std::size_t>(v)]) {
        if (member[static_cast<std::size_t>(w)] && label[static_cast<std::size_t>(w)] < 0) {
          label[static_cast<std::size_t>(w)] = next;
          queue.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

inline std::vector<Point> random_points(std::size_t n, double side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<Point> pts(n);
  for (Point& p : pts) p = {u(rng), u(rng)};
  return pts;
}

}  // namespace percovor::oracle

#endif  // PERCOVOR_TESTS_ORACLES_HPP
