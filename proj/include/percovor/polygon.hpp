#ifndef PERCOVOR_POLYGON_HPP
#define PERCOVOR_POLYGON_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/point.hpp"

namespace percovor {

using Polygon = std::vector<Point>;

inline double signed_area(std::span<const Point> poly) noexcept {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * sum;
}

inline double area(std::span<const Point> poly) noexcept { return std::abs(signed_area(poly)); }

inline double perimeter(std::span<const Point> poly) noexcept {
  const std::size_t n = poly.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += distance(poly[i], poly[(i + 1) % n]);
  return sum;
}

inline Rect bounding_box(std::span<const Point> poly) noexcept {
  Rect r{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
         {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const Point& p : poly) {
    r.min.x = std::min(r.min.x, p.x);
    r.min.y = std::min(r.min.y, p.y);
    r.max.x = std::max(r.max.x, p.x);
    r.max.y = std::max(r.max.y, p.y);
  }
  return r;
}

inline Polygon rect_polygon(const Rect& r) {
  return {r.min, {r.max.x, r.min.y}, r.max, {r.min.x, r.max.y}};
}

/// Keeps the part of `poly` where dot(normal, p) <= offset (Sutherland-Hodgman step).
inline Polygon clip_half_plane(std::span<const Point> poly, Point normal, double offset) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point cur = poly[i];
    const Point nxt = poly[(i + 1) % n];
    const double dc = dot(normal, cur) - offset;
    const double dn = dot(normal, nxt) - offset;
    if (dc <= 0.0) out.push_back(cur);
    if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
      const double s = dc / (dc - dn);
      out.push_back(cur + s * (nxt - cur));
    }
  }
  return out;
}

inline Polygon clip_rect(std::span<const Point> poly, const Rect& r) {
  Polygon out(poly.begin(), poly.end());
  out = clip_half_plane(out, {1.0, 0.0}, r.max.x);
  out = clip_half_plane(out, {-1.0, 0.0}, -r.min.x);
  out = clip_half_plane(out, {0.0, 1.0}, r.max.y);
  out = clip_half_plane(out, {0.0, -1.0}, -r.min.y);
  return out;
}

/// Clips an arbitrary simple polygon by a convex counter-clockwise polygon.
/// The result may contain zero-width bridges; its area is the intersection area.
inline Polygon clip_convex(std::span<const Point> subject, std::span<const Point> convex_ccw) {
  Polygon out(subject.begin(), subject.end());
  const std::size_t n = convex_ccw.size();
  for (std::size_t i = 0; i < n && !out.empty(); ++i) {
    const Point a = convex_ccw[i];
    const Point b = convex_ccw[(i + 1) % n];
    const Point edge = b - a;
    if (edge.x == 0.0 && edge.y == 0.0) continue;
    // Interior is to the left of a->b, i.e. dot(-perp(edge), p - a) <= 0.
    const Point normal{edge.y, -edge.x};
    out = clip_half_plane(out, normal, dot(normal, a));
  }
  return out;
}

inline double intersection_area_convex(std::span<const Point> subject,
                                       std::span<const Point> convex_ccw) {
  return area(clip_convex(subject, convex_ccw));
}

/// Even-odd point-in-polygon test.
inline bool contains(std::span<const Point> poly, Point p) noexcept {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xcross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xcross) inside = !inside;
    }
  }
  return inside;
}

inline double distance_to_segment(Point p, Point a, Point b) noexcept {
  const Point ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 == 0.0) return distance(p, a);
  const double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + s * ab);
}

inline double distance_to_boundary(std::span<const Point> poly, Point p) noexcept {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
  return best;
}

namespace detail {

inline int orientation_sign(Point a, Point b, Point c) noexcept {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool on_segment(Point a, Point b, Point p) noexcept {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace detail

/// Closed-segment intersection test.
inline bool segments_intersect(Point a, Point b, Point c, Point d) noexcept {
  const int o1 = detail::orientation_sign(a, b, c);
  const int o2 = detail::orientation_sign(a, b, d);
  const int o3 = detail::orientation_sign(c, d, a);
  const int o4 = detail::orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && detail::on_segment(a, b, c)) return true;
  if (o2 == 0 && detail::on_segment(a, b, d)) return true;
  if (o3 == 0 && detail::on_segment(c, d, a)) return true;
  if (o4 == 0 && detail::on_segment(c, d, b)) return true;
  return false;
}

/// True when the closed polygon has >= 3 vertices, no zero-length edges and
/// no two non-adjacent edges meet.
inline bool is_simple(std::span<const Point> poly) noexcept {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (poly[i] == poly[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i], b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return signed_area(poly) != 0.0;
}

/// Separating-axis test between two convex point sets given in boundary
/// order (either orientation). Touching counts as intersecting. A two-point
/// set is treated as a segment.
inline bool convex_intersect(std::span<const Point> p, std::span<const Point> q) noexcept {
  auto separated_along_edges = [](std::span<const Point> a, std::span<const Point> b) {
    const std::size_t n = a.size();
    const std::size_t edges = n == 2 ? 1 : n;
    for (std::size_t i = 0; i < edges; ++i) {
      const Point e = a[(i + 1) % n] - a[i];
      if (e.x == 0.0 && e.y == 0.0) continue;
      const Point axis = perp(e);
      double amin = std::numeric_limits<double>::infinity(), amax = -amin;
      double bmin = amin, bmax = -amin;
      for (const Point& v : a) {
        const double s = dot(axis, v);
        amin = std::min(amin, s);
        amax = std::max(amax, s);
      }
      for (const Point& v : b) {
        const double s = dot(axis, v);
        bmin = std::min(bmin, s);
        bmax = std::max(bmax, s);
      }
      if (amax < bmin || bmax < amin) return true;
    }
    return false;
  };
  if (p.empty() || q.empty()) return false;
  if (separated_along_edges(p, q) || separated_along_edges(q, p)) return false;
  // Segment vs segment also needs the direction axes.
  if (p.size() == 2 && q.size() == 2) return segments_intersect(p[0], p[1], q[0], q[1]);
  return true;
}

/// A finite union of simple polygons with pairwise disjoint interiors, each
/// stored counter-clockwise.
class PolygonSet {
 public:
  PolygonSet() = default;

  explicit PolygonSet(std::vector<Polygon> polygons) : polygons_(std::move(polygons)) {
    for (Polygon& poly : polygons_) {
      if (!is_simple(poly)) throw Error(ErrorKind::invalid_polygon, "polygon is not simple");
      if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
    }
  }

  [[nodiscard]] const std::vector<Polygon>& polygons() const noexcept { return polygons_; }
  [[nodiscard]] bool empty() const noexcept { return polygons_.empty(); }

  [[nodiscard]] double total_perimeter() const noexcept {
    double sum = 0.0;
    for (const Polygon& poly : polygons_) sum += perimeter(poly);
    return sum;
  }

  [[nodiscard]] double total_area() const noexcept {
    double sum = 0.0;
    for (const Polygon& poly : polygons_) sum += area(poly);
    return sum;
  }

  [[nodiscard]] bool contains(Point p) const noexcept {
    for (const Polygon& poly : polygons_) {
      if (percovor::contains(poly, p)) return true;
    }
    return false;
  }

  [[nodiscard]] double distance_to_boundary(Point p) const noexcept {
    double best = std::numeric_limits<double>::infinity();
    for (const Polygon& poly : polygons_) best = std::min(best, percovor::distance_to_boundary(poly, p));
    return best;
  }

  /// Area of the union intersected with a convex counter-clockwise polygon.
  [[nodiscard]] double intersection_area(std::span<const Point> convex_ccw) const {
    double sum = 0.0;
    for (const Polygon& poly : polygons_) sum += intersection_area_convex(poly, convex_ccw);
    return sum;
  }

  [[nodiscard]] Rect bounds() const noexcept {
    Rect r = bounding_box({});
    for (const Polygon& poly : polygons_) {
      const Rect b = bounding_box(poly);
      r.min.x = std::min(r.min.x, b.min.x);
      r.min.y = std::min(r.min.y, b.min.y);
      r.max.x = std::max(r.max.x, b.max.x);
      r.max.y = std::max(r.max.y, b.max.y);
    }
    return r;
  }

  static PolygonSet square(Point center, double side) {
    const double h = side / 2.0;
    return PolygonSet({rect_polygon({{center.x - h, center.y - h}, {center.x + h, center.y + h}})});
  }

  /// Regular n-gon with the given perimeter.
  static PolygonSet regular_polygon(Point center, int sides, double total_perimeter) {
    const double edge = total_perimeter / sides;
    const double radius = edge / (2.0 * std::sin(std::numbers::pi / sides));
    Polygon poly;
    poly.reserve(static_cast<std::size_t>(sides));
    for (int k = 0; k < sides; ++k) {
      poly.push_back(center + radius * unit_vector(2.0 * std::numbers::pi * k / sides));
    }
    return PolygonSet({std::move(poly)});
  }

 private:
  std::vector<Polygon> polygons_;
};

}  // namespace percovor

#endif  // PERCOVOR_POLYGON_HPP
