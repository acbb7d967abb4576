#ifndef PERCOVOR_POINT_HPP
#define PERCOVOR_POINT_HPP

#include <cmath>

namespace percovor {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
};

constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
constexpr Point operator*(double s, Point p) noexcept { return {s * p.x, s * p.y}; }
constexpr Point operator*(Point p, double s) noexcept { return {s * p.x, s * p.y}; }

constexpr double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) noexcept { return a.x * b.y - a.y * b.x; }
constexpr double squared_norm(Point p) noexcept { return dot(p, p); }
inline double norm(Point p) noexcept { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) noexcept { return norm(a - b); }
constexpr double squared_distance(Point a, Point b) noexcept { return squared_norm(a - b); }

/// Counter-clockwise rotation by 90 degrees.
constexpr Point perp(Point p) noexcept { return {-p.y, p.x}; }

inline Point unit_vector(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }

/// Axis-aligned closed rectangle.
struct Rect {
  Point min;
  Point max;

  [[nodiscard]] constexpr double width() const noexcept { return max.x - min.x; }
  [[nodiscard]] constexpr double height() const noexcept { return max.y - min.y; }
  [[nodiscard]] constexpr double area() const noexcept { return width() * height(); }
  [[nodiscard]] constexpr bool contains(Point p) const noexcept {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  [[nodiscard]] constexpr bool contains(const Rect& r) const noexcept {
    return r.min.x >= min.x && r.max.x <= max.x && r.min.y >= min.y && r.max.y <= max.y;
  }
  [[nodiscard]] constexpr Rect scaled(double s) const noexcept { return {s * min, s * max}; }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

}  // namespace percovor

#endif  // PERCOVOR_POINT_HPP
