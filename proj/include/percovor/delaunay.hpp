#ifndef PERCOVOR_DELAUNAY_HPP
#define PERCOVOR_DELAUNAY_HPP

// Incremental Bowyer-Watson Delaunay triangulation with ghost triangles for
// the convex hull. Points are inserted in Hilbert order and located by a
// visibility walk from the most recent triangle.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/point.hpp"
#include "percovor/predicates.hpp"

namespace percovor {

struct DelaunayTriangulation {
  /// Counter-clockwise site triples.
  std::vector<std::array<std::uint32_t, 3>> triangles;
  /// neighbors[t][k] is the triangle across the edge opposite corner k, or -1 on the hull.
  std::vector<std::array<std::int32_t, 3>> neighbors;
};

namespace detail {

inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) noexcept {
  const std::uint32_t n = 1u << order;
  std::uint64_t d = 0;
  for (std::uint32_t s = n / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) > 0 ? 1u : 0u;
    const std::uint32_t ry = (y & s) > 0 ? 1u : 0u;
    d += static_cast<std::uint64_t>(s) * s * ((3u * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

inline std::vector<std::uint32_t> hilbert_order(std::span<const Point> pts) {
  std::vector<std::uint32_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0u);
  if (pts.empty()) return order;
  double minx = pts[0].x, maxx = pts[0].x, miny = pts[0].y, maxy = pts[0].y;
  for (const Point& p : pts) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  constexpr int order_bits = 16;
  const double side = std::max(maxx - minx, maxy - miny);
  const double scale = side > 0.0 ? ((1u << order_bits) - 1) / side : 0.0;
  std::vector<std::uint64_t> keys(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto hx = static_cast<std::uint32_t>((pts[i].x - minx) * scale);
    const auto hy = static_cast<std::uint32_t>((pts[i].y - miny) * scale);
    keys[i] = hilbert_index(hx, hy, order_bits);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  return order;
}

class BowyerWatson {
 public:
  static constexpr std::int32_t ghost = -1;

  explicit BowyerWatson(std::span<const Point> pts) : pts_(pts) {}

  DelaunayTriangulation run() {
    if (pts_.size() < 3) throw Error(ErrorKind::insufficient_sites, "need at least 3 sites");
    std::vector<std::uint32_t> order = hilbert_order(pts_);
    // First non-collinear triple seeds the triangulation.
    std::size_t third = 2;
    while (third < order.size() && predicates::orient(pts_[order[0]], pts_[order[1]], pts_[order[third]]) == 0) ++third;
    if (third == order.size()) throw Error(ErrorKind::degenerate_configuration, "all sites are collinear");
    std::rotate(order.begin() + 2, order.begin() + static_cast<std::ptrdiff_t>(third),
                order.begin() + static_cast<std::ptrdiff_t>(third) + 1);
    seed_triangle(order[0], order[1], order[2]);
    for (std::size_t i = 3; i < order.size(); ++i) insert(order[i]);
    return extract();
  }

 private:
  struct Tri {
    std::array<std::int32_t, 3> v;
    std::array<std::int32_t, 3> n;
    bool alive;
  };

  [[nodiscard]] bool is_ghost(const Tri& t) const noexcept {
    return t.v[0] == ghost || t.v[1] == ghost || t.v[2] == ghost;
  }

  [[nodiscard]] Point at(std::int32_t i) const noexcept { return pts_[static_cast<std::size_t>(i)]; }

  void seed_triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    auto ia = static_cast<std::int32_t>(a), ib = static_cast<std::int32_t>(b), ic = static_cast<std::int32_t>(c);
    if (predicates::orient(at(ia), at(ib), at(ic)) < 0) std::swap(ib, ic);
    tris_.push_back({{ia, ib, ic}, {-1, -1, -1}, true});
    // Ghost across each directed edge (u, w) of the real triangle is (w, u, ghost).
    tris_.push_back({{ic, ib, ghost}, {-1, -1, -1}, true});
    tris_.push_back({{ia, ic, ghost}, {-1, -1, -1}, true});
    tris_.push_back({{ib, ia, ghost}, {-1, -1, -1}, true});
    link_all();
    last_ = 0;
  }

  void link_all() {
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      for (int k = 0; k < 3; ++k) {
        const std::int32_t u = tris_[t].v[(k + 1) % 3], w = tris_[t].v[(k + 2) % 3];
        for (std::size_t s = 0; s < tris_.size(); ++s) {
          if (s == t) continue;
          for (int j = 0; j < 3; ++j) {
            if (tris_[s].v[(j + 1) % 3] == w && tris_[s].v[(j + 2) % 3] == u) {
              tris_[t].n[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(s);
            }
          }
        }
      }
    }
  }

  [[nodiscard]] bool conflicts(const Tri& t, std::int32_t p) const {
    const Point q = at(p);
    for (int k = 0; k < 3; ++k) {
      if (t.v[static_cast<std::size_t>(k)] != ghost) continue;
      const std::int32_t a = t.v[(k + 1) % 3], b = t.v[(k + 2) % 3];
      const int o = predicates::orient(at(a), at(b), q);
      if (o > 0) return true;
      if (o < 0) return false;
      // Collinear with a hull edge: conflict only strictly inside the segment.
      const Point pa = at(a), pb = at(b);
      return dot(q - pa, pb - pa) > 0.0 && dot(q - pb, pa - pb) > 0.0;
    }
    return predicates::incircle_perturbed(at(t.v[0]), at(t.v[1]), at(t.v[2]), q, static_cast<std::uint32_t>(t.v[0]),
                                          static_cast<std::uint32_t>(t.v[1]), static_cast<std::uint32_t>(t.v[2]),
                                          static_cast<std::uint32_t>(p)) > 0;
  }

  std::int32_t locate(std::int32_t p) const {
    const Point q = at(p);
    std::int32_t t = last_;
    if (is_ghost(tris_[static_cast<std::size_t>(t)])) {
      const Tri& g = tris_[static_cast<std::size_t>(t)];
      for (int k = 0; k < 3; ++k) {
        if (g.v[static_cast<std::size_t>(k)] == ghost) t = g.n[static_cast<std::size_t>(k)];
      }
    }
    unsigned rotation = 0;
    for (;;) {
      const Tri& tri = tris_[static_cast<std::size_t>(t)];
      if (is_ghost(tri)) return t;
      bool moved = false;
      for (unsigned j = 0; j < 3; ++j) {
        const unsigned k = (j + rotation) % 3;
        const std::int32_t a = tri.v[(k + 1) % 3], b = tri.v[(k + 2) % 3];
        if (predicates::orient(at(a), at(b), q) < 0) {
          t = tri.n[k];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      rotation = (rotation + 1) % 3;
    }
  }

  std::int32_t new_tri(const Tri& tri) {
    if (!free_.empty()) {
      const std::int32_t id = free_.back();
      free_.pop_back();
      tris_[static_cast<std::size_t>(id)] = tri;
      return id;
    }
    tris_.push_back(tri);
    return static_cast<std::int32_t>(tris_.size() - 1);
  }

  void insert(std::uint32_t point) {
    const auto p = static_cast<std::int32_t>(point);
    const std::int32_t start = locate(p);
    cavity_.clear();
    stack_.clear();
    boundary_.clear();
    stack_.push_back(start);
    tris_[static_cast<std::size_t>(start)].alive = false;
    cavity_.push_back(start);
    while (!stack_.empty()) {
      const std::int32_t t = stack_.back();
      stack_.pop_back();
      for (std::size_t k = 0; k < 3; ++k) {
        const std::int32_t nb = tris_[static_cast<std::size_t>(t)].n[k];
        Tri& other = tris_[static_cast<std::size_t>(nb)];
        if (!other.alive) continue;
        if (conflicts(other, p)) {
          other.alive = false;
          cavity_.push_back(nb);
          stack_.push_back(nb);
        }
      }
    }
    for (const std::int32_t t : cavity_) {
      const Tri& tri = tris_[static_cast<std::size_t>(t)];
      for (std::size_t k = 0; k < 3; ++k) {
        const std::int32_t nb = tri.n[k];
        if (tris_[static_cast<std::size_t>(nb)].alive) {
          boundary_.push_back({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb});
        }
      }
    }
    for (const std::int32_t t : cavity_) free_.push_back(t);

    created_.clear();
    for (const Boundary& e : boundary_) {
      const std::int32_t id = new_tri({{e.u, e.w, p}, {-1, -1, e.outside}, true});
      Tri& out = tris_[static_cast<std::size_t>(e.outside)];
      for (std::size_t j = 0; j < 3; ++j) {
        if (out.v[(j + 1) % 3] == e.w && out.v[(j + 2) % 3] == e.u) out.n[j] = id;
      }
      created_.push_back(id);
    }
    // Link new triangles around p: (u, w, p) borders (w, x, p) across (w, p)
    // and (y, u, p) across (p, u).
    for (const std::int32_t id : created_) {
      Tri& tri = tris_[static_cast<std::size_t>(id)];
      for (const std::int32_t other : created_) {
        if (other == id) continue;
        const Tri& o = tris_[static_cast<std::size_t>(other)];
        if (o.v[0] == tri.v[1]) tri.n[0] = other;
        if (o.v[1] == tri.v[0]) tri.n[1] = other;
      }
    }
    last_ = created_.front();
    for (const std::int32_t id : created_) {
      if (!is_ghost(tris_[static_cast<std::size_t>(id)])) {
        last_ = id;
        break;
      }
    }
  }

  DelaunayTriangulation extract() const {
    DelaunayTriangulation out;
    std::vector<std::int32_t> remap(tris_.size(), -1);
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (tris_[t].alive && !is_ghost(tris_[t])) {
        remap[t] = static_cast<std::int32_t>(out.triangles.size());
        out.triangles.push_back({static_cast<std::uint32_t>(tris_[t].v[0]), static_cast<std::uint32_t>(tris_[t].v[1]),
                                 static_cast<std::uint32_t>(tris_[t].v[2])});
      }
    }
    out.neighbors.resize(out.triangles.size());
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (remap[t] < 0) continue;
      for (std::size_t k = 0; k < 3; ++k) {
        out.neighbors[static_cast<std::size_t>(remap[t])][k] = remap[static_cast<std::size_t>(tris_[t].n[k])];
      }
    }
    return out;
  }

  struct Boundary {
    std::int32_t u;
    std::int32_t w;
    std::int32_t outside;
  };

  std::span<const Point> pts_;
  std::vector<Tri> tris_;
  std::vector<std::int32_t> free_;
  std::vector<std::int32_t> cavity_;
  std::vector<std::int32_t> stack_;
  std::vector<Boundary> boundary_;
  std::vector<std::int32_t> created_;
  std::int32_t last_ = 0;
};

}  // namespace detail

/// Delaunay triangulation of distinct points. Throws insufficient-sites for
/// fewer than three points and degenerate-configuration when all are collinear.
inline DelaunayTriangulation delaunay_triangulation(std::span<const Point> pts) {
  return detail::BowyerWatson(pts).run();
}

}  // namespace percovor

#endif  // PERCOVOR_DELAUNAY_HPP
