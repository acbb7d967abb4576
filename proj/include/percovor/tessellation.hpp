#ifndef PERCOVOR_TESSELLATION_HPP
#define PERCOVOR_TESSELLATION_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "percovor/delaunay.hpp"
#include "percovor/error.hpp"
#include "percovor/point.hpp"
#include "percovor/polygon.hpp"
#include "percovor/sampling.hpp"

namespace percovor {

using SiteId = std::uint32_t;
using VertexId = std::int32_t;
using EdgeId = std::uint32_t;

inline constexpr VertexId no_vertex = -1;

/// A Voronoi vertex is the circumcenter of one Delaunay triangle.
struct VoronoiVertex {
  Point position;
  double circumradius = 0.0;
  std::array<SiteId, 3> sites{};
  bool certified = false;
};

struct DelaunayEdge {
  SiteId a = 0;  // a < b
  SiteId b = 0;
};

/// Dual of the Delaunay edge with the same index. `vertices[1]` is
/// `no_vertex` for a ray, whose outward direction is `ray`.
struct VoronoiEdge {
  std::array<VertexId, 2> vertices{no_vertex, no_vertex};
  std::array<SiteId, 2> sites{};
  Point ray{};

  [[nodiscard]] bool bounded() const noexcept { return vertices[0] != no_vertex && vertices[1] != no_vertex; }
};

struct Cell {
  /// Voronoi vertices of the cell in counter-clockwise order. For unbounded
  /// cells the ring is the open chain between the two rays.
  std::vector<VertexId> ring;
  /// Cell polygon, clipped to the sampled region when necessary.
  Polygon polygon;
  bool unbounded = false;
  bool clipped = false;
  /// Bounded, and every vertex certified: the cell is exact for the whole-plane process.
  bool certified = false;
};

struct Tessellation {
  PointSet points;
  std::vector<std::array<SiteId, 3>> triangles;
  std::vector<DelaunayEdge> delaunay_edges;
  std::vector<VoronoiVertex> voronoi_vertices;
  std::vector<VoronoiEdge> voronoi_edges;
  /// For Voronoi vertex v, the neighbouring vertex and the shared edge
  /// opposite triangle corner k (no_vertex across a ray).
  std::vector<std::array<VertexId, 3>> vertex_neighbors;
  std::vector<std::array<EdgeId, 3>> vertex_edges;
  std::vector<Cell> cells;
  /// Site adjacency in compressed rows: neighbours of s are
  /// adjacency[adjacency_offsets[s] .. adjacency_offsets[s + 1]).
  std::vector<std::uint32_t> adjacency_offsets;
  std::vector<std::pair<SiteId, EdgeId>> adjacency;

  [[nodiscard]] std::size_t site_count() const noexcept { return points.sites.size(); }
  [[nodiscard]] Point site(SiteId s) const noexcept { return points.sites[s]; }
  [[nodiscard]] Rect sampled_region() const noexcept { return points.window.sampled(); }
  [[nodiscard]] Rect core() const noexcept { return points.window.core(); }

  [[nodiscard]] std::span<const std::pair<SiteId, EdgeId>> neighbors(SiteId s) const noexcept {
    return {adjacency.data() + adjacency_offsets[s], adjacency.data() + adjacency_offsets[s + 1]};
  }

  [[nodiscard]] bool edge_certified(EdgeId e) const noexcept {
    const VoronoiEdge& ve = voronoi_edges[e];
    return ve.bounded() && voronoi_vertices[static_cast<std::size_t>(ve.vertices[0])].certified &&
           voronoi_vertices[static_cast<std::size_t>(ve.vertices[1])].certified;
  }

  [[nodiscard]] Point vertex_position(VertexId v) const noexcept {
    return voronoi_vertices[static_cast<std::size_t>(v)].position;
  }
};

namespace detail {

inline Point circumcenter(Point a, Point b, Point c) noexcept {
  const Point ba = b - a, ca = c - a;
  const double bl = squared_norm(ba), cl = squared_norm(ca);
  const double d = 2.0 * cross(ba, ca);
  return {a.x + (ca.y * bl - ba.y * cl) / d, a.y + (ba.x * cl - ca.x * bl) / d};
}

inline void build_adjacency(Tessellation& tess) {
  const std::size_t n = tess.site_count();
  tess.adjacency_offsets.assign(n + 1, 0);
  for (const DelaunayEdge& e : tess.delaunay_edges) {
    ++tess.adjacency_offsets[e.a + 1];
    ++tess.adjacency_offsets[e.b + 1];
  }
  for (std::size_t s = 0; s < n; ++s) tess.adjacency_offsets[s + 1] += tess.adjacency_offsets[s];
  tess.adjacency.assign(tess.adjacency_offsets.back(), {0, 0});
  std::vector<std::uint32_t> fill(tess.adjacency_offsets.begin(), tess.adjacency_offsets.end() - 1);
  for (EdgeId e = 0; e < tess.delaunay_edges.size(); ++e) {
    const DelaunayEdge& de = tess.delaunay_edges[e];
    tess.adjacency[fill[de.a]++] = {de.b, e};
    tess.adjacency[fill[de.b]++] = {de.a, e};
  }
}

inline void build_cells(Tessellation& tess, const DelaunayTriangulation& dt) {
  const std::size_t n = tess.site_count();
  const Rect region = tess.sampled_region();
  // One incident (triangle, corner) per site.
  std::vector<std::int32_t> incident(n, -1);
  std::vector<std::uint8_t> corner(n, 0);
  for (std::size_t t = 0; t < dt.triangles.size(); ++t) {
    for (std::uint8_t k = 0; k < 3; ++k) {
      const SiteId s = dt.triangles[t][k];
      if (incident[s] < 0) {
        incident[s] = static_cast<std::int32_t>(t);
        corner[s] = k;
      }
    }
  }
  auto corner_of = [&](std::int32_t t, SiteId s) {
    const auto& tri = dt.triangles[static_cast<std::size_t>(t)];
    return static_cast<std::size_t>(tri[0] == s ? 0 : (tri[1] == s ? 1 : 2));
  };
  tess.cells.assign(n, Cell{});
  for (SiteId s = 0; s < n; ++s) {
    Cell& cell = tess.cells[s];
    if (incident[s] < 0) {
      cell.unbounded = true;
      continue;
    }
    // Rotate clockwise to the first triangle of the fan (or all the way round).
    std::int32_t start = incident[s];
    for (std::int32_t t = start;;) {
      const std::int32_t prev = dt.neighbors[static_cast<std::size_t>(t)][(corner_of(t, s) + 2) % 3];
      if (prev < 0) {
        start = t;
        cell.unbounded = true;
        break;
      }
      if (prev == start) break;
      t = prev;
    }
    for (std::int32_t t = start;;) {
      cell.ring.push_back(t);
      const std::int32_t next = dt.neighbors[static_cast<std::size_t>(t)][(corner_of(t, s) + 1) % 3];
      if (next < 0 || next == start) break;
      t = next;
    }
    if (!cell.unbounded) {
      cell.polygon.reserve(cell.ring.size());
      bool inside = true;
      bool certified = true;
      for (const VertexId v : cell.ring) {
        const VoronoiVertex& vv = tess.voronoi_vertices[static_cast<std::size_t>(v)];
        cell.polygon.push_back(vv.position);
        inside = inside && region.contains(vv.position);
        certified = certified && vv.certified;
      }
      cell.certified = certified;
      if (!inside) {
        cell.polygon = clip_rect(cell.polygon, region);
        cell.clipped = true;
      }
    } else {
      // Intersect the sampled region with the bisector half-planes of all neighbours.
      Polygon poly = rect_polygon(region);
      const Point p = tess.site(s);
      for (const auto& [other, edge] : tess.neighbors(s)) {
        const Point q = tess.site(other);
        const Point normal = q - p;
        poly = clip_half_plane(poly, normal, dot(normal, 0.5 * (p + q)));
      }
      cell.polygon = std::move(poly);
      cell.clipped = true;
    }
  }
}

}  // namespace detail

/// Delaunay triangulation of the sites with its dual Voronoi structure. A
/// Voronoi vertex is certified when its circumdisk lies in the sampled
/// region, which makes it a vertex of the whole-plane tessellation.
inline Tessellation build_tessellation(PointSet points) {
  if (points.sites.size() < 3) throw Error(ErrorKind::insufficient_sites, "need at least 3 sites");
  const DelaunayTriangulation dt = delaunay_triangulation(points.sites);

  Tessellation tess;
  tess.points = std::move(points);
  tess.triangles = dt.triangles;
  const Rect region = tess.sampled_region();

  tess.voronoi_vertices.resize(dt.triangles.size());
  for (std::size_t t = 0; t < dt.triangles.size(); ++t) {
    const auto& tri = dt.triangles[t];
    VoronoiVertex& v = tess.voronoi_vertices[t];
    const Point a = tess.site(tri[0]), b = tess.site(tri[1]), c = tess.site(tri[2]);
    v.position = detail::circumcenter(a, b, c);
    v.circumradius = distance(v.position, a);
    v.sites = tri;
    v.certified = v.position.x - v.circumradius >= region.min.x && v.position.x + v.circumradius <= region.max.x &&
                  v.position.y - v.circumradius >= region.min.y && v.position.y + v.circumradius <= region.max.y;
  }

  tess.vertex_neighbors.resize(dt.triangles.size());
  tess.vertex_edges.resize(dt.triangles.size());
  for (std::size_t t = 0; t < dt.triangles.size(); ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      const std::int32_t nb = dt.neighbors[t][k];
      tess.vertex_neighbors[t][k] = nb;
      if (nb >= 0 && static_cast<std::size_t>(nb) < t) continue;  // recorded from the other side
      const SiteId u = dt.triangles[t][(k + 1) % 3], w = dt.triangles[t][(k + 2) % 3];
      const auto e = static_cast<EdgeId>(tess.delaunay_edges.size());
      tess.delaunay_edges.push_back({std::min(u, w), std::max(u, w)});
      VoronoiEdge ve;
      ve.vertices = {static_cast<VertexId>(t), nb};
      ve.sites = {u, w};
      if (nb < 0) {
        const Point d = tess.site(w) - tess.site(u);
        ve.ray = Point{d.y, -d.x} * (1.0 / norm(d));
      }
      tess.voronoi_edges.push_back(ve);
      tess.vertex_edges[t][k] = e;
      if (nb >= 0) {
        const auto& other = dt.triangles[static_cast<std::size_t>(nb)];
        for (std::size_t j = 0; j < 3; ++j) {
          if (other[(j + 1) % 3] == w && other[(j + 2) % 3] == u) tess.vertex_edges[static_cast<std::size_t>(nb)][j] = e;
        }
      }
    }
  }
  detail::build_adjacency(tess);
  detail::build_cells(tess, dt);
  return tess;
}

}  // namespace percovor

#endif  // PERCOVOR_TESSELLATION_HPP
