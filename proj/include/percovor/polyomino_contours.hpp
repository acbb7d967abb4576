#ifndef PERCOVOR_POLYOMINO_CONTOURS_HPP
#define PERCOVOR_POLYOMINO_CONTOURS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/polygon.hpp"
#include "percovor/sampling.hpp"
#include "percovor/spin_energy.hpp"
#include "percovor/tessellation.hpp"

namespace percovor {

/// A finite union of Voronoi cells.
struct CellUnion {
  std::vector<SiteId> sites;
  bool connected = false;
};

inline bool is_connected(const Tessellation& tess, const std::vector<SiteId>& sites) {
  if (sites.empty()) return false;
  std::vector<std::int8_t> state(tess.site_count(), 0);  // 1 member, 2 reached
  for (const SiteId s : sites) state[s] = 1;
  std::vector<SiteId> stack{sites[0]};
  state[sites[0]] = 2;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const SiteId v = stack.back();
    stack.pop_back();
    for (const auto& [w, e] : tess.neighbors(v)) {
      if (state[w] == 1) {
        state[w] = 2;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  std::vector<SiteId> unique = sites;
  std::sort(unique.begin(), unique.end());
  return reached == static_cast<std::size_t>(std::unique(unique.begin(), unique.end()) - unique.begin());
}

inline CellUnion make_cell_union(const Tessellation& tess, std::vector<SiteId> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  CellUnion u;
  u.connected = is_connected(tess, sites);
  u.sites = std::move(sites);
  return u;
}

struct LatticeFootprint {
  std::vector<std::pair<std::int64_t, std::int64_t>> squares;  // sorted
  std::size_t count = 0;
};

/// A(P) = {z : unit (z + Q) meets P}, Q = [-1/2, 1/2]^2, by exact
/// separating-axis tests of each convex cell against each candidate square.
inline LatticeFootprint lattice_footprint(const Tessellation& tess, const CellUnion& cells, double unit = 1.0) {
  if (!(unit > 0.0)) throw Error(ErrorKind::invalid_argument, "lattice unit must be positive");
  if (!cells.connected) throw Error(ErrorKind::invalid_union, "cell union is not connected");
  LatticeFootprint fp;
  for (const SiteId s : cells.sites) {
    const Polygon& poly = tess.cells[s].polygon;
    if (poly.size() < 3) throw Error(ErrorKind::unbounded_cell, "cell without polygon in union");
    const Rect box = bounding_box(poly);
    const auto x0 = static_cast<std::int64_t>(std::ceil(box.min.x / unit - 0.5));
    const auto x1 = static_cast<std::int64_t>(std::floor(box.max.x / unit + 0.5));
    const auto y0 = static_cast<std::int64_t>(std::ceil(box.min.y / unit - 0.5));
    const auto y1 = static_cast<std::int64_t>(std::floor(box.max.y / unit + 0.5));
    for (std::int64_t zy = y0; zy <= y1; ++zy) {
      for (std::int64_t zx = x0; zx <= x1; ++zx) {
        const Point c{unit * static_cast<double>(zx), unit * static_cast<double>(zy)};
        const double h = 0.5 * unit;
        const Polygon sq = rect_polygon({{c.x - h, c.y - h}, {c.x + h, c.y + h}});
        if (convex_intersect(poly, sq)) fp.squares.emplace_back(zx, zy);
      }
    }
  }
  std::sort(fp.squares.begin(), fp.squares.end());
  fp.squares.erase(std::unique(fp.squares.begin(), fp.squares.end()), fp.squares.end());
  fp.count = fp.squares.size();
  return fp;
}

enum class GrowthRule { eden, eastward };

/// Grows a connected union of certified cells from `start`: Eden growth adds
/// a uniformly random frontier cell; eastward growth always adds the
/// frontier cell whose site lies furthest east.
inline CellUnion grow_union(const Tessellation& tess, SiteId start, std::size_t size, GrowthRule rule, std::mt19937_64& rng) {
  if (!tess.cells[start].certified) throw Error(ErrorKind::invalid_argument, "growth must start in a certified cell");
  std::vector<std::int8_t> state(tess.site_count(), 0);  // 1 in union, 2 on frontier
  std::vector<SiteId> members{start}, frontier;
  auto by_east = [&](SiteId a, SiteId b) {
    const double xa = tess.site(a).x, xb = tess.site(b).x;
    return xa < xb || (xa == xb && a > b);
  };
  std::priority_queue<SiteId, std::vector<SiteId>, decltype(by_east)> east(by_east);
  state[start] = 1;
  auto expand = [&](SiteId s) {
    for (const auto& [w, e] : tess.neighbors(s)) {
      if (state[w] != 0 || !tess.cells[w].certified) continue;
      state[w] = 2;
      if (rule == GrowthRule::eden) {
        frontier.push_back(w);
      } else {
        east.push(w);
      }
    }
  };
  expand(start);
  while (members.size() < size) {
    SiteId next = 0;
    if (rule == GrowthRule::eden) {
      if (frontier.empty()) throw Error(ErrorKind::window_too_small, "ran out of certified cells while growing");
      const std::size_t k = std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng);
      next = frontier[k];
      frontier[k] = frontier.back();
      frontier.pop_back();
    } else {
      if (east.empty()) throw Error(ErrorKind::window_too_small, "ran out of certified cells while growing");
      next = east.top();
      east.pop();
    }
    state[next] = 1;
    members.push_back(next);
    expand(next);
  }
  return make_cell_union(tess, std::move(members));
}

struct PolyominoSample {
  std::size_t target_size = 0;
  std::size_t sample = 0;
  std::size_t cells = 0;
  std::size_t footprint = 0;
  double footprint_per_cell = 0.0;
  double cells_per_footprint = 0.0;
  [[nodiscard]] double ratio() const noexcept { return std::max(footprint_per_cell, cells_per_footprint); }
};

struct PolyominoStats {
  std::vector<PolyominoSample> samples;
  std::map<std::size_t, double> max_ratio;  // size -> C-hat(size)
};

inline SiteId nearest_certified_site(const Tessellation& tess, Point x) {
  SiteId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    const double d = squared_distance(tess.site(s), x);
    if (tess.cells[s].certified && d < best_d) {
      best_d = d;
      best = s;
    }
  }
  if (!std::isfinite(best_d)) throw Error(ErrorKind::empty_target, "no certified cell");
  return best;
}

/// Pairs (#cells, #A(P)) for random connected unions of each size.
inline PolyominoStats polyomino_ratio_stats(const Tessellation& tess, const std::vector<std::size_t>& sizes,
                                            std::size_t samples_per_size, std::uint64_t seed,
                                            GrowthRule rule = GrowthRule::eden, double unit = 1.0) {
  PolyominoStats out;
  const Rect core = tess.core();
  for (const std::size_t size : sizes) {
    if (size < 10) throw Error(ErrorKind::invalid_argument, "union sizes must be at least 10");
    for (std::size_t k = 0; k < samples_per_size; ++k) {
      std::mt19937_64 rng(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(size)), static_cast<std::uint64_t>(k)));
      const Point jitter{(uniform01(rng) - 0.5) * 0.2 * core.width(), (uniform01(rng) - 0.5) * 0.2 * core.height()};
      const Point start_at = 0.5 * (core.min + core.max) + jitter;
      const CellUnion u = grow_union(tess, nearest_certified_site(tess, start_at), size, rule, rng);
      const LatticeFootprint fp = lattice_footprint(tess, u, unit);
      PolyominoSample s;
      s.target_size = size;
      s.sample = k;
      s.cells = u.sites.size();
      s.footprint = fp.count;
      s.footprint_per_cell = static_cast<double>(fp.count) / static_cast<double>(s.cells);
      s.cells_per_footprint = static_cast<double>(s.cells) / static_cast<double>(fp.count);
      out.samples.push_back(s);
      double& m = out.max_ratio[size];
      m = std::max(m, s.ratio());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contour decomposition

struct Contour {
  std::vector<EdgeId> edges;
  /// Vertex cycle, counter-clockwise; empty for open chains.
  std::vector<VertexId> cycle;
  bool closed = false;
  std::size_t plus_cells = 0;  // #{i : u_i = 1, C_i meets S}
  bool plus_class = false;
  double enclosed_area = 0.0;  // unscaled
  bool plus_inside = false;    // +1 cells lie on the inner side
  bool maximal = false;        // maximal among minus contours
  int orientation_class = 0;   // 1 or 2 for maximal minus contours
  std::size_t interior_cells = 0;
};

struct Decomposition {
  double gamma = 0.0;
  double epsilon = 1.0;
  double threshold = 0.0;
  std::vector<Contour> contours;
  std::size_t n_plus = 0, n_minus = 0, n_open = 0, n_class1 = 0, n_class2 = 0;
  std::vector<SiteId> B_prime, B_dprime;
  std::vector<bool> in_A;  // per site
  double area_Bp = 0.0, area_Bpp = 0.0, area_A = 0.0;  // scaled
  double perimeter_A = 0.0;                            // scaled, bounded edges only
  std::size_t boundary_edges_A = 0;
  std::size_t unbounded_boundary_edges_A = 0;
  double energy = 0.0;
  /// Every boundary edge of A_eps belongs to a plus contour.
  bool boundary_in_plus = true;
  /// Diagnostic: unit lattice squares (scaled: eps z + eps Q) contained in A_eps.
  std::size_t lattice_squares_inside = 0;

  [[nodiscard]] std::size_t b_count() const noexcept { return B_prime.size() + B_dprime.size(); }
};

inline std::size_t count_lattice_squares_inside(const Tessellation& tess, const std::vector<bool>& in_A) {
  std::map<std::pair<std::int64_t, std::int64_t>, double> covered;
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    if (!in_A[s]) continue;
    const Polygon& poly = tess.cells[s].polygon;
    const Rect box = bounding_box(poly);
    for (auto zy = static_cast<std::int64_t>(std::ceil(box.min.y - 0.5)); zy <= static_cast<std::int64_t>(std::floor(box.max.y + 0.5)); ++zy) {
      for (auto zx = static_cast<std::int64_t>(std::ceil(box.min.x - 0.5)); zx <= static_cast<std::int64_t>(std::floor(box.max.x + 0.5)); ++zx) {
        const Rect sq{{static_cast<double>(zx) - 0.5, static_cast<double>(zy) - 0.5},
                      {static_cast<double>(zx) + 0.5, static_cast<double>(zy) + 0.5}};
        const double a = area(clip_rect(poly, sq));
        if (a > 0.0) covered[{zx, zy}] += a;
      }
    }
  }
  return static_cast<std::size_t>(std::count_if(covered.begin(), covered.end(), [](const auto& kv) { return kv.second >= 1.0 - 1e-9; }));
}

/// Splits the interface of u into connected contours, classifies them by the
/// count of +1 cells they touch against eps^-gamma, and removes the small
/// islands enclosed by maximal minus contours.
inline Decomposition contour_decompose(const Tessellation& tess, const SpinConfig& u, double gamma) {
  validate(u, tess);
  if (!(gamma > 0.0 && gamma < 0.5)) throw Error(ErrorKind::invalid_argument, "gamma must lie in (0, 1/2)");
  Decomposition d;
  d.gamma = gamma;
  d.epsilon = u.epsilon;
  d.threshold = std::pow(u.epsilon, -gamma);
  const std::size_t n_edges = tess.voronoi_edges.size();
  auto discordant = [&](EdgeId e) { return u.values[tess.delaunay_edges[e].a] != u.values[tess.delaunay_edges[e].b]; };

  // Boundary edges incident to each vertex (0 or 2 by the degree-3 structure).
  std::vector<std::array<std::int64_t, 3>> at_vertex(tess.voronoi_vertices.size(), {-1, -1, -1});
  for (EdgeId e = 0; e < n_edges; ++e) {
    if (!discordant(e)) continue;
    for (const VertexId v : tess.voronoi_edges[e].vertices) {
      if (v == no_vertex) continue;
      for (auto& slot : at_vertex[static_cast<std::size_t>(v)]) {
        if (slot < 0) {
          slot = e;
          break;
        }
      }
    }
  }
  std::vector<std::int32_t> contour_of(n_edges, -1);
  for (EdgeId e0 = 0; e0 < n_edges; ++e0) {
    if (!discordant(e0) || contour_of[e0] >= 0) continue;
    const auto id = static_cast<std::int32_t>(d.contours.size());
    Contour c;
    std::vector<EdgeId> stack{e0};
    contour_of[e0] = id;
    bool open = false;
    while (!stack.empty()) {
      const EdgeId e = stack.back();
      stack.pop_back();
      c.edges.push_back(e);
      for (const VertexId v : tess.voronoi_edges[e].vertices) {
        if (v == no_vertex) {
          open = true;
          continue;
        }
        for (const std::int64_t f : at_vertex[static_cast<std::size_t>(v)]) {
          if (f >= 0 && contour_of[static_cast<std::size_t>(f)] < 0) {
            contour_of[static_cast<std::size_t>(f)] = id;
            stack.push_back(static_cast<EdgeId>(f));
          }
        }
      }
    }
    std::sort(c.edges.begin(), c.edges.end());
    c.closed = !open;

    std::vector<SiteId> touching;
    for (const EdgeId e : c.edges) {
      const VoronoiEdge& ve = tess.voronoi_edges[e];
      touching.insert(touching.end(), ve.sites.begin(), ve.sites.end());
      for (const VertexId v : ve.vertices) {
        if (v == no_vertex) continue;
        const auto& s = tess.voronoi_vertices[static_cast<std::size_t>(v)].sites;
        touching.insert(touching.end(), s.begin(), s.end());
      }
    }
    std::sort(touching.begin(), touching.end());
    touching.erase(std::unique(touching.begin(), touching.end()), touching.end());
    c.plus_cells = static_cast<std::size_t>(std::count_if(touching.begin(), touching.end(), [&](SiteId s) { return u.plus(s); }));
    c.plus_class = static_cast<double>(c.plus_cells) >= d.threshold;

    if (c.closed) {
      // Walk the cycle: each vertex has exactly two contour edges.
      const VoronoiEdge& first = tess.voronoi_edges[c.edges[0]];
      VertexId cur = first.vertices[1];
      EdgeId via = c.edges[0];
      c.cycle.push_back(first.vertices[0]);
      while (cur != c.cycle.front()) {
        c.cycle.push_back(cur);
        const auto& slots = at_vertex[static_cast<std::size_t>(cur)];
        const EdgeId next = static_cast<EdgeId>(slots[0]) == via ? static_cast<EdgeId>(slots[1]) : static_cast<EdgeId>(slots[0]);
        const VoronoiEdge& ne = tess.voronoi_edges[next];
        const VertexId after = ne.vertices[0] == cur ? ne.vertices[1] : ne.vertices[0];
        cur = after;
        via = next;
      }
      Polygon ring;
      for (const VertexId v : c.cycle) ring.push_back(tess.vertex_position(v));
      double sa = signed_area(ring);
      if (sa < 0.0) {
        std::reverse(c.cycle.begin(), c.cycle.end());
        sa = -sa;
      }
      c.enclosed_area = sa;
    }
    d.contours.push_back(std::move(c));
  }

  // Inner site of a closed contour: left of its first directed cycle edge.
  auto inner_site = [&](const Contour& c) -> SiteId {
    const VertexId a = c.cycle[0], b = c.cycle[1];
    EdgeId e = 0;
    for (const EdgeId f : c.edges) {
      const auto& vv = tess.voronoi_edges[f].vertices;
      if ((vv[0] == a && vv[1] == b) || (vv[0] == b && vv[1] == a)) {
        e = f;
        break;
      }
    }
    const VoronoiEdge& ve = tess.voronoi_edges[e];
    const Point pa = tess.vertex_position(a), pb = tess.vertex_position(b);
    return cross(pb - pa, tess.site(ve.sites[0]) - pa) > 0.0 ? ve.sites[0] : ve.sites[1];
  };

  std::vector<std::size_t> minus_order;
  for (std::size_t i = 0; i < d.contours.size(); ++i) {
    Contour& c = d.contours[i];
    if (!c.closed) {
      ++d.n_open;
      continue;
    }
    c.plus_inside = u.plus(inner_site(c));
    if (c.plus_class) {
      ++d.n_plus;
    } else {
      ++d.n_minus;
      minus_order.push_back(i);
    }
  }
  std::stable_sort(minus_order.begin(), minus_order.end(),
                   [&](std::size_t a, std::size_t b) { return d.contours[a].enclosed_area > d.contours[b].enclosed_area; });

  std::vector<bool> covered(tess.site_count(), false);
  std::vector<bool> in_Bp(tess.site_count(), false), in_Bpp(tess.site_count(), false);
  for (const std::size_t i : minus_order) {
    Contour& c = d.contours[i];
    const SiteId seed = inner_site(c);
    if (covered[seed]) continue;
    c.maximal = true;
    c.orientation_class = c.plus_inside ? 1 : 2;
    (c.plus_inside ? d.n_class1 : d.n_class2) += 1;
    std::vector<SiteId> stack{seed};
    covered[seed] = true;
    while (!stack.empty()) {
      const SiteId v = stack.back();
      stack.pop_back();
      ++c.interior_cells;
      if (c.plus_inside && u.plus(v)) in_Bp[v] = true;
      if (!c.plus_inside && !u.plus(v)) in_Bpp[v] = true;
      for (const auto& [w, e] : tess.neighbors(v)) {
        if (contour_of[e] == static_cast<std::int32_t>(i) || covered[w]) continue;
        covered[w] = true;
        stack.push_back(w);
      }
    }
  }

  const double eps2 = u.epsilon * u.epsilon;
  d.in_A.assign(tess.site_count(), false);
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    if (in_Bp[s]) {
      d.B_prime.push_back(s);
      d.area_Bp += eps2 * area(tess.cells[s].polygon);
    }
    if (in_Bpp[s]) {
      d.B_dprime.push_back(s);
      d.area_Bpp += eps2 * area(tess.cells[s].polygon);
    }
    d.in_A[s] = (u.plus(s) && !in_Bp[s]) || in_Bpp[s];
    if (d.in_A[s]) d.area_A += eps2 * area(tess.cells[s].polygon);
  }
  for (EdgeId e = 0; e < n_edges; ++e) {
    const DelaunayEdge& de = tess.delaunay_edges[e];
    if (d.in_A[de.a] == d.in_A[de.b]) continue;
    ++d.boundary_edges_A;
    const VoronoiEdge& ve = tess.voronoi_edges[e];
    if (ve.bounded()) {
      d.perimeter_A += u.epsilon * distance(tess.vertex_position(ve.vertices[0]), tess.vertex_position(ve.vertices[1]));
    } else {
      ++d.unbounded_boundary_edges_A;
    }
    const std::int32_t c = contour_of[e];
    if (c < 0 || !d.contours[static_cast<std::size_t>(c)].closed || !d.contours[static_cast<std::size_t>(c)].plus_class) {
      d.boundary_in_plus = false;
    }
  }
  d.energy = scaled_energy(tess, u).energy;
  d.lattice_squares_inside = count_lattice_squares_inside(tess, d.in_A);
  return d;
}

}  // namespace percovor

#endif  // PERCOVOR_POLYOMINO_CONTOURS_HPP
