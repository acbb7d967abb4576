#ifndef PERCOVOR_REGULAR_CELLS_HPP
#define PERCOVOR_REGULAR_CELLS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "percovor/cell_metrics.hpp"
#include "percovor/error.hpp"
#include "percovor/max_flow.hpp"
#include "percovor/polygon.hpp"
#include "percovor/sampling.hpp"
#include "percovor/tessellation.hpp"
#include "percovor/union_find.hpp"

namespace percovor {

/// Bit flags recording why a cell is not alpha-regular.
enum RegularityFailure : std::uint8_t {
  fails_inradius = 1,
  fails_diameter = 2,
  fails_edge_count = 4,
  fails_uncertified = 8,  // clipped, unbounded or touching an uncertified vertex
};

struct RegularityReport {
  double alpha = 0.0;
  std::vector<bool> regular;  // per site
  std::vector<SiteId> regular_sites;
  std::vector<CellMetrics> metrics;  // per site; meaningful for certified cells
  std::vector<std::pair<SiteId, std::uint8_t>> excluded;
  /// Among certified cells whose site lies in the core.
  double regular_fraction = 0.0;
};

inline std::uint8_t regularity_failures(const Cell& cell, const CellMetrics& m, double alpha) noexcept {
  if (!cell.certified || cell.clipped) return fails_uncertified;
  std::uint8_t f = 0;
  if (!(m.inradius >= alpha)) f |= fails_inradius;
  if (!(m.diameter <= 1.0 / alpha)) f |= fails_diameter;
  if (!(static_cast<double>(m.edge_count) <= 1.0 / alpha)) f |= fails_edge_count;
  return f;
}

inline std::vector<CellMetrics> certified_cell_metrics(const Tessellation& tess) {
  std::vector<CellMetrics> out(tess.site_count());
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    if (tess.cells[s].certified) {
      out[s] = cell_metrics(tess, s);
    } else {
      out[s].site = s;
      out[s].clipped = tess.cells[s].clipped;
    }
  }
  return out;
}

/// Classification with precomputed metrics, for sweeps over alpha.
inline RegularityReport classify_regular(const Tessellation& tess, double alpha, std::vector<CellMetrics> metrics) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::invalid_argument, "alpha must be positive");
  RegularityReport r;
  r.alpha = alpha;
  r.regular.assign(tess.site_count(), false);
  const Rect core = tess.core();
  std::size_t core_certified = 0, core_regular = 0;
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    const std::uint8_t f = regularity_failures(tess.cells[s], metrics[s], alpha);
    const bool in_core = core.contains(tess.site(s)) && tess.cells[s].certified;
    core_certified += in_core ? 1 : 0;
    if (f == 0) {
      r.regular[s] = true;
      r.regular_sites.push_back(s);
      core_regular += in_core ? 1 : 0;
    } else {
      r.excluded.emplace_back(s, f);
    }
  }
  r.regular_fraction = core_certified ? static_cast<double>(core_regular) / static_cast<double>(core_certified) : 0.0;
  r.metrics = std::move(metrics);
  return r;
}

inline RegularityReport classify_regular(const Tessellation& tess, double alpha) {
  return classify_regular(tess, alpha, certified_cell_metrics(tess));
}

struct AlphaCluster {
  double alpha = 0.0;
  std::vector<bool> member;  // per site, membership in the chosen component
  std::vector<SiteId> spanning_component;
  bool spanning = false;
  std::size_t component_count = 0;
  std::vector<VertexId> vertex_set;
  std::vector<EdgeId> edge_set;
  std::vector<std::size_t> hole_sizes;
  /// Bounding-box diagonal of each hole's cells.
  std::vector<double> hole_diameters;
};

/// Components of the regular sites under Delaunay adjacency; keeps the
/// largest component joining the left and right core edges, or the largest
/// one flagged non-spanning.
inline AlphaCluster alpha_cluster(const RegularityReport& report, const Tessellation& tess) {
  AlphaCluster c;
  c.alpha = report.alpha;
  const std::size_t n = tess.site_count();
  c.member.assign(n, false);
  UnionFind uf(n);
  for (const SiteId s : report.regular_sites) {
    for (const auto& [w, e] : tess.neighbors(s)) {
      if (report.regular[w]) uf.unite(s, w);
    }
  }
  const Rect core = tess.core();
  std::vector<std::uint32_t> size(n, 0);
  std::vector<bool> left(n, false), right(n, false);
  for (const SiteId s : report.regular_sites) {
    const std::uint32_t root = uf.find(s);
    c.component_count += size[root] == 0 ? 1 : 0;
    ++size[root];
    const Rect box = bounding_box(tess.cells[s].polygon);
    if (box.min.x <= core.min.x && box.max.x >= core.min.x) left[root] = true;
    if (box.min.x <= core.max.x && box.max.x >= core.max.x) right[root] = true;
  }
  std::int64_t chosen = -1;
  for (const SiteId s : report.regular_sites) {
    const std::uint32_t root = uf.find(s);
    const bool spans = left[root] && right[root];
    if (chosen < 0) {
      chosen = root;
      c.spanning = spans;
      continue;
    }
    const auto cur = static_cast<std::uint32_t>(chosen);
    if ((spans && !c.spanning) || (spans == c.spanning && size[root] > size[cur])) {
      chosen = root;
      c.spanning = spans;
    }
  }
  if (chosen < 0) return c;
  for (const SiteId s : report.regular_sites) {
    if (uf.find(s) == static_cast<std::uint32_t>(chosen)) {
      c.member[s] = true;
      c.spanning_component.push_back(s);
    }
  }
  std::vector<bool> vertex_seen(tess.voronoi_vertices.size(), false);
  for (EdgeId e = 0; e < tess.voronoi_edges.size(); ++e) {
    const VoronoiEdge& ve = tess.voronoi_edges[e];
    if (!c.member[ve.sites[0]] && !c.member[ve.sites[1]]) continue;
    c.edge_set.push_back(e);
    for (const VertexId v : ve.vertices) {
      if (v != no_vertex && !vertex_seen[static_cast<std::size_t>(v)]) {
        vertex_seen[static_cast<std::size_t>(v)] = true;
      }
    }
  }
  for (std::size_t v = 0; v < vertex_seen.size(); ++v) {
    if (vertex_seen[v]) c.vertex_set.push_back(static_cast<VertexId>(v));
  }

  // Holes: components of non-member core sites that never reach a site outside the core.
  std::vector<std::int32_t> label(n, -1);
  for (SiteId s = 0; s < n; ++s) {
    if (c.member[s] || label[s] >= 0 || !core.contains(tess.site(s))) continue;
    std::vector<SiteId> stack{s}, members;
    label[s] = static_cast<std::int32_t>(s);
    bool bounded = true;
    while (!stack.empty()) {
      const SiteId v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (const auto& [w, e] : tess.neighbors(v)) {
        if (c.member[w]) continue;
        if (!core.contains(tess.site(w))) {
          bounded = false;
          continue;
        }
        if (label[w] < 0) {
          label[w] = static_cast<std::int32_t>(s);
          stack.push_back(w);
        }
      }
    }
    if (!bounded) continue;
    Rect box = bounding_box(tess.cells[members[0]].polygon);
    for (const SiteId v : members) {
      const Rect b = bounding_box(tess.cells[v].polygon);
      box = {{std::min(box.min.x, b.min.x), std::min(box.min.y, b.min.y)},
             {std::max(box.max.x, b.max.x), std::max(box.max.y, b.max.y)}};
    }
    c.hole_sizes.push_back(members.size());
    c.hole_diameters.push_back(distance(box.min, box.max));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Coarse-grained blocks

struct BlockGrid {
  double L = 0.0;
  double K = 0.0;
  double alpha = 0.0;
  Point origin{};  // block j is centred at origin + 10 L j
  int j_min = 0;   // same range on both axes
  int j_max = -1;
  /// Row-major over (jy, jx): 1 open, 0 closed, -1 skipped (not inside the sampled region).
  std::vector<std::int8_t> open;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::size_t open_count = 0;
  std::size_t fails_c1 = 0, fails_c2 = 0, fails_c3 = 0;

  [[nodiscard]] int side() const noexcept { return j_max - j_min + 1; }
  [[nodiscard]] std::int8_t at(int jx, int jy) const noexcept {
    return open[static_cast<std::size_t>((jy - j_min) * side() + (jx - j_min))];
  }
  [[nodiscard]] Point center(int jx, int jy) const noexcept {
    return origin + 10.0 * L * Point{static_cast<double>(jx), static_cast<double>(jy)};
  }
  [[nodiscard]] double open_fraction() const noexcept {
    return evaluated ? static_cast<double>(open_count) / static_cast<double>(evaluated) : 0.0;
  }
};

namespace detail {

inline double min_pairwise_distance(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x; });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size() && pts[j].x - pts[i].x < best; ++j) {
      best = std::min(best, distance(pts[i], pts[j]));
    }
  }
  return best;
}

}  // namespace detail

/// The events (c1)-(c3) for blocks Q_{5L} + 10 L j centred on the window.
inline BlockGrid classify_blocks(const PointSet& points, double L, double K, double alpha) {
  if (!(L > 0.0) || !(K >= 1.0) || !(alpha >= 0.0)) throw Error(ErrorKind::invalid_argument, "need L > 0, K >= 1, alpha >= 0");
  BlockGrid g;
  g.L = L;
  g.K = K;
  g.alpha = alpha;
  g.origin = points.window.center;
  const Rect region = points.window.sampled();
  const double reach = points.window.half_width + points.window.buffer;
  const int J = static_cast<int>(std::floor((reach + 5.0 * L) / (10.0 * L)));
  g.j_min = -J;
  g.j_max = J;
  const auto side = static_cast<std::size_t>(g.side());
  g.open.assign(side * side, -1);

  std::vector<std::vector<Point>> members(side * side);
  for (const Point& p : points.sites) {
    const Point q = p - g.origin;
    const auto jx = static_cast<long>(std::floor((q.x + 5.0 * L) / (10.0 * L)));
    const auto jy = static_cast<long>(std::floor((q.y + 5.0 * L) / (10.0 * L)));
    if (jx < g.j_min || jx > g.j_max || jy < g.j_min || jy > g.j_max) continue;
    members[static_cast<std::size_t>(jy - g.j_min) * side + static_cast<std::size_t>(jx - g.j_min)].push_back(p);
  }
  for (int jy = g.j_min; jy <= g.j_max; ++jy) {
    for (int jx = g.j_min; jx <= g.j_max; ++jx) {
      const std::size_t idx = static_cast<std::size_t>(jy - g.j_min) * side + static_cast<std::size_t>(jx - g.j_min);
      const Point c = g.center(jx, jy);
      const Rect block{{c.x - 5.0 * L, c.y - 5.0 * L}, {c.x + 5.0 * L, c.y + 5.0 * L}};
      if (!region.contains(block)) {
        ++g.skipped;
        continue;
      }
      ++g.evaluated;
      const std::vector<Point>& pts = members[idx];
      // (c1): the 10 x 10 subsquares [0, L]^2 + L i, i in {-5..4}^2, are all occupied.
      std::vector<bool> occupied(100, false);
      for (const Point& p : pts) {
        const auto ix = std::clamp(static_cast<int>(std::floor((p.x - c.x) / L)) + 5, 0, 9);
        const auto iy = std::clamp(static_cast<int>(std::floor((p.y - c.y) / L)) + 5, 0, 9);
        occupied[static_cast<std::size_t>(iy * 10 + ix)] = true;
      }
      const bool c1 = std::all_of(occupied.begin(), occupied.end(), [](bool b) { return b; });
      const bool c2 = static_cast<double>(pts.size()) <= K;
      bool c3 = detail::min_pairwise_distance(pts) > 2.0 * alpha;
      for (const Point& p : pts) {
        const double d = std::min({p.x - block.min.x, block.max.x - p.x, p.y - block.min.y, block.max.y - p.y});
        c3 = c3 && d > 2.0 * alpha;
      }
      g.fails_c1 += c1 ? 0 : 1;
      g.fails_c2 += c2 ? 0 : 1;
      g.fails_c3 += c3 ? 0 : 1;
      g.open[idx] = (c1 && c2 && c3) ? 1 : 0;
      g.open_count += (c1 && c2 && c3) ? 1 : 0;
    }
  }
  return g;
}

struct BlockSoundness {
  std::size_t pairs_checked = 0;
  std::size_t cells_checked = 0;
  std::size_t violations = 0;
  std::size_t uncertified = 0;
};

/// For adjacent open blocks, every cell meeting the segment between their
/// centres must lie in the two blocks, contain an alpha-ball and have at most K edges.
inline BlockSoundness check_block_soundness(const Tessellation& tess, const BlockGrid& g) {
  BlockSoundness out;
  std::vector<Rect> boxes(tess.site_count());
  for (SiteId s = 0; s < tess.site_count(); ++s) boxes[s] = bounding_box(tess.cells[s].polygon);
  for (int jy = g.j_min; jy <= g.j_max; ++jy) {
    for (int jx = g.j_min; jx <= g.j_max; ++jx) {
      if (g.at(jx, jy) != 1) continue;
      for (const auto& [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
        if (jx + dx > g.j_max || jy + dy > g.j_max || g.at(jx + dx, jy + dy) != 1) continue;
        ++out.pairs_checked;
        const Point a = g.center(jx, jy), b = g.center(jx + dx, jy + dy);
        const Polygon seg{a, b};
        const double h = 5.0 * g.L;
        const Rect both{{std::min(a.x, b.x) - h, std::min(a.y, b.y) - h}, {std::max(a.x, b.x) + h, std::max(a.y, b.y) + h}};
        for (SiteId s = 0; s < tess.site_count(); ++s) {
          const Rect& box = boxes[s];
          if (box.max.x < std::min(a.x, b.x) || box.min.x > std::max(a.x, b.x) || box.max.y < std::min(a.y, b.y) ||
              box.min.y > std::max(a.y, b.y)) {
            continue;
          }
          if (!convex_intersect(tess.cells[s].polygon, seg)) continue;
          ++out.cells_checked;
          if (!tess.cells[s].certified) {
            ++out.uncertified;
            ++out.violations;
            continue;
          }
          const CellMetrics m = cell_metrics(tess, s);
          const bool ok = both.contains(box) && m.inradius >= g.alpha && static_cast<double>(m.edge_count) <= g.K;
          out.violations += ok ? 0 : 1;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Channels

/// R^nu_{T,delta}(x) = {y : |<y - x, nu>| <= delta T, |<y - x, nu_perp>| <= T / 2}.
struct ChannelRect {
  Point x{};
  Point nu{1.0, 0.0};
  double T = 1.0;
  double delta = 0.2;

  [[nodiscard]] Polygon polygon() const {
    const Point a = delta * T * nu, b = 0.5 * T * perp(nu);
    return {x - a - b, x + a - b, x + a + b, x - a + b};
  }
  /// The two sides parallel to nu, at nu_perp offsets -T/2 and +T/2.
  [[nodiscard]] Polygon side(int sign) const {
    const Point a = delta * T * nu, b = (0.5 * T * sign) * perp(nu);
    return {x - a + b, x + a + b};
  }
};

struct ChannelReport {
  ChannelRect rect;
  std::size_t count = 0;
  std::size_t cells_in_rect = 0;
  std::vector<std::vector<SiteId>> witnesses;
};

/// Maximum number of site-disjoint paths of cluster cells inside the
/// rectangle joining its two sides parallel to nu.
inline ChannelReport channel_count(const AlphaCluster& cluster, const Tessellation& tess, const ChannelRect& rect) {
  if (!(rect.delta > 0.0 && rect.delta < 1.0) || !(rect.T > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "need T > 0 and delta in (0, 1)");
  }
  const Polygon box = rect.polygon();
  const Rect core = tess.core();
  for (const Point& p : box) {
    if (!core.contains(p)) throw Error(ErrorKind::out_of_core, "channel rectangle leaves the core");
  }
  ChannelReport report;
  report.rect = rect;
  const Polygon side_a = rect.side(-1), side_b = rect.side(+1);
  std::vector<std::int32_t> local(tess.site_count(), -1);
  std::vector<SiteId> cells;
  for (const SiteId s : cluster.spanning_component) {
    if (convex_intersect(tess.cells[s].polygon, box)) {
      local[s] = static_cast<std::int32_t>(cells.size());
      cells.push_back(s);
    }
  }
  report.cells_in_rect = cells.size();
  if (cells.empty()) return report;

  // Node 2k is the entry of cell k, 2k + 1 its exit; unit capacity in between.
  const auto source = static_cast<std::uint32_t>(2 * cells.size());
  const std::uint32_t sink = source + 1;
  MaxFlow flow(2 * cells.size() + 2);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const SiteId s = cells[k];
    const auto in = static_cast<std::uint32_t>(2 * k), out = in + 1;
    flow.add_arc(in, out, 1);
    if (convex_intersect(tess.cells[s].polygon, side_a)) flow.add_arc(source, in, 1);
    if (convex_intersect(tess.cells[s].polygon, side_b)) flow.add_arc(out, sink, 1);
    for (const auto& [w, e] : tess.neighbors(s)) {
      if (local[w] >= 0) flow.add_arc(out, static_cast<std::uint32_t>(2 * local[w]), 1);
    }
  }
  report.count = static_cast<std::size_t>(flow.run(source, sink));

  for (std::size_t p = 0; p < report.count; ++p) {
    std::vector<SiteId> path;
    std::uint32_t v = source;
    while (v != sink) {
      for (const std::size_t id : flow.out_arcs(v)) {
        const auto& arc = flow.arc(id);
        if (id % 2 == 0 && arc.flow > 0) {
          flow.consume(id);
          v = arc.to;
          break;
        }
      }
      if (v != sink && v % 2 == 0) path.push_back(cells[v / 2]);
    }
    report.witnesses.push_back(std::move(path));
  }
  return report;
}

/// Independent re-check of witness paths: cluster membership, adjacency of
/// consecutive cells, pairwise disjointness, and contact with both sides.
inline bool witnesses_valid(const ChannelReport& report, const AlphaCluster& cluster, const Tessellation& tess) {
  if (report.witnesses.size() != report.count) return false;
  std::vector<bool> used(tess.site_count(), false);
  const Polygon box = report.rect.polygon();
  for (const auto& path : report.witnesses) {
    if (path.empty()) return false;
    if (!convex_intersect(tess.cells[path.front()].polygon, report.rect.side(-1))) return false;
    if (!convex_intersect(tess.cells[path.back()].polygon, report.rect.side(+1))) return false;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const SiteId s = path[i];
      if (!cluster.member[s] || used[s] || !convex_intersect(tess.cells[s].polygon, box)) return false;
      used[s] = true;
      if (i + 1 < path.size()) {
        const auto nb = tess.neighbors(s);
        if (std::none_of(nb.begin(), nb.end(), [&](const auto& pr) { return pr.first == path[i + 1]; })) return false;
      }
    }
  }
  return true;
}

}  // namespace percovor

#endif  // PERCOVOR_REGULAR_CELLS_HPP
