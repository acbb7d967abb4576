#ifndef PERCOVOR_PERCOLATION_METRIC_HPP
#define PERCOVOR_PERCOLATION_METRIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/tessellation.hpp"

namespace percovor {

enum class GraphKind { voronoi, delaunay };

inline const char* to_string(GraphKind kind) noexcept { return kind == GraphKind::voronoi ? "voronoi" : "delaunay"; }

/// Unit-weight graph on which hop distances are measured. For the Voronoi
/// kind nodes are Voronoi vertices and edges are Voronoi edges; for the
/// Delaunay kind nodes are sites. Only eligible nodes take part in
/// projection; edges only join eligible nodes.
class MetricGraph {
 public:
  using Node = std::int32_t;

  MetricGraph(GraphKind kind, double alpha, std::vector<Point> positions, std::vector<bool> eligible,
              std::span<const std::pair<Node, Node>> edges)
      : kind_(kind), alpha_(alpha), positions_(std::move(positions)), eligible_(std::move(eligible)) {
    const std::size_t n = positions_.size();
    offsets_.assign(n + 1, 0);
    for (const auto& [a, b] : edges) {
      ++offsets_[static_cast<std::size_t>(a) + 1];
      ++offsets_[static_cast<std::size_t>(b) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    targets_.resize(offsets_[n]);
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [a, b] : edges) {
      targets_[fill[static_cast<std::size_t>(a)]++] = b;
      targets_[fill[static_cast<std::size_t>(b)]++] = a;
    }
    build_locator();
  }

  /// Certified Voronoi vertices joined by Voronoi edges with both ends certified.
  static MetricGraph voronoi(const Tessellation& tess) { return voronoi_restricted(tess, {}, 0.0); }

  /// Voronoi graph restricted to the edges of cells in `cluster` (the
  /// alpha-cluster); its nodes are the vertices of those cells.
  static MetricGraph voronoi_restricted(const Tessellation& tess, const std::vector<bool>& cluster, double alpha) {
    std::vector<Point> pos(tess.voronoi_vertices.size());
    for (std::size_t v = 0; v < pos.size(); ++v) pos[v] = tess.voronoi_vertices[v].position;
    std::vector<bool> eligible(pos.size(), false);
    if (cluster.empty()) {
      for (std::size_t v = 0; v < pos.size(); ++v) eligible[v] = tess.voronoi_vertices[v].certified;
    }
    std::vector<std::pair<Node, Node>> edges;
    for (EdgeId e = 0; e < tess.voronoi_edges.size(); ++e) {
      if (!tess.edge_certified(e)) continue;
      const VoronoiEdge& ve = tess.voronoi_edges[e];
      if (!cluster.empty() && !cluster[ve.sites[0]] && !cluster[ve.sites[1]]) continue;
      edges.emplace_back(ve.vertices[0], ve.vertices[1]);
      eligible[static_cast<std::size_t>(ve.vertices[0])] = true;
      eligible[static_cast<std::size_t>(ve.vertices[1])] = true;
    }
    return {GraphKind::voronoi, alpha, std::move(pos), std::move(eligible), edges};
  }

  /// Sites joined by Delaunay edges whose dual Voronoi edge is certified.
  static MetricGraph delaunay(const Tessellation& tess) {
    std::vector<bool> eligible(tess.site_count(), false);
    std::vector<std::pair<Node, Node>> edges;
    for (EdgeId e = 0; e < tess.delaunay_edges.size(); ++e) {
      if (!tess.edge_certified(e)) continue;
      const DelaunayEdge& de = tess.delaunay_edges[e];
      edges.emplace_back(static_cast<Node>(de.a), static_cast<Node>(de.b));
      eligible[de.a] = eligible[de.b] = true;
    }
    return {GraphKind::delaunay, 0.0, tess.points.sites, std::move(eligible), edges};
  }

  static MetricGraph of_kind(GraphKind kind, const Tessellation& tess) {
    return kind == GraphKind::voronoi ? voronoi(tess) : delaunay(tess);
  }

  [[nodiscard]] GraphKind kind() const noexcept { return kind_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return positions_.size(); }
  [[nodiscard]] Point position(Node v) const noexcept { return positions_[static_cast<std::size_t>(v)]; }
  [[nodiscard]] bool eligible(Node v) const noexcept { return eligible_[static_cast<std::size_t>(v)]; }
  [[nodiscard]] std::size_t eligible_count() const noexcept { return grid_items_.size(); }

  [[nodiscard]] std::span<const Node> neighbors(Node v) const noexcept {
    const auto i = static_cast<std::size_t>(v);
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }

  /// Nearest eligible node to x; ties go to the lowest id.
  [[nodiscard]] Node project(Point x) const {
    if (grid_items_.empty()) throw Error(ErrorKind::empty_target, "graph has no eligible node");
    const auto cx = cell_coord(x.x, bounds_.min.x, nx_);
    const auto cy = cell_coord(x.y, bounds_.min.y, ny_);
    Node best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    const long max_ring = static_cast<long>(std::max(nx_, ny_)) + 1;
    for (long ring = 0; ring <= max_ring; ++ring) {
      // Every node outside the rings scanned so far is at least this far away.
      if (best >= 0) {
        const double reach = ring_clearance(x, cx, cy, ring - 1);
        if (reach * reach > best_d2) break;
      }
      for (long j = cy - ring; j <= cy + ring; ++j) {
        for (long i = cx - ring; i <= cx + ring; ++i) {
          if (std::max(std::abs(i - cx), std::abs(j - cy)) != ring) continue;
          if (i < 0 || j < 0 || i >= static_cast<long>(nx_) || j >= static_cast<long>(ny_)) continue;
          const std::size_t c = static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i);
          for (std::uint32_t k = grid_offsets_[c]; k < grid_offsets_[c + 1]; ++k) {
            const Node v = grid_items_[k];
            const double d2 = squared_distance(x, positions_[static_cast<std::size_t>(v)]);
            if (d2 < best_d2 || (d2 == best_d2 && v < best)) {
              best_d2 = d2;
              best = v;
            }
          }
        }
      }
    }
    return best;
  }

 private:
  static std::size_t clamp_index(double f, std::size_t n) noexcept {
    if (!(f > 0.0)) return 0;
    return std::min(n - 1, static_cast<std::size_t>(f));
  }

  [[nodiscard]] long cell_coord(double v, double lo, std::size_t n) const noexcept {
    return static_cast<long>(clamp_index((v - lo) / cell_, n));
  }

  [[nodiscard]] double ring_clearance(Point x, long cx, long cy, long ring) const noexcept {
    // Distance from x to the outside of the (2 ring + 1)^2 block of cells around (cx, cy).
    const double x0 = bounds_.min.x + cell_ * static_cast<double>(cx - ring);
    const double x1 = bounds_.min.x + cell_ * static_cast<double>(cx + ring + 1);
    const double y0 = bounds_.min.y + cell_ * static_cast<double>(cy - ring);
    const double y1 = bounds_.min.y + cell_ * static_cast<double>(cy + ring + 1);
    return std::max(0.0, std::min({x.x - x0, x1 - x.x, x.y - y0, y1 - x.y}));
  }

  void build_locator() {
    std::vector<Node> items;
    for (std::size_t v = 0; v < positions_.size(); ++v) {
      if (eligible_[v]) items.push_back(static_cast<Node>(v));
    }
    bounds_ = {{0, 0}, {1, 1}};
    nx_ = ny_ = 1;
    cell_ = 1.0;
    if (!items.empty()) {
      bounds_ = {position(items[0]), position(items[0])};
      for (const Node v : items) {
        const Point p = position(v);
        bounds_.min.x = std::min(bounds_.min.x, p.x);
        bounds_.min.y = std::min(bounds_.min.y, p.y);
        bounds_.max.x = std::max(bounds_.max.x, p.x);
        bounds_.max.y = std::max(bounds_.max.y, p.y);
      }
      const double extent = std::max({bounds_.width(), bounds_.height(), 1e-300});
      cell_ = std::max(extent / 2048.0, std::sqrt(bounds_.width() * bounds_.height() / static_cast<double>(items.size())));
      if (!(cell_ > 0.0)) cell_ = extent;
      nx_ = static_cast<std::size_t>(bounds_.width() / cell_) + 1;
      ny_ = static_cast<std::size_t>(bounds_.height() / cell_) + 1;
    }
    grid_offsets_.assign(nx_ * ny_ + 1, 0);
    std::vector<std::size_t> slot(items.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
      const Point p = position(items[k]);
      slot[k] = static_cast<std::size_t>(cell_coord(p.y, bounds_.min.y, ny_)) * nx_ +
                static_cast<std::size_t>(cell_coord(p.x, bounds_.min.x, nx_));
      ++grid_offsets_[slot[k] + 1];
    }
    for (std::size_t c = 0; c < nx_ * ny_; ++c) grid_offsets_[c + 1] += grid_offsets_[c];
    grid_items_.resize(items.size());
    std::vector<std::uint32_t> fill(grid_offsets_.begin(), grid_offsets_.end() - 1);
    for (std::size_t k = 0; k < items.size(); ++k) grid_items_[fill[slot[k]]++] = items[k];
  }

  GraphKind kind_;
  double alpha_;
  std::vector<Point> positions_;
  std::vector<bool> eligible_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Node> targets_;
  Rect bounds_{};
  double cell_ = 1.0;
  std::size_t nx_ = 1, ny_ = 1;
  std::vector<std::uint32_t> grid_offsets_;
  std::vector<Node> grid_items_;
};

struct GraphDistanceResult {
  std::size_t hops = 0;
  std::vector<MetricGraph::Node> path;
  MetricGraph::Node start_vertex = -1;
  MetricGraph::Node end_vertex = -1;
  double restricted_alpha = 0.0;
};

inline MetricGraph::Node project_vertex(const MetricGraph& g, Point x) { return g.project(x); }

namespace detail {

inline std::size_t component_size(const MetricGraph& g, MetricGraph::Node source) {
  std::vector<bool> seen(g.node_count(), false);
  std::vector<MetricGraph::Node> stack{source};
  seen[static_cast<std::size_t>(source)] = true;
  std::size_t count = 0;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    ++count;
    for (const auto w : g.neighbors(v)) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  return count;
}

}  // namespace detail

/// Minimal number of graph edges between two eligible nodes (breadth-first search).
inline GraphDistanceResult hop_distance(const MetricGraph& g, MetricGraph::Node from, MetricGraph::Node to) {
  const auto n = static_cast<MetricGraph::Node>(g.node_count());
  if (from < 0 || to < 0 || from >= n || to >= n || !g.eligible(from) || !g.eligible(to)) {
    throw Error(ErrorKind::invalid_argument, "hop_distance endpoints must be eligible nodes");
  }
  GraphDistanceResult r;
  r.start_vertex = from;
  r.end_vertex = to;
  r.restricted_alpha = g.alpha();
  std::vector<MetricGraph::Node> parent(g.node_count(), -1);
  std::vector<MetricGraph::Node> queue{from};
  parent[static_cast<std::size_t>(from)] = from;
  bool found = from == to;
  for (std::size_t head = 0; head < queue.size() && !found; ++head) {
    const auto v = queue[head];
    for (const auto w : g.neighbors(v)) {
      if (parent[static_cast<std::size_t>(w)] >= 0) continue;
      parent[static_cast<std::size_t>(w)] = v;
      if (w == to) {
        found = true;
        break;
      }
      queue.push_back(w);
    }
  }
  if (!found) throw DisconnectedError(queue.size(), detail::component_size(g, to));
  for (auto v = to; v != from; v = parent[static_cast<std::size_t>(v)]) r.path.push_back(v);
  r.path.push_back(from);
  std::reverse(r.path.begin(), r.path.end());
  r.hops = r.path.size() - 1;
  return r;
}

/// m(x, y): hops between the projections of two points.
inline GraphDistanceResult point_hop_distance(const MetricGraph& g, Point x, Point y) {
  return hop_distance(g, g.project(x), g.project(y));
}

struct PathExtent {
  double max_distance = 0.0;
  /// max_distance / (M t)
  double extent = 0.0;
};

/// How far a path strays from x, relative to M t.
inline PathExtent path_extent_check(const MetricGraph& g, const GraphDistanceResult& result, Point x, double t,
                                    double ratio_bound) {
  if (!(t > 0.0) || !(ratio_bound > 0.0)) throw Error(ErrorKind::invalid_argument, "t and M must be positive");
  if (static_cast<double>(result.hops) > t * ratio_bound) {
    throw Error(ErrorKind::invalid_argument, "path has more than M t hops");
  }
  PathExtent out;
  for (const auto v : result.path) out.max_distance = std::max(out.max_distance, distance(g.position(v), x));
  out.extent = out.max_distance / (ratio_bound * t);
  return out;
}

}  // namespace percovor

#endif  // PERCOVOR_PERCOLATION_METRIC_HPP
