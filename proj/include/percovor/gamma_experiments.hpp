#ifndef PERCOVOR_GAMMA_EXPERIMENTS_HPP
#define PERCOVOR_GAMMA_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/parallel.hpp"
#include "percovor/percolation_metric.hpp"
#include "percovor/polygon.hpp"
#include "percovor/sampling.hpp"
#include "percovor/spin_energy.hpp"
#include "percovor/stats.hpp"
#include "percovor/surface_tension.hpp"
#include "percovor/tessellation.hpp"

namespace percovor {

struct RecoveryResult {
  SpinConfig spin;
  std::vector<EdgeId> path_edges;  // the union of minimal paths, as Voronoi edge ids
  std::size_t total_hops = 0;
  std::size_t inside_sites = 0;
  double energy = 0.0;
  std::size_t discordant_edges = 0;
  double target_perimeter = 0.0;
  /// max over vertices of the filled region's boundary of the distance to the target boundary (scaled).
  double hausdorff_gap = 0.0;
  double symmetric_difference = 0.0;
  /// The filled region's boundary lies in the path union.
  bool boundary_in_paths = true;
};

/// Default subdivision count m = ceil(1 / sqrt(eps)).
inline int default_m(double epsilon) { return static_cast<int>(std::ceil(1.0 / std::sqrt(epsilon) - 1e-9)); }

namespace detail {

inline EdgeId voronoi_edge_between(const Tessellation& tess, VertexId a, VertexId b) {
  const auto& nb = tess.vertex_neighbors[static_cast<std::size_t>(a)];
  for (std::size_t k = 0; k < 3; ++k) {
    if (nb[k] == b) return tess.vertex_edges[static_cast<std::size_t>(a)][k];
  }
  throw std::logic_error("vertices are not adjacent");
}

}  // namespace detail

/// How each closed boundary is cut into subsegments. `per_side` cuts every
/// side into exactly m pieces; `arc_length` cuts the whole boundary into
/// ceil(m * perimeter) pieces of equal length, which coincides with `per_side`
/// on unit-side polygons and keeps the number of path junctions per unit
/// length independent of the side count.
enum class Subdivision { arc_length, per_side };

namespace detail {

inline std::vector<Point> subdivision_points(const Polygon& poly, int m, Subdivision mode) {
  std::vector<Point> pts;
  const std::size_t n = poly.size();
  if (mode == Subdivision::per_side) {
    for (std::size_t j = 0; j < n; ++j) {
      for (int l = 0; l < m; ++l) pts.push_back(poly[j] + (static_cast<double>(l) / m) * (poly[(j + 1) % n] - poly[j]));
    }
    return pts;
  }
  const double total = perimeter(poly);
  const int pieces = std::max(3, static_cast<int>(std::ceil(m * total - 1e-9)));
  const double step = total / pieces;
  std::size_t j = 0;
  double side_start = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double s = k * step;
    while (j + 1 < n && side_start + distance(poly[j], poly[(j + 1) % n]) <= s + 1e-12) {
      side_start += distance(poly[j], poly[(j + 1) % n]);
      ++j;
    }
    const double len = distance(poly[j], poly[(j + 1) % n]);
    const double f = std::clamp((s - side_start) / len, 0.0, 1.0);
    pts.push_back(poly[j] + f * (poly[(j + 1) % n] - poly[j]));
  }
  return pts;
}

}  // namespace detail

/// Recovery configuration for the polygonal target A (scaled coordinates):
/// minimal Voronoi paths between projections of consecutive subdivision
/// points of the boundary, then the bounded complement of their union is set to +1.
inline RecoveryResult recovery_config(const Tessellation& tess, const PolygonSet& target, double epsilon, int m,
                                      Subdivision mode = Subdivision::arc_length) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
  if (m < 2) throw Error(ErrorKind::invalid_argument, "m must be at least 2");
  const Rect core = tess.core().scaled(epsilon);
  const double margin = 2.0 / m;
  const Rect inner{{core.min.x + margin, core.min.y + margin}, {core.max.x - margin, core.max.y - margin}};
  for (const Polygon& poly : target.polygons()) {
    for (const Point& p : poly) {
      if (!inner.contains(p)) throw Error(ErrorKind::out_of_margin, "target leaves the core shrunk by 2/m");
    }
  }
  RecoveryResult r;
  r.target_perimeter = target.total_perimeter();
  r.spin = SpinConfig::constant(tess.site_count(), -1, epsilon);
  if (target.empty()) return r;

  const MetricGraph g = MetricGraph::voronoi(tess);
  std::vector<bool> on_path(tess.voronoi_edges.size(), false);
  for (const Polygon& poly : target.polygons()) {
    const std::vector<Point> pts = detail::subdivision_points(poly, m, mode);
    MetricGraph::Node prev = g.project((1.0 / epsilon) * pts.front());
    for (std::size_t l = 1; l <= pts.size(); ++l) {
      const MetricGraph::Node cur = g.project((1.0 / epsilon) * pts[l % pts.size()]);
      const GraphDistanceResult path = hop_distance(g, prev, cur);
      r.total_hops += path.hops;
      for (std::size_t k = 0; k + 1 < path.path.size(); ++k) {
        on_path[detail::voronoi_edge_between(tess, path.path[k], path.path[k + 1])] = true;
      }
      prev = cur;
    }
  }
  for (EdgeId e = 0; e < on_path.size(); ++e) {
    if (on_path[e]) r.path_edges.push_back(e);
  }

  // Flood the outside from the unbounded cells without crossing the paths.
  std::vector<bool> outside(tess.site_count(), false);
  std::vector<SiteId> stack;
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    if (tess.cells[s].unbounded) {
      outside[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const SiteId v = stack.back();
    stack.pop_back();
    for (const auto& [w, e] : tess.neighbors(v)) {
      if (outside[w] || on_path[e]) continue;
      outside[w] = true;
      stack.push_back(w);
    }
  }
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    if (!outside[s]) {
      r.spin.values[s] = 1;
      ++r.inside_sites;
    }
  }

  const EnergyResult energy = scaled_energy(tess, r.spin);
  r.energy = energy.energy;
  r.discordant_edges = energy.discordant_count;
  for (const EdgeId e : energy.boundary_edges) {
    if (!on_path[e]) r.boundary_in_paths = false;
    for (const VertexId v : tess.voronoi_edges[e].vertices) {
      if (v == no_vertex) continue;
      r.hausdorff_gap = std::max(r.hausdorff_gap, target.distance_to_boundary(epsilon * tess.vertex_position(v)));
    }
  }
  r.symmetric_difference = symmetric_difference_area(voronoi_set(tess, r.spin), target, core).area;
  return r;
}

struct GammaUpperConfig {
  std::string target_name = "square";
  PolygonSet target = PolygonSet::square({0.0, 0.0}, 1.0);
  std::vector<double> epsilons{1.0 / 25, 1.0 / 50, 1.0 / 100};
  /// m = ceil(1 / sqrt(eps)) when zero, else this fixed value.
  int fixed_m = 0;
  Subdivision subdivision = Subdivision::arc_length;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double intensity = 1.0;
  unsigned jobs = 1;
};

struct GammaUpperRow {
  std::string target;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  int m = 0;
  std::size_t sites = 0;
  double energy = 0.0;
  double perimeter = 0.0;
  double ratio = 0.0;
  double hausdorff_gap = 0.0;
  double symmetric_difference = 0.0;
  std::size_t total_hops = 0;
  std::size_t path_edges = 0;
  bool boundary_in_paths = true;
};

/// Window (unscaled) holding target / eps with the 2/m margin and some slack.
inline Window recovery_window(const PolygonSet& target, double epsilon, int m, double intensity) {
  const Rect b = target.bounds();
  const Point c = 0.5 * (b.min + b.max);
  const double half = 0.5 * std::max(b.width(), b.height()) + 2.5 / m;
  return {(1.0 / epsilon) * c, half / epsilon, Window::default_buffer(intensity)};
}

/// Fresh realization per (seed, eps) at unit intensity in unscaled
/// coordinates; the target is compared in the eps-scaled frame.
inline std::vector<GammaUpperRow> gamma_upper_experiment(const GammaUpperConfig& cfg) {
  if (cfg.epsilons.empty()) throw Error(ErrorKind::invalid_argument, "empty epsilon schedule");
  for (std::size_t i = 1; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] < cfg.epsilons[i - 1])) throw Error(ErrorKind::invalid_argument, "epsilon schedule must decrease");
  }
  const std::size_t n_eps = cfg.epsilons.size();
  std::vector<GammaUpperRow> rows(cfg.seeds.size() * n_eps);
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i / n_eps];
    const double eps = cfg.epsilons[i % n_eps];
    const int m = cfg.fixed_m > 0 ? cfg.fixed_m : default_m(eps);
    const Window w = recovery_window(cfg.target, eps, m, cfg.intensity);
    const Tessellation tess = build_tessellation(sample_poisson(cfg.intensity, w, mix_seed(seed, eps)));
    const RecoveryResult r = recovery_config(tess, cfg.target, eps, m, cfg.subdivision);
    GammaUpperRow& row = rows[i];
    row.target = cfg.target_name;
    row.seed = seed;
    row.epsilon = eps;
    row.m = m;
    row.sites = tess.site_count();
    row.energy = r.energy;
    row.perimeter = r.target_perimeter;
    row.ratio = r.energy / r.target_perimeter;
    row.hausdorff_gap = r.hausdorff_gap;
    row.symmetric_difference = r.symmetric_difference;
    row.total_hops = r.total_hops;
    row.path_edges = r.path_edges.size();
    row.boundary_in_paths = r.boundary_in_paths;
  });
  return rows;
}

struct LambdaScalingRow {
  double intensity = 1.0;
  double tau_hat = 0.0;
  double ci_halfwidth = 0.0;
  double ratio = 1.0;  // tau_hat(lambda) / tau_hat(first lambda)
  double ratio_ci = 0.0;
  double sqrt_ratio = 1.0;  // sqrt(lambda / first lambda)
  std::size_t n_samples = 0;
};

/// tau-hat per intensity in a fixed physical window; compare with sqrt(lambda).
inline std::vector<LambdaScalingRow> lambda_scaling_experiment(const std::vector<double>& lambdas, TauConfig base,
                                                               std::vector<TauEstimate>* estimates = nullptr) {
  if (lambdas.empty()) throw Error(ErrorKind::invalid_argument, "need at least one intensity");
  std::vector<LambdaScalingRow> rows;
  for (const double lambda : lambdas) {
    TauConfig cfg = base;
    cfg.intensity = lambda;
    cfg.buffer.reset();
    const TauEstimate est = estimate_tau(cfg);
    LambdaScalingRow row;
    row.intensity = lambda;
    row.tau_hat = est.tau_hat;
    row.ci_halfwidth = est.ci_halfwidth;
    row.n_samples = est.levels.empty() ? 0 : est.levels.back().n;
    rows.push_back(row);
    if (estimates) estimates->push_back(est);
  }
  const LambdaScalingRow& ref = rows.front();
  for (LambdaScalingRow& row : rows) {
    row.ratio = row.tau_hat / ref.tau_hat;
    row.sqrt_ratio = std::sqrt(row.intensity / ref.intensity);
    // Delta-method half-width of the ratio of two independent means.
    row.ratio_ci = &row == &ref ? 0.0
                                : row.ratio * std::hypot(row.ci_halfwidth / row.tau_hat, ref.ci_halfwidth / ref.tau_hat);
  }
  return rows;
}

}  // namespace percovor

#endif  // PERCOVOR_GAMMA_EXPERIMENTS_HPP
