#ifndef PERCOVOR_SURFACE_TENSION_HPP
#define PERCOVOR_SURFACE_TENSION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/parallel.hpp"
#include "percovor/percolation_metric.hpp"
#include "percovor/regular_cells.hpp"
#include "percovor/sampling.hpp"
#include "percovor/stats.hpp"
#include "percovor/tessellation.hpp"

namespace percovor {

struct TauConfig {
  double intensity = 1.0;
  Point center{};
  double half_width = 125.0;
  std::optional<double> buffer;  // default 6 / sqrt(intensity)
  std::vector<double> t_values{50.0, 100.0, 200.0};
  /// Directions k pi / n, k = 0..n-1 (v and -v give the same endpoints).
  int directions = 8;
  std::vector<std::uint64_t> seeds;
  double alpha = 0.0;
  /// When positive, each sample is repeated with both endpoints shifted by
  /// offset_fraction * t along v_perp.
  double offset_fraction = 0.0;
  GraphKind graph = GraphKind::voronoi;
  unsigned jobs = 1;
  int max_attempts = 20;

  [[nodiscard]] Window window() const { return {center, half_width, buffer.value_or(Window::default_buffer(intensity))}; }
};

struct TauSample {
  std::uint64_t seed = 0;
  std::uint64_t realization_seed = 0;
  double intensity = 1.0;
  double alpha = 0.0;
  double t = 0.0;
  double dir_deg = 0.0;
  Point offset{};
  std::size_t hops = 0;
  double tau_sample = 0.0;
};

struct TauLevel {
  double t = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double cv = 0.0;
};

struct TauEstimate {
  std::vector<TauSample> samples;
  double tau_hat = 0.0;
  double ci_halfwidth = 0.0;
  std::map<double, double> per_direction;  // degrees -> mean at the largest t
  double direction_spread = 0.0;           // (max - min) / mean of per_direction
  std::vector<TauLevel> levels;            // centred samples per t
  double alpha = 0.0;
  std::size_t attempts = 0;
  std::size_t rejections = 0;
};

inline double direction_angle(int k, int n) noexcept { return std::numbers::pi * k / n; }

/// Aggregates centred samples: tau_hat and its CI come from the largest t.
inline void aggregate_tau(TauEstimate& est) {
  std::map<double, std::vector<double>> by_t;
  for (const TauSample& s : est.samples) {
    if (s.offset.x == 0.0 && s.offset.y == 0.0) by_t[s.t].push_back(s.tau_sample);
  }
  est.levels.clear();
  for (const auto& [t, xs] : by_t) {
    TauLevel lv{t, xs.size(), stats::mean(xs), stats::stddev(xs), 0.0};
    lv.cv = lv.mean > 0.0 ? lv.sd / lv.mean : 0.0;
    est.levels.push_back(lv);
  }
  if (by_t.empty()) return;
  const auto& [t_max, top] = *by_t.rbegin();
  est.tau_hat = stats::mean(top);
  est.ci_halfwidth = stats::ci95(top);
  std::map<double, std::vector<double>> by_dir;
  for (const TauSample& s : est.samples) {
    if (s.t == t_max && s.offset.x == 0.0 && s.offset.y == 0.0) by_dir[s.dir_deg].push_back(s.tau_sample);
  }
  est.per_direction.clear();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [deg, xs] : by_dir) {
    const double m = stats::mean(xs);
    est.per_direction[deg] = m;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  est.direction_spread = est.tau_hat > 0.0 ? (hi - lo) / est.tau_hat : 0.0;
}

/// hops(pi(x), pi(x + t v)) / t over fresh realizations per (seed, t).
inline TauEstimate estimate_tau(const TauConfig& cfg) {
  if (!(cfg.intensity > 0.0)) throw Error(ErrorKind::invalid_argument, "intensity must be positive");
  if (cfg.seeds.size() < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 seeds");
  if (cfg.directions < 1 || cfg.t_values.empty()) throw Error(ErrorKind::invalid_argument, "need t values and directions");
  if (cfg.alpha < 0.0) throw Error(ErrorKind::invalid_argument, "alpha must be non-negative");
  if (cfg.alpha > 0.0 && cfg.graph != GraphKind::voronoi) {
    throw Error(ErrorKind::invalid_argument, "alpha restriction applies to the Voronoi graph");
  }
  const Window window = cfg.window();
  const Rect core = window.core();
  for (const double t : cfg.t_values) {
    if (!(t > 0.0)) throw Error(ErrorKind::invalid_argument, "t must be positive");
    const double margin = 0.1 * t;
    const Rect inner{{core.min.x + margin, core.min.y + margin}, {core.max.x - margin, core.max.y - margin}};
    for (int k = 0; k < cfg.directions; ++k) {
      const Point v = unit_vector(direction_angle(k, cfg.directions));
      const Point off = cfg.offset_fraction * t * perp(v);
      for (const Point& shift : {Point{}, off}) {
        if (!inner.contains(cfg.center - 0.5 * t * v + shift) || !inner.contains(cfg.center + 0.5 * t * v + shift)) {
          throw Error(ErrorKind::window_too_small, "t = " + std::to_string(t) + " does not fit the core with margin 0.1 t");
        }
      }
    }
  }

  struct Task {
    std::vector<TauSample> samples;
    std::size_t attempts = 0;
  };
  const std::size_t n_t = cfg.t_values.size();
  std::vector<Task> tasks(cfg.seeds.size() * n_t);
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i / n_t];
    const double t = cfg.t_values[i % n_t];
    Task& task = tasks[i];
    const std::uint64_t base = mix_seed(seed, t);
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
      const std::uint64_t rs = attempt == 0 ? base : mix_seed(base, static_cast<std::uint64_t>(attempt));
      ++task.attempts;
      const Tessellation tess = build_tessellation(sample_poisson(cfg.intensity, window, rs));
      std::optional<MetricGraph> graph;
      if (cfg.alpha > 0.0) {
        const AlphaCluster cluster = alpha_cluster(classify_regular(tess, cfg.alpha), tess);
        if (!cluster.spanning) continue;
        graph.emplace(MetricGraph::voronoi_restricted(tess, cluster.member, cfg.alpha));
      } else {
        graph.emplace(MetricGraph::of_kind(cfg.graph, tess));
      }
      for (int k = 0; k < cfg.directions; ++k) {
        const double theta = direction_angle(k, cfg.directions);
        const Point v = unit_vector(theta);
        std::vector<Point> shifts{Point{}};
        if (cfg.offset_fraction > 0.0) shifts.push_back(cfg.offset_fraction * t * perp(v));
        for (const Point& shift : shifts) {
          const GraphDistanceResult r =
              point_hop_distance(*graph, cfg.center - 0.5 * t * v + shift, cfg.center + 0.5 * t * v + shift);
          task.samples.push_back({seed, rs, cfg.intensity, cfg.alpha, t, theta * 180.0 / std::numbers::pi, shift, r.hops,
                                  static_cast<double>(r.hops) / t});
        }
      }
      return;
    }
  });

  TauEstimate est;
  est.alpha = cfg.alpha;
  for (const Task& task : tasks) {
    est.attempts += task.attempts;
    est.rejections += task.attempts - (task.samples.empty() ? 0 : 1);
    if (task.samples.empty()) {
      throw Error(ErrorKind::alpha_too_large, "no spanning alpha-cluster after " + std::to_string(task.attempts) + " attempts");
    }
    est.samples.insert(est.samples.end(), task.samples.begin(), task.samples.end());
  }
  if (2 * est.rejections > est.attempts) {
    throw Error(ErrorKind::alpha_too_large, "rejection rate " + std::to_string(est.rejections) + "/" +
                                                std::to_string(est.attempts) + " exceeds 50%");
  }
  aggregate_tau(est);
  return est;
}

/// tau_alpha: the estimator on the alpha-cluster's Voronoi edges.
inline TauEstimate tau_alpha(TauConfig cfg, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::invalid_argument, "alpha must be positive");
  cfg.alpha = alpha;
  return estimate_tau(cfg);
}

}  // namespace percovor

#endif  // PERCOVOR_SURFACE_TENSION_HPP
