#ifndef PERCOVOR_SPIN_ENERGY_HPP
#define PERCOVOR_SPIN_ENERGY_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/polygon.hpp"
#include "percovor/tessellation.hpp"

namespace percovor {

/// Spins u_i in {-1, +1} on the sites of one tessellation, observed at scale
/// epsilon: site i sits at epsilon * x_i in the scaled picture.
struct SpinConfig {
  std::vector<std::int8_t> values;
  double epsilon = 1.0;

  SpinConfig() = default;
  SpinConfig(std::vector<std::int8_t> v, double eps) : values(std::move(v)), epsilon(eps) {}

  static SpinConfig constant(std::size_t n, int value, double eps) {
    return {std::vector<std::int8_t>(n, static_cast<std::int8_t>(value)), eps};
  }

  [[nodiscard]] bool plus(SiteId s) const noexcept { return values[s] > 0; }
  [[nodiscard]] SpinConfig flipped() const {
    SpinConfig out = *this;
    for (auto& v : out.values) v = static_cast<std::int8_t>(-v);
    return out;
  }
};

inline void validate(const SpinConfig& u, const Tessellation& tess) {
  if (!(u.epsilon > 0.0) || !std::isfinite(u.epsilon)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
  if (u.values.size() != tess.site_count()) {
    throw Error(ErrorKind::incomplete_configuration,
                std::to_string(u.values.size()) + " spins for " + std::to_string(tess.site_count()) + " sites");
  }
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (u.values[i] != 1 && u.values[i] != -1) {
      throw Error(ErrorKind::incomplete_configuration, "site " + std::to_string(i) + " has no spin");
    }
  }
}

struct EnergyOptions {
  /// Count only edges whose dual Voronoi edge has both endpoints certified.
  bool certified_only = false;
};

struct EnergyResult {
  double energy = 0.0;
  std::size_t discordant_count = 0;
  /// Ids of the Voronoi edges dual to discordant Delaunay edges.
  std::vector<EdgeId> boundary_edges;
  /// The three equivalent integer forms: sum over ordered pairs of (u_i - u_j)^2,
  /// ordered pairs with u_i != u_j, ordered pairs with u_i = 1, u_j = -1.
  std::int64_t quadratic_sum = 0;
  std::int64_t ordered_discordant = 0;
  std::int64_t ordered_plus_minus = 0;

  [[nodiscard]] bool forms_agree() const noexcept {
    return quadratic_sum == 8 * static_cast<std::int64_t>(discordant_count) &&
           ordered_discordant == 2 * static_cast<std::int64_t>(discordant_count) &&
           ordered_plus_minus == static_cast<std::int64_t>(discordant_count);
  }
};

/// E_eps(u), optionally restricted to edges with at least one endpoint in
/// `region` (scaled coordinates).
inline EnergyResult scaled_energy(const Tessellation& tess, const SpinConfig& u,
                                  const std::optional<Rect>& region = std::nullopt, EnergyOptions options = {}) {
  validate(u, tess);
  if (region && !tess.core().scaled(u.epsilon).contains(*region)) {
    throw Error(ErrorKind::out_of_core, "energy region must lie in the scaled core");
  }
  EnergyResult r;
  for (EdgeId e = 0; e < tess.delaunay_edges.size(); ++e) {
    const DelaunayEdge& de = tess.delaunay_edges[e];
    if (options.certified_only && !tess.edge_certified(e)) continue;
    if (region && !region->contains(u.epsilon * tess.site(de.a)) && !region->contains(u.epsilon * tess.site(de.b))) {
      continue;
    }
    const int ua = u.values[de.a], ub = u.values[de.b];
    // Each unordered edge contributes both ordered pairs.
    r.quadratic_sum += 2 * (ua - ub) * (ua - ub);
    r.ordered_discordant += ua != ub ? 2 : 0;
    r.ordered_plus_minus += ua != ub ? 1 : 0;
    if (ua != ub) {
      ++r.discordant_count;
      r.boundary_edges.push_back(e);
    }
  }
  r.energy = u.epsilon * static_cast<double>(r.discordant_count);
  if (!r.forms_agree()) throw std::logic_error("energy forms disagree");
  return r;
}

/// The Voronoi set V_eps(u): union of the scaled cells of +1 sites.
struct RegionSet {
  double epsilon = 1.0;
  std::vector<SiteId> sites;
  std::vector<Polygon> polygons;  // scaled cell polygons, disjoint interiors
  double area = 0.0;
  std::size_t clipped_cells = 0;
  /// Bounded Voronoi edges separating +1 from -1 cells.
  std::vector<EdgeId> boundary_edges;
};

inline Polygon scaled_polygon(const Polygon& poly, double s) {
  Polygon out(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) out[i] = s * poly[i];
  return out;
}

inline RegionSet voronoi_set(const Tessellation& tess, const SpinConfig& u) {
  validate(u, tess);
  RegionSet region;
  region.epsilon = u.epsilon;
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    if (!u.plus(s)) continue;
    const Cell& cell = tess.cells[s];
    region.sites.push_back(s);
    region.polygons.push_back(scaled_polygon(cell.polygon, u.epsilon));
    region.area += area(region.polygons.back());
    region.clipped_cells += cell.clipped ? 1 : 0;
  }
  for (EdgeId e = 0; e < tess.voronoi_edges.size(); ++e) {
    const DelaunayEdge& de = tess.delaunay_edges[e];
    if (u.values[de.a] != u.values[de.b] && tess.voronoi_edges[e].bounded()) region.boundary_edges.push_back(e);
  }
  return region;
}

struct SymmetricDifference {
  double area = 0.0;
  std::string method = "polygon-clipping";
};

/// |(V_eps(u) symmetric-difference A) within core|, by exact clipping of each
/// convex cell against the core and the target polygons.
inline SymmetricDifference symmetric_difference_area(const RegionSet& region, const PolygonSet& target,
                                                     const Rect& core) {
  const Polygon core_poly = rect_polygon(core);
  double region_area = 0.0, overlap = 0.0;
  for (const Polygon& cell : region.polygons) {
    const Polygon piece = clip_rect(cell, core);
    if (piece.size() < 3) continue;
    region_area += area(piece);
    overlap += target.intersection_area(piece);
  }
  const double target_area = target.intersection_area(core_poly);
  return {std::max(0.0, region_area + target_area - 2.0 * overlap), "polygon-clipping"};
}

struct MeasureDiscrepancy {
  double max_discrepancy = 0.0;
  Point worst_square{};  // lower-left corner
  std::size_t squares = 0;
};

/// max over grid squares x0 + rho*[0,1)^2 tiling the scaled core of
/// |eps^2 #{+1 sites in square} - |A within square||.
inline MeasureDiscrepancy empirical_measure_distance(const Tessellation& tess, const SpinConfig& u,
                                                     const PolygonSet& target, double rho) {
  validate(u, tess);
  if (!(rho > u.epsilon)) throw Error(ErrorKind::resolution_too_fine, "grid resolution must exceed epsilon");
  const Rect core = tess.core().scaled(u.epsilon);
  const auto nx = static_cast<std::size_t>(std::ceil(core.width() / rho - 1e-12));
  const auto ny = static_cast<std::size_t>(std::ceil(core.height() / rho - 1e-12));
  std::vector<double> mass(nx * ny, 0.0);
  const double atom = u.epsilon * u.epsilon;
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    if (!u.plus(s)) continue;
    const Point p = u.epsilon * tess.site(s);
    if (!core.contains(p)) continue;
    const auto i = std::min(nx - 1, static_cast<std::size_t>((p.x - core.min.x) / rho));
    const auto j = std::min(ny - 1, static_cast<std::size_t>((p.y - core.min.y) / rho));
    mass[j * nx + i] += atom;
  }
  MeasureDiscrepancy out;
  out.squares = nx * ny;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const Point lo{core.min.x + rho * static_cast<double>(i), core.min.y + rho * static_cast<double>(j)};
      const Rect sq{lo, {std::min(core.max.x, lo.x + rho), std::min(core.max.y, lo.y + rho)}};
      const double d = std::abs(mass[j * nx + i] - target.intersection_area(rect_polygon(sq)));
      if (d > out.max_discrepancy) {
        out.max_discrepancy = d;
        out.worst_square = lo;
      }
    }
  }
  return out;
}

}  // namespace percovor

#endif  // PERCOVOR_SPIN_ENERGY_HPP
