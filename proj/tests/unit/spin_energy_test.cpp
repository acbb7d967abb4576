#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "percovor/sampling.hpp"
#include "percovor/spin_energy.hpp"

namespace percovor {
namespace {

Tessellation triangle() {
  PointSet ps;
  ps.sites = {{0, 0}, {4, 0}, {0, 3}};
  ps.window = {{0, 0}, 10.0, 0.0};
  return build_tessellation(ps);
}

SpinConfig random_spins(std::size_t n, double eps, std::uint64_t seed, double p_plus = 0.5) {
  std::mt19937_64 rng(seed);
  SpinConfig u = SpinConfig::constant(n, -1, eps);
  for (auto& v : u.values) v = uniform01(rng) < p_plus ? 1 : -1;
  return u;
}

TEST(ScaledEnergy, ConstantConfigurationHasNoEnergy) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 10.0, 2.0}, 3));
  const EnergyResult r = scaled_energy(t, SpinConfig::constant(t.site_count(), 1, 0.1));
  EXPECT_EQ(r.energy, 0.0);
  EXPECT_TRUE(r.boundary_edges.empty());
}

TEST(ScaledEnergy, TriangleExample) {
  const Tessellation t = triangle();
  const double eps = 0.25;
  const EnergyResult r = scaled_energy(t, SpinConfig({1, -1, -1}, eps));
  EXPECT_EQ(r.boundary_edges.size(), 2u);
  EXPECT_DOUBLE_EQ(r.energy, 2 * eps);
  EXPECT_TRUE(r.forms_agree());
}

TEST(ScaledEnergy, MissingSpinIsIncomplete) {
  const Tessellation t = triangle();
  for (const SpinConfig& bad : {SpinConfig({1, -1}, 1.0), SpinConfig({1, 0, -1}, 1.0)}) {
    try {
      scaled_energy(t, bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::incomplete_configuration);
    }
  }
}

TEST(ScaledEnergy, QuadraticFormMatchesDoubleSumOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 8.0, 1.0}, seed));
    const SpinConfig u = random_spins(t.site_count(), 0.05, seed);
    // Independent double sum over ordered neighbour pairs from the triangle list.
    std::set<std::pair<SiteId, SiteId>> ordered;
    for (const auto& tri : t.triangles) {
      for (int k = 0; k < 3; ++k) {
        ordered.insert({tri[k], tri[(k + 1) % 3]});
        ordered.insert({tri[(k + 1) % 3], tri[k]});
      }
    }
    std::int64_t quadratic = 0;
    for (const auto& [i, j] : ordered) quadratic += (u.values[i] - u.values[j]) * (u.values[i] - u.values[j]);
    const EnergyResult r = scaled_energy(t, u);
    ASSERT_EQ(quadratic % 8, 0);
    EXPECT_EQ(u.epsilon * static_cast<double>(quadratic / 8), r.energy);
    EXPECT_EQ(quadratic, r.quadratic_sum);
    EXPECT_TRUE(r.forms_agree());
  }
}

TEST(ScaledEnergy, FlipSymmetryAndDuality) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 10.0, 2.0}, 5));
  const SpinConfig u = random_spins(t.site_count(), 0.1, 5);
  const EnergyResult a = scaled_energy(t, u), b = scaled_energy(t, u.flipped());
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.boundary_edges, b.boundary_edges);
  for (const EdgeId e : a.boundary_edges) {
    const VoronoiEdge& ve = t.voronoi_edges[e];
    EXPECT_NE(u.values[ve.sites[0]], u.values[ve.sites[1]]);
  }
}

TEST(ScaledEnergy, RegionAdditivity) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 10.0, 2.0}, 8));
  const double eps = 0.1;
  const SpinConfig u = random_spins(t.site_count(), eps, 8);
  const Rect core = t.core().scaled(eps);
  const Rect left{core.min, {0.0, core.max.y}}, right{{std::nextafter(0.0, 1.0), core.min.y}, core.max};
  const double whole = scaled_energy(t, u, core).energy;
  const double split = scaled_energy(t, u, left).energy + scaled_energy(t, u, right).energy;
  EXPECT_GE(split + 1e-12, whole);
  // Any excess comes from discordant edges with one endpoint on each side.
  std::size_t straddling = 0;
  for (const EdgeId e : scaled_energy(t, u).boundary_edges) {
    const Point a = eps * t.site(t.delaunay_edges[e].a), b = eps * t.site(t.delaunay_edges[e].b);
    if ((left.contains(a) && right.contains(b)) || (left.contains(b) && right.contains(a))) ++straddling;
  }
  EXPECT_NEAR(split - whole, eps * static_cast<double>(straddling), 1e-9);
  EXPECT_THROW(scaled_energy(t, u, core.scaled(2.0)), Error);
}

TEST(ScaledEnergy, CertifiedOnlyDropsBorderEdges) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 6.0, 0.5}, 2));
  const SpinConfig u = random_spins(t.site_count(), 1.0, 2);
  const EnergyResult all = scaled_energy(t, u), inner = scaled_energy(t, u, std::nullopt, {.certified_only = true});
  EXPECT_LT(inner.discordant_count, all.discordant_count);
  for (const EdgeId e : inner.boundary_edges) EXPECT_TRUE(t.edge_certified(e));
}

TEST(VoronoiSet, EmptyAndSingleCell) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 6.0, 2.0}, 4));
  const double eps = 0.5;
  EXPECT_EQ(voronoi_set(t, SpinConfig::constant(t.site_count(), -1, eps)).area, 0.0);
  SiteId s = 0;
  while (!t.cells[s].certified) ++s;
  SpinConfig u = SpinConfig::constant(t.site_count(), -1, eps);
  u.values[s] = 1;
  const RegionSet r = voronoi_set(t, u);
  EXPECT_NEAR(r.area, eps * eps * area(t.cells[s].polygon), 1e-12);
  EXPECT_EQ(r.boundary_edges.size(), t.cells[s].ring.size());
}

TEST(VoronoiSet, HalfPlaneConfigurationCoversHalfTheCore) {
  const double eps = 1.0 / 40;
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 20.0, 6.0}, 12));
  SpinConfig u = SpinConfig::constant(t.site_count(), -1, eps);
  for (SiteId s = 0; s < t.site_count(); ++s) u.values[s] = t.site(s).x > 0 ? 1 : -1;
  const RegionSet r = voronoi_set(t, u);
  const Rect core = t.core().scaled(eps);
  double in_core = 0.0;
  for (const Polygon& p : r.polygons) in_core += area(clip_rect(p, core));
  EXPECT_NEAR(in_core, 0.5 * core.area(), 0.05 * 0.5 * core.area());
}

TEST(SymmetricDifference, Basics) {
  const double eps = 0.1;
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 10.0, 2.0}, 6));
  const Rect core = t.core().scaled(eps);
  const PolygonSet whole({rect_polygon(core)});
  EXPECT_NEAR(symmetric_difference_area(voronoi_set(t, SpinConfig::constant(t.site_count(), -1, eps)), whole, core).area,
              core.area(), 1e-12);
  EXPECT_NEAR(symmetric_difference_area(voronoi_set(t, SpinConfig::constant(t.site_count(), 1, eps)), whole, core).area,
              0.0, 1e-9);
  // Region equal to a union of cells: build the target from those cells' boundary.
  SpinConfig u = SpinConfig::constant(t.site_count(), -1, eps);
  SiteId s = 0;
  while (!t.cells[s].certified) ++s;
  u.values[s] = 1;
  const PolygonSet cell({scaled_polygon(t.cells[s].polygon, eps)});
  EXPECT_NEAR(symmetric_difference_area(voronoi_set(t, u), cell, core).area, 0.0, 1e-12);
  EXPECT_THROW(PolygonSet({Polygon{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}), Error);
}

TEST(SymmetricDifference, HalfPlaneShrinksWithEpsilon) {
  // Fixed scaled core [-1, 1]^2 and target {x < 0}; the interface layer thins as eps halves.
  double previous = std::numeric_limits<double>::infinity();
  for (const double eps : {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80}) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 1.0 / eps, 6.0}, mix_seed(seed, eps)));
      SpinConfig u = SpinConfig::constant(t.site_count(), -1, eps);
      for (SiteId s = 0; s < t.site_count(); ++s) u.values[s] = t.site(s).x < 0 ? 1 : -1;
      const Rect core = t.core().scaled(eps);
      const PolygonSet half({rect_polygon({core.min, {0.0, core.max.y}})});
      const double d = symmetric_difference_area(voronoi_set(t, u), half, core).area;
      // Interface-width oracle: bounded by the total area of cells straddling x = 0.
      double straddle = 0.0;
      for (SiteId s = 0; s < t.site_count(); ++s) {
        const Rect b = bounding_box(t.cells[s].polygon);
        if (b.min.x <= 0.0 && b.max.x >= 0.0) straddle += eps * eps * area(clip_rect(t.cells[s].polygon, t.core()));
      }
      EXPECT_LE(d, straddle + 1e-9);
      total += d;
    }
    EXPECT_LE(total, previous);
    previous = total;
  }
}

TEST(EmpiricalMeasure, Basics) {
  const double eps = 0.1;
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 10.0, 2.0}, 9));
  const PolygonSet none;
  EXPECT_EQ(empirical_measure_distance(t, SpinConfig::constant(t.site_count(), -1, eps), none, 0.5).max_discrepancy, 0.0);
  SpinConfig u = SpinConfig::constant(t.site_count(), -1, eps);
  SiteId s = 0;
  while (!t.core().contains(t.site(s))) ++s;
  u.values[s] = 1;
  EXPECT_DOUBLE_EQ(empirical_measure_distance(t, u, none, 1.0).max_discrepancy, eps * eps);
  try {
    empirical_measure_distance(t, u, none, eps);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resolution_too_fine);
  }
}

TEST(EmpiricalMeasure, HalfPlaneDiscrepancyDecreases) {
  double previous = std::numeric_limits<double>::infinity();
  for (const double eps : {1.0 / 10, 1.0 / 20, 1.0 / 40}) {
    const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 1.0 / eps, 6.0}, mix_seed(21, eps)));
    SpinConfig u = SpinConfig::constant(t.site_count(), -1, eps);
    for (SiteId s = 0; s < t.site_count(); ++s) u.values[s] = t.site(s).x < 0 ? 1 : -1;
    const Rect core = t.core().scaled(eps);
    const PolygonSet half({rect_polygon({core.min, {0.0, core.max.y}})});
    const double d = empirical_measure_distance(t, u, half, 0.2).max_discrepancy;
    EXPECT_LT(d, previous);
    previous = d;
  }
}

}  // namespace
}  // namespace percovor
