#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "percovor/cell_metrics.hpp"
#include "percovor/sampling.hpp"
#include "percovor/tessellation.hpp"

namespace percovor {
namespace {

PointSet make_points(std::vector<Point> sites, Window window = {{0, 0}, 10.0, 0.0}) {
  PointSet ps;
  ps.sites = std::move(sites);
  ps.window = window;
  return ps;
}

TEST(SamplePoisson, RejectsInvalidArguments) {
  EXPECT_THROW(sample_poisson(0.0, {{0, 0}, 1.0, 0.0}, 1), Error);
  EXPECT_THROW(sample_poisson(-1.0, {{0, 0}, 1.0, 0.0}, 1), Error);
  EXPECT_THROW(sample_poisson(1.0, {{0, 0}, 0.0, 0.0}, 1), Error);
  EXPECT_THROW(sample_poisson(1.0, {{0, 0}, 1.0, -1.0}, 1), Error);
}

TEST(SamplePoisson, DeterministicPerSeed) {
  const Window w{{1, 2}, 5.0, 1.0};
  const PointSet a = sample_poisson(1.0, w, 42);
  const PointSet b = sample_poisson(1.0, w, 42);
  EXPECT_EQ(a.sites, b.sites);
  EXPECT_NE(a.sites, sample_poisson(1.0, w, 43).sites);
  for (const Point& p : a.sites) EXPECT_TRUE(w.sampled().contains(p));
}

TEST(SamplePoisson, TinyWindowIsAlmostAlwaysEmpty) {
  int empty = 0;
  for (std::uint64_t s = 0; s < 200; ++s) empty += sample_poisson(1.0, {{0, 0}, 1e-9, 0.0}, s).sites.empty();
  EXPECT_EQ(empty, 200);
}

TEST(SamplePoisson, CountHasPoissonMean) {
  // Sampled area 400 at unit intensity: mean 400, sd 20; 10^4 seeds give SE 0.2.
  const Window w{{0, 0}, 10.0, 0.0};
  double sum = 0.0, sum2 = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const double n = static_cast<double>(sample_poisson(1.0, w, static_cast<std::uint64_t>(s)).sites.size());
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / seeds;
  const double var = sum2 / seeds - mean * mean;
  EXPECT_NEAR(mean, 400.0, 3.0 * 20.0 / std::sqrt(seeds));
  EXPECT_NEAR(var, 400.0, 40.0);
}

TEST(SamplePoisson, IntensityScalingReusesStream) {
  const Window w{{0, 0}, 7.0, 1.5};
  const PointSet dense = sample_poisson(4.0, w, 9);
  const PointSet unit = sample_poisson(1.0, w.scaled(2.0), 9);
  ASSERT_EQ(dense.sites.size(), unit.sites.size());
  for (std::size_t i = 0; i < dense.sites.size(); ++i) {
    EXPECT_EQ(dense.sites[i].x, 0.5 * unit.sites[i].x);
    EXPECT_EQ(dense.sites[i].y, 0.5 * unit.sites[i].y);
  }
}

TEST(BuildTessellation, ErrorsOnTooFewOrCollinearSites) {
  EXPECT_THROW(build_tessellation(make_points({{0, 0}, {1, 1}})), Error);
  try {
    build_tessellation(make_points({{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_configuration);
  }
}

TEST(BuildTessellation, TriangleHasOneVertexAndThreeRays) {
  const Tessellation t = build_tessellation(make_points({{0, 0}, {4, 0}, {0, 3}}));
  EXPECT_EQ(t.delaunay_edges.size(), 3u);
  ASSERT_EQ(t.voronoi_vertices.size(), 1u);
  EXPECT_NEAR(t.voronoi_vertices[0].position.x, 2.0, 1e-12);
  EXPECT_NEAR(t.voronoi_vertices[0].position.y, 1.5, 1e-12);
  EXPECT_NEAR(t.voronoi_vertices[0].circumradius, 2.5, 1e-12);
  int rays = 0;
  for (const VoronoiEdge& e : t.voronoi_edges) rays += !e.bounded();
  EXPECT_EQ(rays, 3);
  for (const Cell& c : t.cells) {
    EXPECT_TRUE(c.unbounded);
    EXPECT_TRUE(c.clipped);
  }
}

TEST(BuildTessellation, PerturbedSquareWithCenter) {
  const std::vector<Point> sites{{0.0, 0.0}, {1.0, 0.003}, {0.998, 1.0}, {0.002, 0.997}, {0.5, 0.5}};
  const Tessellation t = build_tessellation(make_points(sites));
  EXPECT_EQ(t.delaunay_edges.size(), 8u);
  const Cell& center = t.cells[4];
  EXPECT_FALSE(center.unbounded);
  EXPECT_EQ(center.ring.size(), 4u);
  const auto oracle = oracle::voronoi_cell_by_half_planes(sites, 4, {-10, -10}, {10, 10});
  ASSERT_EQ(oracle.size(), 4u);
  for (const Point& p : center.polygon) {
    double best = 1e9;
    for (const Point& q : oracle) best = std::min(best, distance(p, q));
    EXPECT_LT(best, 1e-12);
  }
}

TEST(BuildTessellation, ExactlyCocircularSquareIsTriangulated) {
  // Four cocircular points: the perturbation picks one diagonal consistently.
  const Tessellation t = build_tessellation(make_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  EXPECT_EQ(t.triangles.size(), 2u);
  EXPECT_EQ(t.delaunay_edges.size(), 5u);
}

TEST(BuildTessellation, GridInputWithManyDegeneracies) {
  std::vector<Point> sites;
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) sites.push_back({static_cast<double>(i), static_cast<double>(j)});
  }
  const Tessellation t = build_tessellation(make_points(sites, {{5.5, 5.5}, 20.0, 0.0}));
  // Triangulation of a convex point set with h hull points: 2n - h - 2 triangles.
  const std::size_t n = sites.size(), hull = 44;
  EXPECT_EQ(t.triangles.size(), 2 * n - hull - 2);
  EXPECT_EQ(t.delaunay_edges.size(), 3 * n - hull - 3);
  for (const auto& tri : t.triangles) {
    const Point a = t.site(tri[0]), b = t.site(tri[1]), c = t.site(tri[2]);
    EXPECT_GT(cross(b - a, c - a), 0.0);
    for (const Point& p : sites) EXPECT_LE(oracle::incircle_value(a, b, c, p), 0.0L);
  }
}

class RandomTessellation : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomTessellation, EmptyCircumcircleAgainstAllSites) {
  const PointSet ps = sample_poisson(1.0, {{0, 0}, 15.0, 1.0}, GetParam());
  const Tessellation t = build_tessellation(ps);
  std::size_t violations = 0;
  for (const auto& tri : t.triangles) {
    const Point a = t.site(tri[0]), b = t.site(tri[1]), c = t.site(tri[2]);
    for (SiteId s = 0; s < t.site_count(); ++s) {
      if (s == tri[0] || s == tri[1] || s == tri[2]) continue;
      if (oracle::incircle_value(a, b, c, t.site(s)) > 0) ++violations;
    }
  }
  EXPECT_EQ(violations, 0u);
}

TEST_P(RandomTessellation, EulerAndDualityCounts) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 12.0, 3.0}, GetParam()));
  const long v = static_cast<long>(t.site_count());
  const long e = static_cast<long>(t.delaunay_edges.size());
  const long f = static_cast<long>(t.triangles.size()) + 1;
  EXPECT_EQ(v - e + f, 2);
  ASSERT_EQ(t.voronoi_edges.size(), t.delaunay_edges.size());
  std::size_t certified_voronoi = 0, certified_delaunay = 0;
  for (EdgeId i = 0; i < t.voronoi_edges.size(); ++i) {
    const VoronoiEdge& ve = t.voronoi_edges[i];
    const DelaunayEdge& de = t.delaunay_edges[i];
    EXPECT_EQ(std::min(ve.sites[0], ve.sites[1]), de.a);
    EXPECT_EQ(std::max(ve.sites[0], ve.sites[1]), de.b);
    if (ve.bounded() && t.voronoi_vertices[ve.vertices[0]].certified && t.voronoi_vertices[ve.vertices[1]].certified) {
      ++certified_voronoi;
    }
    if (t.edge_certified(i)) ++certified_delaunay;
    // Both triangles of a bounded dual edge contain the Delaunay edge.
    for (const VertexId v : ve.vertices) {
      if (v == no_vertex) continue;
      const auto& s = t.voronoi_vertices[v].sites;
      EXPECT_TRUE(std::find(s.begin(), s.end(), de.a) != s.end());
      EXPECT_TRUE(std::find(s.begin(), s.end(), de.b) != s.end());
    }
  }
  EXPECT_EQ(certified_voronoi, certified_delaunay);
  for (std::size_t v = 0; v < t.voronoi_vertices.size(); ++v) {
    std::set<EdgeId> incident(t.vertex_edges[v].begin(), t.vertex_edges[v].end());
    EXPECT_EQ(incident.size(), 3u);
  }
}

TEST_P(RandomTessellation, CellsMatchHalfPlaneOracle) {
  const PointSet ps = sample_poisson(1.0, {{0, 0}, 8.0, 4.0}, GetParam());
  const Tessellation t = build_tessellation(ps);
  const Rect box = t.sampled_region();
  std::mt19937_64 rng(GetParam());
  int checked = 0;
  for (int attempt = 0; attempt < 200 && checked < 20; ++attempt) {
    const SiteId s = static_cast<SiteId>(rng() % t.site_count());
    const Cell& cell = t.cells[s];
    if (!cell.certified) continue;
    const auto oracle_poly = oracle::voronoi_cell_by_half_planes(ps.sites, s, box.min, box.max);
    ASSERT_EQ(oracle_poly.size(), cell.polygon.size());
    for (const Point& p : cell.polygon) {
      double best = 1e9;
      for (const Point& q : oracle_poly) best = std::min(best, distance(p, q));
      EXPECT_LT(best, 1e-9);
    }
    EXPECT_GT(signed_area(cell.polygon), 0.0);
    ++checked;
  }
  EXPECT_EQ(checked, 20);
}

TEST_P(RandomTessellation, CellsAreConvexAndTileTheRegion) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 6.0, 0.0}, GetParam()));
  double total = 0.0;
  for (const Cell& cell : t.cells) {
    total += area(cell.polygon);
    const std::size_t n = cell.polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = cell.polygon[i], b = cell.polygon[(i + 1) % n], c = cell.polygon[(i + 2) % n];
      EXPECT_GE(cross(b - a, c - b), -1e-9);
    }
  }
  EXPECT_NEAR(total, t.sampled_region().area(), 1e-8);
}

TEST_P(RandomTessellation, ScalingEquivariance) {
  const PointSet dense = sample_poisson(4.0, {{0, 0}, 6.0, 2.0}, GetParam());
  const PointSet unit = sample_poisson(1.0, Window{{0, 0}, 6.0, 2.0}.scaled(2.0), GetParam());
  const Tessellation a = build_tessellation(dense);
  const Tessellation b = build_tessellation(unit);
  ASSERT_EQ(a.triangles, b.triangles);
  for (std::size_t v = 0; v < a.voronoi_vertices.size(); ++v) {
    const Point pa = a.voronoi_vertices[v].position, pb = 0.5 * b.voronoi_vertices[v].position;
    EXPECT_LE(distance(pa, pb), 1e-9 * std::max(1.0, norm(pa)));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomTessellation, ::testing::Values(1u, 2u, 3u, 4u, 5u));

TEST(CellMetrics, SquareAndTriangle) {
  const CellMetrics sq = polygon_metrics(Polygon{{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  EXPECT_NEAR(sq.inradius, 1.0, 1e-12);
  EXPECT_NEAR(sq.diameter, 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(sq.edge_count, 4);
  const double s = 3.0;
  const CellMetrics tri = polygon_metrics(Polygon{{0, 0}, {s, 0}, {s / 2, s * std::sqrt(3.0) / 2}});
  EXPECT_NEAR(tri.inradius, s / (2.0 * std::sqrt(3.0)), 1e-12);
  EXPECT_NEAR(tri.diameter, s, 1e-12);
  EXPECT_EQ(tri.edge_count, 3);
}

TEST(CellMetrics, RandomCellsMatchGridOracle) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 8.0, 4.0}, 11));
  int checked = 0;
  for (SiteId s = 0; s < t.site_count() && checked < 40; ++s) {
    if (!t.cells[s].certified) continue;
    const CellMetrics m = cell_metrics(t, s);
    const double ref = oracle::inradius_by_grid(t.cells[s].polygon);
    EXPECT_NEAR(m.inradius, ref, 1e-6 * ref);
    EXPECT_GE(m.diameter, 2.0 * m.inradius);
    EXPECT_GE(m.edge_count, 3);
    EXPECT_FALSE(m.clipped);
    ++checked;
  }
  EXPECT_EQ(checked, 40);
}

TEST(CellMetrics, UnboundedUnclippedCellIsAnError) {
  Tessellation t = build_tessellation(make_points({{0, 0}, {4, 0}, {0, 3}}));
  t.cells[0].clipped = false;
  try {
    cell_metrics(t, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unbounded_cell);
  }
}

}  // namespace
}  // namespace percovor
