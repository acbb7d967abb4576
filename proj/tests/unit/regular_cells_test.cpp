#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "percovor/max_flow.hpp"
#include "percovor/regular_cells.hpp"
#include "percovor/sampling.hpp"

namespace percovor {
namespace {

// Inradius >= a iff the polygon shrunk by a along every edge normal is non-empty.
bool oracle_has_inner_ball(const Polygon& poly, double a) {
  Polygon shrunk = poly;
  for (std::size_t i = 0; i < poly.size() && !shrunk.empty(); ++i) {
    const Point p = poly[i], q = poly[(i + 1) % poly.size()];
    const Point d = q - p;
    const Point outward = (1.0 / std::hypot(d.x, d.y)) * Point{d.y, -d.x};
    shrunk = clip_half_plane(shrunk, outward, dot(outward, p) - a);
  }
  return !shrunk.empty();
}

bool oracle_regular(const Tessellation& t, SiteId s, double a) {
  const Cell& c = t.cells[s];
  if (!c.certified || c.clipped) return false;
  double diam = 0.0;
  for (const Point& p : c.polygon) {
    for (const Point& q : c.polygon) diam = std::max(diam, distance(p, q));
  }
  return oracle_has_inner_ball(c.polygon, a) && diam <= 1.0 / a && static_cast<double>(c.polygon.size()) <= 1.0 / a;
}

std::vector<std::vector<int>> delaunay_adjacency(const Tessellation& t) {
  std::vector<std::vector<int>> adj(t.site_count());
  for (const DelaunayEdge& e : t.delaunay_edges) {
    adj[e.a].push_back(static_cast<int>(e.b));
    adj[e.b].push_back(static_cast<int>(e.a));
  }
  return adj;
}

// Jittered unit grid on [-n, n]^2 with the window core [-h, h]^2.
PointSet jittered_grid(int n, double h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PointSet ps;
  ps.window = {{0, 0}, h, n - h};
  for (int y = -n; y <= n; ++y) {
    for (int x = -n; x <= n; ++x) {
      ps.sites.push_back({x + 0.2 * (uniform01(rng) - 0.5), y + 0.2 * (uniform01(rng) - 0.5)});
    }
  }
  return ps;
}

RegularityReport report_from_mask(const std::vector<bool>& mask, double alpha) {
  RegularityReport r;
  r.alpha = alpha;
  r.regular = mask;
  for (SiteId s = 0; s < mask.size(); ++s) {
    if (mask[s]) r.regular_sites.push_back(s);
  }
  return r;
}

TEST(ClassifyRegular, VacuousAndPermissiveThresholds) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 15.0, 6.0}, 1));
  const RegularityReport none = classify_regular(t, 100.0);
  EXPECT_TRUE(none.regular_sites.empty());
  EXPECT_EQ(none.regular_fraction, 0.0);

  const RegularityReport all = classify_regular(t, 1e-4);
  for (SiteId s = 0; s < t.site_count(); ++s) {
    EXPECT_EQ(all.regular[s], t.cells[s].certified && !t.cells[s].clipped);
  }
  EXPECT_EQ(all.regular_fraction, 1.0);
  EXPECT_THROW(classify_regular(t, 0.0), Error);
}

TEST(ClassifyRegular, ExcludedCarriesFailedCriteria) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 15.0, 6.0}, 2));
  const RegularityReport r = classify_regular(t, 0.3);
  EXPECT_EQ(r.regular_sites.size() + r.excluded.size(), t.site_count());
  for (const auto& [s, f] : r.excluded) {
    ASSERT_NE(f, 0);
    if (f & fails_uncertified) {
      EXPECT_EQ(f, fails_uncertified);
      continue;
    }
    EXPECT_EQ((f & fails_inradius) != 0, r.metrics[s].inradius < 0.3);
    EXPECT_EQ((f & fails_diameter) != 0, r.metrics[s].diameter > 1.0 / 0.3);
    EXPECT_EQ((f & fails_edge_count) != 0, r.metrics[s].edge_count > 1.0 / 0.3);
  }
}

TEST(ClassifyRegular, MatchesBruteForceReclassification) {
  std::vector<double> fractions;
  for (const std::uint64_t seed : {11u, 12u, 13u}) {
    const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 50.0, 6.0}, seed));
    const RegularityReport r = classify_regular(t, 0.05);
    std::size_t core_certified = 0, core_regular = 0;
    for (SiteId s = 0; s < t.site_count(); ++s) {
      const bool expected = oracle_regular(t, s, 0.05);
      ASSERT_EQ(r.regular[s], expected) << "site " << s << " inradius " << r.metrics[s].inradius;
      if (t.core().contains(t.site(s)) && t.cells[s].certified) {
        ++core_certified;
        core_regular += expected ? 1 : 0;
      }
    }
    EXPECT_GT(core_certified, 9000u);
    EXPECT_DOUBLE_EQ(r.regular_fraction, static_cast<double>(core_regular) / static_cast<double>(core_certified));
    fractions.push_back(r.regular_fraction);
  }
  const auto [lo, hi] = std::minmax_element(fractions.begin(), fractions.end());
  EXPECT_LT(*hi - *lo, 0.02);
}

TEST(ClassifyRegular, DeterministicAndNested) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 20.0, 6.0}, 3));
  const auto metrics = certified_cell_metrics(t);
  EXPECT_EQ(classify_regular(t, 0.1).regular, classify_regular(t, 0.1, metrics).regular);
  const std::vector<double> alphas{0.02, 0.05, 0.1, 0.2, 0.3};
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
    const RegularityReport small = classify_regular(t, alphas[i], metrics);
    const RegularityReport large = classify_regular(t, alphas[i + 1], metrics);
    for (const SiteId s : large.regular_sites) EXPECT_TRUE(small.regular[s]);
    EXPECT_LE(large.regular_sites.size(), small.regular_sites.size());
  }
}

TEST(AlphaCluster, AllRegularIsOneComponentWithoutHoles) {
  const Tessellation t = build_tessellation(jittered_grid(12, 8.0, 4));
  const AlphaCluster c = alpha_cluster(report_from_mask(std::vector<bool>(t.site_count(), true), 0.1), t);
  EXPECT_TRUE(c.spanning);
  EXPECT_EQ(c.component_count, 1u);
  EXPECT_EQ(c.spanning_component.size(), t.site_count());
  EXPECT_TRUE(c.hole_sizes.empty());
}

TEST(AlphaCluster, CheckerboardExclusionMatchesFloodFill) {
  const PointSet ps = jittered_grid(12, 8.0, 5);
  const Tessellation t = build_tessellation(ps);
  // Exclude sites on every third row and column inside 3x3 checkerboard blocks.
  std::vector<bool> mask(t.site_count());
  for (SiteId s = 0; s < t.site_count(); ++s) {
    const long x = std::lround(t.site(s).x), y = std::lround(t.site(s).y);
    const long bx = (x + 12) / 3, by = (y + 12) / 3;
    mask[s] = ((bx + by) % 2 == 0) || ((x + 12) % 3 == 1 && (y + 12) % 3 == 1);
  }
  const AlphaCluster c = alpha_cluster(report_from_mask(mask, 0.1), t);
  const std::vector<int> labels = oracle::flood_fill_labels(delaunay_adjacency(t), mask);
  const int n_labels = *std::max_element(labels.begin(), labels.end()) + 1;
  EXPECT_EQ(c.component_count, static_cast<std::size_t>(n_labels));
  ASSERT_FALSE(c.spanning_component.empty());
  const int chosen = labels[c.spanning_component.front()];
  std::size_t chosen_size = 0;
  for (SiteId s = 0; s < t.site_count(); ++s) {
    EXPECT_EQ(c.member[s], labels[s] == chosen);
    chosen_size += labels[s] == chosen ? 1 : 0;
  }
  EXPECT_EQ(c.spanning_component.size(), chosen_size);
}

TEST(AlphaCluster, HoleIsReported) {
  const Tessellation t = build_tessellation(jittered_grid(12, 8.0, 6));
  std::vector<bool> mask(t.site_count(), true);
  std::size_t removed = 0;
  for (SiteId s = 0; s < t.site_count(); ++s) {
    if (distance(t.site(s), {0.0, 0.0}) < 1.6) {
      mask[s] = false;
      ++removed;
    }
  }
  const AlphaCluster c = alpha_cluster(report_from_mask(mask, 0.1), t);
  EXPECT_TRUE(c.spanning);
  ASSERT_EQ(c.hole_sizes.size(), 1u);
  EXPECT_EQ(c.hole_sizes[0], removed);
  EXPECT_GT(c.hole_diameters[0], 2.0);
}

TEST(AlphaCluster, SpanningForMostSeeds) {
  int spanning = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 50.0, 6.0}, seed));
    spanning += alpha_cluster(classify_regular(t, 0.05), t).spanning ? 1 : 0;
  }
  EXPECT_GE(spanning, 19);
}

TEST(Blocks, EmptyPointSetIsClosed) {
  PointSet ps;
  ps.window = {{0, 0}, 40.0, 0.0};
  const BlockGrid g = classify_blocks(ps, 2.0, 1000.0, 0.0);
  EXPECT_GT(g.evaluated, 0u);
  EXPECT_EQ(g.open_count, 0u);
  EXPECT_EQ(g.fails_c1, g.evaluated);
  EXPECT_THROW(classify_blocks(ps, 0.0, 10.0, 0.0), Error);
}

TEST(Blocks, OnePointPerSubsquareIsOpen) {
  const double L = 1.5;
  PointSet ps;
  ps.window = {{3, -2}, 15.0 * L, 0.0};
  for (int jy = -1; jy <= 1; ++jy) {
    for (int jx = -1; jx <= 1; ++jx) {
      for (int iy = -5; iy <= 4; ++iy) {
        for (int ix = -5; ix <= 4; ++ix) {
          ps.sites.push_back(ps.window.center + Point{10 * L * jx + L * (ix + 0.5), 10 * L * jy + L * (iy + 0.5)});
        }
      }
    }
  }
  const BlockGrid g = classify_blocks(ps, L, 1e9, 1e-6);
  EXPECT_EQ(g.evaluated, 9u);
  EXPECT_EQ(g.open_count, 9u);
  EXPECT_EQ(g.at(0, 0), 1);
  // Raising alpha past half the spacing breaks (c3), capping K below 100 breaks (c2).
  EXPECT_EQ(classify_blocks(ps, L, 1e9, 0.5 * L).fails_c3, 9u);
  EXPECT_EQ(classify_blocks(ps, L, 99.0, 1e-6).fails_c2, 9u);
}

TEST(Blocks, OpenFractionNonDecreasingInL) {
  const PointSet ps = sample_poisson(1.0, {{0, 0}, 200.0, 6.0}, 7);
  std::vector<double> literal, variant;
  for (const double L : {2.0, 4.0, 8.0}) {
    literal.push_back(classify_blocks(ps, L, 50.0 * L * L, 0.01).open_fraction());
    variant.push_back(classify_blocks(ps, L, 150.0 * L * L, 1e-4).open_fraction());
  }
  for (std::size_t i = 0; i + 1 < literal.size(); ++i) {
    EXPECT_GE(literal[i + 1], literal[i]);
    EXPECT_GE(variant[i + 1], variant[i]);
  }
  EXPECT_GT(variant.back(), 0.9);
}

TEST(Blocks, SoundnessOnOpenPairs) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 60.0, 6.0}, 8));
  const BlockGrid g = classify_blocks(t.points, 3.0, 1350.0, 1e-4);
  ASSERT_GT(g.open_count, 2u);
  const BlockSoundness s = check_block_soundness(t, g);
  EXPECT_GT(s.pairs_checked, 0u);
  EXPECT_GT(s.cells_checked, s.pairs_checked);
  EXPECT_EQ(s.violations, 0u);
}

TEST(MaxFlowTest, SmallNetworks) {
  // Classic 6-node example with max flow 23.
  MaxFlow f(6);
  f.add_arc(0, 1, 16);
  f.add_arc(0, 2, 13);
  f.add_arc(1, 2, 10);
  f.add_arc(2, 1, 4);
  f.add_arc(1, 3, 12);
  f.add_arc(3, 2, 9);
  f.add_arc(2, 4, 14);
  f.add_arc(4, 3, 7);
  f.add_arc(3, 5, 20);
  f.add_arc(4, 5, 4);
  EXPECT_EQ(f.run(0, 5), 23);
  MaxFlow none(3);
  none.add_arc(0, 1, 5);
  EXPECT_EQ(none.run(0, 2), 0);
}

TEST(Channels, EmptyClusterAndCoreCheck) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 30.0, 6.0}, 9));
  const AlphaCluster empty = alpha_cluster(classify_regular(t, 100.0), t);
  const ChannelReport r = channel_count(empty, t, {{0, 0}, {1, 0}, 20.0, 0.2});
  EXPECT_EQ(r.count, 0u);
  EXPECT_TRUE(r.witnesses.empty());
  try {
    channel_count(empty, t, {{28, 0}, {1, 0}, 20.0, 0.2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::out_of_core);
  }
  EXPECT_THROW(channel_count(empty, t, {{0, 0}, {1, 0}, 20.0, 1.0}), Error);
}

TEST(Channels, SingleFileGivesOne) {
  const Tessellation t = build_tessellation(jittered_grid(14, 10.0, 10));
  std::vector<bool> mask(t.site_count(), false);
  for (SiteId s = 0; s < t.site_count(); ++s) mask[s] = std::lround(t.site(s).x) == 0;
  const AlphaCluster c = alpha_cluster(report_from_mask(mask, 0.1), t);
  // Sides parallel to nu = (1, 0) sit at y = -4 and y = +4; the file runs along y.
  const ChannelReport r = channel_count(c, t, {{0, 0}, {1, 0}, 8.0, 0.25});
  EXPECT_EQ(r.count, 1u);
  EXPECT_TRUE(witnesses_valid(r, c, t));
  // Two parallel files joined at the hull row form one component with two channels.
  for (SiteId s = 0; s < t.site_count(); ++s) {
    mask[s] = std::abs(std::lround(t.site(s).x)) == 1 || std::lround(t.site(s).y) == 14;
  }
  const AlphaCluster two = alpha_cluster(report_from_mask(mask, 0.1), t);
  const ChannelReport r2 = channel_count(two, t, {{0, 0}, {1, 0}, 8.0, 0.4});
  EXPECT_EQ(r2.count, 2u);
  EXPECT_TRUE(witnesses_valid(r2, two, t));
}

TEST(Channels, RandomWitnessesAreValid) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 40.0, 6.0}, 11));
  const AlphaCluster c = alpha_cluster(classify_regular(t, 0.05), t);
  ASSERT_TRUE(c.spanning);
  std::size_t prev = 0;
  for (const double T : {10.0, 20.0, 40.0}) {
    const ChannelReport r = channel_count(c, t, {{0, 0}, unit_vector(0.3), T, 0.2});
    EXPECT_GT(r.count, prev);
    EXPECT_TRUE(witnesses_valid(r, c, t));
    prev = r.count;
  }
}

}  // namespace
}  // namespace percovor
