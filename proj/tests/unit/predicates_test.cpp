#include <gtest/gtest.h>

#include <random>

#include "percovor/predicates.hpp"

namespace percovor {
namespace {

using predicates::incircle;
using predicates::incircle_perturbed;
using predicates::orient;

TEST(Orient, BasicSigns) {
  EXPECT_EQ(orient({0, 0}, {1, 0}, {0, 1}), 1);
  EXPECT_EQ(orient({0, 0}, {0, 1}, {1, 0}), -1);
  EXPECT_EQ(orient({0, 0}, {1, 1}, {2, 2}), 0);
}

TEST(Orient, ExactOnNearlyCollinearInputs) {
  // Points on the line y = x with coordinates that are not exactly representable sums.
  const Point a{0.1, 0.1}, b{0.3, 0.3};
  const Point on{0.7, 0.7};
  EXPECT_EQ(orient(a, b, on), 0);
  const Point above{0.7, std::nextafter(0.7, 1.0)};
  const Point below{0.7, std::nextafter(0.7, 0.0)};
  EXPECT_EQ(orient(a, b, above), 1);
  EXPECT_EQ(orient(a, b, below), -1);
}

TEST(Incircle, CocircularIsZeroAndPerturbationBreaksTie) {
  const Point a{1, 0}, b{0, 1}, c{-1, 0}, d{0, -1};
  EXPECT_EQ(incircle(a, b, c, d), 0);
  const int s = incircle_perturbed(a, b, c, d, 0, 1, 2, 3);
  EXPECT_NE(s, 0);
  // d has the largest id so its own lift dominates and it is treated as outside.
  EXPECT_EQ(s, -1);
  EXPECT_EQ(incircle_perturbed(a, b, c, d, 3, 1, 2, 0), orient(b, c, d));
}

TEST(Incircle, PerturbationIsConsistentUnderEvenPermutations) {
  // Rotating the triangle keeps orientation, so the perturbed sign must not change.
  const Point p[4] = {{2, 0}, {0, 2}, {-2, 0}, {0, -2}};
  for (std::uint32_t shift = 0; shift < 4; ++shift) {
    const std::uint32_t id[4] = {shift, (shift + 1) % 4, (shift + 2) % 4, (shift + 3) % 4};
    const int s0 = incircle_perturbed(p[0], p[1], p[2], p[3], id[0], id[1], id[2], id[3]);
    const int s1 = incircle_perturbed(p[1], p[2], p[0], p[3], id[1], id[2], id[0], id[3]);
    const int s2 = incircle_perturbed(p[2], p[0], p[1], p[3], id[2], id[0], id[1], id[3]);
    EXPECT_EQ(s0, s1);
    EXPECT_EQ(s0, s2);
    EXPECT_NE(s0, 0);
  }
}

TEST(Incircle, AgreesWithNaiveEvaluationAwayFromDegeneracy) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  int checked = 0;
  for (int i = 0; i < 20000; ++i) {
    Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)}, d{u(rng), u(rng)};
    if (orient(a, b, c) < 0) std::swap(b, c);
    const long double adx = (long double)a.x - d.x, ady = (long double)a.y - d.y;
    const long double bdx = (long double)b.x - d.x, bdy = (long double)b.y - d.y;
    const long double cdx = (long double)c.x - d.x, cdy = (long double)c.y - d.y;
    const long double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) +
                            (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
                            (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
    if (std::abs((double)det) < 1e-6) continue;
    EXPECT_EQ(incircle(a, b, c, d), det > 0 ? 1 : -1);
    ++checked;
  }
  EXPECT_GT(checked, 19000);
}

}  // namespace
}  // namespace percovor
