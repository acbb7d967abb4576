#ifndef PERCOVOR_PREDICATES_HPP
#define PERCOVOR_PREDICATES_HPP

// Orientation and in-circle tests with a floating-point filter and an exact
// rational fallback. The in-circle test is completed by a symbolic
// perturbation of the lifted coordinates, so it never returns zero for a
// non-degenerate triangle.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "percovor/point.hpp"

namespace percovor::predicates {

namespace detail {

using rational = boost::multiprecision::cpp_rational;

inline constexpr double machine_epsilon = std::numeric_limits<double>::epsilon() / 2.0;
inline constexpr double orient_bound = (3.0 + 16.0 * machine_epsilon) * machine_epsilon;
inline constexpr double incircle_bound = (10.0 + 96.0 * machine_epsilon) * machine_epsilon;

inline int sign(const rational& r) { return r.sign(); }

inline int orient_exact(Point a, Point b, Point c) {
  const rational acx = rational(a.x) - rational(c.x);
  const rational bcx = rational(b.x) - rational(c.x);
  const rational acy = rational(a.y) - rational(c.y);
  const rational bcy = rational(b.y) - rational(c.y);
  return sign(acx * bcy - acy * bcx);
}

inline int incircle_exact(Point a, Point b, Point c, Point d) {
  const rational adx = rational(a.x) - rational(d.x), ady = rational(a.y) - rational(d.y);
  const rational bdx = rational(b.x) - rational(d.x), bdy = rational(b.y) - rational(d.y);
  const rational cdx = rational(c.x) - rational(d.x), cdy = rational(c.y) - rational(d.y);
  const rational alift = adx * adx + ady * ady;
  const rational blift = bdx * bdx + bdy * bdy;
  const rational clift = cdx * cdx + cdy * cdy;
  const rational det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                       clift * (adx * bdy - bdx * ady);
  return sign(det);
}

}  // namespace detail

/// Sign of the signed area of (a, b, c): +1 counter-clockwise, -1 clockwise, 0 collinear.
inline int orient(Point a, Point b, Point c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  const double detsum = std::abs(detleft) + std::abs(detright);
  if (std::abs(det) > detail::orient_bound * detsum) return det > 0 ? 1 : -1;
  if (detsum == 0.0) return 0;
  return detail::orient_exact(a, b, c);
}

/// +1 if d lies strictly inside the circle through a, b, c (counter-clockwise),
/// -1 if strictly outside, 0 if on it.
inline int incircle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) > detail::incircle_bound * permanent) return det > 0 ? 1 : -1;
  if (permanent == 0.0) return 0;
  return detail::incircle_exact(a, b, c, d);
}

/// In-circle test under simulation of simplicity. Ties are broken by lifting
/// each point by an infinitesimal that is larger for larger ids, which is a
/// consistent perturbation toward a regular triangulation. Requires
/// orient(a, b, c) != 0.
inline int incircle_perturbed(Point a, Point b, Point c, Point d, std::uint32_t ia, std::uint32_t ib,
                              std::uint32_t ic, std::uint32_t id) {
  const int exact = incircle(a, b, c, d);
  if (exact != 0) return exact;
  // Coefficient of each point's lift in the 4x4 lifted determinant.
  struct Term {
    std::uint32_t id;
    int coefficient;
  };
  std::array<Term, 4> terms{{{ia, orient(b, c, d)},
                             {ib, orient(c, a, d)},
                             {ic, orient(a, b, d)},
                             {id, -orient(a, b, c)}}};
  // Larger id dominates.
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (terms[j].id > terms[i].id) std::swap(terms[i], terms[j]);
    }
  }
  // The perturbed determinant takes the sign of the dominant non-zero term.
  for (const Term& t : terms) {
    if (t.coefficient != 0) return t.coefficient;
  }
  return 0;
}

}  // namespace percovor::predicates

#endif  // PERCOVOR_PREDICATES_HPP
