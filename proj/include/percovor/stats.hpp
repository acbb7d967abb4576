#ifndef PERCOVOR_STATS_HPP
#define PERCOVOR_STATS_HPP

#include <cmath>
#include <numeric>
#include <span>

#include <boost/math/distributions/students_t.hpp>

namespace percovor::stats {

inline double mean(std::span<const double> xs) noexcept {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double stddev(std::span<const double> xs) noexcept {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Half-width of the Student-t 95% confidence interval of the mean.
inline double ci95(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double q = boost::math::quantile(boost::math::students_t_distribution<double>(n - 1.0), 0.975);
  return q * stddev(xs) / std::sqrt(n);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) noexcept {
  LinearFit fit;
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace percovor::stats

#endif  // PERCOVOR_STATS_HPP
