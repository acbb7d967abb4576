#ifndef PERCOVOR_SAMPLING_HPP
#define PERCOVOR_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "percovor/error.hpp"
#include "percovor/point.hpp"

namespace percovor {

/// Square observation window. The core is where statistics are taken; the
/// buffer surrounds it so that core structures see no boundary.
struct Window {
  Point center{};
  double half_width = 1.0;
  double buffer = 0.0;

  [[nodiscard]] Rect core() const noexcept {
    return {{center.x - half_width, center.y - half_width}, {center.x + half_width, center.y + half_width}};
  }
  [[nodiscard]] Rect sampled() const noexcept {
    const double h = half_width + buffer;
    return {{center.x - h, center.y - h}, {center.x + h, center.y + h}};
  }
  [[nodiscard]] Window scaled(double s) const noexcept { return {s * center, s * half_width, s * buffer}; }

  /// Buffer wide enough that core Voronoi vertices are certified with overwhelming probability.
  static double default_buffer(double intensity) { return 6.0 / std::sqrt(intensity); }

  friend bool operator==(const Window&, const Window&) = default;
};

struct PointSet {
  std::vector<Point> sites;
  double intensity = 1.0;
  Window window{};
  std::uint64_t seed = 0;
};

/// splitmix64 finaliser; derives independent stream seeds from tuples.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return mix_seed(mix_seed(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t mix_seed(std::uint64_t a, double b) noexcept {
  std::uint64_t bits = 0;
  static_assert(sizeof(bits) == sizeof(b));
  std::memcpy(&bits, &b, sizeof(bits));
  return mix_seed(a, bits);
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Samples a homogeneous Poisson process on the sampled region of `window`.
/// The count is drawn first, then positions, so sampling intensity s^2 on W
/// reproduces intensity 1 on s*W scaled by 1/s when s is a power of two.
inline PointSet sample_poisson(double intensity, const Window& window, std::uint64_t seed) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw Error(ErrorKind::invalid_argument, "intensity must be positive");
  }
  if (!(window.half_width > 0.0) || !(window.buffer >= 0.0) || !std::isfinite(window.half_width) ||
      !std::isfinite(window.buffer)) {
    throw Error(ErrorKind::invalid_argument, "window must have positive half-width and non-negative buffer");
  }
  const Rect region = window.sampled();
  const double mean = intensity * region.width() * region.height();
  std::mt19937_64 rng(seed);
  std::poisson_distribution<std::int64_t> count_dist(mean);
  const auto count = static_cast<std::size_t>(count_dist(rng));

  PointSet out;
  out.intensity = intensity;
  out.window = window;
  out.seed = seed;
  out.sites.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform01(rng);
    const double v = uniform01(rng);
    out.sites.push_back({region.min.x + u * region.width(), region.min.y + v * region.height()});
  }
  // Coincident draws have probability zero; drop any that occur.
  std::vector<Point> sorted = out.sites;
  std::sort(sorted.begin(), sorted.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    std::vector<Point> unique_sites;
    unique_sites.reserve(out.sites.size());
    for (const Point& p : out.sites) {
      if (std::find(unique_sites.begin(), unique_sites.end(), p) == unique_sites.end()) unique_sites.push_back(p);
    }
    out.sites = std::move(unique_sites);
  }
  return out;
}

}  // namespace percovor

#endif  // PERCOVOR_SAMPLING_HPP
