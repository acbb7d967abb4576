#ifndef PERCOVOR_IO_HPP
#define PERCOVOR_IO_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "percovor/error.hpp"
#include "percovor/regular_cells.hpp"
#include "percovor/spin_energy.hpp"
#include "percovor/tessellation.hpp"

namespace percovor::io {

/// Shortest-round-trip-safe decimal form: 17 significant digits.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Minimal CSV builder: header row, '.' decimals, no quoting needed for our fields.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += '\n';
  }

  Csv& cell(const std::string& s) {
    sep();
    text_ += s;
    return *this;
  }
  Csv& cell(double x) { return cell(fmt(x)); }
  Csv& cell(std::uint64_t x) { return cell(std::to_string(x)); }
  Csv& cell(std::int64_t x) { return cell(std::to_string(x)); }
  Csv& cell(int x) { return cell(std::to_string(x)); }
  Csv& cell(bool b) { return cell(std::string(b ? "true" : "false")); }
  void end_row() {
    text_ += '\n';
    fresh_ = true;
  }

  [[nodiscard]] const std::string& str() const noexcept { return text_; }

 private:
  void sep() {
    if (!fresh_) text_ += ',';
    fresh_ = false;
  }
  std::string text_;
  bool fresh_ = true;
};

// ---------------------------------------------------------------------------
// Tessellation JSON

namespace detail {

template <class T, class F>
void write_array(std::string& out, const std::vector<T>& xs, F&& each) {
  out += '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    each(xs[i]);
  }
  out += ']';
}

}  // namespace detail

/// Schema: window, intensity, seed; sites {x, y}; delaunay_edges [[a, b]];
/// voronoi_vertices {x, y, circumradius, certified}; voronoi_edges
/// {vertices [[v0, v1]] with -1 for a ray, sites [[a, b]]}; cells [[vertex ring]].
inline std::string tessellation_to_json(const Tessellation& t) {
  std::string o;
  const Window& w = t.points.window;
  o += "{\"format\":\"percovor-tessellation\",\"version\":1,";
  o += "\"window\":{\"center\":[" + fmt(w.center.x) + "," + fmt(w.center.y) + "],\"half_width\":" + fmt(w.half_width) +
       ",\"buffer\":" + fmt(w.buffer) + "},";
  o += "\"intensity\":" + fmt(t.points.intensity) + ",\"seed\":" + std::to_string(t.points.seed) + ",";
  o += "\"sites\":{\"x\":";
  detail::write_array(o, t.points.sites, [&](const Point& p) { o += fmt(p.x); });
  o += ",\"y\":";
  detail::write_array(o, t.points.sites, [&](const Point& p) { o += fmt(p.y); });
  o += "},\"delaunay_edges\":";
  detail::write_array(o, t.delaunay_edges, [&](const DelaunayEdge& e) { o += "[" + std::to_string(e.a) + "," + std::to_string(e.b) + "]"; });
  o += ",\"voronoi_vertices\":{\"x\":";
  detail::write_array(o, t.voronoi_vertices, [&](const VoronoiVertex& v) { o += fmt(v.position.x); });
  o += ",\"y\":";
  detail::write_array(o, t.voronoi_vertices, [&](const VoronoiVertex& v) { o += fmt(v.position.y); });
  o += ",\"circumradius\":";
  detail::write_array(o, t.voronoi_vertices, [&](const VoronoiVertex& v) { o += fmt(v.circumradius); });
  o += ",\"certified\":";
  detail::write_array(o, t.voronoi_vertices, [&](const VoronoiVertex& v) { o += v.certified ? "true" : "false"; });
  o += "},\"voronoi_edges\":{\"vertices\":";
  detail::write_array(o, t.voronoi_edges, [&](const VoronoiEdge& e) {
    o += "[" + std::to_string(e.vertices[0]) + "," + std::to_string(e.vertices[1]) + "]";
  });
  o += ",\"sites\":";
  detail::write_array(o, t.voronoi_edges, [&](const VoronoiEdge& e) {
    o += "[" + std::to_string(e.sites[0]) + "," + std::to_string(e.sites[1]) + "]";
  });
  o += "},\"cells\":";
  detail::write_array(o, t.cells, [&](const Cell& c) {
    detail::write_array(o, c.ring, [&](VertexId v) { o += std::to_string(v); });
  });
  o += "}\n";
  return o;
}

/// Rebuilds the tessellation from the stored sites and window, then checks
/// the stored combinatorics against the rebuilt ones.
inline Tessellation tessellation_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
  try {
    PointSet ps;
    const auto& w = j.at("window");
    ps.window = {{w.at("center").at(0).get<double>(), w.at("center").at(1).get<double>()},
                 w.at("half_width").get<double>(),
                 w.at("buffer").get<double>()};
    ps.intensity = j.at("intensity").get<double>();
    ps.seed = j.at("seed").get<std::uint64_t>();
    const auto xs = j.at("sites").at("x").get<std::vector<double>>();
    const auto ys = j.at("sites").at("y").get<std::vector<double>>();
    if (xs.size() != ys.size()) throw Error(ErrorKind::parse_error, "site coordinate arrays differ in length");
    for (std::size_t i = 0; i < xs.size(); ++i) ps.sites.push_back({xs[i], ys[i]});
    Tessellation t = build_tessellation(std::move(ps));
    if (j.contains("delaunay_edges")) {
      const auto edges = j.at("delaunay_edges").get<std::vector<std::array<SiteId, 2>>>();
      if (edges.size() != t.delaunay_edges.size()) throw Error(ErrorKind::parse_error, "delaunay edge count mismatch");
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e][0] != t.delaunay_edges[e].a || edges[e][1] != t.delaunay_edges[e].b) {
          throw Error(ErrorKind::parse_error, "delaunay edge " + std::to_string(e) + " mismatch");
        }
      }
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
}

// ---------------------------------------------------------------------------
// Spins

inline std::string spin_to_json(const SpinConfig& u) {
  std::string o = "{\"epsilon\":" + fmt(u.epsilon) + ",\"values\":";
  detail::write_array(o, u.values, [&](std::int8_t v) { o += v > 0 ? "1" : "-1"; });
  o += "}\n";
  return o;
}

/// Accepts values as an array indexed by site id or as an object {"id": spin}.
inline SpinConfig spin_from_json(std::string_view text, std::size_t site_count) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    SpinConfig u;
    u.epsilon = j.at("epsilon").get<double>();
    u.values.assign(site_count, 0);
    const auto& values = j.at("values");
    if (values.is_array()) {
      if (values.size() != site_count) throw Error(ErrorKind::incomplete_configuration, "spin count mismatch");
      for (std::size_t i = 0; i < site_count; ++i) u.values[i] = static_cast<std::int8_t>(values[i].get<int>());
    } else {
      for (const auto& [key, v] : values.items()) {
        const std::size_t id = std::stoul(key);
        if (id >= site_count) throw Error(ErrorKind::parse_error, "site id out of range");
        u.values[id] = static_cast<std::int8_t>(v.get<int>());
      }
    }
    return u;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, e.what());
  }
}

// ---------------------------------------------------------------------------
// Blocks

inline std::string block_grid_to_json(const BlockGrid& g) {
  std::string o = "{\"L\":" + fmt(g.L) + ",\"K\":" + fmt(g.K) + ",\"alpha\":" + fmt(g.alpha) +
                  ",\"j_min\":" + std::to_string(g.j_min) + ",\"j_max\":" + std::to_string(g.j_max) +
                  ",\"open_fraction\":" + fmt(g.open_fraction()) + ",\"open\":[";
  for (int jy = g.j_min; jy <= g.j_max; ++jy) {
    o += jy == g.j_min ? "[" : ",[";
    for (int jx = g.j_min; jx <= g.j_max; ++jx) {
      const std::int8_t v = g.at(jx, jy);
      o += (jx == g.j_min ? "" : ",");
      o += v < 0 ? "null" : (v ? "true" : "false");
    }
    o += "]";
  }
  o += "]}\n";
  return o;
}

}  // namespace percovor::io

#endif  // PERCOVOR_IO_HPP
