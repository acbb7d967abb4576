#include <gtest/gtest.h>

#include "percovor/io.hpp"
#include "percovor/sampling.hpp"

namespace percovor {
namespace {

TEST(Io, HashAndNumberFormatting) {
  EXPECT_EQ(io::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(io::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(io::hex64(0xabcULL), "0000000000000abc");
  for (const double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) EXPECT_EQ(std::stod(io::fmt(x)), x);
}

TEST(Io, CsvLayout) {
  io::Csv csv({"a", "b", "c"});
  csv.cell(1).cell(0.5).cell(true);
  csv.end_row();
  csv.cell(std::string("x")).cell(std::uint64_t{7}).cell(std::int64_t{-3});
  csv.end_row();
  EXPECT_EQ(csv.str(), "a,b,c\n1,0.5,true\nx,7,-3\n");
}

TEST(Io, TessellationRoundTrip) {
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{1, -2}, 8.0, 3.0}, 5));
  const std::string text = io::tessellation_to_json(t);
  const Tessellation back = io::tessellation_from_json(text);
  ASSERT_EQ(back.site_count(), t.site_count());
  for (SiteId s = 0; s < t.site_count(); ++s) EXPECT_EQ(back.site(s), t.site(s));
  EXPECT_EQ(back.delaunay_edges.size(), t.delaunay_edges.size());
  EXPECT_EQ(back.points.seed, 5u);
  EXPECT_EQ(io::tessellation_to_json(back), text);

  const nlohmann::json j = nlohmann::json::parse(text);
  EXPECT_EQ(j.at("voronoi_edges").at("vertices").size(), t.voronoi_edges.size());
  EXPECT_EQ(j.at("cells").size(), t.site_count());
}

TEST(Io, TessellationParseErrors) {
  auto kind_of = [](const std::string& text) {
    try {
      io::tessellation_from_json(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::invalid_argument;
  };
  EXPECT_EQ(kind_of("{not json"), ErrorKind::parse_error);
  EXPECT_EQ(kind_of("{\"window\":{}}"), ErrorKind::parse_error);
  const Tessellation t = build_tessellation(sample_poisson(1.0, {{0, 0}, 6.0, 3.0}, 6));
  nlohmann::json j = nlohmann::json::parse(io::tessellation_to_json(t));
  j["delaunay_edges"][0] = nlohmann::json::array({0, 0});
  EXPECT_EQ(kind_of(j.dump()), ErrorKind::parse_error);
}

TEST(Io, SpinRoundTrip) {
  SpinConfig u = SpinConfig::constant(5, -1, 0.25);
  u.values[2] = 1;
  const SpinConfig back = io::spin_from_json(io::spin_to_json(u), 5);
  EXPECT_EQ(back.values, u.values);
  EXPECT_EQ(back.epsilon, 0.25);
  const SpinConfig obj = io::spin_from_json(R"({"epsilon":0.5,"values":{"0":1,"3":-1}})", 4);
  EXPECT_EQ(obj.values, (std::vector<std::int8_t>{1, 0, 0, -1}));
  EXPECT_THROW(io::spin_from_json(io::spin_to_json(u), 6), Error);
  EXPECT_THROW(io::spin_from_json(R"({"epsilon":0.5,"values":{"9":1}})", 4), Error);
}

TEST(Io, BlockGridJson) {
  const PointSet ps = sample_poisson(1.0, {{0, 0}, 30.0, 6.0}, 7);
  const BlockGrid g = classify_blocks(ps, 3.0, 1350.0, 1e-4);
  const nlohmann::json j = nlohmann::json::parse(io::block_grid_to_json(g));
  ASSERT_EQ(j.at("open").size(), static_cast<std::size_t>(g.side()));
  std::size_t open = 0, skipped = 0;
  for (const auto& row : j.at("open")) {
    for (const auto& v : row) {
      if (v.is_null()) ++skipped;
      else if (v.get<bool>()) ++open;
    }
  }
  EXPECT_EQ(open, g.open_count);
  EXPECT_EQ(skipped, g.skipped);
  EXPECT_DOUBLE_EQ(j.at("open_fraction").get<double>(), g.open_fraction());
}

}  // namespace
}  // namespace percovor
