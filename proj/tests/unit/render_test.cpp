#include <tpiet/render.hpp>

#include <gtest/gtest.h>

#include <json.hpp>

using namespace tpiet;

namespace {

ResultRelation sample(bool temporal) {
    ResultRelation r;
    r.columns = {"c.id", "c.the_geom", "c.pop"};
    r.temporal = temporal;
    const Geometry sq = parse_wkt("POLYGON((0 0,1 0,1 1,0 1,0 0))");
    r.rows.push_back({{Value("c1"), Value(sq), Value(1500.0)},
                      temporal ? std::optional(Interval::since(51)) : std::nullopt});
    r.rows.push_back({{Value("c2, west"), Value(sq), Value(2.5)},
                      temporal ? std::optional(Interval(0, 30)) : std::nullopt});
    return r;
}

}  // namespace

TEST(Render, Table) {
    ResultRelation r;
    r.columns = {"c.id", "p.id"};
    r.temporal = true;
    r.rows.push_back({{Value("c1"), Value("p1")}, Interval(10, 20)});
    r.rows.push_back({{Value("c1"), Value("p3")}, Interval::since(40)});
    EXPECT_EQ(render(r, OutputFormat::Table),
              "c.id | p.id | from | to\n"
              "-----+------+------+----\n"
              "c1   | p1   | 10   | 20\n"
              "c1   | p3   | 40   | Now\n"
              "(2 rows)\n");
}

TEST(Render, CsvQuotesCells) {
    EXPECT_EQ(render(sample(true), OutputFormat::Csv),
              "c.id,c.the_geom,c.pop,from,to\n"
              "c1,\"POLYGON((0 0,1 0,1 1,0 1,0 0))\",1500,51,Now\n"
              "\"c2, west\",\"POLYGON((0 0,1 0,1 1,0 1,0 0))\",2.5,0,30\n");
}

TEST(Render, GeoJsonTemporal) {
    const auto j = nlohmann::json::parse(render(sample(true), OutputFormat::GeoJson));
    EXPECT_EQ(j["type"], "FeatureCollection");
    ASSERT_EQ(j["features"].size(), 2u);
    const auto& f = j["features"][0];
    EXPECT_EQ(f["geometry"]["type"], "Polygon");
    EXPECT_EQ(f["geometry"]["coordinates"][0].size(), 5u);
    EXPECT_EQ(f["properties"]["c.id"], "c1");
    EXPECT_EQ(f["properties"]["c.pop"], 1500.0);
    EXPECT_EQ(f["properties"]["from"], 51);
    EXPECT_EQ(f["properties"]["to"], "Now");
    EXPECT_FALSE(f["properties"].contains("c.the_geom"));
}

TEST(Render, GeoJsonSnapshotHasNoInterval) {
    const auto j = nlohmann::json::parse(render(sample(false), OutputFormat::GeoJson));
    for (const auto& f : j["features"]) {
        EXPECT_FALSE(f["properties"].contains("from"));
        EXPECT_FALSE(f["properties"].contains("to"));
    }
}

TEST(Render, CubeResults) {
    CubeResult c;
    c.columns = {"Product", "Production Cost"};
    c.rows = {{Value("All_Products"), Value(2300.0)}};
    EXPECT_EQ(render(c, OutputFormat::Csv), "Product,Production Cost\nAll_Products,2300\n");
    const auto j = nlohmann::json::parse(render(c, OutputFormat::GeoJson));
    EXPECT_TRUE(j["features"][0]["geometry"].is_null());
    EXPECT_EQ(j["features"][0]["properties"]["Production Cost"], 2300.0);
    EXPECT_EQ(output_format_from_name("GeoJSON"), OutputFormat::GeoJson);
    EXPECT_FALSE(output_format_from_name("xml"));
}
