#include <tpiet/cli.hpp>
#include <tpiet/error.hpp>

#include "oracle.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tpiet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args, const std::string& input = {}) {
    args.insert(args.begin(), "tpiet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(input);
    std::ostringstream out, err;
    Outcome r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string config() { return oracle::fixture_config().string(); }

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

const char* kDistance =
    "SELECT GIS c.id, c.name, p.id, p.owner FROM OVERLAP Cities c, Parcels p "
    "WHERE Distance(c, p) < 100";

}  // namespace

TEST(Cli, LoadPrintsSummary) {
    const Outcome r = run({"load", config()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "layer Cities (polygon): 3 stages, 2 objects")) << r.out;
    EXPECT_TRUE(contains(r.out, "layer land (polygon)")) << r.out;
    EXPECT_TRUE(contains(r.out, "granularity day")) << r.out;
}

TEST(Cli, WorkspaceErrorsExitTwo) {
    const fs::path dir = oracle::copy_fixture("cli_missing");
    fs::remove(dir / "cities.csv");
    Outcome r = run({"load", (dir / "workspace.conf").string()});
    EXPECT_EQ(r.code, kExitWorkspaceError);
    EXPECT_TRUE(contains(r.err, "cities.csv")) << r.err;

    {
        std::ofstream f(dir / "cities.csv");
        f << "object_id,wkt,name,from,to\nc1,\"POINT(0 0)\",X,9,3\n";
    }
    r = run({"load", (dir / "workspace.conf").string()});
    EXPECT_EQ(r.code, kExitWorkspaceError);
    EXPECT_TRUE(contains(r.err, "cities.csv:2")) << r.err;
    fs::remove_all(dir);

    r = run({"load", "/nonexistent/workspace.conf"});
    EXPECT_EQ(r.code, kExitWorkspaceError);
    r = run({"bogus"});
    EXPECT_EQ(r.code, kExitWorkspaceError);
}

TEST(Cli, QueryTable) {
    const Outcome r = run({"query", config(), "-e", kDistance});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "Riverside")) << r.out;
    EXPECT_TRUE(contains(r.out, "Carla")) << r.out;
    EXPECT_TRUE(r.err.empty());
}

TEST(Cli, MalformedQueryShowsCaret) {
    const Outcome r = run({"query", config(), "-e", "SELECT GIS x.id FROM land l"});
    EXPECT_EQ(r.code, kExitQueryError);
    EXPECT_TRUE(contains(r.err, "error: ")) << r.err;
    EXPECT_TRUE(contains(r.err, "  SELECT GIS x.id FROM land l\n")) << r.err;
    EXPECT_TRUE(contains(r.err, "\n             ^\n")) << r.err;
    EXPECT_TRUE(r.out.empty());

    EXPECT_EQ(run({"query", config(), "-e", "SELECT GIS FROM"}).code, kExitQueryError);
    EXPECT_EQ(run({"query", config(), "-e", "SELECT GIS l.id FROM land l", "--format", "xml"}).code,
              kExitWorkspaceError);
}

TEST(Cli, GeoJsonSnapshotHasNoInterval) {
    const Outcome r = run({"query", config(), "--format", "geojson", "-e",
                       "SELECT GIS SNAPSHOT l.id, l.the_geom FROM land l"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc.at("type"), "FeatureCollection");
    // p2 has two stages with different geometries.
    ASSERT_EQ(doc.at("features").size(), 5u);
    for (const auto& f : doc.at("features")) {
        EXPECT_FALSE(f.at("properties").contains("from"));
        EXPECT_FALSE(f.at("properties").contains("to"));
        EXPECT_EQ(f.at("geometry").at("type"), "Polygon");
    }

    const Outcome t = run({"query", config(), "--format", "geojson", "-e",
                       "SELECT GIS l.id FROM land l WHERE l.id = 'p1'"});
    ASSERT_EQ(t.code, kExitOk) << t.err;
    const auto temporal = nlohmann::json::parse(t.out);
    ASSERT_EQ(temporal.at("features").size(), 1u);
    EXPECT_EQ(temporal["features"][0]["properties"]["to"], "Now");
}

TEST(Cli, ReplMatchesBatchOutput) {
    for (const char* fmt : {"table", "csv", "geojson"}) {
        const Outcome batch = run({"query", config(), "--format", fmt, "-e", kDistance});
        ASSERT_EQ(batch.code, kExitOk);
        // Split over two lines, terminated by a semicolon.
        std::string text = kDistance;
        const auto where = text.find("WHERE");
        const std::string input =
            text.substr(0, where) + "\n" + text.substr(where) + ";\n\\quit\n";
        const Outcome repl = run({"repl", config(), "--format", fmt}, input);
        EXPECT_EQ(repl.code, kExitOk) << repl.err;
        EXPECT_EQ(repl.out, batch.out) << fmt;
    }
}

TEST(Cli, ReplMetaCommands) {
    const Outcome r = run({"repl", config()},
                      "\\layers\n\\dims\n\\mapping\n\\now\n\\now 100\n\\format csv\n"
                      "SELECT GIS SNAPSHOT a.id FROM Airports a\n\n"
                      "\\explain SELECT GIS l.id FROM land l\n");
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "Airports (point)")) << r.out;
    EXPECT_TRUE(contains(r.out, "Land: parcelId < region < All")) << r.out;
    EXPECT_TRUE(contains(r.out, "  p3 (parcelId) -> r2")) << r.out;
    EXPECT_TRUE(contains(r.out, "Land.parcelId <-> land")) << r.out;
    EXPECT_TRUE(contains(r.out, "Now = tick 8035\n")) << r.out;
    EXPECT_TRUE(contains(r.out, "Now = tick 100\n")) << r.out;
    EXPECT_TRUE(contains(r.out, "a.id\na1\n")) << r.out;

    const Outcome bad = run({"repl", config()}, "\\frobnicate\n");
    EXPECT_EQ(bad.code, kExitQueryError);
    EXPECT_TRUE(contains(bad.err, "unknown command")) << bad.err;
}

TEST(Cli, OpSplitThenSnapshot) {
    const fs::path dir = oracle::copy_fixture("cli_split");
    const std::string cfg = (dir / "workspace.conf").string();
    Outcome r = run({"op", cfg, "split", "land", "p1", "@1/1/2000", "a:POLYGON((0 0,50 0,50 100,0 100,0 0))",
                 "b:POLYGON((50", "0,100", "0,100", "100,50", "100,50", "0))", "--rollup", "r1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "closed p1; opened a, b")) << r.out;

    // The op was saved: a fresh process sees the parts.
    r = run({"query", cfg, "--format", "csv", "-e",
             "SELECT GIS SNAPSHOT l.id FROM land l WHERE AT(l, 6/1/2005)"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "\na\n")) << r.out;
    EXPECT_TRUE(contains(r.out, "\nb\n")) << r.out;
    EXPECT_FALSE(contains(r.out, "p1")) << r.out;
    r = run({"query", cfg, "--format", "csv", "-e",
             "SELECT GIS SNAPSHOT l.id FROM land l WHERE AT(l, 6/1/1995)"});
    EXPECT_TRUE(contains(r.out, "p1")) << r.out;

    // Dry runs leave the files alone.
    r = run({"op", cfg, "--dry-run", "delete", "land", "a", "@1/1/2001"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    r = run({"query", cfg, "--format", "csv", "-e", "SELECT GIS CURRENT l.id FROM land l"});
    EXPECT_TRUE(contains(r.out, "\na\n")) << r.out;

    r = run({"op", cfg, "split", "land", "p2", "@1/1/2001", "c:POINT(0 0)", "d:POINT(1 1)"});
    EXPECT_EQ(r.code, kExitQueryError);
    r = run({"op", cfg, "delete", "land", "zz", "@1/1/2001"});
    EXPECT_EQ(r.code, kExitQueryError);
    EXPECT_TRUE(contains(r.err, "zz")) << r.err;
    fs::remove_all(dir);
}

TEST(Cli, ReplMergeUpdatesDimension) {
    const fs::path dir = oracle::copy_fixture("cli_merge");
    const Outcome r = run({"repl", (dir / "workspace.conf").string()},
                      "\\op merge land p3 p4 @1/1/2011 p3-4:POLYGON((0 100,200 100,200 200,0 200,"
                      "0 100)) --rollup r2\n\\dims\n");
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "closed p3, p4; opened p3-4")) << r.out;
    EXPECT_TRUE(contains(r.out, "  p3-4 (parcelId) -> r2 [7670,Now]")) << r.out;
    // Without \save the files are untouched.
    const Outcome again = run({"repl", (dir / "workspace.conf").string()}, "\\dims\n");
    EXPECT_FALSE(contains(again.out, "p3-4")) << again.out;
    fs::remove_all(dir);
}

TEST(Cli, Validate) {
    Outcome r = run({"validate", config()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "workspace ok")) << r.out;
    r = run({"validate", config(), "-e", "SELECT GIS l.id FROM land l"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "query ok\n");
    r = run({"validate", config(), "-e", "SELECT GIS l.colour FROM land l"});
    EXPECT_EQ(r.code, kExitQueryError);
    EXPECT_TRUE(contains(r.err, "colour")) << r.err;
}

TEST(Cli, WorkspaceFromEnvironment) {
    ::setenv("TPIET_WORKSPACE", config().c_str(), 1);
    const Outcome r = run({"query", "-e", "SELECT GIS SNAPSHOT r.name FROM rivers r"});
    ::unsetenv("TPIET_WORKSPACE");
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "Uruguay")) << r.out;
    EXPECT_EQ(run({"load"}).code, kExitWorkspaceError);
}

TEST(Diagnostic, CaretUnderColumn) {
    const SyntaxError e("unexpected token", 2, 5);
    EXPECT_EQ(diagnostic(e, "SELECT GIS\n  l.id FROM"),
              "error: " + std::string(e.what()) + "\n    l.id FROM\n      ^\n");
    EXPECT_EQ(diagnostic(std::runtime_error("boom")), "error: boom\n");
}
