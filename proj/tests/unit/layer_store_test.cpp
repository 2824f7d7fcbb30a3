#include <tpiet/csv.hpp>
#include <tpiet/error.hpp>
#include <tpiet/layer_store.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace tpiet;

namespace {

Geometry sq(double x, double y, double s = 1) {
    return Geometry::polygon({{x, y}, {x + s, y}, {x + s, y + s}, {x, y + s}, {x, y}});
}

LayerStore land_store() {
    LayerStore store;
    store.add_layer(Layer("Land", GeometryKind::Polygon, {{"owner", AttributeType::String}}));
    return store;
}

StageSpec spec(std::string id, Geometry g, std::string owner = "x") {
    return StageSpec{std::move(id), std::move(g), {{"owner", Value(std::move(owner))}}};
}

std::set<std::string> snapshot_ids(const Layer& l, Instant::Tick t) {
    std::set<std::string> ids;
    for (const Stage* s : l.snapshot(t)) ids.insert(s->object_id);
    return ids;
}

}  // namespace

TEST(LayerStore, CreateIsImmediatelyVisible) {
    auto store = land_store();
    const auto ev = store.create_object("Land", spec("p1", sq(0, 0)), Instant(0));
    EXPECT_EQ(ev.kind, ChangeKind::Create);
    EXPECT_EQ(ev.added, std::vector<std::string>{"p1"});
    const Layer& land = store.layer("land");  // lookup ignores case
    ASSERT_EQ(land.stages().size(), 1u);
    EXPECT_EQ(land.stages()[0].interval, Interval::since(0));
    EXPECT_EQ(snapshot_ids(land, 0), std::set<std::string>{"p1"});
    EXPECT_THROW(store.create_object("Land", spec("p1", sq(0, 0)), Instant(5)), InvariantError);
    EXPECT_THROW(store.create_object("Land", spec("q", Geometry::point(0, 0)), Instant(5)),
                 InvariantError);
    EXPECT_THROW(store.create_object("Roads", spec("q", sq(0, 0)), Instant(5)), NameError);
}

TEST(LayerStore, SplitClosesParentAtPreviousTick) {
    auto store = land_store();
    store.create_object("Land", spec("p1", sq(0, 0, 2)), Instant(0));
    const auto ev = store.split("Land", "p1", Instant(10),
                                {spec("p2", sq(0, 0)), spec("p3", sq(1, 0))});
    EXPECT_EQ(ev.removed, std::vector<std::string>{"p1"});
    EXPECT_EQ(ev.added, (std::vector<std::string>{"p2", "p3"}));
    EXPECT_EQ(ev.at, Instant(10));
    const Layer& land = store.layer("Land");
    EXPECT_EQ(land.history("p1").front()->interval, Interval(0, 9));
    EXPECT_EQ(land.live_stage("p2")->interval, Interval::since(10));
    EXPECT_EQ(snapshot_ids(land, 9), std::set<std::string>{"p1"});
    EXPECT_EQ(snapshot_ids(land, 10), (std::set<std::string>{"p2", "p3"}));
    // Children cover only half of the parent: the area lint fires.
    EXPECT_FALSE(ev.warnings.empty());
}

TEST(LayerStore, SplitPreconditions) {
    auto store = land_store();
    store.create_object("Land", spec("p1", sq(0, 0)), Instant(5));
    EXPECT_THROW(store.split("Land", "p1", Instant(10), {spec("p2", sq(0, 0))}), InvariantError);
    EXPECT_THROW(store.split("Land", "p1", Instant(5), {spec("a", sq(0, 0)), spec("b", sq(1, 1))}),
                 InvariantError);
    EXPECT_THROW(store.split("Land", "p1", Instant(9), {spec("p1", sq(0, 0)), spec("b", sq(1, 1))}),
                 InvariantError);
    EXPECT_THROW(store.split("Land", "zz", Instant(9), {spec("a", sq(0, 0)), spec("b", sq(1, 1))}),
                 InvariantError);
    // A failed operation leaves the store untouched.
    EXPECT_EQ(store.layer("Land").stages().size(), 1u);
    EXPECT_TRUE(store.layer("Land").stages()[0].interval.is_live());
}

TEST(LayerStore, MergeClosesPartsAndOpensTheUnion) {
    auto store = land_store();
    for (int i = 1; i <= 4; ++i) {
        store.create_object("Land", spec("p" + std::to_string(i), sq(i, 0)), Instant(0));
    }
    const Geometry merged = Geometry::polygon({{3, 0}, {5, 0}, {5, 1}, {3, 1}, {3, 0}});
    const auto ev = store.merge("Land", {"p3", "p4"}, Instant(20), spec("p3-4", merged));
    EXPECT_EQ(ev.removed, (std::vector<std::string>{"p3", "p4"}));
    EXPECT_EQ(ev.added, std::vector<std::string>{"p3-4"});
    EXPECT_TRUE(ev.warnings.empty());
    const Layer& land = store.layer("Land");
    EXPECT_EQ(snapshot_ids(land, 19), (std::set<std::string>{"p1", "p2", "p3", "p4"}));
    EXPECT_EQ(snapshot_ids(land, 20), (std::set<std::string>{"p1", "p2", "p3-4"}));
    EXPECT_THROW(store.merge("Land", {"p1"}, Instant(30), spec("m", sq(0, 0))), InvariantError);
    EXPECT_THROW(store.merge("Land", {"p1", "p3"}, Instant(30), spec("m", sq(0, 0))),
                 InvariantError);  // p3 is no longer live
    EXPECT_THROW(store.merge("Land", {"p1", "p2"}, Instant(30), spec("p1", sq(0, 0))),
                 InvariantError);  // merged id must be fresh
}

TEST(LayerStore, UpdateKeepsIdentity) {
    LayerStore store;
    store.add_layer(Layer("Airports", GeometryKind::Point, {}));
    store.create_object("Airports", StageSpec{"a1", Geometry::point(0, 0), {}}, Instant(0));
    const auto ev = store.update_object("Airports", "a1", Instant(101), Geometry::point(1, 1));
    EXPECT_EQ(ev.kind, ChangeKind::Update);
    const auto h = store.layer("Airports").history("a1");
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0]->interval, Interval(0, 100));
    EXPECT_EQ(h[1]->interval, Interval::since(101));
    EXPECT_EQ(store.layer("Airports").object_ids(), std::vector<std::string>{"a1"});
    EXPECT_THROW(store.update_object("Airports", "a1", Instant(101), Geometry::point(2, 2)),
                 InvariantError);
}

TEST(LayerStore, UpdateKeepsOrReplacesAttributes) {
    auto store = land_store();
    store.create_object("Land", spec("p1", sq(0, 0), "Ana"), Instant(0));
    store.update_object("Land", "p1", Instant(5), sq(0, 0, 2));
    const Layer& land = store.layer("Land");
    EXPECT_EQ(land.attribute_map(*land.live_stage("p1")).at("owner"), Value(std::string("Ana")));
    store.update_object("Land", "p1", Instant(6), sq(0, 0, 2), AttributeMap{{"owner", Value("Bo")}});
    EXPECT_EQ(land.attribute_map(*land.live_stage("p1")).at("owner"), Value(std::string("Bo")));
    EXPECT_THROW(store.update_object("Land", "p1", Instant(7), sq(0, 0),
                                     AttributeMap{{"colour", Value("red")}}),
                 InvariantError);
}

TEST(LayerStore, DeleteAndReincarnate) {
    auto store = land_store();
    store.create_object("Land", spec("p1", sq(0, 0)), Instant(0));
    store.delete_object("Land", "p1", Instant(21));
    EXPECT_EQ(store.layer("Land").history("p1").back()->interval, Interval(0, 20));
    EXPECT_THROW(store.delete_object("Land", "p1", Instant(25)), InvariantError);
    EXPECT_THROW(store.reincarnate("Land", "p1", Instant(21), sq(0, 0)), InvariantError);
    EXPECT_THROW(store.reincarnate("Land", "ghost", Instant(30), sq(0, 0)), InvariantError);
    store.reincarnate("Land", "p1", Instant(30), sq(5, 5));
    const Layer& land = store.layer("Land");
    EXPECT_EQ(land.history("p1").size(), 2u);
    EXPECT_EQ(land.history("p1").back()->interval, Interval::since(30));
    EXPECT_TRUE(snapshot_ids(land, 25).empty());
    EXPECT_THROW(store.reincarnate("Land", "p1", Instant(40), sq(0, 0)), InvariantError);
}

TEST(LayerStore, LifespanAndEmptySnapshots) {
    auto store = land_store();
    EXPECT_TRUE(snapshot_ids(store.layer("Land"), 0).empty());
    store.create_object("Land", spec("p1", sq(0, 0)), Instant(3));
    store.delete_object("Land", "p1", Instant(51));
    EXPECT_EQ(store.layer("Land").lifespan(), std::vector<Interval>{Interval(3, 50)});
    EXPECT_TRUE(snapshot_ids(store.layer("Land"), 2).empty());
}

TEST(LayerStore, RandomOperationSequencesKeepHistoriesConsistent) {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 50; ++round) {
        auto store = land_store();
        int next_id = 0;
        auto fresh = [&] { return "o" + std::to_string(next_id++); };
        Instant::Tick t = 0;
        for (int step = 0; step < 30; ++step) {
            t += 1 + static_cast<Instant::Tick>(rng() % 3);
            const Layer& land = store.layer("Land");
            std::vector<std::string> live, dead;
            for (const auto& id : land.object_ids()) {
                (land.live_stage(id) ? live : dead).push_back(id);
            }
            const std::size_t before = land.object_ids().size();
            std::size_t live_before = live.size();
            try {
                switch (rng() % 6) {
                    case 0: store.create_object("Land", spec(fresh(), sq(0, 0)), Instant(t)); break;
                    case 1:
                        if (live.empty()) break;
                        store.split("Land", live[rng() % live.size()], Instant(t),
                                    {spec(fresh(), sq(0, 0)), spec(fresh(), sq(1, 0))});
                        EXPECT_EQ(snapshot_ids(store.layer("Land"), t).size(), live_before + 1);
                        break;
                    case 2:
                        if (live.size() < 2) break;
                        store.merge("Land", {live[0], live[1]}, Instant(t), spec(fresh(), sq(0, 0)));
                        EXPECT_EQ(snapshot_ids(store.layer("Land"), t).size(), live_before - 1);
                        break;
                    case 3:
                        if (live.empty()) break;
                        store.update_object("Land", live[rng() % live.size()], Instant(t), sq(2, 2));
                        EXPECT_EQ(store.layer("Land").object_ids().size(), before);
                        break;
                    case 4:
                        if (live.empty()) break;
                        store.delete_object("Land", live[rng() % live.size()], Instant(t));
                        break;
                    default:
                        if (dead.empty()) break;
                        store.reincarnate("Land", dead[rng() % dead.size()], Instant(t + 1),
                                          sq(3, 3));
                        ++t;
                        break;
                }
            } catch (const InvariantError&) {
                // Reincarnating right after a delete is rejected; skip.
            }
        }
        const Layer& land = store.layer("Land");
        for (const auto& id : land.object_ids()) {
            const auto h = land.history(id);
            for (std::size_t i = 0; i + 1 < h.size(); ++i) {
                ASSERT_LT(h[i]->interval.to(), h[i + 1]->interval.from());
            }
        }
        for (Instant::Tick tick = 0; tick <= t; ++tick) {
            const auto snap = land.snapshot(tick);
            std::set<std::string> ids;
            for (const Stage* s : snap) {
                ASSERT_TRUE(ids.insert(s->object_id).second) << "duplicate at " << tick;
                ASSERT_TRUE(at(s->interval, Instant(tick)));
            }
            for (const auto& s : land.stages()) {
                ASSERT_EQ(at(s.interval, Instant(tick)), ids.count(s.object_id) > 0 &&
                                                            std::find(snap.begin(), snap.end(), &s) !=
                                                                snap.end());
            }
        }
    }
}

TEST(LayerCsv, LoadsAndReportsRowNumbers) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "tpiet_layer_csv";
    fs::create_directories(dir);
    TimeConfig time;
    {
        std::ofstream f(dir / "ok.csv");
        f << "object_id,wkt,owner,area_ha,from,to\n"
          << "p1,\"POLYGON((0 0,1 0,1 1,0 1,0 0))\",Ana,12.5,0,9\n"
          << "p1,\"POLYGON((0 0,2 0,2 2,0 2,0 0))\",Ana,40,10,Now\n"
          << "p2,\"POLYGON((5 5,6 5,6 6,5 6,5 5))\",Bo,3,1/1/1990,12/31/1990\n";
    }
    const Layer l = load_layer_csv("Land", GeometryKind::Polygon, dir / "ok.csv", time);
    EXPECT_EQ(l.stages().size(), 3u);
    EXPECT_EQ(l.schema()[1].type, AttributeType::Number);
    EXPECT_EQ(l.history("p2").front()->interval, Interval(0, 364));

    save_layer_csv(l, dir / "saved.csv");
    const Layer again = load_layer_csv("Land", GeometryKind::Polygon, dir / "saved.csv", time);
    EXPECT_EQ(again.stages(), l.stages());

    {
        std::ofstream f(dir / "bad.csv");
        f << "object_id,wkt,from,to\n"
          << "p1,\"POLYGON((0 0,1 0,1 1,0 1,0 0))\",0,9\n"
          << "p2,\"POLYGON((0 0,1 0,1 1,0 1,0 0))\",20,10\n";
    }
    try {
        load_layer_csv("Land", GeometryKind::Polygon, dir / "bad.csv", time);
        FAIL() << "from > to accepted";
    } catch (const LoadError& e) {
        EXPECT_EQ(e.row(), 3u);
        EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos);
    }
    fs::remove_all(dir);
}

TEST(Csv, QuotingRoundTrip) {
    const auto t = parse_csv("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n\n\"multi\nline\",2\n");
    ASSERT_EQ(t.records.size(), 2u);
    EXPECT_EQ(t.records[0].cells[0], "x,1");
    EXPECT_EQ(t.records[0].cells[1], "say \"hi\"");
    EXPECT_EQ(t.records[1].cells[0], "multi\nline");
    EXPECT_EQ(t.records[1].line, 4u);
    EXPECT_EQ(csv_line({"x,1", "say \"hi\"", "plain"}), "\"x,1\",\"say \"\"hi\"\"\",plain");
    EXPECT_THROW(parse_csv("a\n\"open"), LoadError);
}
