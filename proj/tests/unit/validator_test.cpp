#include <tpiet/error.hpp>
#include <tpiet/parser.hpp>
#include <tpiet/validator.hpp>
#include <tpiet/workspace.hpp>

#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace tpiet;

namespace {

class Validator : public ::testing::Test {
protected:
    static void SetUpTestSuite() { engine_ = new Engine(Engine::open(oracle::fixture_config())); }
    static void TearDownTestSuite() {
        delete engine_;
        engine_ = nullptr;
    }

    void check(std::string_view text) {
        const auto s = engine_->state();
        ql::validate(ql::parse(text), s->catalog());
    }

    template <class E>
    std::string rejection(std::string_view text) {
        try {
            check(text);
        } catch (const E& e) {
            return e.what();
        } catch (const std::exception& e) {
            ADD_FAILURE() << "wrong error type for " << text << ": " << e.what();
            return {};
        }
        ADD_FAILURE() << "accepted: " << text;
        return {};
    }

    static Engine* engine_;
};

Engine* Validator::engine_ = nullptr;

}  // namespace

TEST_F(Validator, ReferenceQueriesValidate) {
    for (const auto& q : oracle::reference_queries()) {
        EXPECT_NO_THROW(check(q.text)) << q.name;
    }
}

TEST_F(Validator, UnknownNames) {
    EXPECT_NE(rejection<NameError>("SELECT GIS r.id FROM roads r").find("roads"),
              std::string::npos);
    EXPECT_NE(rejection<NameError>("SELECT GIS l.colour FROM land l").find("line 1, column 12"),
              std::string::npos);
    rejection<NameError>("SELECT CUBE [Measures].[Profit] FROM [Sales]");
    rejection<NameError>("SELECT CUBE [Measures].[qty] FROM [Inventory]");
    rejection<NameError>("SELECT CUBE [Measures].[qty] FROM [Production] WHERE [Time].[1850]");
    rejection<NameError>("SELECT CUBE [Measures].[qty] FROM [Production] WHERE [Product].[wheat]");
    rejection<NameError>(
        "SELECT GIS l.id FROM land l WHERE l IN (SELECT CUBE "
        "filter([Land].[Land county].Members, [Measures].[qty] > 1) FROM [Production])");
}

TEST_F(Validator, KindMismatches) {
    const auto crosses = rejection<TypeError>(
        "SELECT GIS a.id FROM OVERLAP Airports a, land l WHERE Crosses(a, l)");
    EXPECT_NE(crosses.find("Crosses"), std::string::npos);
    rejection<TypeError>("SELECT GIS l.id FROM OVERLAP land l, Parcels p WHERE Crosses(l, p)");
    rejection<TypeError>("SELECT GIS a.id FROM Airports a WHERE area(a) > 1");
    rejection<TypeError>("SELECT GIS r.id FROM rivers r WHERE r.name > 3");
    rejection<TypeError>("SELECT GIS l.id FROM land l WHERE Distance(l.owner, l) < 3");
    rejection<TypeError>("SELECT GIS l.id FROM land l WHERE AT(l, [1,5])");
    EXPECT_NO_THROW(check("SELECT GIS r.id FROM OVERLAP rivers r, land l WHERE Crosses(r, l)"));
    EXPECT_NO_THROW(check("SELECT GIS r.id FROM OVERLAP rivers r, rivers s WHERE Crosses(r, s)"));
}

TEST_F(Validator, TemporalLiterals) {
    const auto year = rejection<SyntaxError>("SELECT GIS l.id FROM land l WHERE AT(l, 2009)");
    EXPECT_NE(year.find("range"), std::string::npos);
    EXPECT_NE(year.find("column 41"), std::string::npos);
    rejection<SyntaxError>("SELECT GIS l.id FROM land l WHERE COVERS(l, [20,10])");
    rejection<SyntaxError>("SELECT GIS l.id FROM land l WHERE COVERS(l, Now)");
    rejection<SyntaxError>("SELECT GIS l.id FROM land l WHERE COVERS(l, [1/1/2009,2/30/2009])");
    EXPECT_NO_THROW(check("SELECT GIS l.id FROM land l WHERE COVERS(l, 2009)"));
    EXPECT_NO_THROW(check("SELECT GIS l.id FROM land l WHERE DURING(l, [2009, Now])"));
    EXPECT_NO_THROW(check("SELECT GIS l.id FROM land l WHERE AT(l, Now)"));
}

TEST_F(Validator, InLinks) {
    // Cities has no mapping to the Land dimension.
    rejection<NameError>(
        "SELECT GIS c.id FROM Cities c WHERE c IN (SELECT CUBE "
        "filter([Land].[Land parcelId].Members, [Measures].[Parcel Sales] > 1) FROM [Sales])");
    // The filter level must be the mapped level.
    rejection<TypeError>(
        "SELECT GIS l.id FROM land l WHERE l IN (SELECT CUBE "
        "filter([Land].[region].Members, [Measures].[Parcel Sales] > 1) FROM [Sales])");
    // Only the filter form yields members.
    rejection<TypeError>(
        "SELECT GIS l.id FROM land l WHERE l IN (SELECT CUBE [Measures].[qty] FROM [Production])");
    rejection<TypeError>(
        "SELECT GIS l.id FROM land l WHERE l.owner IN (SELECT CUBE "
        "filter([Land].[Land parcelId].Members, [Measures].[qty] > 1) FROM [Production])");
    // The GIS side must yield object ids of one mapped layer.
    rejection<TypeError>(
        "SELECT CUBE [Measures].[qty] FROM [Production] WHERE [Land].[All Land] IN "
        "(SELECT GIS SNAPSHOT l.id, r.id FROM OVERLAP land l, rivers r)");
    rejection<NameError>(
        "SELECT CUBE [Measures].[qty] FROM [Production] WHERE [Land].[All Land] IN "
        "(SELECT GIS SNAPSHOT r.id FROM rivers r)");
}

TEST_F(Validator, ProjectionWithoutOverlap) {
    const auto msg = rejection<TypeError>("SELECT GIS l.id, r.id FROM land l, rivers r");
    EXPECT_NE(msg.find("OVERLAP"), std::string::npos);
    EXPECT_NO_THROW(check("SELECT GIS SNAPSHOT l.id, r.id FROM land l, rivers r"));
    EXPECT_NO_THROW(check("SELECT GIS l.id, l.owner FROM land l, rivers r"));
}

TEST(ResolveWindow, YearsExpandToTheirDays) {
    TimeConfig time;
    const ql::TimeLiteral y{ql::TimeLiteral::Kind::Year, "2009", {}};
    EXPECT_EQ(ql::resolve_window(y, time), time.year_range(2009));
    EXPECT_EQ(ql::resolve_window(ql::IntervalLiteral{y, y, {}}, time), time.year_range(2009));
    const ql::TimeLiteral d{ql::TimeLiteral::Kind::Date, "12/31/2009", {}};
    EXPECT_EQ(ql::resolve_window(ql::IntervalLiteral{y, d, {}}, time), time.year_range(2009));
    EXPECT_EQ(ql::resolve_window(ql::TimeLiteral{ql::TimeLiteral::Kind::Tick, "7", {}}, time),
              Interval(7, 7));
    EXPECT_THROW(ql::resolve_instant(y, time), SyntaxError);
}
