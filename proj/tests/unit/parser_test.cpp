#include <tpiet/ast.hpp>
#include <tpiet/error.hpp>
#include <tpiet/parser.hpp>

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tpiet;
using namespace tpiet::ql;

namespace {

std::vector<TokenKind> kinds(std::string_view text) {
    std::vector<TokenKind> out;
    for (const auto& t : tokenize(text)) out.push_back(t.kind);
    return out;
}

SyntaxError parse_error(std::string_view text) {
    try {
        parse(text);
    } catch (const SyntaxError& e) {
        return e;
    }
    ADD_FAILURE() << "parsed: " << text;
    return SyntaxError("none");
}

// ---- Random ASTs beyond what the executor generator produces ----------------

int uniform(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::string random_name(std::mt19937_64& rng) {
    static const std::vector<std::string> names{"Land", "All Land", "Parcel Sales", "p3-4",
                                                "2009", "x_1", "Production Cost", "r2"};
    return names[uniform(rng, 0, static_cast<int>(names.size()) - 1)];
}

MemberPath random_path(std::mt19937_64& rng, int parts, bool members = false) {
    MemberPath p;
    for (int i = 0; i < parts; ++i) p.parts.push_back(random_name(rng));
    p.members = members;
    return p;
}

TimeLiteral random_time(std::mt19937_64& rng, bool instant) {
    switch (uniform(rng, 0, instant ? 2 : 3)) {
        case 0: return {TimeLiteral::Kind::Tick, std::to_string(uniform(rng, 0, 999)), {}};
        case 1: return {TimeLiteral::Kind::Now, "Now", {}};
        case 2:
            return {TimeLiteral::Kind::Date,
                    std::to_string(uniform(rng, 1, 12)) + "/" + std::to_string(uniform(rng, 1, 28)) +
                        "/" + std::to_string(uniform(rng, 1990, 2020)),
                    {}};
        default: return {TimeLiteral::Kind::Year, std::to_string(uniform(rng, 1990, 2020)), {}};
    }
}

GisQuery random_gis(std::mt19937_64& rng, bool allow_cube);

CubeQuery random_cube(std::mt19937_64& rng, bool allow_gis) {
    CubeQuery q;
    q.cube = random_name(rng);
    if (uniform(rng, 0, 1) == 0) {
        q.select = ql::FilterSelect{random_path(rng, 2, true), random_path(rng, 2),
                                static_cast<CmpOp>(uniform(rng, 0, 5)),
                                uniform(rng, -50, 5000) / 4.0};
    } else {
        ql::TabularSelect t;
        for (int i = uniform(rng, 1, 3); i > 0; --i) t.items.push_back(random_path(rng, 2));
        if (uniform(rng, 0, 1)) t.axis = uniform(rng, 0, 1) ? Axis::Rows : Axis::Columns;
        q.select = t;
    }
    for (int i = uniform(rng, 0, 2); i > 0; --i) {
        SlicerAtom s{random_path(rng, uniform(rng, 1, 3)), std::nullopt};
        if (allow_gis && uniform(rng, 0, 2) == 0) s.in = random_gis(rng, false);
        q.where.push_back(std::move(s));
    }
    if (uniform(rng, 0, 1)) q.slice = random_path(rng, 2);
    return q;
}

GisQuery random_gis(std::mt19937_64& rng, bool allow_cube) {
    std::mt19937_64 seed(rng());
    oracle::GenOptions options;
    options.force_overlap = false;
    GisQuery q = oracle::random_instance(seed, options).query;
    // Decorate with literals the executor generator never emits.
    std::vector<Condition> extra;
    if (uniform(rng, 0, 1)) {
        extra.push_back(Condition{CompareAtom{Expr{AttrRef{q.sources[0].alias, "name", {}}},
                                              CmpOp::Ne,
                                              Expr{StringLit{"it's \"quoted\" \\ here"}}, {}}});
    }
    if (uniform(rng, 0, 1)) {
        extra.push_back(Condition{CompareAtom{Expr{NumberLit{-uniform(rng, 0, 100) / 8.0}},
                                              CmpOp::Le, Expr{NumberLit{1e-7}}, {}}});
    }
    if (uniform(rng, 0, 1)) {
        const auto p = kAllTemporalPredicates[uniform(rng, 0, 9)];
        TemporalArg arg = random_time(rng, true);
        if (!takes_instant(p) && uniform(rng, 0, 1)) {
            arg = IntervalLiteral{random_time(rng, false), random_time(rng, false), {}};
        }
        extra.push_back(Condition{TemporalAtom{p, q.sources[0].alias, arg, {}}});
    }
    if (allow_cube && uniform(rng, 0, 1)) {
        extra.push_back(Condition{InAtom{AttrRef{q.sources[0].alias, std::nullopt, {}},
                                         Box<CubeQuery>(random_cube(rng, false)), {}}});
    }
    if (!extra.empty()) {
        if (q.where) extra.push_back(*q.where);
        q.where = extra.size() == 1 ? extra[0] : Condition{AndNode{extra}};
    }
    return q;
}

}  // namespace

TEST(Lexer, Tokens) {
    EXPECT_EQ(kinds("SELECT GIS l.id"),
              (std::vector<TokenKind>{TokenKind::Identifier, TokenKind::Identifier,
                                      TokenKind::Identifier, TokenKind::Dot,
                                      TokenKind::Identifier, TokenKind::End}));
    EXPECT_EQ(kinds("[Measures].[Parcel Sales]"),
              (std::vector<TokenKind>{TokenKind::BracketName, TokenKind::Dot,
                                      TokenKind::BracketName, TokenKind::End}));
    const auto toks = tokenize("COVERS(r,[1/1/2009,12/31/2009])");
    EXPECT_EQ(toks[0].text, "COVERS");
    EXPECT_EQ(toks[4].kind, TokenKind::LBracket);
    EXPECT_EQ(toks[5].kind, TokenKind::Date);
    EXPECT_EQ(toks[5].text, "1/1/2009");
    EXPECT_EQ(toks[7].kind, TokenKind::Date);
    EXPECT_EQ(toks[8].kind, TokenKind::RBracket);
    EXPECT_EQ(tokenize("a <= b -- comment\n<> 'x'").size(), 6u);
    const auto s = tokenize(R"("a\"b")");
    EXPECT_EQ(s[0].kind, TokenKind::String);
    EXPECT_EQ(s[0].text, "a\"b");
}

TEST(Lexer, ErrorsCarryPositions) {
    try {
        tokenize("SELECT GIS\n  a # b");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 5u);
    }
    EXPECT_THROW(tokenize("\"open"), SyntaxError);
    EXPECT_THROW(tokenize("[open"), SyntaxError);
}

TEST(Parser, RiverSalesQuery) {
    const Query q = parse(oracle::reference_queries()[0].text);
    const auto& g = std::get<GisQuery>(q);
    EXPECT_FALSE(g.overlap);
    EXPECT_EQ(g.modifier, Modifier::None);
    ASSERT_EQ(g.sources.size(), 2u);
    EXPECT_EQ(g.sources[1], (Source{"rivers", "lr", {}}));
    const auto& terms = std::get<AndNode>(g.where->node).terms;
    ASSERT_EQ(terms.size(), 3u);
    const auto& in = std::get<InAtom>(terms[2].node);
    EXPECT_EQ(in.subject.alias, "l");
    const auto& cube = *std::get<Box<CubeQuery>>(in.source);
    EXPECT_EQ(cube.cube, "Sales");
    const auto& f = std::get<ql::FilterSelect>(cube.select);
    EXPECT_EQ(f.level.parts, (std::vector<std::string>{"Land", "Land parcelId"}));
    EXPECT_TRUE(f.level.members);
    EXPECT_EQ(f.threshold, 5000);
}

TEST(Parser, DistanceQuery) {
    const auto g = std::get<GisQuery>(parse(oracle::reference_queries()[1].text));
    EXPECT_TRUE(g.overlap);
    EXPECT_EQ(g.projection.size(), 2u);
    const auto& cmp = std::get<CompareAtom>(g.where->node);
    EXPECT_EQ(std::get<FuncCall>(cmp.lhs.node).function, Function::Distance);
    EXPECT_EQ(cmp.op, CmpOp::Lt);
    EXPECT_EQ(std::get<NumberLit>(cmp.rhs.node).value, 100);
}

TEST(Parser, CubeQueryWithGisSubquery) {
    const auto c = std::get<CubeQuery>(parse(oracle::reference_queries()[2].text));
    const auto& t = std::get<ql::TabularSelect>(c.select);
    EXPECT_EQ(t.items.size(), 3u);
    EXPECT_EQ(t.items[2].parts, (std::vector<std::string>{"Product", "All_Products"}));
    EXPECT_EQ(t.axis, Axis::Rows);
    ASSERT_EQ(c.where.size(), 2u);
    EXPECT_FALSE(c.where[0].in);
    ASSERT_TRUE(c.where[1].in);
    const GisQuery& sub = **c.where[1].in;
    EXPECT_EQ(sub.modifier, Modifier::Snapshot);
    EXPECT_TRUE(sub.overlap);
    const auto& terms = std::get<AndNode>(sub.where->node).terms;
    const auto& covers = std::get<TemporalAtom>(terms[1].node);
    EXPECT_EQ(covers.predicate, TemporalPredicate::Covers);
    const auto& iv = std::get<IntervalLiteral>(covers.arg);
    EXPECT_EQ(iv.from.kind, TimeLiteral::Kind::Date);
    EXPECT_EQ(iv.to.text, "12/31/2009");
}

TEST(Parser, TrailingSliceAttachesToCubeSubquery) {
    const auto g = std::get<GisQuery>(parse(oracle::reference_queries()[4].text));
    const auto& terms = std::get<AndNode>(g.where->node).terms;
    const auto& in = std::get<InAtom>(terms.back().node);
    const auto& cube = *std::get<Box<CubeQuery>>(in.source);
    ASSERT_TRUE(cube.slice);
    EXPECT_EQ(cube.slice->parts, (std::vector<std::string>{"Time", "2009"}));
    const auto& covers = std::get<TemporalAtom>(terms[1].node);
    EXPECT_EQ(std::get<IntervalLiteral>(covers.arg).from.kind, TimeLiteral::Kind::Year);
}

TEST(Parser, AllReferenceQueriesRoundTrip) {
    for (const auto& pq : oracle::reference_queries()) {
        const Query q = parse(pq.text);
        EXPECT_EQ(parse(print(q)), q) << pq.name << "\n" << print(q);
    }
}

TEST(Parser, KeywordsAreCaseInsensitive) {
    EXPECT_EQ(parse("select gis snapshot a.id from overlap L a, L b where a.id = b.id"),
              parse("SELECT GIS SNAPSHOT a.id FROM OVERLAP L a, L b WHERE a.id = b.id"));
    EXPECT_EQ(parse("SELECT GIS a FROM L a WHERE intersects(a, a)"),
              parse("SELECT GIS a FROM L a WHERE INTERSECTS(a, a)"));
}

TEST(Parser, AliasWithoutAttributeInIsSugarForId) {
    const auto g = std::get<GisQuery>(parse("SELECT GIS l FROM land l WHERE l IN (\"p1\", \"p2\")"));
    const auto& in = std::get<InAtom>(g.where->node);
    EXPECT_EQ(std::get<std::vector<std::string>>(in.source),
              (std::vector<std::string>{"p1", "p2"}));
}

TEST(Parser, Rejections) {
    struct Case {
        const char* text;
        const char* message;
        std::size_t line, column;
    };
    const std::vector<Case> cases{
        {"SELECT GIS SNAPSHOT CURRENT x FROM L l", "mutually exclusive", 1, 21},
        {"SELECT GIS a FROM L a, M a", "duplicate alias", 1, 26},
        {"SELECT GIS b.id FROM L a", "undeclared alias", 1, 12},
        {"SELECT GIS a FROM L a WHERE\n  Intersects(a, z)", "undeclared alias", 2, 17},
        {"SELECT GIS a FROM L a WHERE a.x >", "expected", 1, 34},
        {"SELECT GIS a FROM L a WHERE AT(a, [1,2]) AND", "expected", 1, 45},
        {"SELECT CUBE [M].[x] FROM [C] WHERE AND [Time].[2009]", "expected", 1, 36},
        {"SELECT GIS FROM L a", "expected", 1, 12},
        {"SELECT GIS a FROM L a WHERE a IN (SELECT CUBE filter([L].[l].Members, [Measures].[m] > 1) "
         "FROM [C] WHERE [L].[x] IN (SELECT GIS b.id FROM L b))",
         "nest", 1, 0},
    };
    for (const auto& c : cases) {
        const SyntaxError e = parse_error(c.text);
        EXPECT_NE(e.bare_message().find(c.message), std::string::npos)
            << c.text << ": " << e.what();
        EXPECT_EQ(e.line(), c.line) << c.text;
        if (c.column != 0) {
            EXPECT_EQ(e.column(), c.column) << c.text << ": " << e.what();
        }
        EXPECT_GE(e.column(), 1u);
    }
}

TEST(Parser, ErrorPositionsLieInsideTheInput) {
    std::mt19937_64 rng(17);
    const std::string base = oracle::reference_queries()[2].text;
    for (int i = 0; i < 300; ++i) {
        std::string text = base;
        // Drop one random token-ish chunk.
        const auto at = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(text.size()) - 1));
        text.erase(at, static_cast<std::size_t>(uniform(rng, 1, 6)));
        try {
            parse(text);
        } catch (const SyntaxError& e) {
            ASSERT_GE(e.line(), 1u) << text;
            std::size_t lines = 1 + static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
            ASSERT_LE(e.line(), lines) << text;
            ASSERT_GE(e.column(), 1u) << text;
        }
    }
}

TEST(Parser, RandomAstsRoundTrip) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 400; ++i) {
        const Query q = uniform(rng, 0, 2) == 0 ? Query(random_cube(rng, true))
                                                : Query(random_gis(rng, true));
        const std::string text = print(q);
        Query back;
        ASSERT_NO_THROW(back = parse(text)) << text;
        ASSERT_EQ(back, q) << text << "\n--- reprinted ---\n" << print(back);
    }
}
