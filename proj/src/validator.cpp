#include <tpiet/validator.hpp>

#include <tpiet/error.hpp>
#include <tpiet/text.hpp>

#include <map>
#include <set>

namespace tpiet::ql {

namespace {

std::string where(const SourcePos& pos) {
    if (pos.line == 0) return "";
    return " at line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column);
}

[[noreturn]] void name_error(const std::string& message, const SourcePos& pos) {
    throw NameError(message + where(pos));
}

[[noreturn]] void type_error(const std::string& message, const SourcePos& pos) {
    throw TypeError(message + where(pos));
}

std::string q(std::string_view s) { return "'" + std::string(s) + "'"; }

/// Static type of an expression; geometries also carry their layer kind.
struct ExprType {
    ValueType type;
    std::optional<GeometryKind> kind;
};

class Checker {
public:
    explicit Checker(const Catalog& catalog) : cat_(catalog) {}

    void gis(const GisQuery& query) {
        std::map<std::string, const Layer*> scope;
        for (const auto& s : query.sources) {
            const Layer* layer = cat_.layers.find(s.layer);
            if (layer == nullptr) name_error("unknown layer " + q(s.layer), s.pos);
            scope[s.alias] = layer;
        }
        std::swap(scope_, scope);

        std::set<std::string> projected;
        for (const auto& ref : query.projection) {
            attr_type(ref);
            projected.insert(ref.alias);
        }
        if (!query.overlap && query.modifier == Modifier::None && projected.size() > 1) {
            type_error(
                "projecting several aliases without OVERLAP leaves the result interval "
                "ambiguous; add OVERLAP, SNAPSHOT or CURRENT",
                query.pos);
        }
        if (query.where) condition(*query.where);
        std::swap(scope_, scope);
    }

    void cube(const CubeQuery& query) {
        const Cube* c = cat_.warehouse.find_cube(query.cube);
        if (c == nullptr) name_error("unknown cube " + q(query.cube), query.pos);

        if (const auto* f = std::get_if<FilterSelect>(&query.select)) {
            level_path(*c, f->level);
            measure_path(*c, f->measure);
        } else {
            const auto& t = std::get<TabularSelect>(query.select);
            const MemberPath* row = nullptr;
            for (const auto& item : t.items) {
                if (is_measure(item)) {
                    measure_path(*c, item);
                } else {
                    if (row != nullptr) {
                        type_error("at most one dimension item may be placed on the axis",
                                   item.pos);
                    }
                    row = &item;
                    level_or_member(*c, item);
                }
            }
        }

        bool seen_in = false;
        for (const auto& s : query.where) {
            const Dimension& dim = level_or_member(*c, s.path);
            if (!s.in) continue;
            if (seen_in) type_error("only one slicer may carry an IN subquery", s.path.pos);
            seen_in = true;
            const GisQuery& sub = **s.in;
            gis(sub);
            const Source& src = id_source(sub);
            const Layer& layer = cat_.layers.layer(src.layer);
            if (cat_.warehouse.find_mapping(dim.name(), layer.name()) == nullptr) {
                name_error("no mapping between dimension " + q(dim.name()) + " and layer " +
                               q(layer.name()),
                           s.path.pos);
            }
        }
        if (query.slice) level_or_member(*c, *query.slice);
    }

private:
    static bool is_measure(const MemberPath& p) {
        return !p.parts.empty() && iequals(p.parts[0], "Measures");
    }

    const Dimension& cube_dimension(const Cube& c, const MemberPath& p) {
        if (p.parts.size() != 2) {
            type_error("expected a two-part path [dimension].[name]", p.pos);
        }
        if (!c.dimension_index(p.parts[0])) {
            name_error("cube " + q(c.name) + " has no dimension " + q(p.parts[0]), p.pos);
        }
        const Dimension* dim = cat_.warehouse.find_dimension(p.parts[0]);
        if (dim == nullptr) name_error("unknown dimension " + q(p.parts[0]), p.pos);
        return *dim;
    }

    void level_path(const Cube& c, const MemberPath& p) {
        const Dimension& dim = cube_dimension(c, p);
        if (!dim.find_level(p.parts[1])) {
            name_error("dimension " + q(dim.name()) + " has no level " + q(p.parts[1]), p.pos);
        }
    }

    const Dimension& level_or_member(const Cube& c, const MemberPath& p) {
        const Dimension& dim = cube_dimension(c, p);
        const bool level = dim.find_level(p.parts[1]).has_value();
        if (p.members && !level) {
            name_error("dimension " + q(dim.name()) + " has no level " + q(p.parts[1]), p.pos);
        }
        if (!level && !dim.has_member(p.parts[1])) {
            name_error("dimension " + q(dim.name()) + " has no level or member " +
                           q(p.parts[1]),
                       p.pos);
        }
        return dim;
    }

    void measure_path(const Cube& c, const MemberPath& p) {
        if (!is_measure(p) || p.parts.size() != 2 || p.members) {
            type_error("expected [Measures].[name]", p.pos);
        }
        if (!c.measure_index(p.parts[1])) {
            name_error("cube " + q(c.name) + " has no measure " + q(p.parts[1]), p.pos);
        }
    }

    const Layer& alias_layer(const std::string& alias, const SourcePos& pos) {
        auto it = scope_.find(alias);
        if (it == scope_.end()) name_error("undeclared alias " + q(alias), pos);
        return *it->second;
    }

    ExprType attr_type(const AttrRef& ref) {
        const Layer& layer = alias_layer(ref.alias, ref.pos);
        if (!ref.attribute || *ref.attribute == "the_geom") {
            return {ValueType::Geometry, layer.kind()};
        }
        if (*ref.attribute == "id") return {ValueType::String, {}};
        auto idx = layer.attribute_index(*ref.attribute);
        if (!idx) {
            name_error("layer " + q(layer.name()) + " has no attribute " + q(*ref.attribute),
                       ref.pos);
        }
        return {layer.schema()[*idx].type == AttributeType::Number ? ValueType::Number
                                                                   : ValueType::String,
                {}};
    }

    ExprType expr(const Expr& e) {
        struct Visitor {
            Checker& self;
            ExprType operator()(const AttrRef& r) const { return self.attr_type(r); }
            ExprType operator()(const NumberLit&) const { return {ValueType::Number, {}}; }
            ExprType operator()(const StringLit&) const { return {ValueType::String, {}}; }
            ExprType operator()(const FuncCall& c) const { return self.call(c); }
        };
        return std::visit(Visitor{*this}, e.node);
    }

    ExprType call(const FuncCall& c) {
        const std::size_t arity = c.function == Function::Distance ? 2 : 1;
        if (c.args.size() != arity) {
            type_error(std::string(name_of(c.function)) + " takes " + std::to_string(arity) +
                           " argument(s)",
                       c.pos);
        }
        for (const auto& a : c.args) {
            ExprType t = expr(a);
            if (t.type != ValueType::Geometry) {
                type_error(std::string(name_of(c.function)) + " expects geometries", c.pos);
            }
            if (c.function == Function::Area && t.kind != GeometryKind::Polygon) {
                type_error("area requires a polygon layer, got " +
                               std::string(name_of(*t.kind)),
                           c.pos);
            }
        }
        return {ValueType::Number, {}};
    }

    void condition(const Condition& c) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, SpatialAtom>) {
                    spatial(n);
                } else if constexpr (std::is_same_v<T, TemporalAtom>) {
                    temporal(n);
                } else if constexpr (std::is_same_v<T, CompareAtom>) {
                    comparison(n);
                } else if constexpr (std::is_same_v<T, InAtom>) {
                    in_atom(n);
                } else if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                    for (const auto& t : n.terms) condition(t);
                } else if constexpr (std::is_same_v<T, NotNode>) {
                    condition(*n.inner);
                }
            },
            c.node);
    }

    void spatial(const SpatialAtom& a) {
        ExprType l = expr(a.left);
        ExprType r = expr(a.right);
        if (l.type != ValueType::Geometry || r.type != ValueType::Geometry) {
            type_error(std::string(name_of(a.predicate)) + " expects two geometries", a.pos);
        }
        if (a.predicate == SpatialPredicate::Crosses && !crosses_applicable(*l.kind, *r.kind)) {
            type_error("Crosses is not defined for " + std::string(name_of(*l.kind)) + " and " +
                           std::string(name_of(*r.kind)) +
                           " (it needs a linestring with a linestring or polygon)",
                       a.pos);
        }
    }

    void temporal(const TemporalAtom& a) {
        alias_layer(a.alias, a.pos);
        if (takes_instant(a.predicate)) {
            const auto* lit = std::get_if<TimeLiteral>(&a.arg);
            if (lit == nullptr) {
                type_error(std::string(name_of(a.predicate)) + " takes an instant, not an interval",
                           a.pos);
            }
            with_position([&] { resolve_instant(*lit, cat_.time); }, lit->pos);
        } else {
            with_position([&] { resolve_window(a.arg, cat_.time); }, a.pos);
        }
    }

    template <class F>
    static void with_position(F&& f, const SourcePos& pos) {
        try {
            f();
        } catch (const SyntaxError& e) {
            throw SyntaxError(e.bare_message(), pos.line, pos.column);
        } catch (const InvariantError& e) {
            throw TypeError(e.what() + where(pos));
        }
    }

    void comparison(const CompareAtom& a) {
        ExprType l = expr(a.lhs);
        ExprType r = expr(a.rhs);
        if (l.type == ValueType::Geometry || r.type == ValueType::Geometry) {
            type_error("geometries cannot be compared; use a spatial predicate or Distance",
                       a.pos);
        }
        if (l.type != r.type) {
            type_error("cannot compare " + std::string(name_of(l.type)) + " with " +
                           std::string(name_of(r.type)),
                       a.pos);
        }
    }

    void in_atom(const InAtom& a) {
        const Layer& layer = alias_layer(a.subject.alias, a.subject.pos);
        if (a.subject.attribute && *a.subject.attribute != "id") {
            type_error("IN applies to an alias or its id", a.subject.pos);
        }
        const auto* sub = std::get_if<Box<CubeQuery>>(&a.source);
        if (sub == nullptr) return;
        cube(**sub);
        const auto* f = std::get_if<FilterSelect>(&(*sub)->select);
        if (f == nullptr) {
            type_error("a cube subquery under IN must be a filter(...) member selection", a.pos);
        }
        const Dimension& dim = cat_.warehouse.dimension(f->level.parts[0]);
        const AlphaMapping* m = cat_.warehouse.find_mapping(dim.name(), layer.name());
        if (m == nullptr) {
            name_error("dimension " + q(dim.name()) + " has no mapping to layer " +
                           q(layer.name()),
                       a.pos);
        }
        if (dim.find_level(m->level) != dim.find_level(f->level.parts[1])) {
            type_error("level " + q(f->level.parts[1]) + " of dimension " + q(dim.name()) +
                           " is not mapped to layer " + q(layer.name()),
                       a.pos);
        }
    }

    const Catalog& cat_;
    std::map<std::string, const Layer*> scope_;
};

}  // namespace

Instant resolve_instant(const TimeLiteral& literal, const TimeConfig& time) {
    switch (literal.kind) {
        case TimeLiteral::Kind::Now: return Instant::now();
        case TimeLiteral::Kind::Date: return Instant(time.date_tick(literal.text));
        case TimeLiteral::Kind::Year:
            throw SyntaxError("year " + literal.text +
                                  " denotes a range; write it as an interval [" + literal.text +
                                  "," + literal.text + "]",
                              literal.pos.line, literal.pos.column);
        case TimeLiteral::Kind::Tick: break;
    }
    return time.parse_instant(literal.text);
}

Interval resolve_window(const TemporalArg& arg, const TimeConfig& time) {
    auto bound = [&](const TimeLiteral& lit, bool upper) {
        if (lit.kind == TimeLiteral::Kind::Year) {
            Interval y = time.year_range(*parse_year(lit.text));
            return upper ? y.to() : y.from();
        }
        return resolve_instant(lit, time);
    };
    if (const auto* iv = std::get_if<IntervalLiteral>(&arg)) {
        const Instant from = bound(iv->from, false);
        const Instant to = bound(iv->to, true);
        if (!from.is_finite()) {
            throw SyntaxError("interval cannot start at Now", iv->pos.line, iv->pos.column);
        }
        if (to < from) {
            throw SyntaxError("interval ends before it starts", iv->pos.line, iv->pos.column);
        }
        return Interval(from, to);
    }
    const auto& lit = std::get<TimeLiteral>(arg);
    if (lit.kind == TimeLiteral::Kind::Year) return time.year_range(*parse_year(lit.text));
    const Instant t = resolve_instant(lit, time);
    if (!t.is_finite()) {
        throw SyntaxError("Now cannot serve as an interval window", lit.pos.line, lit.pos.column);
    }
    return Interval(t, t);
}

const Source& id_source(const GisQuery& query) {
    if (query.projection.size() != 1 ||
        (query.projection[0].attribute && *query.projection[0].attribute != "id")) {
        throw TypeError("a GIS subquery inside a cube query must project exactly one alias id" +
                        where(query.pos));
    }
    for (const auto& s : query.sources) {
        if (s.alias == query.projection[0].alias) return s;
    }
    throw NameError("undeclared alias " + q(query.projection[0].alias) +
                    where(query.projection[0].pos));
}

void validate(const Query& query, const Catalog& catalog) {
    Checker checker(catalog);
    if (const auto* g = std::get_if<GisQuery>(&query)) {
        checker.gis(*g);
    } else {
        checker.cube(std::get<CubeQuery>(query));
    }
}

}  // namespace tpiet::ql
