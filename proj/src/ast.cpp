#include <tpiet/ast.hpp>

#include <tpiet/text.hpp>

#include <charconv>

namespace tpiet::ql {

namespace {

constexpr std::pair<SpatialPredicate, std::string_view> kSpatialNames[] = {
    {SpatialPredicate::Intersects, "Intersects"},
    {SpatialPredicate::Crosses, "Crosses"},
    {SpatialPredicate::Contains, "Contains"},
    {SpatialPredicate::Touches, "Touches"},
};

constexpr std::pair<Function, std::string_view> kFunctionNames[] = {
    {Function::Distance, "Distance"},
    {Function::Area, "area"},
};

std::string number_text(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string string_text(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string attr_text(const AttrRef& r) {
    return r.attribute ? r.alias + "." + *r.attribute : r.alias;
}

std::string path_text(const MemberPath& p) {
    std::string out;
    for (std::size_t i = 0; i < p.parts.size(); ++i) {
        if (i) out += ".";
        out += "[" + p.parts[i] + "]";
    }
    if (p.members) out += ".Members";
    return out;
}

std::string time_text(const TemporalArg& arg) {
    if (auto* iv = std::get_if<IntervalLiteral>(&arg)) {
        return "[" + iv->from.text + ", " + iv->to.text + "]";
    }
    return std::get<TimeLiteral>(arg).text;
}

bool compound(const Condition& c) {
    return std::holds_alternative<AndNode>(c.node) || std::holds_alternative<OrNode>(c.node);
}

std::string child_text(const Condition& c) {
    return compound(c) ? "(" + print(c) + ")" : print(c);
}

std::string join_terms(const std::vector<Condition>& terms, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) out += sep;
        out += child_text(terms[i]);
    }
    return out;
}

}  // namespace

std::string_view name_of(SpatialPredicate predicate) {
    for (const auto& [p, name] : kSpatialNames) {
        if (p == predicate) return name;
    }
    return "?";
}

std::string_view name_of(Function function) {
    for (const auto& [f, name] : kFunctionNames) {
        if (f == function) return name;
    }
    return "?";
}

std::optional<SpatialPredicate> spatial_predicate_from_name(std::string_view name) {
    for (const auto& [p, n] : kSpatialNames) {
        if (iequals(n, name)) return p;
    }
    return std::nullopt;
}

std::optional<Function> function_from_name(std::string_view name) {
    for (const auto& [f, n] : kFunctionNames) {
        if (iequals(n, name)) return f;
    }
    return std::nullopt;
}

std::string print(const Expr& expr) {
    struct Visitor {
        std::string operator()(const AttrRef& r) const { return attr_text(r); }
        std::string operator()(const NumberLit& n) const { return number_text(n.value); }
        std::string operator()(const StringLit& s) const { return string_text(s.value); }
        std::string operator()(const FuncCall& c) const {
            std::string out = std::string(name_of(c.function)) + "(";
            for (std::size_t i = 0; i < c.args.size(); ++i) {
                if (i) out += ", ";
                out += print(c.args[i]);
            }
            return out + ")";
        }
    };
    return std::visit(Visitor{}, expr.node);
}

std::string print(const Condition& condition) {
    struct Visitor {
        std::string operator()(const SpatialAtom& a) const {
            return std::string(name_of(a.predicate)) + "(" + print(a.left) + ", " +
                   print(a.right) + ")";
        }
        std::string operator()(const TemporalAtom& a) const {
            return std::string(name_of(a.predicate)) + "(" + a.alias + ", " + time_text(a.arg) +
                   ")";
        }
        std::string operator()(const CompareAtom& a) const {
            return print(a.lhs) + " " + std::string(symbol_of(a.op)) + " " + print(a.rhs);
        }
        std::string operator()(const InAtom& a) const {
            std::string out = attr_text(a.subject) + " IN (";
            if (auto* sub = std::get_if<Box<CubeQuery>>(&a.source)) {
                out += print(**sub);
            } else {
                const auto& ids = std::get<std::vector<std::string>>(a.source);
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    if (i) out += ", ";
                    out += string_text(ids[i]);
                }
            }
            return out + ")";
        }
        std::string operator()(const BoolAtom& a) const { return a.value ? "TRUE" : "FALSE"; }
        std::string operator()(const AndNode& n) const { return join_terms(n.terms, " AND "); }
        std::string operator()(const OrNode& n) const { return join_terms(n.terms, " OR "); }
        std::string operator()(const NotNode& n) const { return "NOT " + child_text(*n.inner); }
    };
    return std::visit(Visitor{}, condition.node);
}

std::string print(const GisQuery& q) {
    std::string out = "SELECT GIS ";
    if (q.modifier == Modifier::Snapshot) out += "SNAPSHOT ";
    if (q.modifier == Modifier::Current) out += "CURRENT ";
    for (std::size_t i = 0; i < q.projection.size(); ++i) {
        if (i) out += ", ";
        out += attr_text(q.projection[i]);
    }
    out += " FROM ";
    if (q.overlap) out += "OVERLAP ";
    for (std::size_t i = 0; i < q.sources.size(); ++i) {
        if (i) out += ", ";
        out += q.sources[i].layer + " " + q.sources[i].alias;
    }
    if (q.where) out += " WHERE " + print(*q.where);
    return out;
}

std::string print(const CubeQuery& q) {
    std::string out = "SELECT CUBE ";
    if (auto* f = std::get_if<FilterSelect>(&q.select)) {
        out += "filter(" + path_text(f->level) + ", " + path_text(f->measure) + " " +
               std::string(symbol_of(f->op)) + " " + number_text(f->threshold) + ")";
    } else {
        const auto& t = std::get<TabularSelect>(q.select);
        for (std::size_t i = 0; i < t.items.size(); ++i) {
            if (i) out += ", ";
            out += path_text(t.items[i]);
        }
        if (t.axis) out += *t.axis == Axis::Rows ? " ON ROWS" : " ON COLUMNS";
    }
    out += " FROM [" + q.cube + "]";
    for (std::size_t i = 0; i < q.where.size(); ++i) {
        out += i ? " AND " : " WHERE ";
        out += path_text(q.where[i].path);
        if (q.where[i].in) out += " IN (" + print(**q.where[i].in) + ")";
    }
    if (q.slice) out += " SLICE " + path_text(*q.slice);
    return out;
}

std::string print(const Query& query) {
    return std::visit([](const auto& q) { return print(q); }, query);
}

}  // namespace tpiet::ql
