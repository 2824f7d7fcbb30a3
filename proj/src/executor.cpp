#include <tpiet/executor.hpp>

#include <tpiet/error.hpp>
#include <tpiet/text.hpp>

#include <map>
#include <set>
#include <sstream>

namespace tpiet {

using namespace ql;

std::vector<JoinedRow> t_join(const std::vector<TemporalRow<std::string>>& left,
                              const std::vector<TemporalRow<std::string>>& right, JoinKind kind) {
    std::vector<JoinedRow> out;
    for (const auto& x : left) {
        for (const auto& y : right) {
            const Interval& a = x.interval;
            const Interval& b = y.interval;
            JoinedRow row{x.key, y.key, a, b, std::nullopt};
            switch (kind) {
                case JoinKind::Before:
                    if (a.to() <= b.from()) out.push_back(row);
                    break;
                case JoinKind::Meet:
                    if (a.to() == b.from()) out.push_back(row);
                    break;
                case JoinKind::Overlap:
                    if (a.to() >= b.from() && b.to() >= a.from()) {
                        row.common = intersection(a, b);
                        out.push_back(row);
                    }
                    break;
            }
        }
    }
    return out;
}

std::vector<GtJoinRow> gt_join(const Layer& left, const Layer& right,
                               const std::function<bool(const Stage&, const Stage&)>& predicate) {
    std::vector<GtJoinRow> out;
    for (const auto& x : left.stages()) {
        for (const auto& y : right.stages()) {
            auto common = intersection(x.interval, y.interval);
            if (common && predicate(x, y)) out.push_back({x.object_id, y.object_id, *common});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

/// A resolved temporal predicate argument.
struct TemporalArgValue {
    Instant instant;
    std::optional<Interval> window;
};

bool holds(TemporalPredicate p, const Interval& object, const TemporalArgValue& arg) {
    switch (p) {
        case TemporalPredicate::At: return at(object, arg.instant);
        case TemporalPredicate::StartsBefore: return starts_before(object, arg.instant);
        case TemporalPredicate::FinishesAfter: return finishes_after(object, arg.instant);
        case TemporalPredicate::BeginsAfter: return begins_after(object, arg.instant);
        default: return evaluate(p, object, *arg.window);
    }
}

bool spatial_holds(SpatialPredicate p, const Geometry& a, const Geometry& b) {
    switch (p) {
        case SpatialPredicate::Intersects: return intersects(a, b);
        case SpatialPredicate::Crosses: return crosses(a, b);
        case SpatialPredicate::Contains: return contains(a, b);
        case SpatialPredicate::Touches: return touches(a, b);
    }
    return false;
}

std::string attr_text(const AttrRef& r) {
    return r.attribute ? r.alias + "." + *r.attribute : r.alias;
}

/// Projected column: the alias it reads and which field.
struct ColumnSpec {
    std::size_t source;
    enum class Field { Id, Geometry, Attribute } field;
    std::size_t attribute = 0;
};

template <class F>
void for_each_atom(const Condition& c, F&& f) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AndNode> || std::is_same_v<T, OrNode>) {
                for (const auto& t : n.terms) for_each_atom(t, f);
            } else if constexpr (std::is_same_v<T, NotNode>) {
                for_each_atom(*n.inner, f);
            } else {
                f(n);
            }
        },
        c.node);
}

}  // namespace

/// State for evaluating one GIS query: bound sources, resolved literals and
/// the IN sets computed up front.
class GisEvaluation {
public:
    GisEvaluation(Executor& exec, const GisQuery& q) : exec_(exec), q_(q) {
        for (std::size_t i = 0; i < q.sources.size(); ++i) {
            const Layer* layer = exec.cat_.layers.find(q.sources[i].layer);
            if (layer == nullptr) throw NameError("unknown layer '" + q.sources[i].layer + "'");
            layers_.push_back(layer);
            alias_[q.sources[i].alias] = i;
        }
        for (const auto& ref : q.projection) bind_column(ref);
        if (q.where) prepare(*q.where);
    }

    ResultRelation run() {
        ResultRelation out;
        out.columns = columns_;
        out.temporal = q_.modifier == Modifier::None;

        std::set<std::size_t> projected;
        for (const auto& c : specs_) projected.insert(c.source);
        if (!q_.overlap && out.temporal && projected.size() != 1) {
            throw TypeError(
                "projecting several aliases without OVERLAP leaves the result interval ambiguous");
        }
        stamp_ = *projected.begin();

        for (const Layer* l : layers_) {
            if (l->stages().empty()) return out;
        }
        stages_.assign(layers_.size(), nullptr);
        enumerate(0, std::nullopt);

        if (out.temporal) {
            for (auto& r : coalesce(std::move(rows_))) {
                out.rows.push_back({std::move(r.key), r.interval});
            }
        } else {
            std::sort(plain_.begin(), plain_.end());
            plain_.erase(std::unique(plain_.begin(), plain_.end()), plain_.end());
            for (auto& v : plain_) out.rows.push_back({std::move(v), std::nullopt});
        }
        return out;
    }

private:
    std::size_t source_of(const std::string& alias) const {
        auto it = alias_.find(alias);
        if (it == alias_.end()) throw NameError("undeclared alias '" + alias + "'");
        return it->second;
    }

    void bind_column(const AttrRef& ref) {
        const std::size_t s = source_of(ref.alias);
        const Layer& layer = *layers_[s];
        if (!ref.attribute) {
            specs_.push_back({s, ColumnSpec::Field::Id});
            columns_.push_back(ref.alias + ".id");
            for (std::size_t i = 0; i < layer.schema().size(); ++i) {
                specs_.push_back({s, ColumnSpec::Field::Attribute, i});
                columns_.push_back(ref.alias + "." + layer.schema()[i].name);
            }
            return;
        }
        columns_.push_back(attr_text(ref));
        if (*ref.attribute == "id") {
            specs_.push_back({s, ColumnSpec::Field::Id});
        } else if (*ref.attribute == "the_geom") {
            specs_.push_back({s, ColumnSpec::Field::Geometry});
        } else {
            auto idx = layer.attribute_index(*ref.attribute);
            if (!idx) {
                throw NameError("layer '" + layer.name() + "' has no attribute '" +
                                *ref.attribute + "'");
            }
            specs_.push_back({s, ColumnSpec::Field::Attribute, *idx});
        }
    }

    void prepare(const Condition& c) {
        for_each_atom(c, [&](const auto& atom) {
            using T = std::decay_t<decltype(atom)>;
            if constexpr (std::is_same_v<T, TemporalAtom>) {
                TemporalArgValue v;
                if (takes_instant(atom.predicate)) {
                    v.instant = resolve_instant(std::get<TimeLiteral>(atom.arg), exec_.cat_.time);
                } else {
                    v.window = resolve_window(atom.arg, exec_.cat_.time);
                }
                temporal_[&atom] = v;
            } else if constexpr (std::is_same_v<T, InAtom>) {
                in_sets_[&atom] = exec_.in_ids(atom, *layers_[source_of(atom.subject.alias)]);
            }
        });
    }

    void enumerate(std::size_t depth, std::optional<Interval> common) {
        if (depth == layers_.size()) {
            emit(common);
            return;
        }
        for (const Stage& s : layers_[depth]->stages()) {
            std::optional<Interval> next = s.interval;
            if (q_.overlap && common) {
                next = intersection(*common, s.interval);
                if (!next) continue;
            } else if (common) {
                next = common;
            }
            stages_[depth] = &s;
            enumerate(depth + 1, next);
        }
    }

    void emit(const std::optional<Interval>& common) {
        if (q_.modifier == Modifier::Current) {
            for (const Stage* s : stages_) {
                if (!s->interval.is_live()) return;
            }
        }
        if (q_.where && !test(*q_.where)) return;

        std::vector<Value> values;
        values.reserve(specs_.size());
        for (const auto& c : specs_) {
            const Stage& s = *stages_[c.source];
            switch (c.field) {
                case ColumnSpec::Field::Id: values.emplace_back(s.object_id); break;
                case ColumnSpec::Field::Geometry: values.emplace_back(s.geometry); break;
                case ColumnSpec::Field::Attribute: values.push_back(s.attributes[c.attribute]); break;
            }
        }
        if (q_.modifier != Modifier::None) {
            plain_.push_back(std::move(values));
            return;
        }
        const Interval stamp = q_.overlap ? *common : stages_[stamp_]->interval;
        rows_.push_back({std::move(values), stamp});
    }

    bool test(const Condition& c) const {
        struct Visitor {
            const GisEvaluation& self;
            bool operator()(const SpatialAtom& a) const {
                const Value l = self.value(a.left);
                const Value r = self.value(a.right);
                return spatial_holds(a.predicate, std::get<Geometry>(l), std::get<Geometry>(r));
            }
            bool operator()(const TemporalAtom& a) const {
                const Stage& s = *self.stages_[self.source_of(a.alias)];
                return holds(a.predicate, s.interval, self.temporal_.at(&a));
            }
            bool operator()(const CompareAtom& a) const {
                return compare(self.value(a.lhs), a.op, self.value(a.rhs));
            }
            bool operator()(const InAtom& a) const {
                const Stage& s = *self.stages_[self.source_of(a.subject.alias)];
                return self.in_sets_.at(&a).contains(s.object_id);
            }
            bool operator()(const BoolAtom& a) const { return a.value; }
            bool operator()(const AndNode& n) const {
                return std::all_of(n.terms.begin(), n.terms.end(),
                                   [&](const Condition& t) { return self.test(t); });
            }
            bool operator()(const OrNode& n) const {
                return std::any_of(n.terms.begin(), n.terms.end(),
                                   [&](const Condition& t) { return self.test(t); });
            }
            bool operator()(const NotNode& n) const { return !self.test(*n.inner); }
        };
        return std::visit(Visitor{*this}, c.node);
    }

    Value value(const Expr& e) const {
        struct Visitor {
            const GisEvaluation& self;
            Value operator()(const AttrRef& r) const {
                const Stage& s = *self.stages_[self.source_of(r.alias)];
                if (!r.attribute || *r.attribute == "the_geom") return s.geometry;
                if (*r.attribute == "id") return s.object_id;
                const Layer& layer = *self.layers_[self.source_of(r.alias)];
                auto idx = layer.attribute_index(*r.attribute);
                if (!idx) {
                    throw NameError("layer '" + layer.name() + "' has no attribute '" +
                                    *r.attribute + "'");
                }
                return s.attributes[*idx];
            }
            Value operator()(const NumberLit& n) const { return n.value; }
            Value operator()(const StringLit& s) const { return s.value; }
            Value operator()(const FuncCall& c) const {
                std::vector<Geometry> args;
                for (const auto& a : c.args) {
                    Value v = self.value(a);
                    auto* g = std::get_if<Geometry>(&v);
                    if (g == nullptr) {
                        throw TypeError(std::string(name_of(c.function)) +
                                        " expects geometry arguments");
                    }
                    args.push_back(*g);
                }
                if (c.function == Function::Distance) {
                    if (args.size() != 2) throw TypeError("Distance takes two arguments");
                    return distance(args[0], args[1]);
                }
                if (args.size() != 1) throw TypeError("area takes one argument");
                return area(args[0]);
            }
        };
        return std::visit(Visitor{*this}, e.node);
    }

    Executor& exec_;
    const GisQuery& q_;
    std::vector<const Layer*> layers_;
    std::map<std::string, std::size_t> alias_;
    std::vector<std::string> columns_;
    std::vector<ColumnSpec> specs_;
    std::map<const TemporalAtom*, TemporalArgValue> temporal_;
    std::map<const InAtom*, std::set<std::string>> in_sets_;
    std::size_t stamp_ = 0;

    std::vector<const Stage*> stages_;
    std::vector<TemporalRow<std::vector<Value>>> rows_;
    std::vector<std::vector<Value>> plain_;
};

std::set<std::string> Executor::in_ids(const InAtom& atom, const Layer& subject) {
    if (const auto* ids = std::get_if<std::vector<std::string>>(&atom.source)) {
        return {ids->begin(), ids->end()};
    }
    ++subquery_evaluations_;
    const CubeQuery& sub = *std::get<Box<CubeQuery>>(atom.source);
    const CubeResult members = eval_cube(sub);
    if (!members.member_level) return {};
    const AlphaMapping* mapping =
        cat_.warehouse.find_mapping(members.member_level->first, subject.name());
    // A missing mapping means no object can qualify.
    if (mapping == nullptr) return {};
    return cat_.warehouse.objects_for_members(
        *mapping, {members.members.begin(), members.members.end()});
}

ResultRelation Executor::eval_gis(const GisQuery& query) {
    return GisEvaluation(*this, query).run();
}

namespace {

std::optional<Slicer> member_slicer(const Warehouse& wh, const MemberPath& path) {
    if (path.parts.size() != 2 || path.members) return std::nullopt;
    const Dimension* dim = wh.find_dimension(path.parts[0]);
    if (dim == nullptr) throw NameError("unknown dimension '" + path.parts[0] + "'");
    if (dim->find_level(path.parts[1])) return std::nullopt;
    return Slicer{dim->name(), path.parts[1]};
}

}  // namespace

CubeResult Executor::eval_cube(const CubeQuery& query) {
    CubeRequest req;
    req.cube = query.cube;
    if (const auto* f = std::get_if<FilterSelect>(&query.select)) {
        if (f->level.parts.size() != 2 || f->measure.parts.size() != 2) {
            throw TypeError("filter expects [dimension].[level].Members and [Measures].[name]");
        }
        req.select = MemberFilterSelect{f->level.parts[0], f->level.parts[1], f->measure.parts[1],
                                        f->op, f->threshold};
    } else {
        tpiet::TabularSelect t;
        for (const auto& item : std::get<ql::TabularSelect>(query.select).items) {
            if (item.parts.size() != 2) throw TypeError("cube items are two-part paths");
            if (iequals(item.parts[0], "Measures")) {
                t.measures.push_back(item.parts[1]);
                continue;
            }
            const Dimension& dim = cat_.warehouse.dimension(item.parts[0]);
            t.row_dimension = dim.name();
            if (dim.find_level(item.parts[1])) {
                t.row_level = item.parts[1];
            } else {
                t.row_member = item.parts[1];
            }
        }
        req.select = std::move(t);
    }

    for (const auto& s : query.where) {
        if (auto slicer = member_slicer(cat_.warehouse, s.path)) req.slicers.push_back(*slicer);
        if (!s.in) continue;
        ++subquery_evaluations_;
        const GisQuery& sub = **s.in;
        const Source& src = id_source(sub);
        const ResultRelation r = eval_gis(sub);
        ObjectFilter filter;
        filter.layer = cat_.layers.layer(src.layer).name();
        for (const auto& row : r.rows) {
            const auto& id = std::get<std::string>(row.values.front());
            filter.object_ids.insert(id);
            if (row.interval) filter.intervals[id].push_back(*row.interval);
        }
        req.object_filter = {cat_.warehouse.dimension(s.path.parts[0]).name(), std::move(filter)};
    }
    if (query.slice) {
        if (auto slicer = member_slicer(cat_.warehouse, *query.slice)) {
            req.slicers.push_back(*slicer);
        }
    }
    return cat_.warehouse.evaluate(req, cat_.time);
}

QueryResult Executor::run(const Query& query) {
    if (const auto* g = std::get_if<GisQuery>(&query)) return eval_gis(*g);
    return eval_cube(std::get<CubeQuery>(query));
}

// ---- explain ---------------------------------------------------------------

namespace {

class Explainer {
public:
    explicit Explainer(const Catalog& cat) : cat_(cat) {}

    void gis(const GisQuery& q, const std::string& indent) {
        out_ << indent << "GIS query: " << (q.overlap ? "overlap join" : "disjoint join") << ", "
             << q.sources.size() << (q.sources.size() == 1 ? " source" : " sources") << "\n";
        std::size_t combos = 1;
        std::vector<std::string> empty;
        for (const auto& s : q.sources) {
            const Layer* layer = cat_.layers.find(s.layer);
            const std::size_t n = layer ? layer->stages().size() : 0;
            combos *= n;
            out_ << indent << "  source " << s.layer << " " << s.alias << ": " << n
                 << (n == 1 ? " stage" : " stages") << "\n";
            if (n == 0) empty.push_back(s.layer);
        }
        if (!empty.empty()) {
            out_ << indent << "  zero-cardinality short-circuit: source " << empty.front()
                 << " is empty, so the result is empty and nothing is evaluated\n";
            return;
        }
        out_ << indent << "  nested loop over " << combos << " stage combinations";
        if (q.overlap) out_ << ", pruned to pairwise overlapping intervals";
        out_ << "\n";

        std::vector<const Condition*> subs;
        if (q.where) {
            std::vector<const Condition*> order;
            if (const auto* a = std::get_if<AndNode>(&q.where->node)) {
                for (const auto& t : a->terms) order.push_back(&t);
            } else {
                order.push_back(&*q.where);
            }
            for (std::size_t i = 0; i < order.size(); ++i) {
                out_ << indent << "  predicate " << i + 1 << ": " << print(*order[i]) << "\n";
            }
            for_each_atom(*q.where, [&](const auto& atom) {
                using T = std::decay_t<decltype(atom)>;
                if constexpr (std::is_same_v<T, InAtom>) {
                    if (const auto* sub = std::get_if<Box<CubeQuery>>(&atom.source)) {
                        out_ << indent << "  subquery for " << attr_text(atom.subject)
                             << " IN: evaluated once before the join, memoized\n";
                        cube(**sub, indent + "    ");
                    } else {
                        out_ << indent << "  id list for " << attr_text(atom.subject)
                             << " IN: " << std::get<std::vector<std::string>>(atom.source).size()
                             << " ids\n";
                    }
                }
            });
        }
        std::string proj;
        for (const auto& r : q.projection) proj += (proj.empty() ? "" : ", ") + attr_text(r);
        out_ << indent << "  project: " << proj << "\n";
        switch (q.modifier) {
            case Modifier::None:
                out_ << indent << "  coalesce on all projected columns\n";
                break;
            case Modifier::Snapshot:
                out_ << indent << "  SNAPSHOT: drop intervals, remove duplicates\n";
                break;
            case Modifier::Current:
                out_ << indent
                     << "  CURRENT: keep candidates whose stages are all live, drop intervals, "
                        "remove duplicates\n";
                break;
        }
    }

    void cube(const CubeQuery& q, const std::string& indent) {
        out_ << indent << "CUBE query on [" << q.cube << "]";
        if (const auto* f = std::get_if<FilterSelect>(&q.select)) {
            out_ << ": members of " << join(f->level.parts) << " with " << join(f->measure.parts)
                 << " " << symbol_of(f->op) << " " << render(Value(f->threshold));
        }
        out_ << "\n";
        for (const auto& s : q.where) {
            out_ << indent << "  slicer " << join(s.path.parts) << "\n";
            if (s.in) {
                out_ << indent << "  GIS subquery restricting " << join(s.path.parts)
                     << ": evaluated once, memoized\n";
                gis(**s.in, indent + "    ");
            }
        }
        if (q.slice) out_ << indent << "  slice " << join(q.slice->parts) << "\n";
    }

    std::string text() const { return out_.str(); }

private:
    static std::string join(const std::vector<std::string>& parts) {
        std::string s;
        for (const auto& p : parts) s += (s.empty() ? "[" : ".[") + p + "]";
        return s;
    }

    const Catalog& cat_;
    std::ostringstream out_;
};

}  // namespace

std::string Executor::explain(const Query& query) const {
    Explainer e(cat_);
    if (const auto* g = std::get_if<GisQuery>(&query)) {
        e.gis(*g, "");
    } else {
        e.cube(std::get<CubeQuery>(query), "");
    }
    return e.text();
}

}  // namespace tpiet
