#include <tpiet/warehouse.hpp>
#include <tpiet/text.hpp>

#include <tpiet/csv.hpp>
#include <tpiet/error.hpp>

#include <algorithm>
#include <cctype>

namespace tpiet {

namespace {

std::string q(std::string_view s) { return "'" + std::string(s) + "'"; }

bool compare_number(double lhs, CmpOp op, double rhs) { return compare(Value(lhs), op, Value(rhs)); }

}  // namespace

Dimension::Dimension(std::string name, std::vector<std::string> levels)
    : name_(std::move(name)), levels_(std::move(levels)) {
    if (levels_.empty()) throw InvariantError("dimension " + q(name_) + " has no levels");
}

std::optional<std::size_t> Dimension::find_level(std::string_view name) const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (iequals(levels_[i], name) || iequals(name_ + " " + levels_[i], name)) return i;
    }
    return std::nullopt;
}

std::size_t Dimension::level_index(std::string_view name) const {
    auto i = find_level(name);
    if (!i) throw NameError("dimension " + q(name_) + " has no level " + q(name));
    return *i;
}

const Member* Dimension::find_member(std::string_view name, std::optional<Instant> t) const {
    const Member* best = nullptr;
    for (const auto& m : members_) {
        if (m.name != name) continue;
        if (t) {
            if (at(m.validity, *t)) return &m;
        } else if (best == nullptr || best->validity.from() < m.validity.from()) {
            best = &m;
        }
    }
    return best;
}

bool Dimension::has_member(std::string_view name) const { return find_member(name) != nullptr; }

std::string Dimension::rollup(std::string_view member, std::size_t target_level,
                              std::optional<Instant> t) const {
    const Member* m = find_member(member, t);
    if (m == nullptr) {
        if (t && has_member(member)) {
            throw NameError("member " + q(member) + " of " + q(name_) +
                            " is not valid at " + t->to_string());
        }
        throw NameError("unknown member " + q(member) + " in dimension " + q(name_));
    }
    if (m->level > target_level) {
        throw NameError("member " + q(member) + " lies above level " +
                        q(levels_.at(target_level)));
    }
    while (m->level < target_level) {
        if (!m->parent) throw NameError("member " + q(m->name) + " has no rollup");
        const Member* p = find_member(*m->parent, t);
        if (p == nullptr) {
            throw NameError("rollup of " + q(m->name) + " to " + q(*m->parent) +
                            " is not valid" + (t ? " at " + t->to_string() : std::string()));
        }
        m = p;
    }
    return m->name;
}

std::vector<std::string> Dimension::members_at(std::size_t level, std::optional<Instant> t) const {
    std::set<std::string> names;
    for (const auto& m : members_) {
        if (m.level == level && (!t || at(m.validity, *t))) names.insert(m.name);
    }
    return {names.begin(), names.end()};
}

void Dimension::add_member(Member member) {
    if (member.level >= levels_.size()) {
        throw InvariantError("member " + q(member.name) + " has an unknown level");
    }
    const bool top = member.level + 1 == levels_.size();
    if (top && member.parent) {
        throw InvariantError("top-level member " + q(member.name) + " cannot have a parent");
    }
    if (!top) {
        if (!member.parent || member.parent->empty()) {
            throw InvariantError("member " + q(member.name) + " needs a parent at level " +
                                 q(levels_[member.level + 1]));
        }
        bool found = false;
        for (const auto& m : members_) {
            found = found || (m.name == *member.parent && m.level == member.level + 1);
        }
        if (!found) {
            throw InvariantError("parent " + q(*member.parent) + " of " + q(member.name) +
                                 " is not a member of level " + q(levels_[member.level + 1]));
        }
    }
    for (const auto& m : members_) {
        if (m.name != member.name) continue;
        if (m.level != member.level) {
            throw InvariantError("member " + q(member.name) + " appears on two levels");
        }
        if (intersection(m.validity, member.validity)) {
            throw InvariantError("versions of member " + q(member.name) + " overlap");
        }
    }
    members_.push_back(std::move(member));
}

void Dimension::close_member(std::string_view name, Instant last) {
    for (auto& m : members_) {
        if (m.name == name && m.validity.is_live()) {
            m.validity = Interval(m.validity.from(), last);
            return;
        }
    }
    throw InvariantError("member " + q(name) + " has no live version");
}

void Dimension::remove_member(std::string_view name) {
    for (const auto& m : members_) {
        if (m.parent && *m.parent == name) {
            throw InvariantError("member " + q(name) + " still has child " + q(m.name));
        }
    }
    std::erase_if(members_, [&](const Member& m) { return m.name == name; });
}

std::vector<std::string> Dimension::check() const {
    std::vector<std::string> problems;
    for (const auto& m : members_) {
        const bool top = m.level + 1 == levels_.size();
        if (top) continue;
        if (!m.parent) {
            problems.push_back(q(m.name) + " has no parent");
            continue;
        }
        std::vector<Interval> cover;
        for (const auto& p : members_) {
            if (p.name == *m.parent && p.level == m.level + 1) cover.push_back(p.validity);
        }
        const auto merged = interval_union(cover);
        const bool covered = std::any_of(merged.begin(), merged.end(), [&](const Interval& i) {
            return i.from() <= m.validity.from() && m.validity.to() <= i.to();
        });
        if (!covered) {
            problems.push_back("parent " + q(*m.parent) + " of " + q(m.name) +
                               " is not valid throughout " + m.validity.to_string());
        }
    }
    return problems;
}

std::optional<std::size_t> Cube::dimension_index(std::string_view dimension) const {
    for (std::size_t i = 0; i < dimensions.size(); ++i) {
        if (iequals(dimensions[i], dimension)) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Cube::measure_index(std::string_view measure) const {
    for (std::size_t i = 0; i < measures.size(); ++i) {
        if (iequals(measures[i], measure)) return i;
    }
    return std::nullopt;
}

void Warehouse::add_dimension(Dimension dimension) {
    if (find_dimension(dimension.name()) != nullptr) {
        throw InvariantError("duplicate dimension " + q(dimension.name()));
    }
    dimensions_.push_back(std::move(dimension));
}

void Warehouse::add_cube(Cube cube) {
    if (find_cube(cube.name) != nullptr) throw InvariantError("duplicate cube " + q(cube.name));
    for (std::size_t f = 0; f < cube.facts.size(); ++f) {
        const Fact& fact = cube.facts[f];
        for (std::size_t d = 0; d < cube.dimensions.size(); ++d) {
            const Dimension& dim = dimension(cube.dimensions[d]);
            const Member* m = dim.find_member(fact.keys[d]);
            if (m == nullptr || m->level != 0) {
                throw InvariantError("fact " + std::to_string(f + 1) + " of cube " +
                                     q(cube.name) + ": " + q(fact.keys[d]) +
                                     " is not a bottom-level member of " + q(dim.name()));
            }
        }
    }
    cubes_.push_back(std::move(cube));
}

void Warehouse::add_mapping(AlphaMapping mapping) {
    const Dimension& dim = dimension(mapping.dimension);
    const std::size_t level = dim.level_index(mapping.level);
    mapping.level = dim.levels()[level];
    for (const auto& row : mapping.rows) {
        const Member* m = dim.find_member(row.member);
        if (m == nullptr || m->level != level) {
            throw InvariantError("mapping row for " + q(row.member) + " does not name a " +
                                 q(mapping.level) + " member");
        }
    }
    for (std::size_t i = 0; i < mapping.rows.size(); ++i) {
        for (std::size_t j = i + 1; j < mapping.rows.size(); ++j) {
            const auto& a = mapping.rows[i];
            const auto& b = mapping.rows[j];
            if (a.member == b.member && a.object_id == b.object_id &&
                intersection(a.interval, b.interval)) {
                throw InvariantError("mapping rows for (" + a.member + ", " + a.object_id +
                                     ") overlap in time");
            }
        }
    }
    if (find_mapping(mapping.dimension, mapping.layer) != nullptr) {
        throw InvariantError("duplicate mapping " + q(mapping.dimension) + " -> " +
                             q(mapping.layer));
    }
    mappings_.push_back(std::move(mapping));
}

const Dimension* Warehouse::find_dimension(std::string_view name) const {
    for (const auto& d : dimensions_) {
        if (iequals(d.name(), name)) return &d;
    }
    return nullptr;
}

const Dimension& Warehouse::dimension(std::string_view name) const {
    const Dimension* d = find_dimension(name);
    if (d == nullptr) throw NameError("unknown dimension " + q(name));
    return *d;
}

const Cube* Warehouse::find_cube(std::string_view name) const {
    for (const auto& c : cubes_) {
        if (iequals(c.name, name)) return &c;
    }
    return nullptr;
}

const Cube& Warehouse::cube(std::string_view name) const {
    const Cube* c = find_cube(name);
    if (c == nullptr) throw NameError("unknown cube " + q(name));
    return *c;
}

const AlphaMapping* Warehouse::find_mapping(std::string_view dimension,
                                            std::string_view layer) const {
    for (const auto& m : mappings_) {
        if (iequals(m.dimension, dimension) && iequals(m.layer, layer)) return &m;
    }
    return nullptr;
}

std::vector<const AlphaMapping*> Warehouse::mappings_for_dimension(
    std::string_view dimension) const {
    std::vector<const AlphaMapping*> out;
    for (const auto& m : mappings_) {
        if (iequals(m.dimension, dimension)) out.push_back(&m);
    }
    return out;
}

std::set<std::string> Warehouse::objects_for_members(const AlphaMapping& mapping,
                                                     const std::set<std::string>& members) const {
    std::set<std::string> ids;
    for (const auto& row : mapping.rows) {
        if (members.count(row.member) != 0) ids.insert(row.object_id);
    }
    return ids;
}

namespace {

/// Facts of a cube that pass the slicers and the object restriction.
class FactSelection {
public:
    FactSelection(const Warehouse& wh, const Cube& cube, const CubeRequest& request,
                  const TimeConfig& time) {
        for (const auto& s : request.slicers) {
            const auto di = cube.dimension_index(s.dimension);
            if (!di) {
                throw NameError("cube " + q(cube.name) + " has no dimension " +
                                q(s.dimension));
            }
            const Dimension& dim = wh.dimension(s.dimension);
            const Member* m = dim.find_member(s.member);
            if (m == nullptr) {
                throw NameError("unknown member " + q(s.member) + " in dimension " +
                                q(dim.name()));
            }
            slicers_.push_back({*di, &dim, m->level, m->name});
            if (iequals(dim.name(), wh.time_dimension)) {
                if (auto year = parse_year(s.member)) {
                    const Interval range = time.year_range(*year);
                    if (!context_) {
                        context_ = range;
                    } else if (auto both = intersection(*context_, range)) {
                        context_ = *both;
                    } else {
                        empty_context_ = true;
                    }
                }
            }
        }
        if (request.object_filter) {
            const auto& [dim_name, filter] = *request.object_filter;
            const auto di = cube.dimension_index(dim_name);
            if (!di) {
                throw NameError("cube " + q(cube.name) + " has no dimension " +
                                q(dim_name));
            }
            const AlphaMapping* mapping = wh.find_mapping(dim_name, filter.layer);
            if (mapping == nullptr) {
                throw NameError("no mapping between dimension " + q(dim_name) +
                                " and layer " + q(filter.layer));
            }
            const Dimension& dim = wh.dimension(dim_name);
            restriction_ = Restriction{*di, &dim, dim.level_index(mapping->level), {}};
            for (const auto& row : mapping->rows) {
                if (filter.object_ids.count(row.object_id) == 0) continue;
                if (context_ && !qualifies(row, filter)) continue;
                restriction_->members.insert(row.member);
            }
        }
    }

    std::optional<Interval> temporal_context() const { return context_; }

    bool passes(const Fact& fact) const {
        if (empty_context_) return false;
        for (const auto& s : slicers_) {
            if (s.dim->rollup(fact.keys[s.index], s.level) != s.member) return false;
        }
        if (restriction_) {
            const auto& r = *restriction_;
            if (r.members.count(r.dim->rollup(fact.keys[r.index], r.level)) == 0) return false;
        }
        return true;
    }

private:
    bool qualifies(const AlphaRow& row, const ObjectFilter& filter) const {
        if (!intersection(row.interval, *context_)) return false;
        auto it = filter.intervals.find(row.object_id);
        if (it == filter.intervals.end() || it->second.empty()) return true;
        return std::any_of(it->second.begin(), it->second.end(),
                           [&](const Interval& i) { return intersection(i, *context_).has_value(); });
    }

    struct BoundSlicer {
        std::size_t index;
        const Dimension* dim;
        std::size_t level;
        std::string member;
    };
    struct Restriction {
        std::size_t index;
        const Dimension* dim;
        std::size_t level;
        std::set<std::string> members;
    };

    std::vector<BoundSlicer> slicers_;
    std::optional<Restriction> restriction_;
    std::optional<Interval> context_;
    bool empty_context_ = false;
};

std::size_t require_measure(const Cube& cube, std::string_view measure) {
    auto mi = cube.measure_index(measure);
    if (!mi) throw NameError("cube " + q(cube.name) + " has no measure " + q(measure));
    return *mi;
}

}  // namespace

CubeResult Warehouse::evaluate(const CubeRequest& request, const TimeConfig& time) const {
    const Cube& c = cube(request.cube);
    const FactSelection selection(*this, c, request, time);
    CubeResult result;

    if (const auto* f = std::get_if<MemberFilterSelect>(&request.select)) {
        const auto di = c.dimension_index(f->dimension);
        if (!di) {
            throw NameError("cube " + q(c.name) + " has no dimension " + q(f->dimension));
        }
        const Dimension& dim = dimension(f->dimension);
        const std::size_t level = dim.level_index(f->level);
        const std::size_t mi = require_measure(c, f->measure);
        // Members without any qualifying fact have no aggregate and never pass.
        std::map<std::string, double> totals;
        for (const auto& fact : c.facts) {
            if (!selection.passes(fact)) continue;
            totals[dim.rollup(fact.keys[*di], level)] += fact.measures[mi];
        }
        result.columns = {dim.levels()[level], c.measures[mi]};
        result.member_level = {dim.name(), dim.levels()[level]};
        for (const auto& [member, total] : totals) {
            if (compare_number(total, f->op, f->threshold)) {
                result.members.push_back(member);
                result.rows.push_back({member, total});
            }
        }
        return result;
    }

    const auto& t = std::get<TabularSelect>(request.select);
    std::vector<std::size_t> measures;
    for (const auto& m : t.measures) measures.push_back(require_measure(c, m));

    std::map<std::string, std::vector<double>> groups;
    std::optional<std::size_t> di;
    const Dimension* dim = nullptr;
    std::optional<std::size_t> level;
    if (t.row_dimension) {
        di = c.dimension_index(*t.row_dimension);
        if (!di) {
            throw NameError("cube " + q(c.name) + " has no dimension " +
                            q(*t.row_dimension));
        }
        dim = &dimension(*t.row_dimension);
        if (t.row_level) {
            level = dim->level_index(*t.row_level);
        } else if (t.row_member) {
            const Member* m = dim->find_member(*t.row_member);
            if (m == nullptr) {
                throw NameError("unknown member " + q(*t.row_member) + " in dimension " +
                                q(dim->name()));
            }
            level = m->level;
        }
        result.columns.push_back(dim->name());
    }
    for (std::size_t mi : measures) result.columns.push_back(c.measures[mi]);

    for (const auto& fact : c.facts) {
        if (!selection.passes(fact)) continue;
        std::string key = "All";
        if (dim != nullptr && level) {
            key = dim->rollup(fact.keys[*di], *level);
            if (t.row_member && key != *t.row_member) continue;
        }
        auto& sums = groups[key];
        sums.resize(measures.size(), 0.0);
        for (std::size_t k = 0; k < measures.size(); ++k) sums[k] += fact.measures[measures[k]];
    }
    if (t.row_member && groups.empty()) groups[*t.row_member].assign(measures.size(), 0.0);
    for (const auto& [key, sums] : groups) {
        std::vector<Value> row;
        if (dim != nullptr) row.push_back(key);
        for (double s : sums) row.push_back(s);
        result.rows.push_back(std::move(row));
    }
    return result;
}

void Warehouse::propagate(const ChangeEvent& event,
                          const std::optional<std::string>& rollup_parent) {
    if (event.kind != ChangeKind::Split && event.kind != ChangeKind::Merge) return;
    Warehouse next = *this;
    for (auto& mapping : next.mappings_) {
        if (!iequals(mapping.layer, event.layer)) continue;
        auto dim_it = std::find_if(next.dimensions_.begin(), next.dimensions_.end(),
                                   [&](const Dimension& d) { return iequals(d.name(), mapping.dimension); });
        if (dim_it == next.dimensions_.end()) {
            throw NameError("mapping refers to unknown dimension " + q(mapping.dimension));
        }
        Dimension& dim = *dim_it;
        const std::size_t level = dim.level_index(mapping.level);
        const Instant last = event.at.previous();

        std::set<std::string> old_members;
        for (const auto& id : event.removed) {
            for (const auto& row : mapping.rows) {
                if (row.object_id == id && row.interval.is_live()) old_members.insert(row.member);
            }
        }
        for (const auto& member : old_members) {
            if (!dim.has_member(member)) {
                throw NameError("event references unknown member " + q(member));
            }
        }
        if (mode == DimensionMode::Temporal) {
            for (auto& row : mapping.rows) {
                const bool affected =
                    std::find(event.removed.begin(), event.removed.end(), row.object_id) !=
                    event.removed.end();
                if (affected && row.interval.is_live()) {
                    row.interval = Interval(row.interval.from(), last);
                }
            }
            for (const auto& member : old_members) {
                const Member* live = dim.find_member(member);
                if (live != nullptr && live->validity.is_live()) dim.close_member(member, last);
            }
        } else {
            std::erase_if(mapping.rows, [&](const AlphaRow& row) {
                return old_members.count(row.member) != 0 ||
                       std::find(event.removed.begin(), event.removed.end(), row.object_id) !=
                           event.removed.end();
            });
            for (const auto& member : old_members) dim.remove_member(member);
        }

        const bool needs_parent = level + 1 < dim.levels().size();
        for (const auto& id : event.added) {
            if (dim.has_member(id)) {
                throw InvariantError("dimension " + q(dim.name()) + " already has member " +
                                     q(id));
            }
            Member member{id, level, std::nullopt, Interval(event.at, Instant::now())};
            if (needs_parent) {
                if (!rollup_parent) {
                    throw InvariantError("missing rollup assignment for new member " + q(id) +
                                         " of " + q(dim.name()));
                }
                const auto at_t = mode == DimensionMode::Temporal ? std::optional(event.at)
                                                                  : std::nullopt;
                const Member* parent = dim.find_member(*rollup_parent, at_t);
                if (parent == nullptr || parent->level != level + 1) {
                    throw NameError("rollup target " + q(*rollup_parent) +
                                    " is not a valid " + q(dim.levels()[level + 1]) +
                                    " member");
                }
                member.parent = *rollup_parent;
            }
            dim.add_member(std::move(member));
            mapping.rows.push_back({id, id, Interval(event.at, Instant::now())});
        }
    }
    *this = std::move(next);
}

std::vector<std::string> Warehouse::check_alpha(const LayerStore& layers) const {
    std::vector<std::string> problems;
    for (const auto& mapping : mappings_) {
        const Layer* layer = layers.find(mapping.layer);
        if (layer == nullptr) {
            problems.push_back("mapping " + q(mapping.dimension) + " refers to unknown layer " +
                               q(mapping.layer));
            continue;
        }
        for (const auto& row : mapping.rows) {
            const auto history = layer->history(row.object_id);
            if (history.empty()) {
                problems.push_back("mapping row " + row.member + " -> " + row.object_id +
                                   ": unknown object");
                continue;
            }
            if (row.interval.is_live() && layer->live_stage(row.object_id) == nullptr) {
                problems.push_back("live mapping row " + row.member + " -> " + row.object_id +
                                   ": object has no live stage");
            }
            std::vector<Interval> spans;
            for (const Stage* s : history) spans.push_back(s->interval);
            const auto merged = interval_union(spans);
            const bool inside = std::any_of(merged.begin(), merged.end(), [&](const Interval& i) {
                return i.from() <= row.interval.from() && row.interval.to() <= i.to();
            });
            if (!inside) {
                problems.push_back("mapping row " + row.member + " -> " + row.object_id + " " +
                                   row.interval.to_string() + " exceeds the object's lifespan");
            }
        }
    }
    return problems;
}

Dimension load_dimension_csv(const std::string& name, const std::filesystem::path& file,
                             const TimeConfig& time) {
    const CsvTable table = read_csv(file);
    const std::size_t c_member = table.column(file, "member");
    const std::size_t c_level = table.column(file, "level");
    const std::size_t c_parent = table.column(file, "parent");
    const bool temporal = table.header.size() >= 5;
    const std::size_t c_from = temporal ? table.column(file, "from") : 0;
    const std::size_t c_to = temporal ? table.column(file, "to") : 0;

    std::vector<std::string> levels;
    std::map<std::string, std::string> level_of;
    for (const auto& r : table.records) {
        const std::string& level = r.cells[c_level];
        if (level.empty()) throw LoadError(file, r.line, "empty level");
        if (std::find(levels.begin(), levels.end(), level) == levels.end()) levels.push_back(level);
        auto [it, fresh] = level_of.emplace(r.cells[c_member], level);
        if (!fresh && it->second != level) {
            throw LoadError(file, r.line, "member " + q(r.cells[c_member]) + " on two levels");
        }
    }
    std::map<std::string, std::string> parent_level;
    for (const auto& r : table.records) {
        const std::string& parent = r.cells[c_parent];
        if (parent.empty()) continue;
        auto it = level_of.find(parent);
        if (it == level_of.end()) {
            throw LoadError(file, r.line, "unknown parent " + q(parent));
        }
        auto [pl, fresh] = parent_level.emplace(r.cells[c_level], it->second);
        if (!fresh && pl->second != it->second) {
            throw LoadError(file, r.line, "level " + q(r.cells[c_level]) +
                                              " rolls up to two different levels");
        }
    }
    std::set<std::string> parents;
    for (const auto& [child, parent] : parent_level) parents.insert(parent);
    std::vector<std::string> bottoms;
    for (const auto& l : levels) {
        if (parents.count(l) == 0) bottoms.push_back(l);
    }
    if (bottoms.size() != 1) throw LoadError(file, 0, "levels do not form a single chain");
    std::vector<std::string> chain{bottoms.front()};
    while (parent_level.count(chain.back()) != 0) {
        chain.push_back(parent_level.at(chain.back()));
        if (chain.size() > levels.size()) throw LoadError(file, 0, "cyclic level structure");
    }
    if (chain.size() != levels.size()) throw LoadError(file, 0, "levels do not form a single chain");

    Dimension dim(name, chain);
    std::vector<const CsvRecord*> ordered;
    for (const auto& r : table.records) ordered.push_back(&r);
    auto index_of = [&](const std::string& level) {
        return static_cast<std::size_t>(std::find(chain.begin(), chain.end(), level) - chain.begin());
    };
    std::stable_sort(ordered.begin(), ordered.end(), [&](const CsvRecord* a, const CsvRecord* b) {
        return index_of(a->cells[c_level]) > index_of(b->cells[c_level]);
    });
    for (const CsvRecord* r : ordered) {
        try {
            Member m{r->cells[c_member], index_of(r->cells[c_level]), std::nullopt,
                     Interval::since(0)};
            if (!r->cells[c_parent].empty()) m.parent = r->cells[c_parent];
            if (temporal) {
                m.validity = Interval(time.parse_instant(r->cells[c_from]),
                                      time.parse_instant(r->cells[c_to]));
            }
            dim.add_member(std::move(m));
        } catch (const LoadError&) {
            throw;
        } catch (const Error& e) {
            throw LoadError(file, r->line, e.what());
        }
    }
    return dim;
}

void save_dimension_csv(const Dimension& dimension, const std::filesystem::path& file) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : dimension.members()) {
        rows.push_back({m.name, dimension.levels()[m.level], m.parent.value_or(""),
                        m.validity.from().to_string(), m.validity.to().to_string()});
    }
    write_csv(file, {"member", "level", "parent", "from", "to"}, rows);
}

Cube load_cube_csv(const std::string& name, const std::vector<std::string>& dimensions,
                   const std::vector<std::string>& measures, const std::filesystem::path& file) {
    const CsvTable table = read_csv(file);
    Cube cube{name, dimensions, measures, {}};
    std::vector<std::size_t> dim_cols;
    std::vector<std::size_t> measure_cols;
    for (const auto& d : dimensions) dim_cols.push_back(table.column(file, d));
    for (const auto& m : measures) measure_cols.push_back(table.column(file, m));
    for (const auto& r : table.records) {
        Fact fact;
        for (std::size_t c : dim_cols) fact.keys.push_back(r.cells[c]);
        for (std::size_t c : measure_cols) {
            const Value v = infer_scalar(r.cells[c]);
            const auto* number = std::get_if<double>(&v);
            if (number == nullptr) {
                throw LoadError(file, r.line, "measure " + q(table.header[c]) +
                                                  " is not numeric: " + q(r.cells[c]));
            }
            fact.measures.push_back(*number);
        }
        cube.facts.push_back(std::move(fact));
    }
    return cube;
}

AlphaMapping load_mapping_csv(const std::string& dimension, const std::string& level,
                              const std::string& layer, const std::filesystem::path& file,
                              const TimeConfig& time) {
    const CsvTable table = read_csv(file);
    const std::size_t c_member = table.column(file, "member");
    const std::size_t c_layer = table.column(file, "layer");
    const std::size_t c_object = table.column(file, "object_id");
    const std::size_t c_from = table.column(file, "from");
    const std::size_t c_to = table.column(file, "to");
    AlphaMapping mapping{dimension, level, layer, {}};
    for (const auto& r : table.records) {
        if (!iequals(r.cells[c_layer], layer)) {
            throw LoadError(file, r.line, "row maps to layer " + q(r.cells[c_layer]) +
                                              ", expected " + q(layer));
        }
        try {
            mapping.rows.push_back({r.cells[c_member], r.cells[c_object],
                                    Interval(time.parse_instant(r.cells[c_from]),
                                             time.parse_instant(r.cells[c_to]))});
        } catch (const Error& e) {
            throw LoadError(file, r.line, e.what());
        }
    }
    return mapping;
}

void save_mapping_csv(const AlphaMapping& mapping, const std::filesystem::path& file) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : mapping.rows) {
        rows.push_back({r.member, mapping.layer, r.object_id, r.interval.from().to_string(),
                        r.interval.to().to_string()});
    }
    write_csv(file, {"member", "layer", "object_id", "from", "to"}, rows);
}

}  // namespace tpiet
