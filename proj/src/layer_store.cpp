#include <tpiet/layer_store.hpp>
#include <tpiet/text.hpp>

#include <tpiet/csv.hpp>
#include <tpiet/error.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace tpiet {

std::string_view name_of(ChangeKind kind) {
    switch (kind) {
        case ChangeKind::Create: return "create";
        case ChangeKind::Split: return "split";
        case ChangeKind::Merge: return "merge";
        case ChangeKind::Update: return "update";
        case ChangeKind::Delete: return "delete";
        case ChangeKind::Reincarnate: return "reincarnate";
    }
    return "?";
}

namespace {

void require_finite(Instant t) {
    if (!t.is_finite()) throw InvariantError("operation instant must be finite, got Now");
}

void require_kind(const Layer& layer, const Geometry& g) {
    if (g.kind() != layer.kind()) {
        throw InvariantError("layer '" + layer.name() + "' holds " +
                             std::string(name_of(layer.kind())) + "s, got a " +
                             std::string(name_of(g.kind())));
    }
}

const Stage& require_live(const Layer& layer, std::string_view id) {
    const Stage* s = layer.live_stage(id);
    if (s == nullptr) {
        throw InvariantError("object '" + std::string(id) + "' has no live stage in layer '" +
                             layer.name() + "'");
    }
    return *s;
}

void require_after(const Stage& stage, Instant t) {
    if (t <= stage.interval.from()) {
        throw InvariantError("instant " + t.to_string() + " must follow the current stage of '" +
                             stage.object_id + "' which starts at " +
                             stage.interval.from().to_string());
    }
}

void require_fresh(const Layer& layer, std::string_view id) {
    if (layer.has_object(id)) {
        throw InvariantError("object id '" + std::string(id) + "' already exists in layer '" +
                             layer.name() + "'");
    }
}

std::optional<std::string> area_lint(double before, double after, std::string_view what) {
    if (before <= 0.0) return std::nullopt;
    if (std::abs(after - before) / before > 0.01) {
        return std::string(what) + ": resulting area " + render(after) +
               " differs from original area " + render(before) + " by more than 1%";
    }
    return std::nullopt;
}

}  // namespace

Layer::Layer(std::string name, GeometryKind kind, std::vector<AttributeDef> schema)
    : name_(std::move(name)), kind_(kind), schema_(std::move(schema)) {
    std::set<std::string> seen;
    for (const auto& attr : schema_) {
        if (attr.name == "id" || attr.name == "the_geom" || attr.name == "object_id" ||
            attr.name == "wkt" || attr.name == "from" || attr.name == "to") {
            throw InvariantError("attribute name '" + attr.name + "' is reserved");
        }
        if (!seen.insert(attr.name).second) {
            throw InvariantError("duplicate attribute '" + attr.name + "'");
        }
    }
}

std::optional<std::size_t> Layer::attribute_index(std::string_view name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].name == name) return i;
    }
    return std::nullopt;
}

bool Layer::has_object(std::string_view id) const {
    return std::any_of(stages_.begin(), stages_.end(),
                       [&](const Stage& s) { return s.object_id == id; });
}

std::vector<const Stage*> Layer::history(std::string_view id) const {
    std::vector<const Stage*> out;
    for (const auto& s : stages_) {
        if (s.object_id == id) out.push_back(&s);
    }
    std::sort(out.begin(), out.end(),
              [](const Stage* a, const Stage* b) { return a->interval < b->interval; });
    return out;
}

const Stage* Layer::live_stage(std::string_view id) const {
    for (const auto& s : stages_) {
        if (s.object_id == id && s.interval.is_live()) return &s;
    }
    return nullptr;
}

Stage& Layer::live_stage_mut(std::string_view id) {
    for (auto& s : stages_) {
        if (s.object_id == id && s.interval.is_live()) return s;
    }
    throw InvariantError("object '" + std::string(id) + "' has no live stage");
}

std::vector<std::string> Layer::object_ids() const {
    std::set<std::string> ids;
    for (const auto& s : stages_) ids.insert(s.object_id);
    return {ids.begin(), ids.end()};
}

std::vector<const Stage*> Layer::snapshot(Instant::Tick t) const {
    std::vector<const Stage*> out;
    for (const auto& s : stages_) {
        if (at(s.interval, Instant(t))) out.push_back(&s);
    }
    return out;
}

std::vector<Interval> Layer::lifespan() const {
    std::vector<Interval> all;
    for (const auto& s : stages_) all.push_back(s.interval);
    return interval_union(std::move(all));
}

void Layer::insert(Stage stage) {
    require_kind(*this, stage.geometry);
    if (stage.attributes.size() != schema_.size()) {
        throw InvariantError("stage of '" + stage.object_id + "' has " +
                             std::to_string(stage.attributes.size()) + " attributes, layer '" +
                             name_ + "' expects " + std::to_string(schema_.size()));
    }
    if (stage.object_id.empty()) throw InvariantError("empty object id");
    for (const auto& s : stages_) {
        if (s.object_id == stage.object_id && intersection(s.interval, stage.interval)) {
            throw InvariantError("stages of '" + stage.object_id + "' overlap: " +
                                 s.interval.to_string() + " and " + stage.interval.to_string());
        }
    }
    stages_.push_back(std::move(stage));
}

std::vector<Value> Layer::align(const AttributeMap& attributes) const {
    std::vector<Value> out;
    out.reserve(schema_.size());
    for (const auto& def : schema_) {
        auto it = attributes.find(def.name);
        if (it == attributes.end()) {
            throw InvariantError("missing attribute '" + def.name + "' for layer '" + name_ + "'");
        }
        Value v = it->second;
        if (def.type == AttributeType::Number) {
            if (const auto* s = std::get_if<std::string>(&v)) {
                v = infer_scalar(*s);
                if (!std::holds_alternative<double>(v)) {
                    throw InvariantError("attribute '" + def.name + "' expects a number, got '" +
                                         *s + "'");
                }
            } else if (!std::holds_alternative<double>(v)) {
                throw InvariantError("attribute '" + def.name + "' expects a number");
            }
        } else if (!std::holds_alternative<std::string>(v)) {
            v = render(v);
        }
        out.push_back(std::move(v));
    }
    if (attributes.size() != schema_.size()) {
        for (const auto& [name, value] : attributes) {
            if (!attribute_index(name)) {
                throw InvariantError("unknown attribute '" + name + "' for layer '" + name_ + "'");
            }
        }
    }
    return out;
}

AttributeMap Layer::attribute_map(const Stage& stage) const {
    AttributeMap out;
    for (std::size_t i = 0; i < schema_.size(); ++i) out[schema_[i].name] = stage.attributes[i];
    return out;
}

void LayerStore::add_layer(Layer layer) {
    if (find(layer.name()) != nullptr) {
        throw InvariantError("duplicate layer '" + layer.name() + "'");
    }
    layers_.push_back(std::move(layer));
}

const Layer* LayerStore::find(std::string_view name) const {
    for (const auto& l : layers_) {
        if (iequals(l.name(), name)) return &l;
    }
    return nullptr;
}

const Layer& LayerStore::layer(std::string_view name) const {
    const Layer* l = find(name);
    if (l == nullptr) throw NameError("unknown layer '" + std::string(name) + "'");
    return *l;
}

Layer& LayerStore::layer_mut(std::string_view name) {
    return const_cast<Layer&>(layer(name));
}

std::vector<std::string> LayerStore::layer_names() const {
    std::vector<std::string> out;
    for (const auto& l : layers_) out.push_back(l.name());
    return out;
}

ChangeEvent LayerStore::create_object(std::string_view layer_name, StageSpec spec, Instant t) {
    require_finite(t);
    Layer& target = layer_mut(layer_name);
    if (target.live_stage(spec.object_id) != nullptr) {
        throw InvariantError("object '" + spec.object_id + "' already has a live stage");
    }
    if (target.has_object(spec.object_id)) {
        throw InvariantError("object '" + spec.object_id +
                             "' has a past history; use reincarnate");
    }
    require_kind(target, spec.geometry);
    auto attrs = target.align(spec.attributes);
    target.insert(Stage{spec.object_id, std::move(spec.geometry), std::move(attrs),
                        Interval(t, Instant::now())});
    return ChangeEvent{ChangeKind::Create, target.name(), {}, {spec.object_id}, t, {}};
}

ChangeEvent LayerStore::split(std::string_view layer_name, std::string_view parent, Instant t,
                              std::vector<StageSpec> parts) {
    require_finite(t);
    Layer& target = layer_mut(layer_name);
    const Stage& live = require_live(target, parent);
    require_after(live, t);
    if (parts.size() < 2) throw InvariantError("a split needs at least two parts");

    Layer working = target;
    const AttributeMap parent_attrs = working.attribute_map(live);
    const Geometry parent_geometry = live.geometry;
    std::set<std::string> ids;
    ChangeEvent event{ChangeKind::Split, target.name(), {std::string(parent)}, {}, t, {}};
    working.live_stage_mut(parent).interval = Interval(live.interval.from(), t.previous());
    double parts_area = 0.0;
    for (auto& part : parts) {
        require_fresh(working, part.object_id);
        if (!ids.insert(part.object_id).second) {
            throw InvariantError("duplicate part id '" + part.object_id + "'");
        }
        require_kind(working, part.geometry);
        if (part.geometry.kind() == GeometryKind::Polygon) parts_area += area(part.geometry);
        auto attrs = working.align(part.attributes.empty() ? parent_attrs : part.attributes);
        event.added.push_back(part.object_id);
        working.insert(Stage{part.object_id, std::move(part.geometry), std::move(attrs),
                             Interval(t, Instant::now())});
    }
    if (parent_geometry.kind() == GeometryKind::Polygon) {
        if (auto w = area_lint(area(parent_geometry), parts_area, "split of " + std::string(parent))) {
            event.warnings.push_back(*w);
        }
    }
    target = std::move(working);
    return event;
}

ChangeEvent LayerStore::merge(std::string_view layer_name, const std::vector<std::string>& parents,
                              Instant t, StageSpec merged) {
    require_finite(t);
    Layer& target = layer_mut(layer_name);
    if (parents.size() < 2) throw InvariantError("a merge needs at least two parents");
    std::set<std::string> distinct(parents.begin(), parents.end());
    if (distinct.size() != parents.size()) throw InvariantError("merge parents must be distinct");
    require_fresh(target, merged.object_id);
    require_kind(target, merged.geometry);

    Layer working = target;
    double parents_area = 0.0;
    AttributeMap first_attrs;
    for (const auto& p : parents) {
        const Stage& live = require_live(working, p);
        require_after(live, t);
        if (first_attrs.empty()) first_attrs = working.attribute_map(live);
        if (live.geometry.kind() == GeometryKind::Polygon) parents_area += area(live.geometry);
    }
    for (const auto& p : parents) {
        Stage& live = working.live_stage_mut(p);
        live.interval = Interval(live.interval.from(), t.previous());
    }
    ChangeEvent event{ChangeKind::Merge, target.name(), parents, {merged.object_id}, t, {}};
    if (merged.geometry.kind() == GeometryKind::Polygon) {
        if (auto w = area_lint(parents_area, area(merged.geometry), "merge into " + merged.object_id)) {
            event.warnings.push_back(*w);
        }
    }
    auto attrs = working.align(merged.attributes.empty() ? first_attrs : merged.attributes);
    working.insert(Stage{merged.object_id, std::move(merged.geometry), std::move(attrs),
                         Interval(t, Instant::now())});
    target = std::move(working);
    return event;
}

ChangeEvent LayerStore::update_object(std::string_view layer_name, std::string_view id, Instant t,
                                      Geometry geometry, std::optional<AttributeMap> attributes) {
    require_finite(t);
    Layer& target = layer_mut(layer_name);
    const Stage& live = require_live(target, id);
    require_after(live, t);
    require_kind(target, geometry);
    auto attrs = target.align(attributes ? *attributes : target.attribute_map(live));

    Layer working = target;
    Stage& closing = working.live_stage_mut(id);
    closing.interval = Interval(closing.interval.from(), t.previous());
    working.insert(Stage{std::string(id), std::move(geometry), std::move(attrs),
                         Interval(t, Instant::now())});
    target = std::move(working);
    return ChangeEvent{ChangeKind::Update, target.name(), {std::string(id)}, {std::string(id)}, t, {}};
}

ChangeEvent LayerStore::delete_object(std::string_view layer_name, std::string_view id, Instant t) {
    require_finite(t);
    Layer& target = layer_mut(layer_name);
    const Stage& live = require_live(target, id);
    require_after(live, t);
    target.live_stage_mut(id).interval = Interval(live.interval.from(), t.previous());
    return ChangeEvent{ChangeKind::Delete, target.name(), {std::string(id)}, {}, t, {}};
}

ChangeEvent LayerStore::reincarnate(std::string_view layer_name, std::string_view id, Instant t,
                                    Geometry geometry, std::optional<AttributeMap> attributes) {
    require_finite(t);
    Layer& target = layer_mut(layer_name);
    const auto past = target.history(id);
    if (past.empty()) throw InvariantError("unknown object '" + std::string(id) + "'");
    if (target.live_stage(id) != nullptr) {
        throw InvariantError("object '" + std::string(id) + "' is still live; use update");
    }
    const Instant last_to = past.back()->interval.to();
    if (t.tick() <= last_to.tick() + 1) {
        throw InvariantError("reincarnation of '" + std::string(id) + "' at " + t.to_string() +
                             " is not after a gap (last stage ends at " + last_to.to_string() +
                             "); use update");
    }
    require_kind(target, geometry);
    auto attrs = target.align(attributes ? *attributes : target.attribute_map(*past.back()));
    target.insert(Stage{std::string(id), std::move(geometry), std::move(attrs),
                        Interval(t, Instant::now())});
    return ChangeEvent{ChangeKind::Reincarnate, target.name(), {}, {std::string(id)}, t, {}};
}

std::vector<Interval> LayerStore::lifespan() const {
    std::vector<Interval> all;
    for (const auto& l : layers_) {
        for (const auto& i : l.lifespan()) all.push_back(i);
    }
    return interval_union(std::move(all));
}

Layer load_layer_csv(const std::string& name, GeometryKind kind,
                     const std::filesystem::path& file, const TimeConfig& time) {
    const CsvTable table = read_csv(file);
    const auto& h = table.header;
    if (h.size() < 4 || h[0] != "object_id" || h[1] != "wkt" || h[h.size() - 2] != "from" ||
        h.back() != "to") {
        throw LoadError(file, 1, "layer header must be object_id,wkt,<attributes...>,from,to");
    }
    const std::size_t n_attrs = h.size() - 4;
    std::vector<AttributeDef> schema;
    for (std::size_t a = 0; a < n_attrs; ++a) {
        bool numeric = !table.records.empty();
        for (const auto& r : table.records) {
            if (!std::holds_alternative<double>(infer_scalar(r.cells[2 + a]))) {
                numeric = false;
                break;
            }
        }
        schema.push_back({h[2 + a], numeric ? AttributeType::Number : AttributeType::String});
    }
    Layer layer = [&] {
        try {
            return Layer(name, kind, schema);
        } catch (const Error& e) {
            throw LoadError(file, 1, e.what());
        }
    }();
    for (const auto& r : table.records) {
        try {
            Stage s{r.cells[0], parse_wkt(r.cells[1]), {},
                    Interval(time.parse_instant(r.cells[h.size() - 2]),
                             time.parse_instant(r.cells.back()))};
            for (std::size_t a = 0; a < n_attrs; ++a) {
                const std::string& cell = r.cells[2 + a];
                s.attributes.push_back(schema[a].type == AttributeType::Number ? infer_scalar(cell)
                                                                               : Value(cell));
            }
            layer.insert(std::move(s));
        } catch (const LoadError&) {
            throw;
        } catch (const Error& e) {
            throw LoadError(file, r.line, e.what());
        }
    }
    return layer;
}

void save_layer_csv(const Layer& layer, const std::filesystem::path& file) {
    std::vector<std::string> header{"object_id", "wkt"};
    for (const auto& a : layer.schema()) header.push_back(a.name);
    header.push_back("from");
    header.push_back("to");
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : layer.stages()) {
        std::vector<std::string> row{s.object_id, to_wkt(s.geometry)};
        for (const auto& v : s.attributes) row.push_back(render(v));
        row.push_back(s.interval.from().to_string());
        row.push_back(s.interval.to().to_string());
        rows.push_back(std::move(row));
    }
    write_csv(file, header, rows);
}

}  // namespace tpiet
