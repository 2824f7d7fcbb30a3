#pragma once

#include <tpiet/geometry.hpp>
#include <tpiet/temporal.hpp>
#include <tpiet/time_config.hpp>
#include <tpiet/value.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tpiet {

enum class AttributeType { Number, String };

struct AttributeDef {
    std::string name;
    AttributeType type = AttributeType::String;

    friend bool operator==(const AttributeDef&, const AttributeDef&) = default;
};

using AttributeMap = std::map<std::string, Value>;

/// One stage of a spatio-temporal object: fixed geometry and attributes over
/// one validity interval. `attributes` is aligned with the layer schema.
struct Stage {
    std::string object_id;
    Geometry geometry;
    std::vector<Value> attributes;
    Interval interval;

    friend bool operator==(const Stage&, const Stage&) = default;
};

enum class ChangeKind { Create, Split, Merge, Update, Delete, Reincarnate };

std::string_view name_of(ChangeKind kind);

/// Emitted by every mutating layer operation; consumed by the warehouse.
struct ChangeEvent {
    ChangeKind kind = ChangeKind::Create;
    std::string layer;
    std::vector<std::string> removed;  // ids whose live stage was closed
    std::vector<std::string> added;    // ids that gained a new live stage
    Instant at;
    std::vector<std::string> warnings;
};

/// Input for operations that open a stage for a (possibly new) object.
struct StageSpec {
    std::string object_id;
    Geometry geometry;
    AttributeMap attributes;
};

/// Geometry-homogeneous temporal relation of stages.
class Layer {
public:
    Layer(std::string name, GeometryKind kind, std::vector<AttributeDef> schema);

    const std::string& name() const { return name_; }
    GeometryKind kind() const { return kind_; }
    const std::vector<AttributeDef>& schema() const { return schema_; }
    std::optional<std::size_t> attribute_index(std::string_view name) const;

    const std::vector<Stage>& stages() const { return stages_; }

    bool has_object(std::string_view id) const;
    /// Stages of one object ordered by FROM.
    std::vector<const Stage*> history(std::string_view id) const;
    const Stage* live_stage(std::string_view id) const;
    std::vector<std::string> object_ids() const;

    /// Stages valid at a finite tick.
    std::vector<const Stage*> snapshot(Instant::Tick t) const;
    /// Union of stage intervals.
    std::vector<Interval> lifespan() const;

    /// Appends a stage after checking kind, schema arity and per-object
    /// history disjointness. Throws InvariantError.
    void insert(Stage stage);

    /// Orders attribute values by the schema, converting numeric strings for
    /// number columns. Throws InvariantError on missing or extra names.
    std::vector<Value> align(const AttributeMap& attributes) const;
    AttributeMap attribute_map(const Stage& stage) const;

    // Mutators used by LayerStore operations.
    Stage& live_stage_mut(std::string_view id);

private:
    std::string name_;
    GeometryKind kind_;
    std::vector<AttributeDef> schema_;
    std::vector<Stage> stages_;
};

/// All thematic layers, with the discrete-change update operations. Every
/// operation requires strictly increasing instants per object and either
/// succeeds completely or leaves the store unchanged.
class LayerStore {
public:
    void add_layer(Layer layer);

    /// Case-insensitive lookup.
    const Layer* find(std::string_view name) const;
    const Layer& layer(std::string_view name) const;
    std::vector<std::string> layer_names() const;

    ChangeEvent create_object(std::string_view layer, StageSpec spec, Instant t);
    ChangeEvent split(std::string_view layer, std::string_view parent, Instant t,
                      std::vector<StageSpec> parts);
    ChangeEvent merge(std::string_view layer, const std::vector<std::string>& parents, Instant t,
                      StageSpec merged);
    ChangeEvent update_object(std::string_view layer, std::string_view id, Instant t,
                              Geometry geometry, std::optional<AttributeMap> attributes = {});
    ChangeEvent delete_object(std::string_view layer, std::string_view id, Instant t);
    ChangeEvent reincarnate(std::string_view layer, std::string_view id, Instant t,
                            Geometry geometry, std::optional<AttributeMap> attributes = {});

    /// Union of all layer lifespans.
    std::vector<Interval> lifespan() const;

private:
    Layer& layer_mut(std::string_view name);

    std::vector<Layer> layers_;
};

/// Loads a layer file with header `object_id,wkt,<attr...>,from,to`.
/// Attribute column types are inferred (number when every cell is numeric).
Layer load_layer_csv(const std::string& name, GeometryKind kind,
                     const std::filesystem::path& file, const TimeConfig& time);

void save_layer_csv(const Layer& layer, const std::filesystem::path& file);

}  // namespace tpiet
