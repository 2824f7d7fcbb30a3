#pragma once

#include <tpiet/error.hpp>
#include <tpiet/executor.hpp>
#include <tpiet/layer_store.hpp>
#include <tpiet/render.hpp>
#include <tpiet/time_config.hpp>
#include <tpiet/warehouse.hpp>

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace tpiet {

/// The workspace cannot be loaded or saved (bad config, missing or malformed
/// files).
class WorkspaceError : public Error {
public:
    using Error::Error;
};

struct LayerEntry {
    std::string name;
    GeometryKind kind = GeometryKind::Polygon;
    std::filesystem::path file;
};

struct DimensionEntry {
    std::string name;
    std::filesystem::path file;
};

struct CubeEntry {
    std::string name;
    std::filesystem::path file;
    std::vector<std::string> dimensions;
    std::vector<std::string> measures;
};

struct MappingEntry {
    std::string name;
    std::string dimension;
    std::string level;
    std::string layer;
    std::filesystem::path file;
};

/// Parsed workspace configuration. The file is a sequence of `[section]` or
/// `[section name]` headers followed by `key = value` lines; `#` starts a
/// comment. Relative paths resolve against the config file's directory.
struct WorkspaceConfig {
    std::filesystem::path base_dir;
    TimeConfig time;
    bool current_is_today = false;
    DimensionMode mode = DimensionMode::Temporal;
    std::string time_dimension = "Time";
    std::vector<LayerEntry> layers;
    std::vector<DimensionEntry> dimensions;
    std::vector<CubeEntry> cubes;
    std::vector<MappingEntry> mappings;

    static WorkspaceConfig parse(std::string_view text, const std::filesystem::path& base_dir);
    static WorkspaceConfig read(const std::filesystem::path& file);

    std::filesystem::path resolve(const std::filesystem::path& p) const;
};

/// Immutable catalog contents. Readers hold a shared pointer to one version;
/// writers publish a new version.
struct State {
    LayerStore layers;
    Warehouse warehouse;
    TimeConfig time;

    Catalog catalog() const { return {layers, warehouse, time}; }
};

/// A parsed update operation, e.g. `split land p1 @10 p2:WKT p3:WKT --rollup r1`.
struct OpSpec {
    ChangeKind kind = ChangeKind::Create;
    std::string layer;
    std::vector<std::string> ids;     // operands (objects the op reads)
    Instant at;
    std::vector<StageSpec> stages;    // new stages (id:WKT), in order
    std::optional<Geometry> geometry; // update / reincarnate
    AttributeMap attributes;          // attr=value pairs
    std::optional<std::string> rollup;
};

/// Parses an op from command words. WKT arguments may contain spaces when the
/// words come from a single line; see split_op_words.
OpSpec parse_op(const std::vector<std::string>& words, const TimeConfig& time);

/// Splits a line into words; whitespace inside parentheses or quotes, and
/// before an opening parenthesis, does not separate words.
std::vector<std::string> split_op_words(std::string_view line);

/// Loaded workspace with single-writer, multi-reader access.
class Engine {
public:
    static Engine open(const std::filesystem::path& config_file);
    static Engine from_config(WorkspaceConfig config);

    Engine(Engine&& other) noexcept;

    std::shared_ptr<const State> state() const;
    const WorkspaceConfig& config() const { return config_; }

    /// Parses, validates and executes a query against the current version.
    QueryResult query(std::string_view text) const;
    std::string explain(std::string_view text) const;

    /// Applies an update and its warehouse propagation atomically. Returns a
    /// one-line confirmation followed by any lint warnings.
    std::string apply(const OpSpec& op);

    /// Sets the current tick. Queries compare Now as a sentinel, so this only
    /// changes what is reported as its value.
    void set_now(Instant::Tick tick);

    /// Rewrites every layer, dimension and mapping file of the workspace.
    void save() const;

    /// Layers with stage counts and lifespans, dimensions, cubes and mappings.
    std::string summary() const;

    /// Consistency problems across layers, dimensions and mappings.
    std::vector<std::string> check() const;

private:
    Engine(WorkspaceConfig config, std::shared_ptr<const State> state);

    void publish(std::shared_ptr<const State> next);

    WorkspaceConfig config_;
    std::shared_ptr<const State> state_;
    mutable std::mutex read_mutex_;
    std::mutex write_mutex_;
};

}  // namespace tpiet
