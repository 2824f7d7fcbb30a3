#pragma once

#include <tpiet/layer_store.hpp>
#include <tpiet/temporal.hpp>
#include <tpiet/time_config.hpp>
#include <tpiet/value.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace tpiet {

/// static: only the current dimension state is kept; temporal: members are
/// versioned with validity intervals (slowly changing dimensions).
enum class DimensionMode { Static, Temporal };

struct Member {
    std::string name;
    std::size_t level = 0;
    std::optional<std::string> parent;
    Interval validity = Interval::since(0);

    friend bool operator==(const Member&, const Member&) = default;
};

/// A dimension hierarchy. Levels are ordered bottom to top; every member
/// below the top level rolls up to exactly one member of the next level.
class Dimension {
public:
    Dimension(std::string name, std::vector<std::string> levels);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& levels() const { return levels_; }
    const std::vector<Member>& members() const { return members_; }

    /// Accepts the level name itself or the "<dimension> <level>" spelling,
    /// case-insensitively.
    std::optional<std::size_t> find_level(std::string_view name) const;
    std::size_t level_index(std::string_view name) const;

    /// Version of a member valid at `t`; without `t`, the most recent version.
    const Member* find_member(std::string_view name, std::optional<Instant> t = {}) const;
    bool has_member(std::string_view name) const;

    /// Ancestor of `member` at `target_level`. With `t`, every step uses the
    /// versions valid at `t`. Throws NameError when no such ancestor exists.
    std::string rollup(std::string_view member, std::size_t target_level,
                       std::optional<Instant> t = {}) const;

    /// Distinct member names at a level (valid at `t` when given).
    std::vector<std::string> members_at(std::size_t level, std::optional<Instant> t = {}) const;

    /// Adds a member version; the parent must exist one level up.
    void add_member(Member member);
    void close_member(std::string_view name, Instant last);
    void remove_member(std::string_view name);

    /// Problems with rollup totality and single-parent structure, checked at
    /// every version boundary. Empty when well formed.
    std::vector<std::string> check() const;

private:
    std::string name_;
    std::vector<std::string> levels_;
    std::vector<Member> members_;
};

struct Fact {
    std::vector<std::string> keys;  // one bottom-level member per cube dimension
    std::vector<double> measures;
};

struct Cube {
    std::string name;
    std::vector<std::string> dimensions;
    std::vector<std::string> measures;
    std::vector<Fact> facts;

    std::optional<std::size_t> dimension_index(std::string_view dimension) const;
    std::optional<std::size_t> measure_index(std::string_view measure) const;
};

struct AlphaRow {
    std::string member;
    std::string object_id;
    Interval interval;

    friend bool operator==(const AlphaRow&, const AlphaRow&) = default;
};

/// Temporally qualified correspondence between the members of one
/// dimension level and the objects of one layer.
struct AlphaMapping {
    std::string dimension;
    std::string level;
    std::string layer;
    std::vector<AlphaRow> rows;
};

/// Restricts a cube evaluation to the members mapped to a set of objects.
struct ObjectFilter {
    std::string layer;
    std::set<std::string> object_ids;
    /// Validity of each object in the originating result, when temporal.
    std::map<std::string, std::vector<Interval>> intervals;
};

struct Slicer {
    std::string dimension;
    std::string member;
};

/// filter(<level>.Members, <measure> <op> <threshold>)
struct MemberFilterSelect {
    std::string dimension;
    std::string level;
    std::string measure;
    CmpOp op = CmpOp::Gt;
    double threshold = 0.0;
};

/// Measures evaluated per row member. The row axis is either every member of
/// a level, a single member, or absent (one grand-total row).
struct TabularSelect {
    std::vector<std::string> measures;
    std::optional<std::string> row_dimension;
    std::optional<std::string> row_level;
    std::optional<std::string> row_member;
};

struct CubeRequest {
    std::string cube;
    std::variant<MemberFilterSelect, TabularSelect> select;
    std::vector<Slicer> slicers;
    /// Restriction of one dimension to α-mapped members of the given objects.
    std::optional<std::pair<std::string, ObjectFilter>> object_filter;
};

struct CubeResult {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
    /// Member-set results: the level the members belong to.
    std::optional<std::pair<std::string, std::string>> member_level;
    std::vector<std::string> members;
};

class Warehouse {
public:
    DimensionMode mode = DimensionMode::Temporal;
    /// Name of the Time dimension whose members are year labels.
    std::string time_dimension = "Time";

    void add_dimension(Dimension dimension);
    void add_cube(Cube cube);
    void add_mapping(AlphaMapping mapping);

    const Dimension* find_dimension(std::string_view name) const;
    const Dimension& dimension(std::string_view name) const;
    const Cube* find_cube(std::string_view name) const;
    const Cube& cube(std::string_view name) const;
    const std::vector<Dimension>& dimensions() const { return dimensions_; }
    const std::vector<Cube>& cubes() const { return cubes_; }
    const std::vector<AlphaMapping>& mappings() const { return mappings_; }

    /// Mapping declared for a (dimension, layer) pair, if any.
    const AlphaMapping* find_mapping(std::string_view dimension, std::string_view layer) const;
    std::vector<const AlphaMapping*> mappings_for_dimension(std::string_view dimension) const;

    /// Objects of `layer` mapped to any of `members` of the mapping's level.
    /// Every mapping row qualifies regardless of its interval.
    std::set<std::string> objects_for_members(const AlphaMapping& mapping,
                                              const std::set<std::string>& members) const;

    CubeResult evaluate(const CubeRequest& request, const TimeConfig& time) const;

    /// Applies a split or merge event to every mapping of the event's layer.
    /// New members are named after the new objects and roll up to
    /// `rollup_parent`. Other event kinds leave the warehouse untouched.
    void propagate(const ChangeEvent& event, const std::optional<std::string>& rollup_parent);

    /// Live mapping rows must point at live stages; every row's interval must
    /// lie within the object's lifespan. Returns the violations found.
    std::vector<std::string> check_alpha(const LayerStore& layers) const;

private:
    std::vector<Dimension> dimensions_;
    std::vector<Cube> cubes_;
    std::vector<AlphaMapping> mappings_;
};

/// `member,level,parent[,from,to]`; levels are ordered by the parent links.
Dimension load_dimension_csv(const std::string& name, const std::filesystem::path& file,
                             const TimeConfig& time);
void save_dimension_csv(const Dimension& dimension, const std::filesystem::path& file);

/// Header names the dimension columns first, then the measures.
Cube load_cube_csv(const std::string& name, const std::vector<std::string>& dimensions,
                   const std::vector<std::string>& measures, const std::filesystem::path& file);

/// `member,layer,object_id,from,to`
AlphaMapping load_mapping_csv(const std::string& dimension, const std::string& level,
                              const std::string& layer, const std::filesystem::path& file,
                              const TimeConfig& time);
void save_mapping_csv(const AlphaMapping& mapping, const std::filesystem::path& file);

}  // namespace tpiet
