#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls the engine's temporal predicates, coalescing or
// executor; results are computed tick by tick over expanded point sets.

#include <tpiet/ast.hpp>
#include <tpiet/executor.hpp>
#include <tpiet/layer_store.hpp>
#include <tpiet/time_config.hpp>
#include <tpiet/warehouse.hpp>

#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using tpiet::Instant;
using tpiet::Interval;

/// Finite ticks of the test universe are 0..kHorizon; Now expands to kNowTick.
inline constexpr Instant::Tick kHorizon = 30;
inline constexpr Instant::Tick kNowTick = kHorizon + 1;

Instant::Tick expand(Instant t);
std::vector<Instant::Tick> points(const Interval& i);

/// Every interval [a,b] with 0 <= a <= b <= kHorizon plus every [a,Now].
std::vector<Interval> all_intervals();

/// Point-set reading of each predicate. Instant predicates take the instant
/// as window.from().
bool predicate(tpiet::TemporalPredicate p, const Interval& object, const Interval& window);
bool predicate_at(tpiet::TemporalPredicate p, const Interval& object, Instant t);

/// A key observed at a set of ticks.
using Key = std::vector<std::string>;
using TickSets = std::map<Key, std::set<Instant::Tick>>;

/// Canonical form of a temporal result: each key's maximal tick runs.
struct Run {
    Key key;
    Instant::Tick from;
    Instant::Tick to;
    auto operator<=>(const Run&) const = default;
};
std::vector<Run> runs(const TickSets& sets);
std::ostream& operator<<(std::ostream& out, const Run& run);

/// Tick sets of a temporal row collection.
template <class K>
std::map<K, std::set<Instant::Tick>> tick_sets(const std::vector<tpiet::TemporalRow<K>>& rows) {
    std::map<K, std::set<Instant::Tick>> out;
    for (const auto& r : rows) {
        for (auto t : points(r.interval)) out[r.key].insert(t);
    }
    return out;
}

/// Engine result in the same canonical form (Now read as kNowTick).
std::vector<Run> runs_of(const tpiet::ResultRelation& result);
std::set<Key> keys_of(const tpiet::ResultRelation& result);

// ---- Random GIS instances --------------------------------------------------

struct Instance {
    tpiet::LayerStore layers;
    tpiet::Warehouse warehouse;
    tpiet::TimeConfig time;
    tpiet::ql::GisQuery query;

    tpiet::Catalog catalog() const { return {layers, warehouse, time}; }
};

struct GenOptions {
    int max_layers = 4;
    int max_stages = 8;
    int max_sources = 4;
    bool temporal_atoms = true;
    /// Multi-source queries always use OVERLAP when true; otherwise OVERLAP is
    /// random and non-OVERLAP queries get SNAPSHOT or a single projected alias.
    bool force_overlap = true;
};

/// Random layers over ticks 0..kHorizon (Now = kNowTick) and a random
/// validated-by-construction query over them.
Instance random_instance(std::mt19937_64& rng, const GenOptions& options = {});

/// Random condition over the given sources.
tpiet::ql::Condition random_condition(std::mt19937_64& rng, const tpiet::LayerStore& layers,
                                      const std::vector<tpiet::ql::Source>& sources,
                                      bool temporal_atoms, int depth = 0);

/// Per-tick brute force evaluation of an OVERLAP (or single-source) query.
/// Returns the key tick sets; modifiers are not applied.
TickSets brute_force(const tpiet::ql::GisQuery& query, const tpiet::LayerStore& layers,
                     const tpiet::TimeConfig& time);

/// Expected output of `query` including its modifier: runs for temporal
/// queries, keys (as zero-length runs at tick -1) for SNAPSHOT and CURRENT.
std::vector<Run> expected(const tpiet::ql::GisQuery& query, const tpiet::LayerStore& layers,
                          const tpiet::TimeConfig& time);
/// Engine output in the same shape as expected().
std::vector<Run> actual(const tpiet::ResultRelation& result);

/// Copy of `layers` where every stage is cut at random interior points into
/// adjacent stages with identical content.
tpiet::LayerStore pre_split(const tpiet::LayerStore& layers, std::mt19937_64& rng);

/// Copy of `layers` holding only the stages valid at `t`.
tpiet::LayerStore restrict_to(const tpiet::LayerStore& layers, Instant::Tick t);

// ---- Fixture workspace -----------------------------------------------------

std::filesystem::path fixture_dir();
std::filesystem::path fixture_config();

/// Five reference queries over the fixture workspace, one per query shape
/// (GIS with a cube IN, distance join, cube with a GIS IN, alias IN, self join).
struct ReferenceQuery {
    std::string name;
    std::string text;
};
const std::vector<ReferenceQuery>& reference_queries();

/// Fresh copy of the fixture directory under the system temp dir.
std::filesystem::path copy_fixture(const std::string& tag);

}  // namespace oracle
