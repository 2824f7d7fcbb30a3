#pragma once

#include <tpiet/ast.hpp>
#include <tpiet/layer_store.hpp>
#include <tpiet/time_config.hpp>
#include <tpiet/warehouse.hpp>

namespace tpiet {

/// Everything a query can name: layers, the warehouse, and the time axis.
struct Catalog {
    const LayerStore& layers;
    const Warehouse& warehouse;
    const TimeConfig& time;
};

namespace ql {

/// Resolves a literal in instant position. Years are rejected there because
/// they denote a range.
Instant resolve_instant(const TimeLiteral& literal, const TimeConfig& time);

/// Resolves a predicate argument to a window. An instant becomes [t,t]; a
/// year expands to its first and last tick.
Interval resolve_window(const TemporalArg& arg, const TimeConfig& time);

/// Name resolution and type checking against the catalog. Throws NameError or
/// TypeError whose message carries the offending line and column.
void validate(const Query& query, const Catalog& catalog);

/// The alias whose object ids a GIS subquery yields when used inside a cube
/// query: its projection must be exactly one `alias` or `alias.id`.
const Source& id_source(const GisQuery& query);

}  // namespace ql
}  // namespace tpiet
