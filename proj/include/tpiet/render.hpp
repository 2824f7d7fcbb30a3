#pragma once

#include <tpiet/executor.hpp>

#include <string>

namespace tpiet {

enum class OutputFormat { Table, Csv, GeoJson };

std::optional<OutputFormat> output_format_from_name(std::string_view name);

/// Serializes a query result. Temporal relations gain `from` and `to`
/// columns (properties in GeoJSON); SNAPSHOT and CURRENT results have none.
std::string render(const QueryResult& result, OutputFormat format);

std::string render_table(const ResultRelation& result);
std::string render_csv(const ResultRelation& result);
std::string render_geojson(const ResultRelation& result);

std::string render_table(const CubeResult& result);
std::string render_csv(const CubeResult& result);
std::string render_geojson(const CubeResult& result);

}  // namespace tpiet
