#include <tpiet/render.hpp>

#include <tpiet/csv.hpp>
#include <tpiet/text.hpp>

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace tpiet {

namespace {

using nlohmann::json;

struct Grid {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;
};

Grid grid_of(const ResultRelation& r) {
    Grid g{r.columns, {}};
    if (r.temporal) {
        g.header.push_back("from");
        g.header.push_back("to");
    }
    for (const auto& row : r.rows) {
        std::vector<std::string> line;
        for (const auto& v : row.values) line.push_back(render(v));
        if (row.interval) {
            line.push_back(row.interval->from().to_string());
            line.push_back(row.interval->to().to_string());
        }
        g.cells.push_back(std::move(line));
    }
    return g;
}

Grid grid_of(const CubeResult& r) {
    Grid g{r.columns, {}};
    for (const auto& row : r.rows) {
        std::vector<std::string> line;
        for (const auto& v : row) line.push_back(render(v));
        g.cells.push_back(std::move(line));
    }
    return g;
}

std::string table_text(const Grid& g, std::size_t count) {
    std::vector<std::size_t> width(g.header.size(), 0);
    for (std::size_t i = 0; i < g.header.size(); ++i) width[i] = g.header[i].size();
    for (const auto& line : g.cells) {
        for (std::size_t i = 0; i < line.size() && i < width.size(); ++i) {
            width[i] = std::max(width[i], line[i].size());
        }
    }
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& line) {
        std::string text;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) text += " | ";
            text += line[i];
            if (i + 1 < line.size()) text.append(width[i] - line[i].size(), ' ');
        }
        out << text << "\n";
    };
    emit(g.header);
    std::string rule;
    for (std::size_t i = 0; i < width.size(); ++i) {
        if (i) rule += "-+-";
        rule.append(width[i], '-');
    }
    out << rule << "\n";
    for (const auto& line : g.cells) emit(line);
    out << "(" << count << (count == 1 ? " row)" : " rows)") << "\n";
    return out.str();
}

std::string csv_text(const Grid& g) {
    std::string out = csv_line(g.header) + "\n";
    for (const auto& line : g.cells) out += csv_line(line) + "\n";
    return out;
}

json coordinates(const Geometry& g) {
    json pts = json::array();
    for (const Point& p : g.vertices()) pts.push_back({p.x, p.y});
    switch (g.kind()) {
        case GeometryKind::Point: return pts.at(0);
        case GeometryKind::LineString: return pts;
        case GeometryKind::Polygon: return json::array({pts});
    }
    return pts;
}

json geometry_json(const Geometry& g) {
    static const char* names[] = {"Point", "LineString", "Polygon"};
    return {{"type", names[static_cast<int>(g.kind())]}, {"coordinates", coordinates(g)}};
}

json scalar_json(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (std::holds_alternative<std::monostate>(v)) return nullptr;
    return render(v);
}

json instant_json(Instant t) {
    if (t.is_now()) return "Now";
    return t.tick();
}

std::string collection_text(json features) {
    json fc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
    return fc.dump(2) + "\n";
}

}  // namespace

std::optional<OutputFormat> output_format_from_name(std::string_view name) {
    if (iequals(name, "table")) return OutputFormat::Table;
    if (iequals(name, "csv")) return OutputFormat::Csv;
    if (iequals(name, "geojson")) return OutputFormat::GeoJson;
    return std::nullopt;
}

std::string render_table(const ResultRelation& r) { return table_text(grid_of(r), r.rows.size()); }
std::string render_csv(const ResultRelation& r) { return csv_text(grid_of(r)); }
std::string render_table(const CubeResult& r) { return table_text(grid_of(r), r.rows.size()); }
std::string render_csv(const CubeResult& r) { return csv_text(grid_of(r)); }

std::string render_geojson(const ResultRelation& r) {
    json features = json::array();
    for (const auto& row : r.rows) {
        json feature = {{"type", "Feature"}, {"geometry", nullptr}};
        json props = json::object();
        for (std::size_t i = 0; i < row.values.size(); ++i) {
            const Value& v = row.values[i];
            if (const auto* g = std::get_if<Geometry>(&v)) {
                if (feature["geometry"].is_null()) {
                    feature["geometry"] = geometry_json(*g);
                    continue;
                }
            }
            props[r.columns[i]] = scalar_json(v);
        }
        if (row.interval) {
            props["from"] = instant_json(row.interval->from());
            props["to"] = instant_json(row.interval->to());
        }
        feature["properties"] = std::move(props);
        features.push_back(std::move(feature));
    }
    return collection_text(std::move(features));
}

std::string render_geojson(const CubeResult& r) {
    json features = json::array();
    for (const auto& row : r.rows) {
        json props = json::object();
        for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) {
            props[r.columns[i]] = scalar_json(row[i]);
        }
        features.push_back({{"type", "Feature"}, {"geometry", nullptr}, {"properties", props}});
    }
    return collection_text(std::move(features));
}

std::string render(const QueryResult& result, OutputFormat format) {
    return std::visit(
        [&](const auto& r) {
            switch (format) {
                case OutputFormat::Csv: return render_csv(r);
                case OutputFormat::GeoJson: return render_geojson(r);
                case OutputFormat::Table: break;
            }
            return render_table(r);
        },
        result);
}

}  // namespace tpiet
