#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tpiet {

/// Tolerance used to classify points as lying on a segment or boundary.
inline constexpr double kDefaultEpsilon = 1e-9;

struct Point {
    double x = 0.0;
    double y = 0.0;

    auto operator<=>(const Point&) const = default;
};

enum class GeometryKind { Point, LineString, Polygon };

std::string_view name_of(GeometryKind kind);

/// Planar point, linestring, or single-ring polygon. Polygons keep their ring
/// explicitly closed (first vertex repeated at the end).
class Geometry {
public:
    static Geometry point(double x, double y);
    /// Requires at least two vertices.
    static Geometry linestring(std::vector<Point> vertices);
    /// Requires a closed, simple ring with at least three distinct vertices.
    static Geometry polygon(std::vector<Point> ring);

    GeometryKind kind() const { return kind_; }
    std::span<const Point> vertices() const { return vertices_; }

    /// Copy translated by (dx, dy) and then scaled by `factor` about the origin.
    Geometry transformed(double dx, double dy, double factor = 1.0) const;

    auto operator<=>(const Geometry&) const = default;

private:
    Geometry(GeometryKind kind, std::vector<Point> vertices)
        : kind_(kind), vertices_(std::move(vertices)) {}

    GeometryKind kind_ = GeometryKind::Point;
    std::vector<Point> vertices_;
};

/// Parses POINT / LINESTRING / POLYGON well-known text (tags case-insensitive).
/// Throws SyntaxError (column-positioned) or InvariantError.
Geometry parse_wkt(std::string_view text);

/// Canonical uppercase WKT with shortest round-trip number formatting.
std::string to_wkt(const Geometry& geometry);

bool intersects(const Geometry& a, const Geometry& b, double eps = kDefaultEpsilon);
/// Every point of b lies in a (boundary included).
bool contains(const Geometry& a, const Geometry& b, double eps = kDefaultEpsilon);
/// Line/line: interiors meet in isolated points only. Line/polygon (either
/// order): the line has parts strictly inside and strictly outside.
/// Any other kind combination yields false.
bool crosses(const Geometry& a, const Geometry& b, double eps = kDefaultEpsilon);
/// The geometries meet but their interiors are disjoint.
bool touches(const Geometry& a, const Geometry& b, double eps = kDefaultEpsilon);

/// True when crosses() is defined for the kind pair (no points, not two polygons).
bool crosses_applicable(GeometryKind a, GeometryKind b);

/// Minimum Euclidean distance between the point sets; 0 when they intersect.
double distance(const Geometry& a, const Geometry& b, double eps = kDefaultEpsilon);

/// Shoelace area of a polygon; throws TypeError for other kinds.
double area(const Geometry& polygon);

}  // namespace tpiet
