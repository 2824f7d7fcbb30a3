#include <tpiet/geometry.hpp>

#include <tpiet/error.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

namespace tpiet {

std::string_view name_of(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::Point: return "point";
        case GeometryKind::LineString: return "linestring";
        case GeometryKind::Polygon: return "polygon";
    }
    return "?";
}

namespace {

struct Segment {
    Point a;
    Point b;
};

double cross(Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

Point lerp(Point a, Point b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

double point_segment_distance(Point p, const Segment& s) {
    const double dx = s.b.x - s.a.x;
    const double dy = s.b.y - s.a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return dist(p, s.a);
    double t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, lerp(s.a, s.b, t));
}

/// Parameter of the projection of p onto the (non-degenerate) segment's line.
double param_on(const Segment& s, Point p) {
    const double dx = s.b.x - s.a.x;
    const double dy = s.b.y - s.a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return 0.0;
    return ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2;
}

struct Hit {
    int count = 0;  // 0: disjoint, 1: single point p, 2: overlap p..q
    Point p;
    Point q;
};

Hit segment_intersection(const Segment& s1, const Segment& s2, double eps) {
    const bool deg1 = dist(s1.a, s1.b) <= eps;
    const bool deg2 = dist(s2.a, s2.b) <= eps;
    if (deg1) {
        if (point_segment_distance(s1.a, s2) <= eps) return {1, s1.a, s1.a};
        return {};
    }
    if (deg2) {
        if (point_segment_distance(s2.a, s1) <= eps) return {1, s2.a, s2.a};
        return {};
    }
    const double d1x = s1.b.x - s1.a.x, d1y = s1.b.y - s1.a.y;
    const double d2x = s2.b.x - s2.a.x, d2y = s2.b.y - s2.a.y;
    const double len1 = std::hypot(d1x, d1y);
    const double len2 = std::hypot(d2x, d2y);
    const double denom = d1x * d2y - d1y * d2x;
    const double ex = s2.a.x - s1.a.x, ey = s2.a.y - s1.a.y;

    if (std::abs(denom) > 1e-12 * len1 * len2) {
        const double t = (ex * d2y - ey * d2x) / denom;
        Point p = lerp(s1.a, s1.b, std::clamp(t, 0.0, 1.0));
        if (point_segment_distance(p, s1) <= eps && point_segment_distance(p, s2) <= eps) {
            return {1, p, p};
        }
        // Near-endpoint contacts the clamped solve can miss.
        for (Point c : {s2.a, s2.b}) {
            if (point_segment_distance(c, s1) <= eps) return {1, c, c};
        }
        for (Point c : {s1.a, s1.b}) {
            if (point_segment_distance(c, s2) <= eps) return {1, c, c};
        }
        return {};
    }
    // Parallel: only collinear overlaps matter.
    if (std::abs(cross(s1.a, s1.b, s2.a)) / len1 > eps) return {};
    double ta = param_on(s1, s2.a);
    double tb = param_on(s1, s2.b);
    if (ta > tb) std::swap(ta, tb);
    const double lo = std::max(0.0, ta);
    const double hi = std::min(1.0, tb);
    const double tol = eps / len1;
    if (lo > hi + tol) return {};
    if ((hi - lo) * len1 <= eps) {
        Point p = lerp(s1.a, s1.b, std::clamp((lo + hi) / 2, 0.0, 1.0));
        return {1, p, p};
    }
    return {2, lerp(s1.a, s1.b, lo), lerp(s1.a, s1.b, hi)};
}

std::vector<Segment> segments_of(const Geometry& g) {
    const auto v = g.vertices();
    std::vector<Segment> out;
    if (g.kind() == GeometryKind::Point) {
        out.push_back({v[0], v[0]});
        return out;
    }
    for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back({v[i], v[i + 1]});
    return out;
}

enum class Location { Inside, Boundary, Outside };

Location locate_in_polygon(Point p, const Geometry& polygon, double eps) {
    const auto ring = polygon.vertices();
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        if (point_segment_distance(p, {ring[i], ring[i + 1]}) <= eps) return Location::Boundary;
    }
    bool inside = false;
    for (std::size_t i = 0, j = ring.size() - 2; i + 1 < ring.size(); j = i++) {
        const Point& a = ring[i];
        const Point& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x) inside = !inside;
        }
    }
    return inside ? Location::Inside : Location::Outside;
}

bool on_linestring(Point p, const Geometry& line, double eps) {
    for (const auto& s : segments_of(line)) {
        if (point_segment_distance(p, s) <= eps) return true;
    }
    return false;
}

bool is_closed_line(const Geometry& line, double eps) {
    const auto v = line.vertices();
    return dist(v.front(), v.back()) <= eps;
}

/// Boundary of a linestring: its two endpoints unless it is closed.
bool is_line_endpoint(Point p, const Geometry& line, double eps) {
    if (is_closed_line(line, eps)) return false;
    const auto v = line.vertices();
    return dist(p, v.front()) <= eps || dist(p, v.back()) <= eps;
}

/// Midpoints of the pieces obtained by cutting `s` wherever it meets one of
/// `cuts`. Zero-length pieces are dropped.
std::vector<Point> piece_midpoints(const Segment& s, const std::vector<Segment>& cuts, double eps) {
    const double len = dist(s.a, s.b);
    if (len <= eps) return {s.a};
    std::vector<double> params{0.0, 1.0};
    for (const auto& c : cuts) {
        const Hit hit = segment_intersection(s, c, eps);
        if (hit.count >= 1) params.push_back(std::clamp(param_on(s, hit.p), 0.0, 1.0));
        if (hit.count == 2) params.push_back(std::clamp(param_on(s, hit.q), 0.0, 1.0));
    }
    std::sort(params.begin(), params.end());
    std::vector<Point> mids;
    for (std::size_t i = 0; i + 1 < params.size(); ++i) {
        if ((params[i + 1] - params[i]) * len > eps) {
            mids.push_back(lerp(s.a, s.b, (params[i] + params[i + 1]) / 2));
        }
    }
    return mids;
}

std::vector<Point> all_piece_midpoints(const Geometry& g, const Geometry& cutter, double eps) {
    const auto cuts = segments_of(cutter);
    std::vector<Point> out;
    for (const auto& s : segments_of(g)) {
        auto mids = piece_midpoints(s, cuts, eps);
        out.insert(out.end(), mids.begin(), mids.end());
    }
    return out;
}

std::vector<Hit> all_hits(const Geometry& a, const Geometry& b, double eps) {
    std::vector<Hit> hits;
    const auto sa = segments_of(a);
    const auto sb = segments_of(b);
    for (const auto& s1 : sa) {
        for (const auto& s2 : sb) {
            const Hit h = segment_intersection(s1, s2, eps);
            if (h.count > 0) hits.push_back(h);
        }
    }
    return hits;
}

bool polygon_covers_point(const Geometry& polygon, Point p, double eps) {
    return locate_in_polygon(p, polygon, eps) != Location::Outside;
}

bool polygon_strictly_contains_some_piece(const Geometry& polygon, const Geometry& other,
                                          double eps) {
    for (Point m : all_piece_midpoints(other, polygon, eps)) {
        if (locate_in_polygon(m, polygon, eps) == Location::Inside) return true;
    }
    return false;
}

bool line_line_crosses(const Geometry& a, const Geometry& b, double eps) {
    bool interior_point = false;
    for (const Hit& h : all_hits(a, b, eps)) {
        if (h.count == 2) return false;
        if (!is_line_endpoint(h.p, a, eps) && !is_line_endpoint(h.p, b, eps)) {
            interior_point = true;
        }
    }
    return interior_point;
}

bool line_polygon_crosses(const Geometry& line, const Geometry& polygon, double eps) {
    bool in = false;
    bool out = false;
    for (Point m : all_piece_midpoints(line, polygon, eps)) {
        const Location loc = locate_in_polygon(m, polygon, eps);
        in = in || loc == Location::Inside;
        out = out || loc == Location::Outside;
    }
    return in && out;
}

bool interiors_meet(const Geometry& a, const Geometry& b, double eps) {
    using K = GeometryKind;
    const K ka = a.kind();
    const K kb = b.kind();
    if (ka == K::Point && kb == K::Point) return dist(a.vertices()[0], b.vertices()[0]) <= eps;
    if (ka == K::Point || kb == K::Point) {
        const Geometry& pt = ka == K::Point ? a : b;
        const Geometry& other = ka == K::Point ? b : a;
        const Point p = pt.vertices()[0];
        if (other.kind() == K::LineString) {
            return on_linestring(p, other, eps) && !is_line_endpoint(p, other, eps);
        }
        return locate_in_polygon(p, other, eps) == Location::Inside;
    }
    if (ka == K::LineString && kb == K::LineString) {
        for (const Hit& h : all_hits(a, b, eps)) {
            if (h.count == 2) return true;
            if (!is_line_endpoint(h.p, a, eps) && !is_line_endpoint(h.p, b, eps)) return true;
        }
        return false;
    }
    if (ka == K::LineString || kb == K::LineString) {
        const Geometry& line = ka == K::LineString ? a : b;
        const Geometry& polygon = ka == K::LineString ? b : a;
        return polygon_strictly_contains_some_piece(polygon, line, eps);
    }
    if (polygon_strictly_contains_some_piece(a, b, eps)) return true;
    if (polygon_strictly_contains_some_piece(b, a, eps)) return true;
    // Rings that lie entirely on each other's boundary describe the same region.
    for (Point m : all_piece_midpoints(a, b, eps)) {
        if (locate_in_polygon(m, b, eps) != Location::Boundary) return false;
    }
    return true;
}

void check_finite(const std::vector<Point>& pts) {
    for (const auto& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw InvariantError("non-finite coordinate");
        }
    }
}

bool ring_is_simple(const std::vector<Point>& ring) {
    const std::size_t n = ring.size() - 1;  // edge count
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Segment si{ring[i], ring[i + 1]};
            const Segment sj{ring[j], ring[j + 1]};
            const Hit h = segment_intersection(si, sj, 1e-12);
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (!adjacent) {
                if (h.count > 0) return false;
                continue;
            }
            if (h.count == 2) return false;
        }
    }
    return true;
}

}  // namespace

Geometry Geometry::point(double x, double y) {
    std::vector<Point> v{{x, y}};
    check_finite(v);
    return Geometry(GeometryKind::Point, std::move(v));
}

Geometry Geometry::linestring(std::vector<Point> vertices) {
    if (vertices.size() < 2) throw InvariantError("linestring needs at least 2 vertices");
    check_finite(vertices);
    return Geometry(GeometryKind::LineString, std::move(vertices));
}

Geometry Geometry::polygon(std::vector<Point> ring) {
    if (ring.size() < 4) throw InvariantError("polygon ring too short");
    check_finite(ring);
    if (ring.front() != ring.back()) throw InvariantError("polygon ring is not closed");
    std::vector<Point> distinct(ring.begin(), ring.end() - 1);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw InvariantError("polygon ring too short");
    if (!ring_is_simple(ring)) throw InvariantError("polygon ring is not simple");
    return Geometry(GeometryKind::Polygon, std::move(ring));
}

Geometry Geometry::transformed(double dx, double dy, double factor) const {
    Geometry out = *this;
    for (auto& p : out.vertices_) {
        p.x = (p.x + dx) * factor;
        p.y = (p.y + dy) * factor;
    }
    return out;
}

namespace {

class WktReader {
public:
    explicit WktReader(std::string_view text) : text_(text) {}

    Geometry read() {
        skip_ws();
        const std::string tag = read_tag();
        Geometry g = Geometry::point(0, 0);
        if (tag == "POINT") {
            expect('(');
            const Point p = read_point();
            expect(')');
            g = Geometry::point(p.x, p.y);
        } else if (tag == "LINESTRING") {
            g = Geometry::linestring(read_point_list());
        } else if (tag == "POLYGON") {
            expect('(');
            auto ring = read_point_list();
            skip_ws();
            if (peek() == ',') fail("polygon holes are not supported");
            expect(')');
            g = Geometry::polygon(std::move(ring));
        } else {
            fail("unknown geometry tag '" + tag + "'", tag_start_);
        }
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        return g;
    }

private:
    [[noreturn]] void fail(const std::string& message) { fail(message, pos_); }
    [[noreturn]] void fail(const std::string& message, std::size_t at) {
        throw SyntaxError("WKT: " + message, 1, at + 1);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string read_tag() {
        tag_start_ = pos_;
        std::string tag;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            tag.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_]))));
            ++pos_;
        }
        if (tag.empty()) fail("expected geometry tag");
        return tag;
    }

    double read_number() {
        skip_ws();
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr == begin) fail("expected number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return value;
    }

    Point read_point() {
        const double x = read_number();
        const double y = read_number();
        return {x, y};
    }

    std::vector<Point> read_point_list() {
        expect('(');
        std::vector<Point> pts{read_point()};
        skip_ws();
        while (peek() == ',') {
            ++pos_;
            pts.push_back(read_point());
            skip_ws();
        }
        expect(')');
        return pts;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t tag_start_ = 0;
};

void append_number(std::string& out, double v) {
    if (v == 0.0) v = 0.0;  // normalizes -0
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

void append_points(std::string& out, std::span<const Point> pts) {
    out.push_back('(');
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) out.push_back(',');
        append_number(out, pts[i].x);
        out.push_back(' ');
        append_number(out, pts[i].y);
    }
    out.push_back(')');
}

}  // namespace

Geometry parse_wkt(std::string_view text) { return WktReader(text).read(); }

std::string to_wkt(const Geometry& geometry) {
    std::string out;
    switch (geometry.kind()) {
        case GeometryKind::Point:
            out = "POINT";
            append_points(out, geometry.vertices());
            break;
        case GeometryKind::LineString:
            out = "LINESTRING";
            append_points(out, geometry.vertices());
            break;
        case GeometryKind::Polygon:
            out = "POLYGON(";
            append_points(out, geometry.vertices());
            out.push_back(')');
            break;
    }
    return out;
}

bool intersects(const Geometry& a, const Geometry& b, double eps) {
    if (!all_hits(a, b, eps).empty()) return true;
    if (a.kind() == GeometryKind::Polygon && polygon_covers_point(a, b.vertices()[0], eps)) {
        return true;
    }
    if (b.kind() == GeometryKind::Polygon && polygon_covers_point(b, a.vertices()[0], eps)) {
        return true;
    }
    return false;
}

bool contains(const Geometry& a, const Geometry& b, double eps) {
    using K = GeometryKind;
    switch (a.kind()) {
        case K::Point:
            for (Point p : b.vertices()) {
                if (dist(p, a.vertices()[0]) > eps) return false;
            }
            return true;
        case K::LineString: {
            if (b.kind() == K::Polygon) return false;
            for (Point p : b.vertices()) {
                if (!on_linestring(p, a, eps)) return false;
            }
            if (b.kind() == K::Point) return true;
            // Cut b wherever a's vertices or segments touch it.
            for (Point m : all_piece_midpoints(b, a, eps)) {
                if (!on_linestring(m, a, eps)) return false;
            }
            return true;
        }
        case K::Polygon: {
            for (Point p : b.vertices()) {
                if (!polygon_covers_point(a, p, eps)) return false;
            }
            if (b.kind() == K::Point) return true;
            for (Point m : all_piece_midpoints(b, a, eps)) {
                if (!polygon_covers_point(a, m, eps)) return false;
            }
            return true;
        }
    }
    return false;
}

bool crosses_applicable(GeometryKind a, GeometryKind b) {
    if (a == GeometryKind::Point || b == GeometryKind::Point) return false;
    return !(a == GeometryKind::Polygon && b == GeometryKind::Polygon);
}

bool crosses(const Geometry& a, const Geometry& b, double eps) {
    using K = GeometryKind;
    if (!crosses_applicable(a.kind(), b.kind())) return false;
    if (a.kind() == K::LineString && b.kind() == K::LineString) return line_line_crosses(a, b, eps);
    if (a.kind() == K::LineString) return line_polygon_crosses(a, b, eps);
    return line_polygon_crosses(b, a, eps);
}

bool touches(const Geometry& a, const Geometry& b, double eps) {
    if (a.kind() == GeometryKind::Point && b.kind() == GeometryKind::Point) return false;
    return intersects(a, b, eps) && !interiors_meet(a, b, eps);
}

double distance(const Geometry& a, const Geometry& b, double eps) {
    if (intersects(a, b, eps)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s1 : segments_of(a)) {
        for (const auto& s2 : segments_of(b)) {
            best = std::min({best, point_segment_distance(s1.a, s2), point_segment_distance(s1.b, s2),
                             point_segment_distance(s2.a, s1), point_segment_distance(s2.b, s1)});
        }
    }
    return best;
}

double area(const Geometry& polygon) {
    if (polygon.kind() != GeometryKind::Polygon) {
        throw TypeError("area requires a polygon, got a " + std::string(name_of(polygon.kind())));
    }
    const auto ring = polygon.vertices();
    double twice = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    }
    return std::abs(twice) / 2.0;
}

}  // namespace tpiet
