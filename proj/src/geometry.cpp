#include "lelab/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "lelab/cones.hpp"
#include "lelab/error.hpp"

namespace lelab {

namespace {

constexpr double pi = std::numbers::pi;

bool segments_intersect(Point p1, Point p2, Point q1, Point q2)
{
    auto orient = [](Point a, Point b, Point c) { return cross(b - a, c - a); };
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](Point a, Point b, Point c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
               c.y <= std::max(a.y, b.y);
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

double polygon_boundary_distance(const Polygon& poly, Point p)
{
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i)
        d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    return d;
}

bool polygons_overlap(const Polygon& a, const Polygon& b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return true;
    return contains(a, b.front()) || contains(b, a.front());
}

void validate_polygon(const Polygon& poly)
{
    if (poly.size() < 3) throw InputError("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (!std::isfinite(poly[i].x) || !std::isfinite(poly[i].y)) throw InputError("polygon vertex is not finite");
        for (std::size_t j = i + 1; j < poly.size(); ++j)
            if (poly[i].x == poly[j].x && poly[i].y == poly[j].y) throw InputError("polygon has a repeated vertex");
    }
    if (!is_simple(poly)) throw InputError("polygon is self-intersecting");
    if (signed_area(poly) <= 0.0) throw InputError("polygon must be counterclockwise with positive area");
}

std::vector<double> parse_numbers(const std::string& text)
{
    std::string cleaned = text;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) throw InputError("bad number '" + token + "'");
        } catch (const std::logic_error&) {
            throw InputError("bad number '" + token + "'");
        }
    }
    return out;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

Polygon points_from(const std::vector<double>& xy)
{
    if (xy.size() % 2 != 0) throw InputError("vertex list has an odd number of coordinates");
    Polygon poly;
    for (std::size_t i = 0; i < xy.size(); i += 2) poly.push_back({xy[i], xy[i + 1]});
    return poly;
}

std::vector<Interval> intervals_from(const std::vector<double>& v)
{
    if (v.size() % 2 != 0 || v.empty()) throw InputError("interval list needs pairs of endpoints");
    std::vector<Interval> out;
    for (std::size_t i = 0; i < v.size(); i += 2) out.push_back({v[i], v[i + 1]});
    return out;
}

} // namespace

double segment_distance(Point p, Point a, Point b)
{
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

double signed_area(const Polygon& poly)
{
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * s;
}

bool is_simple(const Polygon& poly)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
        }
    }
    // Adjacent edges may only share their common vertex.
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = poly[(i + n - 1) % n], v = poly[i], b = poly[(i + 1) % n];
        if (cross(v - a, b - v) == 0.0 && dot(v - a, b - v) < 0.0) return false;
    }
    return true;
}

bool contains(const Polygon& poly, Point p)
{
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point a = poly[i], b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

std::vector<double> interior_angles(const Polygon& poly)
{
    const std::size_t n = poly.size();
    std::vector<double> angles(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point in = poly[i] - poly[(i + n - 1) % n];
        const Point out = poly[(i + 1) % n] - poly[i];
        // Left turn by `turn` means an interior angle of π - turn.
        const double turn = std::atan2(cross(in, out), dot(in, out));
        angles[i] = pi - turn;
    }
    return angles;
}

DomainSpec DomainSpec::interval(double a, double b)
{
    return interval_union({{a, b}});
}

DomainSpec DomainSpec::interval_union(std::vector<Interval> members)
{
    if (members.empty()) throw InputError("interval union is empty");
    for (const auto& m : members)
        if (!(m.b > m.a) || !std::isfinite(m.a) || !std::isfinite(m.b))
            throw InputError("interval must have positive finite length");
    std::sort(members.begin(), members.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
    for (std::size_t i = 1; i < members.size(); ++i)
        if (!(members[i].a > members[i - 1].b)) throw InputError("union members overlap or touch");
    DomainSpec d;
    d.kind_ = members.size() == 1 ? DomainKind::Interval : DomainKind::IntervalUnion;
    d.intervals_ = std::move(members);
    return d;
}

DomainSpec DomainSpec::polygon(Polygon vertices)
{
    validate_polygon(vertices);
    DomainSpec d;
    d.kind_ = DomainKind::Polygon;
    d.polygons_.push_back(std::move(vertices));
    return d;
}

DomainSpec DomainSpec::polygon_union(std::vector<Polygon> members)
{
    if (members.empty()) throw InputError("polygon union is empty");
    for (const auto& p : members) validate_polygon(p);
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            if (polygons_overlap(members[i], members[j])) throw InputError("union members overlap");
            double gap = std::numeric_limits<double>::infinity();
            for (const Point& p : members[i]) gap = std::min(gap, polygon_boundary_distance(members[j], p));
            for (const Point& p : members[j]) gap = std::min(gap, polygon_boundary_distance(members[i], p));
            if (!(gap > 0.0)) throw InputError("union members touch");
        }
    DomainSpec d;
    d.kind_ = members.size() == 1 ? DomainKind::Polygon : DomainKind::PolygonUnion;
    d.polygons_ = std::move(members);
    return d;
}

DomainSpec DomainSpec::sector(double beta, double radius)
{
    if (!(beta >= 0.0 && beta < 1.0)) throw InputError("sector requires 0 <= beta < 1");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("sector requires R > 0");
    DomainSpec d;
    d.kind_ = DomainKind::Sector;
    d.sector_ = {beta, radius};
    return d;
}

DomainSpec DomainSpec::sector_from_half_angle(double half_angle, double radius)
{
    if (!(half_angle > 0.0 && half_angle <= pi / 2)) throw InputError("sector half-angle must lie in (0, pi/2]");
    return sector(std::cos(half_angle), radius);
}

int DomainSpec::components() const
{
    switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::IntervalUnion: return static_cast<int>(intervals_.size());
    case DomainKind::Polygon:
    case DomainKind::PolygonUnion: return static_cast<int>(polygons_.size());
    case DomainKind::Sector: return 1;
    }
    return 1;
}

double DomainSpec::diameter() const
{
    switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::IntervalUnion: return intervals_.back().b - intervals_.front().a;
    case DomainKind::Polygon:
    case DomainKind::PolygonUnion: {
        double d = 0.0;
        for (const auto& p : polygons_)
            for (const auto& r : polygons_)
                for (const Point& a : p)
                    for (const Point& b : r) d = std::max(d, norm(a - b));
        return d;
    }
    case DomainKind::Sector: {
        const double t = sector_.half_angle();
        return sector_.radius * std::max(1.0, t < pi / 2 ? 2.0 * std::sin(t) : 2.0);
    }
    }
    return 0.0;
}

double DomainSpec::distance_to_boundary(Point p) const
{
    switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::IntervalUnion: {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& m : intervals_) d = std::min({d, std::abs(p.x - m.a), std::abs(p.x - m.b)});
        return d;
    }
    case DomainKind::Polygon:
    case DomainKind::PolygonUnion: {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& poly : polygons_) d = std::min(d, polygon_boundary_distance(poly, p));
        return d;
    }
    case DomainKind::Sector: {
        const double t = sector_.half_angle();
        const double R = sector_.radius;
        const Point e1{R * std::cos(t), R * std::sin(t)};
        const Point e2{R * std::cos(t), -R * std::sin(t)};
        double d = std::min(segment_distance(p, {0, 0}, e1), segment_distance(p, {0, 0}, e2));
        const double r = norm(p);
        const double ang = std::abs(std::atan2(p.y, p.x));
        if (ang <= t) d = std::min(d, std::abs(R - r));
        else d = std::min({d, norm(p - e1), norm(p - e2)});
        return d;
    }
    }
    return 0.0;
}

int DomainSpec::component_of(Point p) const
{
    switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::IntervalUnion:
        for (std::size_t i = 0; i < intervals_.size(); ++i)
            if (p.x >= intervals_[i].a && p.x <= intervals_[i].b) return static_cast<int>(i);
        return -1;
    case DomainKind::Polygon:
    case DomainKind::PolygonUnion: {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < polygons_.size(); ++i) {
            if (contains(polygons_[i], p)) return static_cast<int>(i);
            const double d = polygon_boundary_distance(polygons_[i], p);
            if (d < best_d) best_d = d, best = static_cast<int>(i);
        }
        return best_d <= 1e-9 * diameter() ? best : -1;
    }
    case DomainKind::Sector: return 0;
    }
    return -1;
}

DomainSpec build_domain(const DomainDescription& desc)
{
    const std::string& k = desc.kind;
    if (k == "interval") {
        if (desc.intervals.size() != 1) throw InputError("interval needs exactly one pair of endpoints");
        return DomainSpec::interval(desc.intervals[0].a, desc.intervals[0].b);
    }
    if (k == "interval_union") return DomainSpec::interval_union(desc.intervals);
    if (k == "polygon") {
        if (desc.polygons.size() != 1) throw InputError("polygon needs exactly one vertex list");
        return DomainSpec::polygon(desc.polygons[0]);
    }
    if (k == "polygon_union") return DomainSpec::polygon_union(desc.polygons);
    if (k == "sector") {
        const double R = desc.radius.value_or(1.0);
        if (desc.beta && desc.half_angle) throw InputError("sector takes beta or half_angle, not both");
        if (desc.half_angle) return DomainSpec::sector_from_half_angle(*desc.half_angle, R);
        if (!desc.beta) throw InputError("sector needs beta or half_angle");
        return DomainSpec::sector(*desc.beta, R);
    }
    throw InputError("unknown domain kind '" + k + "'");
}

DomainDescription parse_domain_description(const std::string& text, std::map<std::string, std::string>* extra)
{
    DomainDescription desc;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "kind") {
            desc.kind = value;
        } else if (key == "endpoints" || key == "intervals") {
            desc.intervals = intervals_from(parse_numbers(value));
        } else if (key == "vertices" || key == "polygon") {
            desc.polygons.push_back(points_from(parse_numbers(value)));
        } else if (key == "polygons") {
            std::istringstream parts(value);
            std::string part;
            while (std::getline(parts, part, ';'))
                if (!trim(part).empty()) desc.polygons.push_back(points_from(parse_numbers(part)));
        } else if (key == "beta" || key == "half_angle" || key == "radius") {
            const auto v = parse_numbers(value);
            if (v.size() != 1) throw InputError("line " + std::to_string(line_no) + ": expected one number");
            if (key == "beta") desc.beta = v[0];
            else if (key == "half_angle") desc.half_angle = v[0];
            else desc.radius = v[0];
        } else if (extra != nullptr) {
            (*extra)[key] = value;
        } else {
            throw InputError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (desc.kind.empty()) throw InputError("domain description has no 'kind'");
    return desc;
}

GeometryReport geometry_report(const DomainSpec& domain)
{
    GeometryReport report;
    report.components = domain.components();
    auto account = [&report](double theta) {
        report.corner_angles.push_back(theta);
        report.kappa = std::max(report.kappa, std::tan(std::abs(pi - theta) / 2.0));
        if (theta < pi) report.beta = std::max(report.beta, std::cos(theta / 2.0));
    };
    switch (domain.kind()) {
    case DomainKind::Interval:
    case DomainKind::IntervalUnion: break;
    case DomainKind::Polygon:
    case DomainKind::PolygonUnion:
        for (const auto& poly : domain.polygons())
            for (double theta : interior_angles(poly)) {
                // Straight vertices carry no corner.
                if (std::abs(theta - pi) < 1e-14) continue;
                account(theta);
            }
        break;
    case DomainKind::Sector: {
        const double t = domain.sector().half_angle();
        account(2.0 * t);
        account(pi / 2);
        account(pi / 2);
        break;
    }
    }
    report.alpha = alpha_of_beta(2, report.beta);
    return report;
}

} // namespace lelab
