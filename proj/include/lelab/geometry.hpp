#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lelab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Euclidean distance from p to the closed segment [a, b].
double segment_distance(Point p, Point a, Point b);

enum class DomainKind { Interval, IntervalUnion, Polygon, PolygonUnion, Sector };

struct Interval {
    double a = 0.0;
    double b = 1.0;
    double length() const { return b - a; }
};

/// Simple polygon, vertices counterclockwise, no repeated vertex.
using Polygon = std::vector<Point>;

/// Planar sector Γ(β, R): apex at the origin, axis along +x, half-angle arccos β.
struct Sector {
    double beta = 0.0;
    double radius = 1.0;
    double half_angle() const { return std::acos(beta); }
};

/// Validated computational domain. Build through the factory functions; they
/// reject degenerate input.
class DomainSpec {
public:
    static DomainSpec interval(double a, double b);
    static DomainSpec interval_union(std::vector<Interval> members);
    static DomainSpec polygon(Polygon vertices);
    static DomainSpec polygon_union(std::vector<Polygon> members);
    static DomainSpec sector(double beta, double radius);
    static DomainSpec sector_from_half_angle(double half_angle, double radius);

    DomainKind kind() const { return kind_; }
    int dim() const { return kind_ == DomainKind::Interval || kind_ == DomainKind::IntervalUnion ? 1 : 2; }
    int components() const;
    double diameter() const;

    const std::vector<Interval>& intervals() const { return intervals_; }
    const std::vector<Polygon>& polygons() const { return polygons_; }
    const Sector& sector() const { return sector_; }

    /// Distance from p to ∂Ω (exact for all supported kinds). In 1D only p.x is used.
    double distance_to_boundary(Point p) const;
    /// Index of the connected component containing p, or -1 if p is outside the closure.
    int component_of(Point p) const;

private:
    DomainKind kind_ = DomainKind::Interval;
    std::vector<Interval> intervals_;
    std::vector<Polygon> polygons_;
    Sector sector_{};
};

/// Raw description as read from a key-value config file.
struct DomainDescription {
    std::string kind;                       // interval | interval_union | polygon | polygon_union | sector
    std::vector<Interval> intervals;        // interval endpoints
    std::vector<Polygon> polygons;          // vertex lists
    std::optional<double> beta;             // sector, either beta ...
    std::optional<double> half_angle;       // ... or half-angle in radians
    std::optional<double> radius;
};

DomainSpec build_domain(const DomainDescription& description);

/// Parses "kind = polygon\nvertices = 0 0, 1 0, 1 1, 0 1" style text. Unknown
/// keys are returned in `extra` so callers can pick up q, level and so on.
DomainDescription parse_domain_description(const std::string& text,
                                           std::map<std::string, std::string>* extra = nullptr);

struct GeometryReport {
    double kappa = 0.0;                  // Lipschitz index of the chart atlas
    double beta = 0.0;                   // cone index β_Ω
    double alpha = 1.0;                  // homogeneity index α(β_Ω), N = 2
    std::vector<double> corner_angles;   // interior angles, radians
    int components = 1;
};

/// Corner-angle evaluation of κ_Ω, β_Ω, α_Ω. Convex corners contribute
/// cos(θ/2) to β; every corner contributes tan(|π-θ|/2) to κ.
GeometryReport geometry_report(const DomainSpec& domain);

/// Interior angles of a counterclockwise polygon, in vertex order.
std::vector<double> interior_angles(const Polygon& polygon);

double signed_area(const Polygon& polygon);
bool is_simple(const Polygon& polygon);
bool contains(const Polygon& polygon, Point p);

} // namespace lelab
