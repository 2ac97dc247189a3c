#include "lelab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "lelab/error.hpp"

namespace lelab {

namespace {

void check_cap(const Mesh& mesh, const MeshOptions& options)
{
    if (mesh.nodes.size() > options.max_nodes)
        throw InputError("mesh would have " + std::to_string(mesh.nodes.size()) + " nodes, cap is " +
                         std::to_string(options.max_nodes));
}

std::size_t predicted_1d(std::size_t cells, int level) { return cells << level; }

void build_adjacency(Mesh& mesh)
{
    const int n = mesh.num_nodes();
    const int per = mesh.vertices_per_cell();
    mesh.node_cell_offsets.assign(n + 1, 0);
    for (const auto& c : mesh.cells)
        for (int k = 0; k < per; ++k) ++mesh.node_cell_offsets[c[k] + 1];
    for (int i = 0; i < n; ++i) mesh.node_cell_offsets[i + 1] += mesh.node_cell_offsets[i];
    mesh.node_cells.assign(mesh.node_cell_offsets.back(), 0);
    std::vector<int> fill(mesh.node_cell_offsets.begin(), mesh.node_cell_offsets.end() - 1);
    for (int c = 0; c < mesh.num_cells(); ++c)
        for (int k = 0; k < per; ++k) mesh.node_cells[fill[mesh.cells[c][k]]++] = c;
}

void append_1d(Mesh& mesh, const std::vector<double>& xs, int component)
{
    const int offset = mesh.num_nodes();
    for (double x : xs) {
        mesh.nodes.push_back({x, 0.0});
        mesh.node_component.push_back(component);
    }
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        mesh.cells.push_back({offset + static_cast<int>(i), offset + static_cast<int>(i) + 1, -1});
        mesh.cell_component.push_back(component);
    }
}

struct EdgeKey {
    int a, b;
    bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

void quadrisect(Mesh& mesh, int first_cell)
{
    std::map<EdgeKey, int> midpoint;
    auto mid = [&](int i, int j) {
        const EdgeKey key{std::min(i, j), std::max(i, j)};
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = mesh.num_nodes();
        mesh.nodes.push_back(0.5 * (mesh.nodes[i] + mesh.nodes[j]));
        mesh.node_component.push_back(mesh.node_component[i]);
        midpoint.emplace(key, id);
        return id;
    };
    std::vector<std::array<int, 3>> cells(mesh.cells.begin(), mesh.cells.begin() + first_cell);
    std::vector<int> comps(mesh.cell_component.begin(), mesh.cell_component.begin() + first_cell);
    for (int c = first_cell; c < mesh.num_cells(); ++c) {
        const auto [a, b, d] = mesh.cells[c];
        const int ab = mid(a, b), bd = mid(b, d), da = mid(d, a);
        const int comp = mesh.cell_component[c];
        for (const auto& t : {std::array<int, 3>{a, ab, da}, std::array<int, 3>{ab, b, bd},
                              std::array<int, 3>{da, bd, d}, std::array<int, 3>{ab, bd, da}}) {
            cells.push_back(t);
            comps.push_back(comp);
        }
    }
    mesh.cells = std::move(cells);
    mesh.cell_component = std::move(comps);
}

std::optional<std::array<double, 4>> axis_aligned_box(const Polygon& poly)
{
    if (poly.size() != 4) return std::nullopt;
    double x0 = poly[0].x, x1 = poly[0].x, y0 = poly[0].y, y1 = poly[0].y;
    for (const Point& p : poly) {
        x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    for (const Point& p : poly)
        if ((p.x != x0 && p.x != x1) || (p.y != y0 && p.y != y1)) return std::nullopt;
    return std::array<double, 4>{x0, x1, y0, y1};
}

void mesh_polygon(Mesh& mesh, const Polygon& poly, int component, int level, const MeshOptions& options)
{
    const int node_offset = mesh.num_nodes();
    const int cell_offset = mesh.num_cells();
    if (options.rings > 0) {
        const auto box = axis_aligned_box(poly);
        if (!box) throw InputError("graded polygon meshes require an axis-aligned rectangle");
        const int s = 1 << level;
        const auto xs = graded_points((*box)[0], (*box)[1], options.rings, s);
        const auto ys = graded_points((*box)[2], (*box)[3], options.rings, s);
        const int nx = static_cast<int>(xs.size());
        if (static_cast<std::size_t>(nx) * ys.size() + mesh.nodes.size() > options.max_nodes)
            throw InputError("graded rectangle mesh exceeds the node cap");
        for (double y : ys)
            for (double x : xs) {
                mesh.nodes.push_back({x, y});
                mesh.node_component.push_back(component);
            }
        auto id = [&](int i, int j) { return node_offset + j * nx + i; };
        for (int j = 0; j + 1 < static_cast<int>(ys.size()); ++j)
            for (int i = 0; i + 1 < nx; ++i) {
                mesh.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                mesh.cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
                mesh.cell_component.push_back(component);
                mesh.cell_component.push_back(component);
            }
        return;
    }
    for (const Point& p : poly) {
        mesh.nodes.push_back(p);
        mesh.node_component.push_back(component);
    }
    for (auto t : ear_clip(poly)) {
        for (int& v : t) v += node_offset;
        mesh.cells.push_back(t);
        mesh.cell_component.push_back(component);
    }
    for (int l = 0; l < level; ++l) {
        const std::size_t cells_now = mesh.cells.size() - cell_offset;
        // Each quadrisection adds about 1.5 nodes per triangle.
        if (mesh.nodes.size() + cells_now * 3 / 2 > options.max_nodes)
            throw InputError("polygon mesh exceeds the node cap");
        quadrisect(mesh, cell_offset);
    }
}

void mesh_sector(Mesh& mesh, const Sector& sector, int level, const MeshOptions& options)
{
    const int rings = std::max(options.rings, 6);
    const int per_layer = 1 << level;
    const int M = 4 << level;
    const double R = sector.radius;
    const double t0 = sector.half_angle();

    PolarLayout layout;
    layout.angles = M;
    layout.theta0 = t0;
    const double r_min = std::ldexp(R, -rings);
    layout.radii.push_back(r_min);
    for (int j = rings - 1; j >= 0; --j) {
        const double lo = std::ldexp(R, -j - 1), hi = std::ldexp(R, -j);
        for (int k = 1; k <= per_layer; ++k)
            layout.radii.push_back(k == per_layer ? hi : lo + (hi - lo) * k / per_layer);
    }
    const std::size_t total = 1 + layout.radii.size() * (M + 1);
    if (total > options.max_nodes) throw InputError("sector mesh exceeds the node cap");

    mesh.nodes.push_back({0.0, 0.0});
    for (double r : layout.radii)
        for (int j = 0; j <= M; ++j) {
            const double th = -t0 + 2.0 * t0 * j / M;
            if (j == 0) mesh.nodes.push_back({r * std::cos(t0), -r * std::sin(t0)});
            else if (j == M) mesh.nodes.push_back({r * std::cos(t0), r * std::sin(t0)});
            else if (2 * j == M) mesh.nodes.push_back({r, 0.0});
            else mesh.nodes.push_back({r * std::cos(th), r * std::sin(th)});
        }
    mesh.node_component.assign(mesh.nodes.size(), 0);
    auto id = [M](int ring, int j) { return 1 + ring * (M + 1) + j; };
    for (int j = 0; j < M; ++j) mesh.cells.push_back({0, id(0, j), id(0, j + 1)});
    for (int i = 0; i + 1 < static_cast<int>(layout.radii.size()); ++i)
        for (int j = 0; j < M; ++j) {
            const int a = id(i, j), b = id(i, j + 1), c = id(i + 1, j + 1), d = id(i + 1, j);
            // Mirror the diagonal about the bisector so the mesh is symmetric.
            if (2 * j < M) {
                mesh.cells.push_back({a, b, c});
                mesh.cells.push_back({a, c, d});
            } else {
                mesh.cells.push_back({a, b, d});
                mesh.cells.push_back({b, c, d});
            }
        }
    mesh.cell_component.assign(mesh.cells.size(), 0);
    mesh.polar = std::move(layout);
}

std::array<double, 3> barycentric(const Mesh& mesh, int cell, Point p)
{
    const auto& c = mesh.cells[cell];
    const Point a = mesh.nodes[c[0]], b = mesh.nodes[c[1]], d = mesh.nodes[c[2]];
    const double det = cross(b - a, d - a);
    const double l1 = cross(p - a, d - a) / det;
    const double l2 = cross(b - a, p - a) / det;
    return {1.0 - l1 - l2, l1, l2};
}

} // namespace

double Mesh::measure(int cell) const
{
    const auto& c = cells[cell];
    if (dim == 1) return std::abs(nodes[c[1]].x - nodes[c[0]].x);
    return 0.5 * std::abs(cross(nodes[c[1]] - nodes[c[0]], nodes[c[2]] - nodes[c[0]]));
}

Point Mesh::barycenter(int cell) const
{
    const auto& c = cells[cell];
    if (dim == 1) return 0.5 * (nodes[c[0]] + nodes[c[1]]);
    return (1.0 / 3.0) * (nodes[c[0]] + nodes[c[1]] + nodes[c[2]]);
}

std::optional<std::pair<int, std::array<double, 3>>> Mesh::locate(Point p) const
{
    constexpr double tol = 1e-12;
    if (dim == 1) {
        for (int c = 0; c < num_cells(); ++c) {
            const double a = nodes[cells[c][0]].x, b = nodes[cells[c][1]].x;
            if (p.x >= a - tol * (b - a) && p.x <= b + tol * (b - a)) {
                const double t = std::clamp((p.x - a) / (b - a), 0.0, 1.0);
                return std::pair{c, std::array<double, 3>{1.0 - t, t, 0.0}};
            }
        }
        return std::nullopt;
    }
    auto inside = [&](int c) -> std::optional<std::pair<int, std::array<double, 3>>> {
        const auto l = barycentric(*this, c, p);
        if (std::min({l[0], l[1], l[2]}) >= -tol) return std::pair{c, l};
        return std::nullopt;
    };
    if (polar) {
        const double r = norm(p);
        const double th = std::atan2(p.y, p.x);
        const int M = polar->angles;
        int j = static_cast<int>(std::floor((th + polar->theta0) / (2.0 * polar->theta0) * M));
        j = std::clamp(j, 0, M - 1);
        const auto& radii = polar->radii;
        if (r <= radii.front()) {
            for (int jj : {j, std::max(j - 1, 0), std::min(j + 1, M - 1)})
                if (auto hit = inside(jj)) return hit;
        } else {
            const int i = static_cast<int>(std::lower_bound(radii.begin(), radii.end(), r) - radii.begin()) - 1;
            for (int ii : {i, i - 1, i + 1}) {
                if (ii < 0 || ii + 1 >= static_cast<int>(radii.size())) continue;
                for (int jj : {j, j - 1, j + 1}) {
                    if (jj < 0 || jj >= M) continue;
                    const int base = M + 2 * (ii * M + jj);
                    for (int c : {base, base + 1})
                        if (auto hit = inside(c)) return hit;
                }
            }
        }
        return std::nullopt;
    }
    for (int c = 0; c < num_cells(); ++c)
        if (auto hit = inside(c)) return hit;
    return std::nullopt;
}

std::vector<double> graded_points(double a, double b, int rings, int per_layer)
{
    const double half = 0.5 * (b - a);
    std::vector<double> breaks{0.0};
    for (int j = rings; j >= 0; --j) breaks.push_back(std::ldexp(half, -j));
    std::vector<double> offsets{0.0};
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
        for (int s = 1; s <= per_layer; ++s)
            offsets.push_back(s == per_layer ? breaks[k + 1]
                                             : breaks[k] + (breaks[k + 1] - breaks[k]) * s / per_layer);
    std::vector<double> xs;
    for (double o : offsets) xs.push_back(a + o);
    for (auto it = offsets.rbegin() + 1; it != offsets.rend(); ++it) xs.push_back(b - *it);
    xs.back() = b;
    // Layers finer than the resolution of doubles near an endpoint collapse.
    const double resolution = 256.0 * std::numeric_limits<double>::epsilon();
    std::vector<double> kept{xs.front()};
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double x = xs[i];
        if (x - kept.back() > resolution * std::max(std::abs(x), std::abs(kept.back()))) {
            kept.push_back(x);
        } else if (i + 1 == xs.size()) {
            kept.back() = x;
        }
    }
    return kept;
}

std::vector<std::array<int, 3>> ear_clip(const Polygon& poly)
{
    std::vector<int> idx(poly.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::vector<std::array<int, 3>> out;
    // Closed test: a vertex on the clipping diagonal also blocks the ear.
    auto inside_closed = [](Point p, Point a, Point b, Point c) {
        return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
    };
    while (idx.size() > 3) {
        const std::size_t n = idx.size();
        std::size_t best = n;
        double best_quality = -1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const int ia = idx[(k + n - 1) % n], ib = idx[k], ic = idx[(k + 1) % n];
            const Point a = poly[ia], b = poly[ib], c = poly[ic];
            const double area2 = cross(b - a, c - a);
            if (area2 <= 0) continue;
            bool blocked = false;
            for (int other : idx) {
                if (other == ia || other == ib || other == ic) continue;
                if (inside_closed(poly[other], a, b, c)) {
                    blocked = true;
                    break;
                }
            }
            if (blocked) continue;
            // Prefer well-shaped ears.
            const double perim2 = dot(b - a, b - a) + dot(c - b, c - b) + dot(a - c, a - c);
            const double quality = area2 / perim2;
            if (quality > best_quality + 1e-14) best_quality = quality, best = k;
        }
        if (best == n) throw InputError("ear clipping failed; polygon is not simple");
        out.push_back({idx[(best + n - 1) % n], idx[best], idx[(best + 1) % n]});
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(best));
    }
    out.push_back({idx[0], idx[1], idx[2]});
    return out;
}

void distance_to_boundary(Mesh& mesh, const DomainSpec& domain)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    mesh.distance.resize(mesh.nodes.size());
    mesh.boundary.resize(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const Point p = mesh.nodes[i];
        // Roundoff in the distance scales with the coordinates, so deeply
        // graded layers near a vertex at the origin stay interior.
        const double tol = std::min(1e-12 * domain.diameter(), 64.0 * eps * std::max(std::abs(p.x), std::abs(p.y)));
        const double d = domain.distance_to_boundary(p);
        mesh.boundary[i] = d <= tol;
        mesh.distance[i] = d <= tol ? 0.0 : d;
    }
}

Mesh triangulate(const DomainSpec& domain, int level, const MeshOptions& options)
{
    if (level < 0) throw InputError("refinement level must be >= 0");
    if (level > 30) throw InputError("refinement level too large");
    Mesh mesh;
    mesh.dim = domain.dim();
    mesh.level = level;
    mesh.diameter = domain.diameter();
    switch (domain.kind()) {
    case DomainKind::Interval:
    case DomainKind::IntervalUnion: {
        int comp = 0;
        for (const auto& m : domain.intervals()) {
            std::vector<double> xs;
            if (options.rings > 0) {
                xs = graded_points(m.a, m.b, options.rings, 1 << level);
            } else {
                const std::size_t n = predicted_1d(static_cast<std::size_t>(options.base_cells), level);
                if (n + 1 + mesh.nodes.size() > options.max_nodes)
                    throw InputError("interval mesh exceeds the node cap");
                for (std::size_t i = 0; i <= n; ++i)
                    xs.push_back(i == n ? m.b : m.a + m.length() * static_cast<double>(i) / static_cast<double>(n));
            }
            append_1d(mesh, xs, comp++);
        }
        break;
    }
    case DomainKind::Polygon:
    case DomainKind::PolygonUnion: {
        int comp = 0;
        for (const auto& poly : domain.polygons()) mesh_polygon(mesh, poly, comp++, level, options);
        break;
    }
    case DomainKind::Sector: mesh_sector(mesh, domain.sector(), level, options); break;
    }
    check_cap(mesh, options);
    for (int c = 0; c < mesh.num_cells(); ++c)
        if (!(mesh.measure(c) > 0.0)) throw InputError("mesh produced a degenerate cell");
    distance_to_boundary(mesh, domain);
    build_adjacency(mesh);
    return mesh;
}

std::vector<std::array<int, 2>> mesh_edges(const Mesh& mesh)
{
    std::vector<std::array<int, 2>> edges;
    const int per = mesh.vertices_per_cell();
    for (const auto& c : mesh.cells)
        for (int i = 0; i < per; ++i)
            for (int j = i + 1; j < per; ++j) edges.push_back({std::min(c[i], c[j]), std::max(c[i], c[j])});
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

double max_edge_length(const Mesh& mesh)
{
    double h = 0.0;
    for (const auto& e : mesh_edges(mesh)) h = std::max(h, norm(mesh.nodes[e[0]] - mesh.nodes[e[1]]));
    return h;
}

} // namespace lelab
