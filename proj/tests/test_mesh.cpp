#include <cmath>
#include <map>
#include <numbers>

#include <doctest.h>

#include "lelab/error.hpp"
#include "lelab/mesh.hpp"

using namespace lelab;

namespace {

Polygon unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }
Polygon l_shape() { return {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}; }

// Every interior edge is shared by exactly two triangles, every boundary edge
// by one and lies on the boundary.
void check_conforming(const Mesh& mesh)
{
    std::map<std::pair<int, int>, int> count;
    for (const auto& c : mesh.cells)
        for (int k = 0; k < 3; ++k) {
            const int a = c[k], b = c[(k + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    for (const auto& [edge, n] : count) {
        CHECK(n <= 2);
        if (n == 1) CHECK((mesh.boundary[edge.first] && mesh.boundary[edge.second]));
    }
}

} // namespace

TEST_SUITE("mesh") {

TEST_CASE("triangulate examples")
{
    const Mesh line = triangulate(DomainSpec::interval(0, 1), 3);
    CHECK(line.num_cells() == 64);
    CHECK(line.num_nodes() == 65);

    const Mesh sq = triangulate(DomainSpec::polygon(unit_square()), 1);
    CHECK(sq.num_cells() == 8);

    const Mesh sec = triangulate(DomainSpec::sector(0.5, 1.0), 2);
    const double half = std::acos(0.5);
    for (const Point& p : sec.nodes) {
        CHECK(norm(p) <= 1.0 + 1e-14);
        if (norm(p) > 0.0) CHECK(std::abs(std::atan2(p.y, p.x)) <= half + 1e-14);
    }
}

TEST_CASE("cells have positive measure and meshes conform")
{
    for (const auto& dom : {DomainSpec::polygon(unit_square()), DomainSpec::polygon(l_shape()),
                            DomainSpec::sector(0.5, 1.0), DomainSpec::sector(0.95, 2.0)}) {
        for (int level = 0; level <= 3; ++level) {
            const Mesh m = triangulate(dom, level);
            for (int c = 0; c < m.num_cells(); ++c) CHECK(m.measure(c) > 0.0);
            check_conforming(m);
        }
    }
}

TEST_CASE("refinement halves the mesh size")
{
    for (const auto& dom : {DomainSpec::interval(0, 1), DomainSpec::polygon(unit_square()),
                            DomainSpec::polygon(l_shape())}) {
        double previous = max_edge_length(triangulate(dom, 0));
        for (int level = 1; level <= 4; ++level) {
            const double h = max_edge_length(triangulate(dom, level));
            CHECK(previous / h == doctest::Approx(2.0).epsilon(0.01));
            previous = h;
        }
    }
}

TEST_CASE("boundary flags and distances")
{
    const auto dom = DomainSpec::polygon(l_shape());
    const Mesh m = triangulate(dom, 3);
    const double tol = 1e-12 * dom.diameter();
    for (int i = 0; i < m.num_nodes(); ++i) {
        const double d = dom.distance_to_boundary(m.nodes[i]);
        CHECK(static_cast<bool>(m.boundary[i]) == (d <= tol));
        if (m.boundary[i]) CHECK(m.distance[i] == 0.0);
        else CHECK(m.distance[i] > 0.0);
    }
    for (const auto& [a, b] : mesh_edges(m))
        CHECK(std::abs(m.distance[a] - m.distance[b]) <= norm(m.nodes[a] - m.nodes[b]) + 1e-15);

    const Mesh line = triangulate(DomainSpec::interval(0, 1), 2);
    for (int i = 0; i < line.num_nodes(); ++i)
        CHECK(line.distance[i] == doctest::Approx(std::min(line.nodes[i].x, 1.0 - line.nodes[i].x)));

    const Mesh sec = triangulate(DomainSpec::sector(0.5, 1.0), 1);
    CHECK(sec.boundary[0]);
    CHECK(sec.distance[0] == 0.0);
}

TEST_CASE("union components are tagged")
{
    const Mesh m = triangulate(DomainSpec::interval_union({{0, 1}, {2, 3}}), 2);
    for (int i = 0; i < m.num_nodes(); ++i) CHECK(m.node_component[i] == (m.nodes[i].x < 1.5 ? 0 : 1));
    const Mesh p = triangulate(DomainSpec::polygon_union({unit_square(), {{2, 0}, {3, 0}, {3, 1}, {2, 1}}}), 1);
    for (int c = 0; c < p.num_cells(); ++c) CHECK(p.cell_component[c] == (p.barycenter(c).x < 1.5 ? 0 : 1));
}

TEST_CASE("graded meshes")
{
    const auto xs = graded_points(0.0, 1.0, 4, 2);
    CHECK(xs.front() == 0.0);
    CHECK(xs.back() == 1.0);
    CHECK(xs[1] == doctest::Approx(0.5 / 32.0));
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] > xs[i - 1]);

    MeshOptions opts;
    opts.rings = 8;
    const Mesh sec = triangulate(DomainSpec::sector(0.95, 1.0), 1, opts);
    REQUIRE(sec.polar.has_value());
    CHECK(sec.polar->radii.front() == doctest::Approx(std::ldexp(1.0, -8)));
    check_conforming(sec);

    const Mesh sq = triangulate(DomainSpec::polygon(unit_square()), 1, opts);
    check_conforming(sq);
    CHECK_THROWS_AS(triangulate(DomainSpec::polygon(l_shape()), 1, opts), InputError);
}

TEST_CASE("deep grading keeps interior nodes free")
{
    MeshOptions opts;
    opts.rings = 100;
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 2, opts);
    int boundary = 0;
    for (int i = 0; i < m.num_nodes(); ++i) {
        boundary += m.boundary[i];
        if (i) CHECK(m.nodes[i].x > m.nodes[i - 1].x);
    }
    CHECK(boundary == 2);
    CHECK(m.nodes[1].x == std::ldexp(0.5, -100) / 4);
    // Near x = 1 the layers stop where doubles can no longer resolve them.
    CHECK(1.0 - m.nodes[m.num_nodes() - 2].x > 1e-14);

    const auto xs = graded_points(2.0, 3.0, 80, 1);
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] > xs[i - 1]);
    CHECK(xs.front() == 2.0);
    CHECK(xs.back() == 3.0);
}

TEST_CASE("ear clipping handles reentrant corners")
{
    const auto tris = ear_clip(l_shape());
    CHECK(tris.size() == 4);
    double area = 0.0;
    const Polygon poly = l_shape();
    for (const auto& t : tris) {
        const double a = 0.5 * cross(poly[t[1]] - poly[t[0]], poly[t[2]] - poly[t[0]]);
        CHECK(a > 0.0);
        area += a;
    }
    CHECK(area == doctest::Approx(3.0));
}

TEST_CASE("point location")
{
    const Mesh sec = triangulate(DomainSpec::sector(0.5, 1.0), 2);
    const auto hit = sec.locate({0.5, 0.1});
    REQUIRE(hit.has_value());
    const auto& [cell, l] = *hit;
    Point p{};
    for (int k = 0; k < 3; ++k) p = p + l[k] * sec.nodes[sec.cells[cell][k]];
    CHECK(p.x == doctest::Approx(0.5));
    CHECK(p.y == doctest::Approx(0.1));
    CHECK_FALSE(sec.locate({-0.5, 0.0}).has_value());
}

TEST_CASE("node cap and bad levels")
{
    MeshOptions opts;
    opts.max_nodes = 1000;
    CHECK_THROWS_AS(triangulate(DomainSpec::polygon(unit_square()), 6, opts), InputError);
    CHECK_THROWS_AS(triangulate(DomainSpec::interval(0, 1), 8, opts), InputError);
    CHECK_THROWS_AS(triangulate(DomainSpec::interval(0, 1), -1), InputError);
}

}
