#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "lelab/geometry.hpp"

namespace lelab {

/// Ring/angle structure of a sector mesh, used for point location.
/// Node 0 is the apex; ring i, angle j sits at 1 + i*(angles+1) + j.
struct PolarLayout {
    std::vector<double> radii;  // ring radii, increasing, last one is R
    int angles = 0;             // angular cells per ring
    double theta0 = 0.0;        // half-aperture
};

struct Mesh {
    int dim = 1;
    int level = 0;
    double diameter = 0.0;
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> cells;  // 1D cells use the first two slots, third is -1
    std::vector<char> boundary;
    std::vector<double> distance;           // d_Ω at nodes, exactly 0 on the boundary
    std::vector<int> node_component;
    std::vector<int> cell_component;
    std::vector<int> node_cell_offsets;     // CSR node -> incident cells
    std::vector<int> node_cells;
    std::optional<PolarLayout> polar;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
    int vertices_per_cell() const { return dim + 1; }
    double measure(int cell) const;
    Point barycenter(int cell) const;

    /// Cell containing p and its barycentric coordinates, if any.
    std::optional<std::pair<int, std::array<double, 3>>> locate(Point p) const;
};

struct MeshOptions {
    /// Geometric grading toward the boundary (intervals), the corners
    /// (axis-aligned rectangles) or the tip (sectors). 0 means uniform, except
    /// for sectors where at least 6 rings are always used.
    int rings = 0;
    /// Cells per interval component at level 0.
    int base_cells = 8;
    std::size_t max_nodes = 4'000'000;
};

/// Conforming simplicial mesh of the domain. Each level bisects segments or
/// quadrisects triangles (sectors: doubles angular and radial resolution).
Mesh triangulate(const DomainSpec& domain, int level, const MeshOptions& options = {});

/// Recomputes distance and boundary flags from the domain geometry.
void distance_to_boundary(Mesh& mesh, const DomainSpec& domain);

std::vector<std::array<int, 2>> mesh_edges(const Mesh& mesh);
double max_edge_length(const Mesh& mesh);

/// Ear-clipping triangulation of a simple counterclockwise polygon.
std::vector<std::array<int, 3>> ear_clip(const Polygon& polygon);

/// Nodes of a graded partition of [a, b]: `rings` geometric layers (ratio 1/2)
/// toward each end, each split into `per_layer` equal cells.
std::vector<double> graded_points(double a, double b, int rings, int per_layer);

} // namespace lelab
