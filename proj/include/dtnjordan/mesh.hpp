#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dtnjordan {

/// Structured simplicial mesh of an interval or an axis-aligned rectangle
/// with piecewise-linear nodal DOFs. Boundary/interior index lists are sorted
/// ascending so every derived boundary matrix is reproducible bit-for-bit.
struct DiscreteDomain {
    int dimension = 0;                // 1 or 2
    Eigen::MatrixXd node_coordinates; // num_nodes x dimension
    Eigen::MatrixXi elements;         // num_elements x (dimension + 1)
    std::vector<int> boundary_nodes;  // ascending global indices
    std::vector<int> interior_nodes;  // ascending global indices
    double element_diameter_max = 0.0;

    int num_nodes() const { return static_cast<int>(node_coordinates.rows()); }
    int num_elements() const { return static_cast<int>(elements.rows()); }
    int num_boundary() const { return static_cast<int>(boundary_nodes.size()); }
    int num_interior() const { return static_cast<int>(interior_nodes.size()); }
};

/// n + 1 equally spaced nodes on [0, length]; requires n >= 2.
DiscreteDomain build_interval_mesh(int n, double length);

/// Structured triangulation of [0, width] x [0, height]; each of the nx*ny
/// grid cells is split into two triangles. Requires nx, ny >= 2.
DiscreteDomain build_rectangle_mesh(int nx, int ny, double width, double height);

/// Recomputes the (interior, boundary) partition from the geometry.
/// Deterministic, sorted, idempotent.
std::pair<std::vector<int>, std::vector<int>> classify_dofs(const DiscreteDomain& domain);

/// Length of a segment or area of a triangle.
double element_measure(const DiscreteDomain& domain, int element);

} // namespace dtnjordan
