#include "dtnjordan/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dtnjordan/errors.hpp"

namespace dtnjordan {

namespace {

void attach_dof_partition(DiscreteDomain& domain) {
    auto [interior, boundary] = classify_dofs(domain);
    domain.interior_nodes = std::move(interior);
    domain.boundary_nodes = std::move(boundary);
}

} // namespace

DiscreteDomain build_interval_mesh(int n, double length) {
    if (n < 2)
        throw InvalidMeshError("build_interval_mesh: need n >= 2, got n = " + std::to_string(n));
    if (!(length > 0.0))
        throw InvalidMeshError("build_interval_mesh: need length > 0");

    DiscreteDomain domain;
    domain.dimension = 1;
    domain.node_coordinates.resize(n + 1, 1);
    const double h = length / n;
    for (int i = 0; i <= n; ++i)
        domain.node_coordinates(i, 0) = i * h;
    domain.elements.resize(n, 2);
    for (int e = 0; e < n; ++e) {
        domain.elements(e, 0) = e;
        domain.elements(e, 1) = e + 1;
    }
    domain.element_diameter_max = h;
    attach_dof_partition(domain);
    return domain;
}

DiscreteDomain build_rectangle_mesh(int nx, int ny, double width, double height) {
    if (nx < 2 || ny < 2)
        throw InvalidMeshError("build_rectangle_mesh: need nx, ny >= 2, got nx = " +
                               std::to_string(nx) + ", ny = " + std::to_string(ny));
    if (!(width > 0.0) || !(height > 0.0))
        throw InvalidMeshError("build_rectangle_mesh: need positive width and height");

    DiscreteDomain domain;
    domain.dimension = 2;
    const int nodes_x = nx + 1;
    const int nodes_y = ny + 1;
    const double hx = width / nx;
    const double hy = height / ny;
    domain.node_coordinates.resize(nodes_x * nodes_y, 2);
    const auto node_id = [nodes_x](int i, int j) { return j * nodes_x + i; };
    for (int j = 0; j < nodes_y; ++j) {
        for (int i = 0; i < nodes_x; ++i) {
            domain.node_coordinates(node_id(i, j), 0) = i * hx;
            domain.node_coordinates(node_id(i, j), 1) = j * hy;
        }
    }

    domain.elements.resize(2 * nx * ny, 3);
    int e = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = node_id(i, j);
            const int b = node_id(i + 1, j);
            const int c = node_id(i + 1, j + 1);
            const int d = node_id(i, j + 1);
            domain.elements.row(e++) << a, b, c;
            domain.elements.row(e++) << a, c, d;
        }
    }
    domain.element_diameter_max = std::hypot(hx, hy);
    attach_dof_partition(domain);
    return domain;
}

std::pair<std::vector<int>, std::vector<int>> classify_dofs(const DiscreteDomain& domain) {
    const int n = domain.num_nodes();
    if (n == 0 || (domain.dimension != 1 && domain.dimension != 2))
        throw InvalidMeshError("classify_dofs: invalid domain");

    std::vector<int> interior;
    std::vector<int> boundary;
    const Eigen::VectorXd mins = domain.node_coordinates.colwise().minCoeff();
    const Eigen::VectorXd maxs = domain.node_coordinates.colwise().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, (maxs - mins).maxCoeff());

    for (int i = 0; i < n; ++i) {
        bool on_boundary = false;
        for (int d = 0; d < domain.dimension; ++d) {
            const double x = domain.node_coordinates(i, d);
            if (std::abs(x - mins(d)) <= tol || std::abs(x - maxs(d)) <= tol)
                on_boundary = true;
        }
        (on_boundary ? boundary : interior).push_back(i);
    }
    return {std::move(interior), std::move(boundary)};
}

double element_measure(const DiscreteDomain& domain, int element) {
    if (element < 0 || element >= domain.num_elements())
        throw InvalidMeshError("element_measure: element index out of range");
    if (domain.dimension == 1) {
        const double a = domain.node_coordinates(domain.elements(element, 0), 0);
        const double b = domain.node_coordinates(domain.elements(element, 1), 0);
        return b - a;
    }
    const auto p0 = domain.node_coordinates.row(domain.elements(element, 0));
    const auto p1 = domain.node_coordinates.row(domain.elements(element, 1));
    const auto p2 = domain.node_coordinates.row(domain.elements(element, 2));
    const double det =
        (p1(0) - p0(0)) * (p2(1) - p0(1)) - (p2(0) - p0(0)) * (p1(1) - p0(1));
    return 0.5 * det;
}

} // namespace dtnjordan
