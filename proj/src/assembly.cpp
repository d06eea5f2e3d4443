#include "dtnjordan/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "dtnjordan/errors.hpp"
#include "dtnjordan/linalg.hpp"

namespace dtnjordan {

namespace {

using Complex = std::complex<double>;

void check_coefficient_shapes(const DiscreteDomain& domain, const CoefficientSet& coeffs) {
    const std::size_t ne = static_cast<std::size_t>(domain.num_elements());
    if (coeffs.c_principal.size() != ne || coeffs.b_conv.size() != ne ||
        coeffs.c_conv.size() != ne || coeffs.c_zero.size() != ne)
        throw DimensionError("assemble_forms: coefficient arrays must have one entry per element");
    const int d = domain.dimension;
    for (std::size_t e = 0; e < ne; ++e) {
        if (coeffs.c_principal[e].rows() != d || coeffs.c_principal[e].cols() != d ||
            coeffs.b_conv[e].size() != d || coeffs.c_conv[e].size() != d)
            throw DimensionError("assemble_forms: coefficient dimensions must match the domain");
    }
}

// P1 gradients on a triangle, constant per element; columns are vertices.
Eigen::Matrix<double, 2, 3> triangle_gradients(const Eigen::Vector2d& p0,
                                               const Eigen::Vector2d& p1,
                                               const Eigen::Vector2d& p2, double area) {
    Eigen::Matrix<double, 2, 3> g;
    g.col(0) << p1.y() - p2.y(), p2.x() - p1.x();
    g.col(1) << p2.y() - p0.y(), p0.x() - p2.x();
    g.col(2) << p0.y() - p1.y(), p1.x() - p0.x();
    return g / (2.0 * area);
}

Eigen::MatrixXd assemble_boundary_mass(const DiscreteDomain& domain,
                                       const std::vector<int>& boundary_nodes) {
    const int nb = static_cast<int>(boundary_nodes.size());
    if (domain.dimension == 1) {
        // Two-point boundary: the L2 pairing is the counting measure.
        return Eigen::MatrixXd::Identity(nb, nb);
    }
    Eigen::MatrixXd mb = Eigen::MatrixXd::Zero(nb, nb);

    std::vector<int> global_to_local(domain.num_nodes(), -1);
    for (int r = 0; r < nb; ++r)
        global_to_local[boundary_nodes[r]] = r;

    const Eigen::VectorXd mins = domain.node_coordinates.colwise().minCoeff();
    const Eigen::VectorXd maxs = domain.node_coordinates.colwise().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, (maxs - mins).maxCoeff());

    // Walk each side of the rectangle in coordinate order and add the 1D
    // element mass of every boundary edge. Corner nodes belong to two sides
    // but each edge is visited exactly once.
    for (int axis = 0; axis < 2; ++axis) {
        for (const double side : {mins(axis), maxs(axis)}) {
            std::vector<int> side_nodes;
            for (int b : boundary_nodes)
                if (std::abs(domain.node_coordinates(b, axis) - side) <= tol)
                    side_nodes.push_back(b);
            const int other = 1 - axis;
            std::sort(side_nodes.begin(), side_nodes.end(), [&](int a, int b) {
                return domain.node_coordinates(a, other) < domain.node_coordinates(b, other);
            });
            for (std::size_t k = 0; k + 1 < side_nodes.size(); ++k) {
                const int a = side_nodes[k];
                const int b = side_nodes[k + 1];
                const double len = domain.node_coordinates(b, other) -
                                   domain.node_coordinates(a, other);
                const int la = global_to_local[a];
                const int lb = global_to_local[b];
                mb(la, la) += len / 3.0;
                mb(lb, lb) += len / 3.0;
                mb(la, lb) += len / 6.0;
                mb(lb, la) += len / 6.0;
            }
        }
    }
    return mb;
}

} // namespace

FormMatrices assemble_forms(const DiscreteDomain& domain, const CoefficientSet& coeffs) {
    check_coefficient_shapes(domain, coeffs);
    const double mu_actual = verified_ellipticity_constant(coeffs);
    if (coeffs.mu > mu_actual + 1e-12 * std::max(1.0, mu_actual))
        throw EllipticityError("assemble_forms: claimed mu exceeds the verified constant");

    const int n = domain.num_nodes();
    FormMatrices forms;
    forms.K = Eigen::MatrixXcd::Zero(n, n);
    forms.mass = Eigen::MatrixXd::Zero(n, n);
    forms.h1_gram = Eigen::MatrixXd::Zero(n, n);
    forms.mu = coeffs.mu > 0.0 ? coeffs.mu : mu_actual;

    if (domain.dimension == 1) {
        for (int e = 0; e < domain.num_elements(); ++e) {
            const double h = element_measure(domain, e);
            if (!(h > 0.0))
                throw InvalidMeshError("assemble_forms: nonpositive element measure");
            const Complex c = coeffs.c_principal[e](0, 0);
            const Complex cv = coeffs.c_conv[e](0);
            const Complex bv = coeffs.b_conv[e](0);
            const Complex c0 = coeffs.c_zero[e];
            const int idx[2] = {domain.elements(e, 0), domain.elements(e, 1)};
            const double sign[2] = {-1.0, 1.0};
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    const double mij = h / 6.0 * (i == j ? 2.0 : 1.0);
                    Complex kij = c * sign[i] * sign[j] / h; // int c f' conj(g')
                    kij += cv * sign[j] * 0.5;               // int c f' conj(g)
                    kij += bv * sign[i] * 0.5;               // int b f  conj(g')
                    kij += c0 * mij;                         // int c0 f conj(g)
                    forms.K(idx[i], idx[j]) += kij;
                    forms.mass(idx[i], idx[j]) += mij;
                    forms.h1_gram(idx[i], idx[j]) += sign[i] * sign[j] / h + mij;
                }
            }
        }
    } else {
        for (int e = 0; e < domain.num_elements(); ++e) {
            const double area = element_measure(domain, e);
            if (!(area > 0.0))
                throw InvalidMeshError("assemble_forms: nonpositive element measure");
            const Eigen::Vector2d p0 = domain.node_coordinates.row(domain.elements(e, 0));
            const Eigen::Vector2d p1 = domain.node_coordinates.row(domain.elements(e, 1));
            const Eigen::Vector2d p2 = domain.node_coordinates.row(domain.elements(e, 2));
            const Eigen::Matrix<double, 2, 3> g = triangle_gradients(p0, p1, p2, area);
            const Eigen::MatrixXcd& c = coeffs.c_principal[e];
            const Eigen::VectorXcd& cv = coeffs.c_conv[e];
            const Eigen::VectorXcd& bv = coeffs.b_conv[e];
            const Complex c0 = coeffs.c_zero[e];
            for (int i = 0; i < 3; ++i) {
                const int gi = domain.elements(e, i);
                for (int j = 0; j < 3; ++j) {
                    const int gj = domain.elements(e, j);
                    const Eigen::Vector2cd cgj = c * g.col(j).cast<Complex>();
                    const double mij = area / 12.0 * (i == j ? 2.0 : 1.0);
                    // int c_kl (d_l f)(conj d_k g) with constant gradients
                    Complex kij = area * (g(0, i) * cgj(0) + g(1, i) * cgj(1));
                    kij += (cv(0) * g(0, j) + cv(1) * g(1, j)) * area / 3.0;
                    kij += (bv(0) * g(0, i) + bv(1) * g(1, i)) * area / 3.0;
                    kij += c0 * mij;
                    forms.K(gi, gj) += kij;
                    forms.mass(gi, gj) += mij;
                    forms.h1_gram(gi, gj) += area * g.col(i).dot(g.col(j)) + mij;
                }
            }
        }
    }

    forms.K_dual = forms.K.adjoint();
    auto [interior, boundary] = classify_dofs(domain);
    forms.interior_nodes = std::move(interior);
    forms.boundary_nodes = std::move(boundary);
    const int nb = forms.n_boundary();
    forms.trace_selector = Eigen::MatrixXd::Zero(nb, n);
    for (int r = 0; r < nb; ++r)
        forms.trace_selector(r, forms.boundary_nodes[r]) = 1.0;
    forms.mass_boundary = assemble_boundary_mass(domain, forms.boundary_nodes);
    forms.k_norm = forms.K.norm();
    forms.mass_norm = forms.mass.norm();
    return forms;
}

Eigen::VectorXcd trace(const Eigen::VectorXcd& f, const FormMatrices& forms) {
    if (f.size() != forms.n())
        throw DimensionError("trace: vector length does not match the DOF count");
    Eigen::VectorXcd out(forms.n_boundary());
    for (int r = 0; r < forms.n_boundary(); ++r)
        out(r) = f(forms.boundary_nodes[r]);
    return out;
}

ConormalVector conormal(const Eigen::VectorXcd& f, const Eigen::VectorXcd& h,
                        std::complex<double> lambda, const FormMatrices& forms, FormSide side,
                        double tol_consistency) {
    if (f.size() != forms.n() || h.size() != forms.n())
        throw DimensionError("conormal: vector length does not match the DOF count");
    const Eigen::MatrixXcd& K = side == FormSide::primal ? forms.K : forms.K_dual;
    const Eigen::VectorXcd residual =
        K * f - lambda * apply_real(forms.mass, f) - apply_real(forms.mass, h);

    double interior_norm_sq = 0.0;
    for (int i : forms.interior_nodes)
        interior_norm_sq += std::norm(residual(i));
    const double scale =
        forms.k_norm * f.norm() + forms.mass_norm * (std::abs(lambda) * f.norm() + h.norm());
    if (std::sqrt(interior_norm_sq) > tol_consistency * std::max(scale, 1e-300))
        throw NotInOperatorDomainError(
            "conormal: interior residual " + std::to_string(std::sqrt(interior_norm_sq)) +
            " exceeds tolerance " + std::to_string(tol_consistency * scale));

    ConormalVector out;
    out.values.resize(forms.n_boundary());
    for (int r = 0; r < forms.n_boundary(); ++r)
        out.values(r) = residual(forms.boundary_nodes[r]);
    out.convention = BoundaryCoordinates::dual;
    return out;
}

Eigen::VectorXcd conormal_to_nodal(const ConormalVector& v, const FormMatrices& forms) {
    if (v.values.size() != forms.n_boundary())
        throw DimensionError("conormal_to_nodal: boundary length mismatch");
    if (v.convention == BoundaryCoordinates::nodal)
        return v.values;
    return solve_spd_real(forms.mass_boundary, v.values);
}

Eigen::VectorXcd boundary_to_dual(const Eigen::VectorXcd& nodal, const FormMatrices& forms) {
    if (nodal.size() != forms.n_boundary())
        throw DimensionError("boundary_to_dual: boundary length mismatch");
    return apply_real(forms.mass_boundary, nodal);
}

Eigen::MatrixXcd robin_stiffness(const FormMatrices& forms, const Eigen::MatrixXcd& B_nodal) {
    const int nb = forms.n_boundary();
    if (B_nodal.rows() != nb || B_nodal.cols() != nb)
        throw DimensionError("robin_stiffness: boundary operator dimension mismatch");
    const Eigen::MatrixXcd pairing = apply_real(forms.mass_boundary, B_nodal);
    Eigen::MatrixXcd K_B = forms.K;
    for (int r = 0; r < nb; ++r)
        for (int s = 0; s < nb; ++s)
            K_B(forms.boundary_nodes[r], forms.boundary_nodes[s]) -= pairing(r, s);
    return K_B;
}

namespace {

// PSD probe: shifted Cholesky. The certificate is re-verified independently by
// an eigensolve in the tests, so the production path may use the cheap test.
bool is_psd(const Eigen::MatrixXcd& H, double shift) {
    const Eigen::MatrixXcd probe =
        H + shift * Eigen::MatrixXcd::Identity(H.rows(), H.cols());
    Eigen::LLT<Eigen::MatrixXcd> llt(probe);
    return llt.info() == Eigen::Success;
}

} // namespace

double ellipticity_certificate(const FormMatrices& forms,
                               const std::optional<Eigen::MatrixXcd>& B_nodal, double mu_target,
                               double bisection_tol) {
    if (mu_target < 0.0)
        throw InfeasibleCoercivityError("ellipticity_certificate: mu_target must be >= 0");
    if (mu_target > forms.mu + 1e-12 * std::max(1.0, forms.mu))
        throw InfeasibleCoercivityError(
            "ellipticity_certificate: mu_target " + std::to_string(mu_target) +
            " exceeds the achievable coercivity bound " + std::to_string(forms.mu));

    const Eigen::MatrixXcd K_B = B_nodal ? robin_stiffness(forms, *B_nodal) : forms.K;
    const Eigen::MatrixXcd base =
        0.5 * (K_B + K_B.adjoint()) - mu_target * forms.h1_gram.cast<std::complex<double>>();
    const double psd_shift = 1e-12 * std::max(1.0, base.norm());

    if (is_psd(base, psd_shift))
        return 0.0;

    const Eigen::MatrixXcd mass_c = forms.mass.cast<std::complex<double>>();
    double hi = std::max(1.0, base.norm() / std::max(forms.mass_norm, 1e-300));
    int guard = 0;
    while (!is_psd(base + hi * mass_c, psd_shift)) {
        hi *= 2.0;
        if (++guard > 200)
            throw InfeasibleCoercivityError(
                "ellipticity_certificate: no finite shift found (mu_target too large)");
    }
    double lo = 0.0;
    while (hi - lo > bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        if (is_psd(base + mid * mass_c, psd_shift))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace dtnjordan
