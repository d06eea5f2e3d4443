#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dtnjordan/coefficients.hpp"
#include "dtnjordan/mesh.hpp"

namespace dtnjordan {

/// Assembled sesquilinear form data. Conventions:
///   K(i, j)       = a(basis_j, basis_i)   (row = test function)
///   K_dual        = K^H                   (the dual form a*(f,g) = conj(a(g,f)))
///   h1_gram       = unweighted stiffness + mass (discrete H^1 norm)
///   trace_selector: 0/1 rows selecting boundary nodal values, ascending order.
/// Boundary functionals ("dual coordinates") are vectors of pairing values
/// against boundary nodal test traces; nodal (L2 on the boundary) coordinates
/// are obtained by solving with mass_boundary.
struct FormMatrices {
    Eigen::MatrixXcd K;
    Eigen::MatrixXcd K_dual;
    Eigen::MatrixXd mass;
    Eigen::MatrixXd mass_boundary;
    Eigen::MatrixXd h1_gram;
    Eigen::MatrixXd trace_selector;
    std::vector<int> interior_nodes;
    std::vector<int> boundary_nodes;
    double mu = 0.0;     // verified ellipticity constant of the coefficients
    double k_norm = 0.0; // Frobenius norm of K, cached for tolerance scales
    double mass_norm = 0.0;

    int n() const { return static_cast<int>(K.rows()); }
    int n_boundary() const { return static_cast<int>(boundary_nodes.size()); }
    int n_interior() const { return static_cast<int>(interior_nodes.size()); }
};

/// Exact assembly (piecewise-constant coefficients, closed-form element
/// integrals) of K, K_dual, the volume and boundary Gram matrices, the
/// discrete H^1 Gram and the trace selector.
FormMatrices assemble_forms(const DiscreteDomain& domain, const CoefficientSet& coeffs);

/// Boundary nodal values of f.
Eigen::VectorXcd trace(const Eigen::VectorXcd& f, const FormMatrices& forms);

enum class FormSide { primal, dual };

enum class BoundaryCoordinates { dual, nodal };

/// A boundary functional. In dual coordinates entry r is the pairing value
/// against the r-th boundary nodal trace; nodal coordinates are the
/// mass_boundary-preimage (an L2-boundary function).
struct ConormalVector {
    Eigen::VectorXcd values;
    BoundaryCoordinates convention = BoundaryCoordinates::dual;
};

inline constexpr double kDefaultConsistencyTol = 1e-8;

/// Weak co-normal derivative of f for the interpreted strong action
/// A f = lambda f + h: the boundary-row residual of the weak equation,
///   values = ((K_side - lambda*mass) f - mass*h) restricted to boundary rows.
/// Requires interior rows to vanish up to tol_consistency (relative), i.e.
/// that f actually solves the equation in the interior; otherwise throws
/// NotInOperatorDomainError. side = dual uses K_dual with lambda as passed.
ConormalVector conormal(const Eigen::VectorXcd& f, const Eigen::VectorXcd& h,
                        std::complex<double> lambda, const FormMatrices& forms,
                        FormSide side = FormSide::primal,
                        double tol_consistency = kDefaultConsistencyTol);

/// dual -> nodal: solve with mass_boundary. nodal -> nodal is the identity.
Eigen::VectorXcd conormal_to_nodal(const ConormalVector& v, const FormMatrices& forms);

/// nodal -> dual: multiply by mass_boundary.
Eigen::VectorXcd boundary_to_dual(const Eigen::VectorXcd& nodal, const FormMatrices& forms);

/// Smallest shift nu >= 0 (bisection tolerance 1e-8) such that
///   Hermitian part of (K_B + nu*mass - mu_target*h1_gram)
/// is positive semidefinite, where K_B carries the Robin correction when
/// B_nodal is supplied. Feasibility requires mu_target <= forms.mu (the
/// mesh-uniform coercivity bound); otherwise InfeasibleCoercivityError.
double ellipticity_certificate(const FormMatrices& forms,
                               const std::optional<Eigen::MatrixXcd>& B_nodal,
                               double mu_target, double bisection_tol = 1e-8);

/// K with the Robin correction K - T^t * mass_boundary * B_nodal * T.
Eigen::MatrixXcd robin_stiffness(const FormMatrices& forms, const Eigen::MatrixXcd& B_nodal);

} // namespace dtnjordan
