#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dtnjordan/assembly.hpp"

namespace dtnjordan {

inline constexpr double kDefaultResolventTol = 1e-10;

/// Interior-block pencil (K_II, M_II) of the Dirichlet realization, with the
/// remaining blocks cached for boundary value solves, and its full spectrum.
/// spectrum_dual is the spectrum of the adjoint pencil (K_II^H, M_II).
struct DirichletPencil {
    Eigen::MatrixXcd K_II, K_IG, K_GI, K_GG;
    Eigen::MatrixXd M_II, M_IG, M_GI, M_GG;
    Eigen::VectorXcd spectrum;
    Eigen::VectorXcd spectrum_dual;
    double sigma_max_K_II = 0.0;
    std::vector<int> interior_nodes, boundary_nodes;

    int n_interior() const { return static_cast<int>(K_II.rows()); }
    int n_boundary() const { return static_cast<int>(K_GG.rows()); }

    /// Smallest distance from lambda to the computed Dirichlet spectrum.
    double spectrum_distance(std::complex<double> lambda) const;
};

DirichletPencil dirichlet_pencil(const FormMatrices& forms);

struct ResolventMargin {
    bool inside = false;  // true iff lambda is accepted as a resolvent point
    double sigma_min = 0; // smallest singular value of K_II - lambda M_II
    double threshold = 0; // tol_resolvent * sigma_max(K_II)
};

/// Margin test for lambda in the resolvent set of the Dirichlet realization:
/// sigma_min(K_II - lambda M_II) must exceed tol_resolvent * ||K_II||_2.
ResolventMargin in_resolvent_set(const DirichletPencil& pencil, std::complex<double> lambda,
                                 double tol_resolvent = kDefaultResolventTol);

/// Unique solve of (A - lambda) f = 0 with prescribed boundary trace phi.
/// side = dual solves the adjoint equation with K_dual at lambda as passed.
/// Throws ResolventViolationError when lambda fails the margin test.
Eigen::VectorXcd solve_homogeneous_bvp(const FormMatrices& forms, const DirichletPencil& pencil,
                                       std::complex<double> lambda, const Eigen::VectorXcd& phi,
                                       FormSide side = FormSide::primal,
                                       double tol_resolvent = kDefaultResolventTol);

/// Unique solve of (A - lambda) f = h with prescribed boundary trace phi.
Eigen::VectorXcd solve_inhomogeneous_bvp(const FormMatrices& forms, const DirichletPencil& pencil,
                                         std::complex<double> lambda, const Eigen::VectorXcd& phi,
                                         const Eigen::VectorXcd& h,
                                         FormSide side = FormSide::primal,
                                         double tol_resolvent = kDefaultResolventTol);

/// (A_D - lambda)^{-1} h: interior Dirichlet solve of the weak equation with
/// zero trace, extended by zero to the boundary.
Eigen::VectorXcd apply_dirichlet_resolvent(const FormMatrices& forms,
                                           const DirichletPencil& pencil,
                                           std::complex<double> lambda, const Eigen::VectorXcd& h,
                                           FormSide side = FormSide::primal,
                                           double tol_resolvent = kDefaultResolventTol);

/// Boundary operator B in nodal (L2 boundary) coordinates together with its
/// semiboundedness certificate: eta is the largest eigenvalue of the
/// Hermitian part of mass_boundary * B_nodal against mass_boundary, so
/// Re(phi^H mass_boundary B_nodal phi) <= eta * phi^H mass_boundary phi.
struct BoundaryOperator {
    Eigen::MatrixXcd B_nodal;
    double eta = 0.0;
};

BoundaryOperator make_boundary_operator_nodal(const FormMatrices& forms,
                                              const Eigen::MatrixXcd& B_nodal);

/// Accepts B given in dual coordinates and converts (B_nodal = M_Gamma^{-1} B_dual).
BoundaryOperator make_boundary_operator_dual(const FormMatrices& forms,
                                             const Eigen::MatrixXcd& B_dual);

BoundaryOperator zero_boundary_operator(const FormMatrices& forms);

/// Dual-coordinate representation M_Gamma * B_nodal.
Eigen::MatrixXcd boundary_operator_dual_matrix(const FormMatrices& forms,
                                               const BoundaryOperator& B);

/// Pencil (K_B, M) of the Robin realization, K_B = K - T^t M_Gamma B_nodal T.
struct RobinPencil {
    Eigen::MatrixXcd K_B;
    Eigen::VectorXcd spectrum;
};

RobinPencil robin_pencil(const FormMatrices& forms, const BoundaryOperator& B);

/// Domain membership test of the Robin realization: f (with interpreted
/// action lambda f + h) belongs iff its co-normal derivative equals B Tr f.
/// Returns the relative mismatch in nodal coordinates.
double robin_membership_residual(const Eigen::VectorXcd& f, const Eigen::VectorXcd& h,
                                 std::complex<double> lambda, const FormMatrices& forms,
                                 const BoundaryOperator& B,
                                 double tol_consistency = kDefaultConsistencyTol);

} // namespace dtnjordan
