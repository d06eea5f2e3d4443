#include "dtnjordan/realizations.hpp"

#include <limits>
#include <string>

#include <Eigen/LU>

#include "dtnjordan/errors.hpp"
#include "dtnjordan/linalg.hpp"

namespace dtnjordan {

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXcd select(const Eigen::MatrixXcd& A, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
    Eigen::MatrixXcd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = A(rows[i], cols[j]);
    return out;
}

Eigen::MatrixXd select(const Eigen::MatrixXd& A, const std::vector<int>& rows,
                       const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = A(rows[i], cols[j]);
    return out;
}

void require_resolvent(const DirichletPencil& pencil, Complex lambda, double tol_resolvent,
                       const char* who) {
    const ResolventMargin m = in_resolvent_set(pencil, lambda, tol_resolvent);
    if (!m.inside)
        throw ResolventViolationError(std::string(who) + ": lambda = (" +
                                      std::to_string(lambda.real()) + ", " +
                                      std::to_string(lambda.imag()) +
                                      ") violates the resolvent margin (sigma_min = " +
                                      std::to_string(m.sigma_min) + ", threshold = " +
                                      std::to_string(m.threshold) + ")");
}

// Interior blocks of (K - lambda M) for the requested side. The dual pencil
// blocks are the adjoints of the primal ones.
struct SideBlocks {
    Eigen::MatrixXcd A_II, A_IG, A_GI, A_GG;
};

SideBlocks side_blocks(const DirichletPencil& p, Complex lambda, FormSide side) {
    SideBlocks b;
    if (side == FormSide::primal) {
        b.A_II = p.K_II - lambda * p.M_II.cast<Complex>();
        b.A_IG = p.K_IG - lambda * p.M_IG.cast<Complex>();
        b.A_GI = p.K_GI - lambda * p.M_GI.cast<Complex>();
        b.A_GG = p.K_GG - lambda * p.M_GG.cast<Complex>();
    } else {
        b.A_II = p.K_II.adjoint() - lambda * p.M_II.cast<Complex>();
        b.A_IG = p.K_GI.adjoint() - lambda * p.M_IG.cast<Complex>();
        b.A_GI = p.K_IG.adjoint() - lambda * p.M_GI.cast<Complex>();
        b.A_GG = p.K_GG.adjoint() - lambda * p.M_GG.cast<Complex>();
    }
    return b;
}

// For the dual side the margin test must use the adjoint interior block,
// whose singular values equal those of K_II - conj(lambda) M_II.
Complex margin_lambda(Complex lambda, FormSide side) {
    return side == FormSide::primal ? lambda : std::conj(lambda);
}

Eigen::VectorXcd scatter(const Eigen::VectorXcd& interior, const Eigen::VectorXcd& boundary,
                         const std::vector<int>& interior_nodes,
                         const std::vector<int>& boundary_nodes) {
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(interior.size() + boundary.size());
    for (std::size_t i = 0; i < interior_nodes.size(); ++i)
        f(interior_nodes[i]) = interior(static_cast<Eigen::Index>(i));
    for (std::size_t r = 0; r < boundary_nodes.size(); ++r)
        f(boundary_nodes[r]) = boundary(static_cast<Eigen::Index>(r));
    return f;
}

} // namespace

double DirichletPencil::spectrum_distance(Complex lambda) const {
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < spectrum.size(); ++i)
        dist = std::min(dist, std::abs(spectrum(i) - lambda));
    return dist;
}

DirichletPencil dirichlet_pencil(const FormMatrices& forms) {
    DirichletPencil p;
    p.interior_nodes = forms.interior_nodes;
    p.boundary_nodes = forms.boundary_nodes;
    p.K_II = select(forms.K, p.interior_nodes, p.interior_nodes);
    p.K_IG = select(forms.K, p.interior_nodes, p.boundary_nodes);
    p.K_GI = select(forms.K, p.boundary_nodes, p.interior_nodes);
    p.K_GG = select(forms.K, p.boundary_nodes, p.boundary_nodes);
    p.M_II = select(forms.mass, p.interior_nodes, p.interior_nodes);
    p.M_IG = select(forms.mass, p.interior_nodes, p.boundary_nodes);
    p.M_GI = select(forms.mass, p.boundary_nodes, p.interior_nodes);
    p.M_GG = select(forms.mass, p.boundary_nodes, p.boundary_nodes);
    p.spectrum = generalized_spectrum(p.K_II, p.M_II);
    p.spectrum_dual = generalized_spectrum(p.K_II.adjoint(), p.M_II);
    p.sigma_max_K_II = sigma_max(p.K_II);
    return p;
}

ResolventMargin in_resolvent_set(const DirichletPencil& pencil, Complex lambda,
                                 double tol_resolvent) {
    ResolventMargin m;
    const Eigen::MatrixXcd A = pencil.K_II - lambda * pencil.M_II.cast<Complex>();
    m.sigma_min = sigma_min(A);
    m.threshold = tol_resolvent * pencil.sigma_max_K_II;
    m.inside = m.sigma_min > m.threshold;
    return m;
}

Eigen::VectorXcd solve_homogeneous_bvp(const FormMatrices& forms, const DirichletPencil& pencil,
                                       Complex lambda, const Eigen::VectorXcd& phi, FormSide side,
                                       double tol_resolvent) {
    if (phi.size() != forms.n_boundary() || pencil.n_boundary() != forms.n_boundary())
        throw DimensionError("solve_homogeneous_bvp: trace length mismatch");
    require_resolvent(pencil, margin_lambda(lambda, side), tol_resolvent,
                      "solve_homogeneous_bvp");
    const SideBlocks b = side_blocks(pencil, lambda, side);
    const Eigen::VectorXcd f_I = b.A_II.partialPivLu().solve((-(b.A_IG * phi)).eval());
    return scatter(f_I, phi, pencil.interior_nodes, pencil.boundary_nodes);
}

Eigen::VectorXcd solve_inhomogeneous_bvp(const FormMatrices& forms, const DirichletPencil& pencil,
                                         Complex lambda, const Eigen::VectorXcd& phi,
                                         const Eigen::VectorXcd& h, FormSide side,
                                         double tol_resolvent) {
    if (phi.size() != pencil.n_boundary())
        throw DimensionError("solve_inhomogeneous_bvp: trace length mismatch");
    if (h.size() != forms.n())
        throw DimensionError("solve_inhomogeneous_bvp: load vector length mismatch");
    require_resolvent(pencil, margin_lambda(lambda, side), tol_resolvent,
                      "solve_inhomogeneous_bvp");
    const SideBlocks b = side_blocks(pencil, lambda, side);
    const Eigen::VectorXcd mh = apply_real(forms.mass, h);
    Eigen::VectorXcd rhs(pencil.n_interior());
    for (int i = 0; i < pencil.n_interior(); ++i)
        rhs(i) = mh(pencil.interior_nodes[i]);
    rhs -= b.A_IG * phi;
    const Eigen::VectorXcd f_I = b.A_II.partialPivLu().solve(rhs);
    return scatter(f_I, phi, pencil.interior_nodes, pencil.boundary_nodes);
}

Eigen::VectorXcd apply_dirichlet_resolvent(const FormMatrices& forms,
                                           const DirichletPencil& pencil, Complex lambda,
                                           const Eigen::VectorXcd& h, FormSide side,
                                           double tol_resolvent) {
    return solve_inhomogeneous_bvp(forms, pencil, lambda,
                                   Eigen::VectorXcd::Zero(pencil.n_boundary()), h, side,
                                   tol_resolvent);
}

BoundaryOperator make_boundary_operator_nodal(const FormMatrices& forms,
                                              const Eigen::MatrixXcd& B_nodal) {
    const int nb = forms.n_boundary();
    if (B_nodal.rows() != nb || B_nodal.cols() != nb)
        throw DimensionError("boundary operator: dimension mismatch with the boundary DOFs");
    BoundaryOperator B;
    B.B_nodal = B_nodal;
    const Eigen::MatrixXcd weighted = apply_real(forms.mass_boundary, B_nodal);
    B.eta = generalized_hermitian_max_eigenvalue(hermitian_part(weighted), forms.mass_boundary);
    return B;
}

BoundaryOperator make_boundary_operator_dual(const FormMatrices& forms,
                                             const Eigen::MatrixXcd& B_dual) {
    const int nb = forms.n_boundary();
    if (B_dual.rows() != nb || B_dual.cols() != nb)
        throw DimensionError("boundary operator: dimension mismatch with the boundary DOFs");
    return make_boundary_operator_nodal(forms, solve_spd_real(forms.mass_boundary, B_dual));
}

BoundaryOperator zero_boundary_operator(const FormMatrices& forms) {
    return make_boundary_operator_nodal(
        forms, Eigen::MatrixXcd::Zero(forms.n_boundary(), forms.n_boundary()));
}

Eigen::MatrixXcd boundary_operator_dual_matrix(const FormMatrices& forms,
                                               const BoundaryOperator& B) {
    return apply_real(forms.mass_boundary, B.B_nodal);
}

RobinPencil robin_pencil(const FormMatrices& forms, const BoundaryOperator& B) {
    RobinPencil p;
    p.K_B = robin_stiffness(forms, B.B_nodal);
    p.spectrum = generalized_spectrum(p.K_B, forms.mass);
    return p;
}

double robin_membership_residual(const Eigen::VectorXcd& f, const Eigen::VectorXcd& h,
                                 Complex lambda, const FormMatrices& forms,
                                 const BoundaryOperator& B, double tol_consistency) {
    const ConormalVector gamma = conormal(f, h, lambda, forms, FormSide::primal, tol_consistency);
    const Eigen::VectorXcd gamma_nodal = conormal_to_nodal(gamma, forms);
    const Eigen::VectorXcd btf = B.B_nodal * trace(f, forms);
    // Backward-error scale of the data producing the two sides, so that a
    // zero-equals-zero comparison (Neumann eigenvectors) is not penalized.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(forms.mass_boundary,
                                                      Eigen::EigenvaluesOnly);
    const double gram_inv = 1.0 / es.eigenvalues().minCoeff();
    const double scale =
        gram_inv * ((forms.k_norm + std::abs(lambda) * forms.mass_norm) * f.norm() +
                    forms.mass_norm * h.norm()) +
        B.B_nodal.norm() * trace(f, forms).norm();
    return (gamma_nodal - btf).norm() / std::max(scale, 1e-300);
}

} // namespace dtnjordan
