#include "dtnjordan/keldysh.hpp"

#include <cmath>
#include <string>

#include "dtnjordan/errors.hpp"
#include "dtnjordan/linalg.hpp"

namespace dtnjordan {

namespace {

using Complex = std::complex<double>;

} // namespace

std::vector<JordanChain> pencil_jordan_chains(const Eigen::MatrixXcd& K_B,
                                              const Eigen::MatrixXd& M, Complex lambda0,
                                              const ChainOptions& opts) {
    if (K_B.rows() != K_B.cols() || M.rows() != M.cols() || K_B.rows() != M.rows())
        throw DimensionError("pencil_jordan_chains: square matrices of equal size required");
    if (opts.max_len < 1)
        throw OrderError("pencil_jordan_chains: max_len must be >= 1");

    const Eigen::MatrixXcd A = K_B - lambda0 * M.cast<Complex>();
    const RankRevealingSvd svd(A, opts.tol_rank);
    const Eigen::MatrixXcd kernel = svd.kernel();

    const double mat_scale = A.norm() + M.norm();
    std::vector<JordanChain> chains;
    for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
        JordanChain chain;
        chain.lambda0 = lambda0;
        Eigen::VectorXcd f = kernel.col(k); // unit norm from the SVD
        chain.vectors.push_back(f);
        chain.residuals.push_back((A * f).norm() / std::max(mat_scale, 1e-300));
        while (chain.length() < opts.max_len) {
            const Eigen::VectorXcd rhs = apply_real(M, chain.vectors.back());
            const Eigen::VectorXcd next = svd.min_norm_solve(rhs);
            const double scale =
                mat_scale * (next.norm() + chain.vectors.back().norm());
            const double residual = (A * next - rhs).norm() / std::max(scale, 1e-300);
            if (residual > opts.tol_chain)
                break;
            chain.vectors.push_back(next);
            chain.residuals.push_back(residual);
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

namespace {

void check_keldysh_inputs(const DtnDerivatives& derivs, const Eigen::MatrixXcd& B_dual,
                          const ChainOptions& opts) {
    if (opts.max_len < 1)
        throw OrderError("keldysh_chains: max_len must be >= 1");
    if (derivs.order < opts.max_len - 1)
        throw OrderError("keldysh_chains: derivative order " + std::to_string(derivs.order) +
                         " is insufficient for max_len " + std::to_string(opts.max_len));
    if (derivs.matrices.empty() || derivs.matrices[0].rows() != B_dual.rows() ||
        derivs.matrices[0].cols() != B_dual.cols())
        throw DimensionError("keldysh_chains: dimension mismatch between derivatives and B");
}

double weighted_derivative_norms(const DtnDerivatives& derivs, const Eigen::MatrixXcd& M0) {
    double sum = M0.norm();
    double factorial = 1.0;
    for (int l = 1; l <= derivs.order; ++l) {
        factorial *= l;
        sum += derivs.matrices[l].norm() / factorial;
    }
    return sum;
}

// Per-level extension from a unit seed; svd factors M0. Appends vectors while
// the relative level residual stays within tol_chain.
KeldyshChain extend_from(const DtnDerivatives& derivs, const Eigen::MatrixXcd& M0,
                         const RankRevealingSvd& svd, double weighted_norms,
                         const Eigen::VectorXcd& seed, const ChainOptions& opts) {
    KeldyshChain chain;
    chain.lambda0 = derivs.lambda0;
    chain.vectors.push_back(seed);
    double max_norm = std::max(1.0, seed.norm());
    chain.residuals.push_back((M0 * seed).norm() / std::max(weighted_norms * max_norm, 1e-300));
    while (chain.length() < opts.max_len) {
        const int j = chain.length();
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(M0.rows());
        double lf = 1.0;
        for (int l = 1; l <= j; ++l) {
            lf *= l;
            rhs -= (1.0 / lf) * (derivs.matrices[l] * chain.vectors[j - l]);
        }
        const Eigen::VectorXcd next = svd.min_norm_solve(rhs);
        max_norm = std::max(max_norm, next.norm());
        const double residual =
            (M0 * next - rhs).norm() / std::max(weighted_norms * max_norm, 1e-300);
        if (residual > opts.tol_chain)
            break;
        chain.vectors.push_back(next);
        chain.residuals.push_back(residual);
    }
    return chain;
}

} // namespace

std::vector<KeldyshChain> keldysh_chains(const DtnDerivatives& derivs,
                                         const Eigen::MatrixXcd& B_dual,
                                         const ChainOptions& opts) {
    check_keldysh_inputs(derivs, B_dual, opts);

    // M_0 = D(lambda0) - B; M_l = D^(l)(lambda0) for l >= 1.
    const Eigen::MatrixXcd M0 = derivs.matrices[0] - B_dual;
    const RankRevealingSvd svd(M0, opts.tol_rank);
    const Eigen::MatrixXcd kernel = svd.kernel();
    const double weighted_norms = weighted_derivative_norms(derivs, M0);

    std::vector<KeldyshChain> chains;
    for (Eigen::Index k = 0; k < kernel.cols(); ++k)
        chains.push_back(extend_from(derivs, M0, svd, weighted_norms, kernel.col(k), opts));
    return chains;
}

KeldyshChain extend_keldysh_chain(const DtnDerivatives& derivs, const Eigen::MatrixXcd& B_dual,
                                  const Eigen::VectorXcd& seed, const ChainOptions& opts) {
    check_keldysh_inputs(derivs, B_dual, opts);
    if (seed.size() != B_dual.rows())
        throw DimensionError("extend_keldysh_chain: seed length mismatch");
    if (seed.norm() < 1e-14)
        throw DegenerateSeedError("extend_keldysh_chain: zero seed vector");
    const Eigen::MatrixXcd M0 = derivs.matrices[0] - B_dual;
    const RankRevealingSvd svd(M0, opts.tol_rank);
    return extend_from(derivs, M0, svd, weighted_derivative_norms(derivs, M0),
                       seed.normalized(), opts);
}

std::vector<KeldyshChain> keldysh_chains(const FormMatrices& forms, const DtnDerivatives& derivs,
                                         const BoundaryOperator& B, const ChainOptions& opts) {
    return keldysh_chains(derivs, boundary_operator_dual_matrix(forms, B), opts);
}

BoundaryOperator make_defective_boundary_operator(const FormMatrices& forms,
                                                  const DirichletPencil& pencil, Complex lambda0,
                                                  const Eigen::VectorXcd& phi0,
                                                  double tol_resolvent) {
    const int nb = forms.n_boundary();
    if (nb < 2)
        throw ConstructionError(
            "make_defective_boundary_operator: needs at least two boundary DOFs");
    if (phi0.size() != nb)
        throw DimensionError("make_defective_boundary_operator: seed length mismatch");
    if (phi0.norm() < 1e-14)
        throw DegenerateSeedError("make_defective_boundary_operator: zero seed vector");

    const DtnDerivatives derivs =
        dtn_derivatives_taylor(forms, pencil, lambda0, 1, kDefaultOrderCap, tol_resolvent);
    const Eigen::VectorXcd w = derivs.matrices[1] * phi0;
    if (w.norm() < 1e-14 * derivs.matrices[1].norm() * phi0.norm())
        throw DegenerateSeedError(
            "make_defective_boundary_operator: D'(lambda0) annihilates the seed");

    // Deterministic unit v with v^H phi0 = 0: orthogonalize the coordinate
    // direction of the smallest seed component against phi0.
    int m = 0;
    for (int i = 1; i < nb; ++i)
        if (std::abs(phi0(i)) < std::abs(phi0(m)))
            m = i;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(nb);
    v(m) = 1.0;
    v -= (phi0.dot(v) / phi0.squaredNorm()) * phi0;
    if (v.norm() < 1e-14)
        throw ConstructionError("make_defective_boundary_operator: could not build a direction "
                                "orthogonal to the seed");
    v.normalize();

    const Eigen::MatrixXcd B_dual = derivs.matrices[0] + w * v.adjoint();
    return make_boundary_operator_dual(forms, B_dual);
}

} // namespace dtnjordan
