#pragma once

#include <complex>

#include <Eigen/Dense>

namespace dtnjordan {

/// y = A x for real A and complex x (two real products, no complex copy of A).
Eigen::VectorXcd apply_real(const Eigen::MatrixXd& A, const Eigen::VectorXcd& x);
Eigen::MatrixXcd apply_real(const Eigen::MatrixXd& A, const Eigen::MatrixXcd& X);

/// Solve A y = x for real symmetric positive-definite A and complex x.
Eigen::VectorXcd solve_spd_real(const Eigen::MatrixXd& A, const Eigen::VectorXcd& x);
Eigen::MatrixXcd solve_spd_real(const Eigen::MatrixXd& A, const Eigen::MatrixXcd& X);

inline Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& M) {
    return 0.5 * (M + M.adjoint());
}

/// Extreme singular values (dense SVD, values only).
double sigma_min(const Eigen::MatrixXcd& A);
double sigma_max(const Eigen::MatrixXcd& A);

/// SVD-based numerical rank, kernel basis and minimal-norm least squares.
/// tol_rank_rel is relative to the largest singular value; <= 0 selects the
/// default max(rows, cols) * eps.
class RankRevealingSvd {
public:
    explicit RankRevealingSvd(const Eigen::MatrixXcd& A, double tol_rank_rel = -1.0);

    int rank() const { return rank_; }
    double tolerance() const { return tol_; }
    double largest_singular_value() const;

    /// Orthonormal basis of the numerical kernel (may have zero columns).
    Eigen::MatrixXcd kernel() const;

    /// Minimal-norm least-squares solution of A x = b.
    Eigen::VectorXcd min_norm_solve(const Eigen::VectorXcd& b) const;

private:
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_;
    double tol_ = 0.0;
    int rank_ = 0;
};

/// All eigenvalues of the pencil (A, M) with M real symmetric positive
/// definite, via Cholesky reduction to a dense complex standard problem.
/// Sorted by real part, then imaginary part, for reproducibility.
Eigen::VectorXcd generalized_spectrum(const Eigen::MatrixXcd& A, const Eigen::MatrixXd& M);

/// Largest eigenvalue of the Hermitian pencil (H, M), H Hermitian, M SPD.
double generalized_hermitian_max_eigenvalue(const Eigen::MatrixXcd& H, const Eigen::MatrixXd& M);

/// Smallest eigenvalue of the Hermitian pencil (H, M).
double generalized_hermitian_min_eigenvalue(const Eigen::MatrixXcd& H, const Eigen::MatrixXd& M);

} // namespace dtnjordan
