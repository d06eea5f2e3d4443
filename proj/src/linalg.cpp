#include "dtnjordan/linalg.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dtnjordan/errors.hpp"

namespace dtnjordan {

Eigen::VectorXcd apply_real(const Eigen::MatrixXd& A, const Eigen::VectorXcd& x) {
    Eigen::VectorXcd y(A.rows());
    y.real() = A * x.real();
    y.imag() = A * x.imag();
    return y;
}

Eigen::MatrixXcd apply_real(const Eigen::MatrixXd& A, const Eigen::MatrixXcd& X) {
    Eigen::MatrixXcd Y(A.rows(), X.cols());
    Y.real() = A * X.real();
    Y.imag() = A * X.imag();
    return Y;
}

Eigen::VectorXcd solve_spd_real(const Eigen::MatrixXd& A, const Eigen::VectorXcd& x) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    Eigen::VectorXcd y(A.rows());
    y.real() = llt.solve(x.real().eval());
    y.imag() = llt.solve(x.imag().eval());
    return y;
}

Eigen::MatrixXcd solve_spd_real(const Eigen::MatrixXd& A, const Eigen::MatrixXcd& X) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    Eigen::MatrixXcd Y(A.rows(), X.cols());
    Y.real() = llt.solve(X.real().eval());
    Y.imag() = llt.solve(X.imag().eval());
    return Y;
}

double sigma_min(const Eigen::MatrixXcd& A) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues().size() > 0 ? svd.singularValues().minCoeff() : 0.0;
}

double sigma_max(const Eigen::MatrixXcd& A) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues().size() > 0 ? svd.singularValues().maxCoeff() : 0.0;
}

RankRevealingSvd::RankRevealingSvd(const Eigen::MatrixXcd& A, double tol_rank_rel)
    : svd_(A, Eigen::ComputeFullU | Eigen::ComputeFullV) {
    const auto& s = svd_.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    tol_ = (tol_rank_rel > 0.0 ? tol_rank_rel
                               : static_cast<double>(std::max(A.rows(), A.cols())) *
                                     std::numeric_limits<double>::epsilon()) *
           smax;
    rank_ = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol_)
            ++rank_;
}

double RankRevealingSvd::largest_singular_value() const {
    const auto& s = svd_.singularValues();
    return s.size() > 0 ? s(0) : 0.0;
}

Eigen::MatrixXcd RankRevealingSvd::kernel() const {
    const Eigen::Index n = svd_.matrixV().rows();
    return svd_.matrixV().rightCols(n - rank_);
}

Eigen::VectorXcd RankRevealingSvd::min_norm_solve(const Eigen::VectorXcd& b) const {
    const auto& s = svd_.singularValues();
    Eigen::VectorXcd c = svd_.matrixU().adjoint() * b;
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(svd_.matrixV().rows());
    for (int i = 0; i < rank_; ++i)
        y(i) = c(i) / s(i);
    return svd_.matrixV() * y;
}

namespace {

Eigen::MatrixXcd cholesky_reduce(const Eigen::MatrixXcd& A, const Eigen::MatrixXd& M) {
    if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows())
        throw DimensionError("generalized spectrum: square matrices of equal size required");
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw Error("generalized spectrum: mass matrix is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    // B = L^{-1} A L^{-T}
    Eigen::MatrixXcd B(A.rows(), A.cols());
    B.real() = L.triangularView<Eigen::Lower>().solve(A.real().eval());
    B.imag() = L.triangularView<Eigen::Lower>().solve(A.imag().eval());
    Eigen::MatrixXcd Bt = B.transpose();
    Eigen::MatrixXcd C(A.rows(), A.cols());
    C.real() = L.triangularView<Eigen::Lower>().solve(Bt.real().eval());
    C.imag() = L.triangularView<Eigen::Lower>().solve(Bt.imag().eval());
    return C.transpose();
}

} // namespace

Eigen::VectorXcd generalized_spectrum(const Eigen::MatrixXcd& A, const Eigen::MatrixXd& M) {
    const Eigen::MatrixXcd C = cholesky_reduce(A, M);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw Error("generalized spectrum: eigensolver did not converge");
    Eigen::VectorXcd ev = es.eigenvalues();
    std::vector<std::complex<double>> sorted(ev.data(), ev.data() + ev.size());
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) {
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return Eigen::Map<Eigen::VectorXcd>(sorted.data(), static_cast<Eigen::Index>(sorted.size()));
}

double generalized_hermitian_max_eigenvalue(const Eigen::MatrixXcd& H, const Eigen::MatrixXd& M) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        H, M.cast<std::complex<double>>(), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    return es.eigenvalues().maxCoeff();
}

double generalized_hermitian_min_eigenvalue(const Eigen::MatrixXcd& H, const Eigen::MatrixXd& M) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        H, M.cast<std::complex<double>>(), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    return es.eigenvalues().minCoeff();
}

} // namespace dtnjordan
