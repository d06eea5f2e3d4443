#include "dtnjordan/coefficients.hpp"

#include <limits>

#include <Eigen/Eigenvalues>

#include "dtnjordan/errors.hpp"

namespace dtnjordan {

double verified_ellipticity_constant(const CoefficientSet& coeffs) {
    if (coeffs.c_principal.empty())
        throw EllipticityError("ellipticity check: empty coefficient set");
    double mu = std::numeric_limits<double>::infinity();
    for (const auto& c : coeffs.c_principal) {
        const Eigen::MatrixXcd herm = 0.5 * (c + c.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
        mu = std::min(mu, es.eigenvalues().minCoeff());
    }
    if (!(mu > 0.0))
        throw EllipticityError("ellipticity check: Hermitian part of the principal coefficient "
                               "is not uniformly positive definite (min eigenvalue = " +
                               std::to_string(mu) + ")");
    return mu;
}

namespace {

CoefficientSet constant_coefficients(const DiscreteDomain& domain, const Eigen::MatrixXcd& c,
                                     std::complex<double> c0) {
    const int d = domain.dimension;
    if (c.rows() != d || c.cols() != d)
        throw DimensionError("constant coefficients: principal matrix must be d x d");
    CoefficientSet coeffs;
    const int ne = domain.num_elements();
    coeffs.c_principal.assign(ne, c);
    coeffs.b_conv.assign(ne, Eigen::VectorXcd::Zero(d));
    coeffs.c_conv.assign(ne, Eigen::VectorXcd::Zero(d));
    coeffs.c_zero.assign(ne, c0);
    coeffs.mu = verified_ellipticity_constant(coeffs);
    return coeffs;
}

} // namespace

CoefficientSet laplacian_coefficients(const DiscreteDomain& domain) {
    return constant_coefficients(
        domain, Eigen::MatrixXcd::Identity(domain.dimension, domain.dimension), 0.0);
}

CoefficientSet schroedinger_coefficients(const DiscreteDomain& domain, std::complex<double> c0) {
    return constant_coefficients(
        domain, Eigen::MatrixXcd::Identity(domain.dimension, domain.dimension), c0);
}

CoefficientSet anisotropic_coefficients(const DiscreteDomain& domain, const Eigen::MatrixXcd& c) {
    return constant_coefficients(domain, c, 0.0);
}

} // namespace dtnjordan
