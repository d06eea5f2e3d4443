#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dtnjordan/mesh.hpp"

namespace dtnjordan {

/// Piecewise-constant complex coefficients of the divergence-form expression
///   A f = -sum_kl d_k (c_kl d_l f) + sum_k c_k d_k f - sum_k d_k (b_k f) + c0 f,
/// one entry per element. mu is the verified ellipticity constant of the
/// principal part: Re(xi^H C_e xi) >= mu |xi|^2 on every element.
struct CoefficientSet {
    std::vector<Eigen::MatrixXcd> c_principal; // d x d per element
    std::vector<Eigen::VectorXcd> b_conv;      // d per element
    std::vector<Eigen::VectorXcd> c_conv;      // d per element
    std::vector<std::complex<double>> c_zero;  // scalar per element
    double mu = 0.0;
};

/// min over elements of lambda_min(Hermitian part of c_principal).
/// Throws EllipticityError if the result is not strictly positive.
double verified_ellipticity_constant(const CoefficientSet& coeffs);

/// c = I, b = c = c0 = 0.
CoefficientSet laplacian_coefficients(const DiscreteDomain& domain);

/// c = I, b = c = 0, constant (complex) zero-order coefficient.
CoefficientSet schroedinger_coefficients(const DiscreteDomain& domain, std::complex<double> c0);

/// Constant (complex) principal matrix, b = c = c0 = 0.
CoefficientSet anisotropic_coefficients(const DiscreteDomain& domain, const Eigen::MatrixXcd& c);

} // namespace dtnjordan
