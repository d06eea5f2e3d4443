#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtnjordan/dtn.hpp"
#include "dtnjordan/realizations.hpp"

namespace dtnjordan {

struct ChainOptions {
    int max_len = 6;         // hard cap on chain length
    double tol_rank = -1.0;  // relative to sigma_max; <= 0: max(rows, cols) * eps
    double tol_chain = 1e-8; // relative residual acceptance per link/level
};

/// Jordan chain of a matrix pencil at lambda0: vectors f_0..f_k with
/// (K_B - lambda0 M) f_j = M f_{j-1}, f_{-1} = 0, f_0 != 0.
/// residuals[j] is the stored relative link residual.
struct JordanChain {
    std::complex<double> lambda0;
    std::vector<Eigen::VectorXcd> vectors;
    std::vector<double> residuals;
    std::string normalization = "unit-f0/min-norm-links";

    int length() const { return static_cast<int>(vectors.size()); }
};

/// Keldysh chain of a holomorphic operator function at lambda0: vectors
/// phi_0..phi_k with sum_{l<=j} (1/l!) M^(l)(lambda0) phi_{j-l} = 0 for every
/// j <= k and phi_0 != 0. residuals[j] is the stored relative level residual.
struct KeldyshChain {
    std::complex<double> lambda0;
    std::vector<Eigen::VectorXcd> vectors;
    std::vector<double> residuals;

    int length() const { return static_cast<int>(vectors.size()); }
};

/// Greedy per-eigendirection extraction: for each SVD-kernel basis vector of
/// K_B - lambda0 M, extend with minimal-norm least-squares links while the
/// relative residual stays below tol_chain. Returns an empty list when
/// lambda0 is not an eigenvalue at the rank tolerance.
std::vector<JordanChain> pencil_jordan_chains(const Eigen::MatrixXcd& K_B,
                                              const Eigen::MatrixXd& M,
                                              std::complex<double> lambda0,
                                              const ChainOptions& opts = {});

/// Greedy Keldysh extraction for M(lambda) = D(lambda) - B with the boundary
/// operator held in dual coordinates (lambda-independent, so only the l = 0
/// block carries -B). Requires derivs.order >= max_len - 1.
std::vector<KeldyshChain> keldysh_chains(const DtnDerivatives& derivs,
                                         const Eigen::MatrixXcd& B_dual,
                                         const ChainOptions& opts = {});

/// Convenience overload converting B to dual coordinates via the forms.
std::vector<KeldyshChain> keldysh_chains(const FormMatrices& forms, const DtnDerivatives& derivs,
                                         const BoundaryOperator& B,
                                         const ChainOptions& opts = {});

/// Greedy extension from a caller-supplied eigenvector candidate (normalized
/// internally). Level 0 must already satisfy the residual test; useful when
/// the kernel of M(lambda0) is larger than the set of extendable directions
/// and the caller knows which one extends.
KeldyshChain extend_keldysh_chain(const DtnDerivatives& derivs, const Eigen::MatrixXcd& B_dual,
                                  const Eigen::VectorXcd& seed, const ChainOptions& opts = {});

/// Boundary operator with a prescribed defective eigenvalue: B (dual) is
/// D(lambda0) + w v^H with w = D'(lambda0) phi0 and v a unit vector
/// orthogonal to phi0, so D(lambda) - B has a Keldysh chain of length >= 2 at
/// lambda0 seeded by phi0. Returns the nodal-coordinate operator with its
/// eta certificate. Requires n_boundary >= 2 and D'(lambda0) phi0 != 0.
BoundaryOperator make_defective_boundary_operator(const FormMatrices& forms,
                                                  const DirichletPencil& pencil,
                                                  std::complex<double> lambda0,
                                                  const Eigen::VectorXcd& phi0,
                                                  double tol_resolvent = kDefaultResolventTol);

} // namespace dtnjordan
