#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dtnjordan/dtn.hpp"
#include "dtnjordan/keldysh.hpp"
#include "dtnjordan/realizations.hpp"

namespace dtnjordan {

inline constexpr double kDefaultTheoremTol = 1e-8;

/// Result of one named check: passed iff every residual is within its
/// tolerance. Context carries lambda0, chain lengths, margins and similar
/// metadata as strings.
struct VerificationReport {
    std::string name;
    bool passed = false;
    std::vector<std::pair<std::string, double>> residuals;
    std::vector<std::pair<std::string, double>> tolerances;
    std::vector<std::pair<std::string, std::string>> context;

    void add_residual(const std::string& key, double value, double tol);
    void add_context(const std::string& key, const std::string& value);
    double residual(const std::string& key) const;
    void finalize(); // recompute passed from residuals vs tolerances
};

/// Forward direction: the traces of a Jordan chain of the Robin pencil form a
/// Keldysh chain of D(lambda) - B. Checks phi_0 != 0 and, for every level
/// j <= k, the residual of
///   sum_{l=0}^{j} (1/l!) D^(l)(lambda0) phi_{j-l} = B phi_j.
VerificationReport jordan_to_keldysh_check(const FormMatrices& forms,
                                           const DirichletPencil& pencil,
                                           const BoundaryOperator& B, const JordanChain& chain,
                                           const DtnDerivatives& derivs,
                                           double tol_theorem = kDefaultTheoremTol,
                                           double tol_resolvent = kDefaultResolventTol);

/// Backward direction: reconstruct f_0 by the homogeneous solve and f_m by
/// inhomogeneous solves with load f_{m-1}, then check the Robin domain
/// membership (co-normal = B trace, nodal coordinates) and the pencil links.
/// Returns the reconstructed Jordan chain with its report.
std::pair<JordanChain, VerificationReport> keldysh_to_jordan_reconstruction(
    const FormMatrices& forms, const DirichletPencil& pencil, const BoundaryOperator& B,
    const KeldyshChain& kchain, double tol_theorem = kDefaultTheoremTol,
    double tol_resolvent = kDefaultResolventTol);

/// Kernel-dimension and trace-bijection check: dim ker(K_B - lambda0 M) must
/// equal dim ker(D(lambda0) - B), with the traces of a pencil-kernel basis
/// independent and spanning the boundary kernel. tol_rank <= 0 picks the
/// SVD default; pass an explicit relative tolerance when lambda0 itself came
/// out of a dense eigensolve.
VerificationReport birman_schwinger_check(const FormMatrices& forms,
                                          const DirichletPencil& pencil,
                                          const BoundaryOperator& B,
                                          std::complex<double> lambda0,
                                          double tol_theorem = kDefaultTheoremTol,
                                          double tol_rank = -1.0,
                                          double tol_resolvent = kDefaultResolventTol);

/// Pairing identities of a Jordan chain against the adjoint homogeneous
/// solution g with trace phi at conj(lambda0):
///   level j = 0..k:   (f_{j-1}, g)   = <(D(lambda0) - B) phi_j, phi>
///   level j = 1..k+1: (f_{j-1}, g)   = -sum_{l=1}^{j} (1/l!) <D^(l) phi_{j-l}, phi>
/// with f_{-1} = 0 (so j = 0 is the eigenvector-level identity).
VerificationReport adjoint_pairing_check(const FormMatrices& forms,
                                         const DirichletPencil& pencil,
                                         const BoundaryOperator& B, const JordanChain& chain,
                                         const DtnDerivatives& derivs,
                                         const Eigen::VectorXcd& phi,
                                         double tol_theorem = kDefaultTheoremTol,
                                         double tol_resolvent = kDefaultResolventTol);

/// adjoint_pairing_check aggregated over the full boundary nodal basis.
VerificationReport adjoint_pairing_check_basis(const FormMatrices& forms,
                                               const DirichletPencil& pencil,
                                               const BoundaryOperator& B,
                                               const JordanChain& chain,
                                               const DtnDerivatives& derivs,
                                               double tol_theorem = kDefaultTheoremTol,
                                               double tol_resolvent = kDefaultResolventTol);

/// Green's second identity for consistent data (A f = lambda_f f + h_f,
/// dual action of g likewise):
///   (A f, g) - (f, A~ g) = <Tr f, conormal~ g> - <conormal f, Tr g>.
/// Exact linear algebra; the tolerance is for rounding only.
VerificationReport greens_identity_check(const FormMatrices& forms, const Eigen::VectorXcd& f,
                                         const Eigen::VectorXcd& h_f,
                                         std::complex<double> lambda_f,
                                         const Eigen::VectorXcd& g, const Eigen::VectorXcd& h_g,
                                         std::complex<double> lambda_g, double tol = 1e-12,
                                         double tol_consistency = kDefaultConsistencyTol);

} // namespace dtnjordan
