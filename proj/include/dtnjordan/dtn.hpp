#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dtnjordan/realizations.hpp"

namespace dtnjordan {

/// Dirichlet-to-Neumann matrix at lambda in dual boundary coordinates:
/// the Schur complement of the interior block,
///   S(lambda) = (K-lM)_GG - (K-lM)_GI (K-lM)_II^{-1} (K-lM)_IG.
/// Column j equals the co-normal derivative of the homogeneous solution with
/// trace e_j. Throws ResolventViolationError outside the margin.
Eigen::MatrixXcd dtn_eval(const FormMatrices& forms, const DirichletPencil& pencil,
                          std::complex<double> lambda,
                          double tol_resolvent = kDefaultResolventTol);

/// Same Schur complement for the dual form (K_dual - lambda M). Requires
/// conj(lambda) to pass the (primal) resolvent margin. Satisfies
/// adjoint_dtn_eval(conj(lambda)) == dtn_eval(lambda)^H.
Eigen::MatrixXcd adjoint_dtn_eval(const FormMatrices& forms, const DirichletPencil& pencil,
                                  std::complex<double> lambda,
                                  double tol_resolvent = kDefaultResolventTol);

/// Nodal-coordinate (L2 boundary) part: mass_boundary^{-1} * dtn_eval.
Eigen::MatrixXcd dtn_nodal(const FormMatrices& forms, const DirichletPencil& pencil,
                           std::complex<double> lambda,
                           double tol_resolvent = kDefaultResolventTol);

enum class DerivativeMethod { taylor, contour };

/// D(lambda0) and its derivatives D^(l)(lambda0), l = 0..order, as boundary
/// matrices in dual coordinates. matrices[l] is the l-th derivative itself
/// (not divided by l!).
struct DtnDerivatives {
    std::complex<double> lambda0;
    int order = 0;
    std::vector<Eigen::MatrixXcd> matrices;
    DerivativeMethod method = DerivativeMethod::taylor;
};

inline constexpr int kDefaultOrderCap = 8;

/// Exact rational-function differentiation of the Schur complement: with
/// R0 = (K-l0 M)_II^{-1}, the interior resolvent Taylor blocks are
/// R_l = (R0 M_II)^l R0 and the derivative blocks follow by Cauchy products
/// of the degree-one Schur factors. One interior factorization, no finite
/// differences. order must not exceed order_cap.
DtnDerivatives dtn_derivatives_taylor(const FormMatrices& forms, const DirichletPencil& pencil,
                                      std::complex<double> lambda0, int order,
                                      int order_cap = kDefaultOrderCap,
                                      double tol_resolvent = kDefaultResolventTol);

/// Cauchy-integral derivatives: D^(l)(l0) = (l!/2 pi i) * contour integral of
/// D(lambda)/(lambda-l0)^{l+1} over the circle of the given radius, trapezoid
/// rule with the given node count. radius <= 0 selects half the distance to
/// the computed Dirichlet spectrum. The closed disk must stay clear of the
/// spectrum, and every quadrature node must pass the resolvent margin.
DtnDerivatives dtn_derivatives_contour(const FormMatrices& forms, const DirichletPencil& pencil,
                                       std::complex<double> lambda0, int order,
                                       double radius = 0.0, int nodes = 64,
                                       double tol_resolvent = kDefaultResolventTol);

} // namespace dtnjordan
