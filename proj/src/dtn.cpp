#include "dtnjordan/dtn.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "dtnjordan/errors.hpp"
#include "dtnjordan/linalg.hpp"

namespace dtnjordan {

namespace {

using Complex = std::complex<double>;

void require_margin(const DirichletPencil& pencil, Complex lambda, double tol_resolvent,
                    const char* who) {
    const ResolventMargin m = in_resolvent_set(pencil, lambda, tol_resolvent);
    if (!m.inside)
        throw ResolventViolationError(std::string(who) + ": lambda = (" +
                                      std::to_string(lambda.real()) + ", " +
                                      std::to_string(lambda.imag()) +
                                      ") violates the resolvent margin");
}

Eigen::MatrixXcd schur_complement(const Eigen::MatrixXcd& A_II, const Eigen::MatrixXcd& A_IG,
                                  const Eigen::MatrixXcd& A_GI, const Eigen::MatrixXcd& A_GG) {
    return A_GG - A_GI * A_II.partialPivLu().solve(A_IG);
}

// Fast smallest-singular-value estimate from an existing factorization:
// power iteration on A^{-H} A^{-1} with a fixed deterministic start. The
// estimate approaches sigma_min from above; the contour quadrature uses it
// with an enormous slack (nodes sit at half the spectral distance), while the
// public margin test keeps its exact SVD.
double sigma_min_estimate(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu, Eigen::Index n) {
    Eigen::VectorXcd v(n);
    std::uint64_t state = 0x243F6A8885A308D3ULL;
    for (Eigen::Index i = 0; i < n; ++i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        const double re = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        const double im = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
        v(i) = Complex(re, im);
    }
    v.normalize();
    double inv_norm_sq = 0.0;
    for (int it = 0; it < 8; ++it) {
        const Eigen::VectorXcd w = lu.solve(v);
        inv_norm_sq = w.squaredNorm();
        v = lu.adjoint().solve(w);
        const double norm = v.norm();
        if (!(norm > 0.0))
            break;
        v /= norm;
    }
    return inv_norm_sq > 0.0 ? 1.0 / std::sqrt(inv_norm_sq) : 0.0;
}

} // namespace

Eigen::MatrixXcd dtn_eval(const FormMatrices& forms, const DirichletPencil& pencil,
                          Complex lambda, double tol_resolvent) {
    (void)forms;
    require_margin(pencil, lambda, tol_resolvent, "dtn_eval");
    const Eigen::MatrixXcd A_II = pencil.K_II - lambda * pencil.M_II.cast<Complex>();
    const Eigen::MatrixXcd A_IG = pencil.K_IG - lambda * pencil.M_IG.cast<Complex>();
    const Eigen::MatrixXcd A_GI = pencil.K_GI - lambda * pencil.M_GI.cast<Complex>();
    const Eigen::MatrixXcd A_GG = pencil.K_GG - lambda * pencil.M_GG.cast<Complex>();
    return schur_complement(A_II, A_IG, A_GI, A_GG);
}

Eigen::MatrixXcd adjoint_dtn_eval(const FormMatrices& forms, const DirichletPencil& pencil,
                                  Complex lambda, double tol_resolvent) {
    (void)forms;
    require_margin(pencil, std::conj(lambda), tol_resolvent, "adjoint_dtn_eval");
    const Eigen::MatrixXcd A_II = pencil.K_II.adjoint() - lambda * pencil.M_II.cast<Complex>();
    const Eigen::MatrixXcd A_IG = pencil.K_GI.adjoint() - lambda * pencil.M_IG.cast<Complex>();
    const Eigen::MatrixXcd A_GI = pencil.K_IG.adjoint() - lambda * pencil.M_GI.cast<Complex>();
    const Eigen::MatrixXcd A_GG = pencil.K_GG.adjoint() - lambda * pencil.M_GG.cast<Complex>();
    return schur_complement(A_II, A_IG, A_GI, A_GG);
}

Eigen::MatrixXcd dtn_nodal(const FormMatrices& forms, const DirichletPencil& pencil,
                           Complex lambda, double tol_resolvent) {
    return solve_spd_real(forms.mass_boundary, dtn_eval(forms, pencil, lambda, tol_resolvent));
}

DtnDerivatives dtn_derivatives_taylor(const FormMatrices& forms, const DirichletPencil& pencil,
                                      Complex lambda0, int order, int order_cap,
                                      double tol_resolvent) {
    (void)forms;
    if (order < 0)
        throw OrderError("dtn_derivatives_taylor: order must be >= 0");
    if (order > order_cap)
        throw OrderError("dtn_derivatives_taylor: order " + std::to_string(order) +
                         " exceeds the cap " + std::to_string(order_cap) +
                         " (use the contour method beyond the cap)");
    require_margin(pencil, lambda0, tol_resolvent, "dtn_derivatives_taylor");

    const Eigen::MatrixXcd A_II = pencil.K_II - lambda0 * pencil.M_II.cast<Complex>();
    const Eigen::MatrixXcd A_IG = pencil.K_IG - lambda0 * pencil.M_IG.cast<Complex>();
    const Eigen::MatrixXcd A_GI = pencil.K_GI - lambda0 * pencil.M_GI.cast<Complex>();
    const Eigen::MatrixXcd A_GG = pencil.K_GG - lambda0 * pencil.M_GG.cast<Complex>();
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A_II); // one factorization, reused

    // Taylor blocks of the interior resolvent applied to the two right-hand
    // block columns: P_l = R_l A_IG and Q_l = R_l (-M_IG), R_l = (R0 M_II)^l R0.
    const int nb = pencil.n_boundary();
    std::vector<Eigen::MatrixXcd> P(order + 1), Q(order + 1);
    P[0] = lu.solve(A_IG);
    Q[0] = lu.solve((-pencil.M_IG).cast<Complex>().eval());
    for (int l = 1; l <= order; ++l) {
        P[l] = lu.solve(apply_real(pencil.M_II, P[l - 1]));
        Q[l] = lu.solve(apply_real(pencil.M_II, Q[l - 1]));
    }

    DtnDerivatives out;
    out.lambda0 = lambda0;
    out.order = order;
    out.method = DerivativeMethod::taylor;
    out.matrices.resize(order + 1);

    // Schur factors are affine in lambda: E0 = A_GI, E1 = -M_GI, G0 = A_GG,
    // G1 = -M_GG. Taylor coefficient l of S is assembled from the Cauchy
    // product E_a R_b F_c with a + b + c = l, a, c in {0, 1}.
    const Eigen::MatrixXcd E0 = A_GI;
    const Eigen::MatrixXcd E1 = -pencil.M_GI.cast<Complex>();
    double factorial = 1.0;
    for (int l = 0; l <= order; ++l) {
        Eigen::MatrixXcd S_l = Eigen::MatrixXcd::Zero(nb, nb);
        if (l == 0)
            S_l = A_GG - E0 * P[0];
        else {
            if (l == 1)
                S_l = -pencil.M_GG.cast<Complex>();
            S_l -= E0 * P[l];
            S_l -= E1 * P[l - 1];
            S_l -= E0 * Q[l - 1];
            if (l >= 2)
                S_l -= E1 * Q[l - 2];
        }
        if (l > 0)
            factorial *= l;
        out.matrices[l] = factorial * S_l; // l-th derivative = l! * Taylor coefficient
    }
    return out;
}

DtnDerivatives dtn_derivatives_contour(const FormMatrices& forms, const DirichletPencil& pencil,
                                       Complex lambda0, int order, double radius, int nodes,
                                       double tol_resolvent) {
    (void)forms;
    if (order < 0)
        throw OrderError("dtn_derivatives_contour: order must be >= 0");
    if (nodes < 2)
        throw OrderError("dtn_derivatives_contour: need at least 2 quadrature nodes");
    require_margin(pencil, lambda0, tol_resolvent, "dtn_derivatives_contour");

    const double dist = pencil.spectrum_distance(lambda0);
    if (radius <= 0.0)
        radius = 0.5 * dist;
    if (!(radius > 0.0) || radius >= dist)
        throw ContourViolationError(
            "dtn_derivatives_contour: integration disk of radius " + std::to_string(radius) +
            " touches the Dirichlet spectrum (distance " + std::to_string(dist) + ")");

    const int nb = pencil.n_boundary();
    std::vector<Eigen::MatrixXcd> coeff(order + 1, Eigen::MatrixXcd::Zero(nb, nb));
    for (int j = 0; j < nodes; ++j) {
        const double theta = 2.0 * M_PI * j / nodes;
        const Complex rot(std::cos(theta), std::sin(theta));
        const Complex lambda = lambda0 + radius * rot;
        const Eigen::MatrixXcd A_II = pencil.K_II - lambda * pencil.M_II.cast<Complex>();
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A_II);
        if (sigma_min_estimate(lu, A_II.rows()) <= tol_resolvent * pencil.sigma_max_K_II)
            throw ContourViolationError(
                "dtn_derivatives_contour: quadrature node violates the resolvent margin");
        const Eigen::MatrixXcd A_IG = pencil.K_IG - lambda * pencil.M_IG.cast<Complex>();
        const Eigen::MatrixXcd A_GI = pencil.K_GI - lambda * pencil.M_GI.cast<Complex>();
        const Eigen::MatrixXcd A_GG = pencil.K_GG - lambda * pencil.M_GG.cast<Complex>();
        const Eigen::MatrixXcd D = A_GG - A_GI * lu.solve(A_IG);
        Complex phase = 1.0; // rot^{-l}
        for (int l = 0; l <= order; ++l) {
            coeff[l] += D * phase;
            phase /= rot;
        }
    }

    DtnDerivatives out;
    out.lambda0 = lambda0;
    out.order = order;
    out.method = DerivativeMethod::contour;
    out.matrices.resize(order + 1);
    double factorial = 1.0;
    double radius_pow = 1.0;
    for (int l = 0; l <= order; ++l) {
        if (l > 0) {
            factorial *= l;
            radius_pow *= radius;
        }
        out.matrices[l] = (factorial / (nodes * radius_pow)) * coeff[l];
    }
    return out;
}

} // namespace dtnjordan
