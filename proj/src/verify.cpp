#include "dtnjordan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dtnjordan/errors.hpp"
#include "dtnjordan/linalg.hpp"

namespace dtnjordan {

namespace {

using Complex = std::complex<double>;

std::string complex_to_string(Complex z) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << z.real() << ", " << z.imag() << ")";
    return os.str();
}

void require_margin_report(VerificationReport& report, const DirichletPencil& pencil,
                           Complex lambda0, double tol_resolvent) {
    const ResolventMargin m = in_resolvent_set(pencil, lambda0, tol_resolvent);
    report.add_context("lambda0", complex_to_string(lambda0));
    report.add_context("resolvent_sigma_min", std::to_string(m.sigma_min));
    report.add_context("resolvent_threshold", std::to_string(m.threshold));
    if (!m.inside)
        throw ResolventViolationError(report.name +
                                      ": lambda0 violates the resolvent margin (sigma_min = " +
                                      std::to_string(m.sigma_min) + ")");
}

// Pairing value <x, phi> of a dual-coordinate functional x against a nodal
// boundary vector phi (the extension of the boundary L2 inner product).
Complex pairing(const Eigen::VectorXcd& x, const Eigen::VectorXcd& phi) {
    return phi.dot(x); // phi^H x
}

} // namespace

void VerificationReport::add_residual(const std::string& key, double value, double tol) {
    residuals.emplace_back(key, value);
    tolerances.emplace_back(key, tol);
}

void VerificationReport::add_context(const std::string& key, const std::string& value) {
    context.emplace_back(key, value);
}

double VerificationReport::residual(const std::string& key) const {
    for (const auto& [k, v] : residuals)
        if (k == key)
            return v;
    throw Error("VerificationReport: no residual named " + key);
}

void VerificationReport::finalize() {
    passed = true;
    for (std::size_t i = 0; i < residuals.size(); ++i)
        if (!(residuals[i].second <= tolerances[i].second))
            passed = false;
}

VerificationReport jordan_to_keldysh_check(const FormMatrices& forms,
                                           const DirichletPencil& pencil,
                                           const BoundaryOperator& B, const JordanChain& chain,
                                           const DtnDerivatives& derivs, double tol_theorem,
                                           double tol_resolvent) {
    VerificationReport report;
    report.name = "jordan_to_keldysh";
    if (chain.length() == 0)
        throw DimensionError(report.name + ": empty chain");
    require_margin_report(report, pencil, chain.lambda0, tol_resolvent);
    const int k = chain.length() - 1;
    if (derivs.order < k)
        throw OrderError(report.name + ": derivative order insufficient for chain length");
    report.add_context("chain_length", std::to_string(chain.length()));

    const Eigen::MatrixXcd B_dual = boundary_operator_dual_matrix(forms, B);
    std::vector<Eigen::VectorXcd> phis;
    double max_f = 0.0;
    double max_phi = 0.0;
    for (const auto& f : chain.vectors) {
        phis.push_back(trace(f, forms));
        max_f = std::max(max_f, f.norm());
        max_phi = std::max(max_phi, phis.back().norm());
    }

    // phi_0 = Tr f_0 must not vanish when lambda0 is a resolvent point of the
    // Dirichlet realization; an interior-supported eigenvector would make f_0
    // a Dirichlet eigenvector at lambda0.
    const double phi0_ratio = max_f > 0.0 ? phis[0].norm() / chain.vectors[0].norm() : 0.0;
    report.add_residual("phi0_nonzero_margin", phi0_ratio > tol_theorem ? 0.0 : 1.0, 0.5);
    report.add_context("phi0_trace_ratio", std::to_string(phi0_ratio));

    const double scale =
        (derivs.matrices[0].norm() + B_dual.norm()) * std::max(max_phi, 1e-300);
    for (int j = 0; j <= k; ++j) {
        Eigen::VectorXcd level = derivs.matrices[0] * phis[j] - B_dual * phis[j];
        double factorial = 1.0;
        for (int l = 1; l <= j; ++l) {
            factorial *= l;
            level += (1.0 / factorial) * (derivs.matrices[l] * phis[j - l]);
        }
        report.add_residual("keldysh_level_" + std::to_string(j),
                            level.norm() / std::max(scale, 1e-300), tol_theorem);
    }
    report.finalize();
    return report;
}

std::pair<JordanChain, VerificationReport> keldysh_to_jordan_reconstruction(
    const FormMatrices& forms, const DirichletPencil& pencil, const BoundaryOperator& B,
    const KeldyshChain& kchain, double tol_theorem, double tol_resolvent) {
    VerificationReport report;
    report.name = "keldysh_to_jordan";
    if (kchain.length() == 0)
        throw DimensionError(report.name + ": empty chain");
    require_margin_report(report, pencil, kchain.lambda0, tol_resolvent);
    report.add_context("chain_length", std::to_string(kchain.length()));

    const Complex lambda0 = kchain.lambda0;
    JordanChain chain;
    chain.lambda0 = lambda0;
    chain.normalization = "bvp-reconstruction";

    const Eigen::MatrixXcd K_B = robin_stiffness(forms, B.B_nodal);
    const double mat_scale =
        (K_B - lambda0 * forms.mass.cast<Complex>()).norm() + forms.mass_norm;

    Eigen::VectorXcd previous = Eigen::VectorXcd::Zero(forms.n());
    for (int m = 0; m < kchain.length(); ++m) {
        const Eigen::VectorXcd f =
            m == 0 ? solve_homogeneous_bvp(forms, pencil, lambda0, kchain.vectors[0],
                                           FormSide::primal, tol_resolvent)
                   : solve_inhomogeneous_bvp(forms, pencil, lambda0, kchain.vectors[m], previous,
                                             FormSide::primal, tol_resolvent);

        // Robin domain membership: co-normal derivative equals B applied to
        // the trace, in nodal coordinates.
        report.add_residual("membership_level_" + std::to_string(m),
                            robin_membership_residual(f, previous, lambda0, forms, B),
                            tol_theorem);

        // Pencil link (K_B - lambda0 M) f_m = M f_{m-1}.
        const Eigen::VectorXcd link = K_B * f - lambda0 * apply_real(forms.mass, f) -
                                      apply_real(forms.mass, previous);
        const double link_scale =
            mat_scale * std::max(f.norm() + previous.norm(), 1e-300);
        const double link_residual = link.norm() / link_scale;
        report.add_residual("pencil_link_" + std::to_string(m), link_residual, tol_theorem);

        chain.vectors.push_back(f);
        chain.residuals.push_back(link_residual);
        previous = f;
    }
    report.finalize();
    return {std::move(chain), std::move(report)};
}

VerificationReport birman_schwinger_check(const FormMatrices& forms,
                                          const DirichletPencil& pencil,
                                          const BoundaryOperator& B, Complex lambda0,
                                          double tol_theorem, double tol_rank,
                                          double tol_resolvent) {
    VerificationReport report;
    report.name = "birman_schwinger";
    require_margin_report(report, pencil, lambda0, tol_resolvent);

    const Eigen::MatrixXcd K_B = robin_stiffness(forms, B.B_nodal);
    const Eigen::MatrixXcd A = K_B - lambda0 * forms.mass.cast<Complex>();
    const RankRevealingSvd pencil_svd(A, tol_rank);
    const Eigen::MatrixXcd pencil_kernel = pencil_svd.kernel();
    const int dim_pencil = static_cast<int>(pencil_kernel.cols());

    const Eigen::MatrixXcd D0 = dtn_eval(forms, pencil, lambda0, tol_resolvent);
    const Eigen::MatrixXcd M0 = D0 - boundary_operator_dual_matrix(forms, B);
    const RankRevealingSvd boundary_svd(M0, tol_rank);
    const Eigen::MatrixXcd boundary_kernel = boundary_svd.kernel();
    const int dim_boundary = static_cast<int>(boundary_kernel.cols());

    report.add_context("dim_ker_pencil", std::to_string(dim_pencil));
    report.add_context("dim_ker_boundary", std::to_string(dim_boundary));
    report.add_residual("kernel_dimension_mismatch",
                        static_cast<double>(std::abs(dim_pencil - dim_boundary)), 0.5);

    if (dim_pencil > 0 && dim_pencil == dim_boundary) {
        // Traces of the pencil kernel basis must be independent and span the
        // boundary kernel.
        Eigen::MatrixXcd traces(forms.n_boundary(), dim_pencil);
        for (int c = 0; c < dim_pencil; ++c)
            traces.col(c) = trace(pencil_kernel.col(c), forms);
        const RankRevealingSvd trace_svd(traces);
        report.add_residual("trace_rank_deficiency",
                            static_cast<double>(dim_pencil - trace_svd.rank()), 0.5);
        // Span containment: project the traces onto the boundary kernel.
        const Eigen::MatrixXcd projected =
            boundary_kernel * (boundary_kernel.adjoint() * traces);
        report.add_residual("bijection", (traces - projected).norm() /
                                             std::max(traces.norm(), 1e-300),
                            tol_theorem);
    }
    report.finalize();
    return report;
}

VerificationReport adjoint_pairing_check(const FormMatrices& forms,
                                         const DirichletPencil& pencil,
                                         const BoundaryOperator& B, const JordanChain& chain,
                                         const DtnDerivatives& derivs,
                                         const Eigen::VectorXcd& phi, double tol_theorem,
                                         double tol_resolvent) {
    VerificationReport report;
    report.name = "adjoint_pairing";
    if (chain.length() == 0)
        throw DimensionError(report.name + ": empty chain");
    require_margin_report(report, pencil, chain.lambda0, tol_resolvent);
    const int k = chain.length() - 1;
    if (derivs.order < k + 1)
        throw OrderError(report.name + ": needs derivatives up to order k + 1");

    const Complex lambda0 = chain.lambda0;
    const Eigen::MatrixXcd B_dual = boundary_operator_dual_matrix(forms, B);

    // Adjoint homogeneous solution with trace phi at conj(lambda0).
    const Eigen::VectorXcd g = solve_homogeneous_bvp(forms, pencil, std::conj(lambda0), phi,
                                                     FormSide::dual, tol_resolvent);

    std::vector<Eigen::VectorXcd> phis;
    for (const auto& f : chain.vectors)
        phis.push_back(trace(f, forms));

    // (a, g)_mass = g^H M a: linear in a, antilinear in g.
    const auto mass_inner = [&](const Eigen::VectorXcd& a) {
        return g.dot(apply_real(forms.mass, a));
    };

    for (int j = 0; j <= k; ++j) {
        // (f_{j-1}, g) = <(D - B) phi_j, phi>, with f_{-1} = 0.
        const Complex lhs = j == 0 ? Complex(0.0) : mass_inner(chain.vectors[j - 1]);
        const Complex rhs = pairing(derivs.matrices[0] * phis[j] - B_dual * phis[j], phi);
        const double scale = std::abs(lhs) + std::abs(rhs) +
                             derivs.matrices[0].norm() * phis[j].norm() * phi.norm();
        report.add_residual("pairing_level_" + std::to_string(j),
                            std::abs(lhs - rhs) / std::max(scale, 1e-300), tol_theorem);
    }

    for (int j = 1; j <= k + 1; ++j) {
        // (f_{j-1}, g) = -sum_{l=1}^{j} (1/l!) <D^(l) phi_{j-l}, phi>.
        const Complex lhs = mass_inner(chain.vectors[j - 1]);
        Complex rhs = 0.0;
        double scale = std::abs(lhs);
        double factorial = 1.0;
        for (int l = 1; l <= j; ++l) {
            factorial *= l;
            const Complex term = pairing(derivs.matrices[l] * phis[j - l], phi) / factorial;
            rhs -= term;
            scale += std::abs(term);
        }
        report.add_residual("taylor_level_" + std::to_string(j),
                            std::abs(lhs - rhs) / std::max(scale, 1e-300), tol_theorem);
    }
    report.finalize();
    return report;
}

VerificationReport adjoint_pairing_check_basis(const FormMatrices& forms,
                                               const DirichletPencil& pencil,
                                               const BoundaryOperator& B,
                                               const JordanChain& chain,
                                               const DtnDerivatives& derivs, double tol_theorem,
                                               double tol_resolvent) {
    VerificationReport aggregate;
    aggregate.name = "adjoint_pairing_basis";
    for (int r = 0; r < forms.n_boundary(); ++r) {
        Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(forms.n_boundary());
        phi(r) = 1.0;
        const VerificationReport one =
            adjoint_pairing_check(forms, pencil, B, chain, derivs, phi, tol_theorem,
                                  tol_resolvent);
        if (r == 0)
            aggregate.context = one.context;
        for (std::size_t i = 0; i < one.residuals.size(); ++i) {
            const std::string key = one.residuals[i].first + "_phi" + std::to_string(r);
            aggregate.add_residual(key, one.residuals[i].second, one.tolerances[i].second);
        }
    }
    aggregate.add_context("test_basis", "full boundary nodal basis");
    aggregate.finalize();
    return aggregate;
}

VerificationReport greens_identity_check(const FormMatrices& forms, const Eigen::VectorXcd& f,
                                         const Eigen::VectorXcd& h_f, Complex lambda_f,
                                         const Eigen::VectorXcd& g, const Eigen::VectorXcd& h_g,
                                         Complex lambda_g, double tol, double tol_consistency) {
    VerificationReport report;
    report.name = "greens_identity";

    const ConormalVector gamma_f =
        conormal(f, h_f, lambda_f, forms, FormSide::primal, tol_consistency);
    const ConormalVector gamma_g =
        conormal(g, h_g, lambda_g, forms, FormSide::dual, tol_consistency);

    const Eigen::VectorXcd action_f = lambda_f * f + h_f; // A f
    const Eigen::VectorXcd action_g = lambda_g * g + h_g; // A~ g
    const Complex left =
        g.dot(apply_real(forms.mass, action_f)) - action_g.dot(apply_real(forms.mass, f));

    const Eigen::VectorXcd trace_f = trace(f, forms);
    const Eigen::VectorXcd trace_g = trace(g, forms);
    // <Tr f, gamma~ g> - <gamma f, Tr g> with <.,.> linear in the first slot.
    const Complex right = gamma_g.values.dot(trace_f) - trace_g.dot(gamma_f.values);

    const double scale = std::abs(left) + std::abs(right) +
                         forms.k_norm * f.norm() * g.norm();
    report.add_residual("greens_second_identity", std::abs(left - right) / std::max(scale, 1e-300),
                        tol);
    report.add_context("observed_conormal_bound",
                       std::to_string(gamma_f.values.norm() /
                                      std::max(f.norm() + action_f.norm(), 1e-300)));
    report.finalize();
    return report;
}

} // namespace dtnjordan
