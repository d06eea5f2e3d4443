#include "dtnjordan/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "dtnjordan/errors.hpp"
#include "dtnjordan/linalg.hpp"
#include "dtnjordan/rng.hpp"

namespace dtnjordan {

namespace {

using Complex = std::complex<double>;

std::string classify_error(const std::exception& e) {
    if (dynamic_cast<const ResolventViolationError*>(&e))
        return "resolvent-violation";
    if (dynamic_cast<const ContourViolationError*>(&e))
        return "contour-violation";
    if (dynamic_cast<const NotInOperatorDomainError*>(&e))
        return "not-in-operator-domain";
    if (dynamic_cast<const EllipticityError*>(&e))
        return "ellipticity";
    if (dynamic_cast<const InfeasibleCoercivityError*>(&e))
        return "infeasible-coercivity";
    if (dynamic_cast<const DegenerateSeedError*>(&e))
        return "degenerate-seed";
    if (dynamic_cast<const OrderError*>(&e))
        return "order";
    if (dynamic_cast<const DimensionError*>(&e))
        return "dimension";
    if (dynamic_cast<const ConfigError*>(&e))
        return "config";
    return "error";
}

VerificationReport failed_report(const std::string& name, const std::exception& e) {
    VerificationReport report;
    report.name = name;
    report.passed = false;
    report.add_residual("completed", 1.0, 0.5);
    report.add_context("error", e.what());
    report.add_context("reason", classify_error(e));
    return report;
}

std::string format_double(double x) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

double effective_rank_tol(const ExperimentConfig& cfg) {
    // Eigensolver-derived lambda0 needs a rank tolerance above the backward
    // error of the dense eigensolve; the SVD default is tighter than that.
    return cfg.tolerances.rank > 0.0 ? cfg.tolerances.rank : 1e-10;
}

// Margin-checked sample points for identity spot checks, preferring lambda0.
std::vector<Complex> sample_resolvent_points(const Instance& inst, double tol_resolvent) {
    std::vector<Complex> picks;
    const Complex candidates[] = {inst.lambda0, Complex(-1.0, 0.3), Complex(-2.7, 0.0),
                                  Complex(-0.5, -0.8)};
    for (const Complex& c : candidates) {
        if (picks.size() >= 2)
            break;
        if (in_resolvent_set(inst.pencil, c, tol_resolvent).inside) {
            const bool dual_ok =
                in_resolvent_set(inst.pencil, std::conj(c), tol_resolvent).inside;
            if (dual_ok && std::none_of(picks.begin(), picks.end(), [&](Complex p) {
                    return std::abs(p - c) < 1e-12;
                }))
                picks.push_back(c);
        }
    }
    return picks;
}

VerificationReport check_exact_identities(const Instance& inst, const ExperimentConfig& cfg) {
    VerificationReport report;
    report.name = "exact_identities";
    const double tol = 1e-12;
    const auto& forms = inst.forms;

    report.add_residual("dual_form_identity",
                        (forms.K_dual - forms.K.adjoint()).norm() /
                            std::max(forms.k_norm, 1e-300),
                        tol);

    const std::vector<Complex> samples = sample_resolvent_points(inst, cfg.tolerances.resolvent);
    report.add_context("sample_points", std::to_string(samples.size()));
    SplitMix64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    int tag = 0;
    for (const Complex& lambda : samples) {
        const std::string suffix = "_s" + std::to_string(tag++);
        const Eigen::MatrixXcd D = dtn_eval(forms, inst.pencil, lambda);
        const Eigen::MatrixXcd Dt = adjoint_dtn_eval(forms, inst.pencil, std::conj(lambda));
        report.add_residual("dtn_duality" + suffix,
                            (Dt - D.adjoint()).norm() / std::max(D.norm(), 1e-300), tol);

        // Form representation of the nodal map: for f the homogeneous
        // solution with trace phi, K f - lambda M f pairs boundary test
        // functions against mass_boundary * (nodal map * phi).
        const Eigen::VectorXcd phi = rng.next_complex_vector(forms.n_boundary());
        const Eigen::MatrixXcd Dn = dtn_nodal(forms, inst.pencil, lambda);
        const Eigen::VectorXcd f = solve_homogeneous_bvp(forms, inst.pencil, lambda, phi);
        const Eigen::VectorXcd psi_dual = boundary_to_dual(Dn * phi, forms);
        Eigen::VectorXcd residual = forms.K * f - lambda * apply_real(forms.mass, f);
        for (int r = 0; r < forms.n_boundary(); ++r)
            residual(forms.boundary_nodes[r]) -= psi_dual(r);
        report.add_residual("nodal_form_representation" + suffix,
                            residual.norm() / std::max(forms.k_norm * f.norm(), 1e-300), tol);

        // Green's second identity on a homogeneous/adjoint pair.
        Eigen::VectorXcd e_first = Eigen::VectorXcd::Zero(forms.n_boundary());
        e_first(0) = 1.0;
        Eigen::VectorXcd e_last = Eigen::VectorXcd::Zero(forms.n_boundary());
        e_last(forms.n_boundary() - 1) = 1.0;
        const Eigen::VectorXcd g = solve_homogeneous_bvp(forms, inst.pencil, std::conj(lambda),
                                                         e_last, FormSide::dual);
        const Eigen::VectorXcd f1 = solve_homogeneous_bvp(forms, inst.pencil, lambda, e_first);
        const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(forms.n());
        const VerificationReport greens = greens_identity_check(
            forms, f1, zero, lambda, g, zero, std::conj(lambda), tol, cfg.tolerances.consistency);
        report.add_residual("greens_second_identity" + suffix,
                            greens.residual("greens_second_identity"), tol);
        if (tag == 1)
            for (const auto& [k, v] : greens.context)
                report.add_context(k, v);
    }
    report.finalize();
    return report;
}

VerificationReport check_resolvent_identity(const Instance& inst, const ExperimentConfig& cfg) {
    VerificationReport report;
    report.name = "resolvent_identity";
    const double tol = 1e-10;
    const auto& forms = inst.forms;

    // Two distinct margin-safe points; the homogeneous solutions relate by
    // g_b = (1 + (b - a) (A_D - b)^{-1}) g_a.
    std::vector<Complex> picks = sample_resolvent_points(inst, cfg.tolerances.resolvent);
    if (picks.size() < 2) {
        picks = {Complex(-1.0, 0.0), Complex(-2.5, 0.4)};
        for (const Complex& p : picks)
            if (!in_resolvent_set(inst.pencil, p, cfg.tolerances.resolvent).inside)
                throw ResolventViolationError(
                    "resolvent_identity: no margin-safe sample pair found");
    }
    const Complex a = picks[0];
    const Complex b = picks[1];
    report.add_context("lambda_a", format_double(a.real()) + "," + format_double(a.imag()));
    report.add_context("lambda_b", format_double(b.real()) + "," + format_double(b.imag()));

    SplitMix64 rng(cfg.seed ^ 0xA5A5A5A5DEADBEEFULL);
    const Eigen::VectorXcd phi = rng.next_complex_vector(forms.n_boundary());
    const Eigen::VectorXcd f_a = solve_homogeneous_bvp(forms, inst.pencil, a, phi);
    const Eigen::VectorXcd f_b = solve_homogeneous_bvp(forms, inst.pencil, b, phi);
    const Eigen::VectorXcd corrected =
        f_a + (b - a) * apply_dirichlet_resolvent(forms, inst.pencil, b, f_a);
    report.add_residual("resolvent_correction",
                        (f_b - corrected).norm() / std::max(f_b.norm(), 1e-300), tol);
    report.finalize();
    return report;
}

VerificationReport check_derivative_cross_validation(const Instance& inst,
                                                     const ExperimentConfig& cfg) {
    VerificationReport report;
    report.name = "derivative_cross_validation";
    const auto& forms = inst.forms;
    const int order = std::min(4, cfg.chain_order + 1);

    const DtnDerivatives taylor = dtn_derivatives_taylor(forms, inst.pencil, inst.lambda0, order,
                                                         kDefaultOrderCap,
                                                         cfg.tolerances.resolvent);
    const DtnDerivatives contour =
        dtn_derivatives_contour(forms, inst.pencil, inst.lambda0, order, cfg.contour.radius,
                                cfg.contour.nodes, cfg.tolerances.resolvent);
    for (int l = 0; l <= order; ++l) {
        report.add_residual("taylor_vs_contour_order_" + std::to_string(l),
                            (taylor.matrices[l] - contour.matrices[l]).norm() /
                                std::max(taylor.matrices[l].norm(), 1e-300),
                            1e-8);
    }

    const double delta = 1e-6;
    const Eigen::MatrixXcd D0 = dtn_eval(forms, inst.pencil, inst.lambda0);
    const Eigen::MatrixXcd D1 = dtn_eval(forms, inst.pencil, inst.lambda0 + delta);
    const Eigen::MatrixXcd fd = (D1 - D0) / delta;
    report.add_residual("finite_difference_order_1",
                        (fd - taylor.matrices[1]).norm() /
                            std::max(taylor.matrices[1].norm(), 1e-300),
                        1e-5);
    report.add_context("contour_nodes", std::to_string(cfg.contour.nodes));
    report.finalize();
    return report;
}

VerificationReport check_sectoriality(const Instance& inst, const ExperimentConfig& cfg) {
    VerificationReport report;
    report.name = "sectoriality";
    const auto& forms = inst.forms;
    const double mu_target = cfg.mu_target > 0.0 ? cfg.mu_target : 0.5 * forms.mu;
    const double nu = ellipticity_certificate(forms, inst.B.B_nodal, mu_target);

    // Independent re-check of the certificate by a Hermitian eigensolve.
    const Eigen::MatrixXcd K_B = robin_stiffness(forms, inst.B.B_nodal);
    const Eigen::MatrixXcd H = hermitian_part(K_B) + nu * forms.mass.cast<Complex>() -
                               mu_target * forms.h1_gram.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    const double scale = std::max(H.norm(), 1e-300);
    report.add_residual("certificate_psd_defect", std::max(0.0, -min_eig) / scale, 1e-10);
    report.add_context("nu", format_double(nu));
    report.add_context("mu_target", format_double(mu_target));
    report.add_context("eta", format_double(inst.B.eta));
    report.finalize();
    return report;
}

VerificationReport check_birman_schwinger(const Instance& inst, const ExperimentConfig& cfg) {
    VerificationReport report =
        birman_schwinger_check(inst.forms, inst.pencil, inst.B, inst.lambda0,
                               cfg.tolerances.theorem, effective_rank_tol(cfg),
                               cfg.tolerances.resolvent);
    return report;
}

struct ChainCheckSet {
    std::vector<VerificationReport> reports;
};

ChainCheckSet run_chain_checks(const Instance& inst, const ExperimentConfig& cfg) {
    ChainCheckSet out;
    const auto& forms = inst.forms;
    const int order = cfg.chain_order + 1;
    const DtnDerivatives derivs = dtn_derivatives_taylor(
        forms, inst.pencil, inst.lambda0, order, kDefaultOrderCap, cfg.tolerances.resolvent);
    const Eigen::MatrixXcd B_dual = boundary_operator_dual_matrix(forms, inst.B);

    ChainOptions copts;
    copts.max_len = cfg.chain_order + 1;
    copts.tol_rank = effective_rank_tol(cfg);
    copts.tol_chain = cfg.tolerances.chain;

    // Pick the Keldysh chain to verify: prefer the engineered seed of a
    // defective construction, otherwise the longest extracted chain.
    KeldyshChain kchain;
    if (inst.defective_seed.size() > 0) {
        kchain = extend_keldysh_chain(derivs, B_dual, inst.defective_seed, copts);
    } else {
        const std::vector<KeldyshChain> found = keldysh_chains(derivs, B_dual, copts);
        for (const auto& c : found)
            if (c.length() > kchain.length())
                kchain = c;
    }
    if (kchain.length() == 0)
        throw Error("chain checks: no Keldysh chain found at lambda0 "
                    "(lambda0 is not an eigenvalue of the Robin realization at this tolerance)");

    auto [jordan, backward] = keldysh_to_jordan_reconstruction(
        forms, inst.pencil, inst.B, kchain, cfg.tolerances.theorem, cfg.tolerances.resolvent);
    out.reports.push_back(backward);

    VerificationReport forward =
        jordan_to_keldysh_check(forms, inst.pencil, inst.B, jordan, derivs,
                                cfg.tolerances.theorem, cfg.tolerances.resolvent);
    out.reports.push_back(forward);

    // Round trip: the reconstruction prescribes traces, so the forward trace
    // data must reproduce the Keldysh vectors exactly.
    VerificationReport round_trip;
    round_trip.name = "round_trip";
    double worst = 0.0;
    for (int m = 0; m < kchain.length(); ++m)
        worst = std::max(worst,
                         (trace(jordan.vectors[m], forms) - kchain.vectors[m]).norm());
    round_trip.add_residual("trace_data_mismatch", worst, 0.0);
    round_trip.add_context("chain_length", std::to_string(kchain.length()));
    round_trip.finalize();
    out.reports.push_back(round_trip);

    out.reports.push_back(adjoint_pairing_check_basis(forms, inst.pencil, inst.B, jordan, derivs,
                                                      cfg.tolerances.theorem,
                                                      cfg.tolerances.resolvent));

    // Independent extraction route: chains pulled straight from the pencil.
    const std::vector<JordanChain> extracted =
        pencil_jordan_chains(inst.robin.K_B, forms.mass, inst.lambda0, copts);
    const JordanChain* longest = nullptr;
    for (const auto& c : extracted)
        if (!longest || c.length() > longest->length())
            longest = &c;
    if (longest) {
        VerificationReport ext =
            jordan_to_keldysh_check(forms, inst.pencil, inst.B, *longest, derivs,
                                    cfg.tolerances.theorem, cfg.tolerances.resolvent);
        ext.name = "jordan_to_keldysh_extracted";
        ext.add_context("extracted_chains", std::to_string(extracted.size()));
        out.reports.push_back(ext);
    }
    return out;
}

} // namespace

Instance build_instance(const ExperimentConfig& cfg) {
    Instance inst;
    inst.domain = build_domain(cfg.domain);
    inst.coeffs = build_coefficients(cfg.coefficients, inst.domain);
    inst.forms = assemble_forms(inst.domain, inst.coeffs);
    inst.pencil = dirichlet_pencil(inst.forms);
    inst.lambda0 = cfg.lambda0;

    const auto& bspec = cfg.boundary_operator;
    if (bspec.kind == "zero") {
        inst.B = zero_boundary_operator(inst.forms);
    } else if (bspec.kind == "explicit") {
        inst.B = bspec.coordinates == "dual"
                     ? make_boundary_operator_dual(inst.forms, bspec.matrix)
                     : make_boundary_operator_nodal(inst.forms, bspec.matrix);
    } else if (bspec.kind == "random") {
        SplitMix64 rng(cfg.seed);
        inst.B = make_boundary_operator_nodal(
            inst.forms,
            bspec.scale * rng.next_complex_matrix(inst.forms.n_boundary(),
                                                  inst.forms.n_boundary()));
    } else { // defective
        Eigen::VectorXcd seed = bspec.seed_phi;
        if (seed.size() == 0)
            seed = Eigen::VectorXcd::Ones(inst.forms.n_boundary());
        if (seed.size() != inst.forms.n_boundary())
            throw ConfigError("boundary_operator.seed_phi: length must match the boundary DOFs");
        inst.B = make_defective_boundary_operator(inst.forms, inst.pencil, cfg.lambda0, seed,
                                                  cfg.tolerances.resolvent);
        inst.defective_seed = seed.normalized();
    }
    inst.robin = robin_pencil(inst.forms, inst.B);

    if (cfg.lambda0_policy == "nearest_robin") {
        Eigen::Index best = 0;
        (inst.robin.spectrum - Eigen::VectorXcd::Constant(inst.robin.spectrum.size(),
                                                          cfg.lambda0))
            .cwiseAbs()
            .minCoeff(&best);
        inst.lambda0 = inst.robin.spectrum(best);
    }
    return inst;
}

const std::vector<std::string>& known_check_names() {
    static const std::vector<std::string> names = {
        "exact_identities",    "resolvent_identity", "derivative_cross_validation",
        "sectoriality",        "birman_schwinger",   "keldysh_to_jordan",
        "jordan_to_keldysh",   "round_trip",         "adjoint_pairing_basis",
        "jordan_to_keldysh_extracted"};
    return names;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::vector<std::string>& only) {
    const auto enabled = [&](const std::string& name) {
        if (!only.empty())
            return std::find(only.begin(), only.end(), name) != only.end();
        if (cfg.checks.empty())
            return true;
        return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
    };

    RunOutcome outcome;
    bool built = false;
    Instance inst;
    try {
        inst = build_instance(cfg);
        built = true;
    } catch (const std::exception& e) {
        outcome.reports.push_back(failed_report("preconditions", e));
    }

    if (built) {
        using CheckFn = std::function<VerificationReport()>;
        const std::vector<std::pair<std::string, CheckFn>> simple_checks = {
            {"exact_identities", [&] { return check_exact_identities(inst, cfg); }},
            {"resolvent_identity", [&] { return check_resolvent_identity(inst, cfg); }},
            {"derivative_cross_validation",
             [&] { return check_derivative_cross_validation(inst, cfg); }},
            {"sectoriality", [&] { return check_sectoriality(inst, cfg); }},
            {"birman_schwinger", [&] { return check_birman_schwinger(inst, cfg); }},
        };
        for (const auto& [name, fn] : simple_checks) {
            if (!enabled(name))
                continue;
            try {
                outcome.reports.push_back(fn());
            } catch (const std::exception& e) {
                outcome.reports.push_back(failed_report(name, e));
            }
        }

        const std::vector<std::string> chain_names = {"keldysh_to_jordan", "jordan_to_keldysh",
                                                      "round_trip", "adjoint_pairing_basis",
                                                      "jordan_to_keldysh_extracted"};
        const bool any_chain =
            std::any_of(chain_names.begin(), chain_names.end(), enabled);
        if (any_chain) {
            try {
                ChainCheckSet chain_set = run_chain_checks(inst, cfg);
                for (auto& r : chain_set.reports)
                    if (enabled(r.name))
                        outcome.reports.push_back(std::move(r));
            } catch (const std::exception& e) {
                for (const auto& name : chain_names)
                    if (enabled(name) && name != "jordan_to_keldysh_extracted")
                        outcome.reports.push_back(failed_report(name, e));
            }
        }
    }

    outcome.passed = !outcome.reports.empty();
    for (const auto& r : outcome.reports)
        outcome.passed = outcome.passed && r.passed;
    outcome.bundle = make_report_bundle(cfg.raw, outcome.reports);
    return outcome;
}

GridSpec parse_grid_spec(const std::string& text) {
    GridSpec grid;
    const auto bad = [&]() {
        throw ConfigError("grid spec must be re0:re1:count[:im], got \"" + text + "\"");
    };
    std::istringstream is(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(is, part, ':'))
        parts.push_back(part);
    if (parts.size() != 3 && parts.size() != 4)
        bad();
    try {
        grid.re0 = std::stod(parts[0]);
        grid.re1 = std::stod(parts[1]);
        grid.count = std::stoi(parts[2]);
        grid.im = parts.size() == 4 ? std::stod(parts[3]) : 0.0;
    } catch (const std::exception&) {
        bad();
    }
    if (grid.count < 0)
        bad();
    return grid;
}

std::string sweep_dtn_csv(const ExperimentConfig& cfg, const GridSpec& grid) {
    Instance inst = build_instance(cfg);
    const int nb = inst.forms.n_boundary();

    std::ostringstream os;
    os << "lambda_re,lambda_im,flagged,dist_to_dirichlet_spectrum";
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
            os << ",d_" << i << "_" << j << "_re,d_" << i << "_" << j << "_im";
    os << "\n";

    for (int k = 0; k < grid.count; ++k) {
        const double t = grid.count == 1 ? 0.0 : static_cast<double>(k) / (grid.count - 1);
        const Complex lambda(grid.re0 + t * (grid.re1 - grid.re0), grid.im);
        const double dist = inst.pencil.spectrum_distance(lambda);
        const bool inside =
            in_resolvent_set(inst.pencil, lambda, cfg.tolerances.resolvent).inside;
        os << format_double(lambda.real()) << "," << format_double(lambda.imag()) << ","
           << (inside ? 0 : 1) << "," << format_double(dist);
        if (inside) {
            const Eigen::MatrixXcd D =
                dtn_eval(inst.forms, inst.pencil, lambda, cfg.tolerances.resolvent);
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j)
                    os << "," << format_double(D(i, j).real()) << ","
                       << format_double(D(i, j).imag());
        } else {
            for (int i = 0; i < 2 * nb * nb; ++i)
                os << ",nan";
        }
        os << "\n";
    }
    return os.str();
}

std::string spectrum_csv(const ExperimentConfig& cfg) {
    Instance inst = build_instance(cfg);
    std::ostringstream os;
    os << "pencil,index,lambda_re,lambda_im\n";
    for (Eigen::Index i = 0; i < inst.pencil.spectrum.size(); ++i)
        os << "dirichlet," << i << "," << format_double(inst.pencil.spectrum(i).real()) << ","
           << format_double(inst.pencil.spectrum(i).imag()) << "\n";
    for (Eigen::Index i = 0; i < inst.robin.spectrum.size(); ++i)
        os << "robin," << i << "," << format_double(inst.robin.spectrum(i).real()) << ","
           << format_double(inst.robin.spectrum(i).imag()) << "\n";
    return os.str();
}

} // namespace dtnjordan
