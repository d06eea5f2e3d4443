#include <cmath>
#include <complex>
#include <thread>
#include <vector>

#include "doctest.h"

#include "dtnjordan/assembly.hpp"
#include "dtnjordan/dtn.hpp"
#include "dtnjordan/errors.hpp"
#include "dtnjordan/realizations.hpp"
#include "dtnjordan/rng.hpp"

#include "oracles.hpp"

using namespace dtnjordan;
using Complex = std::complex<double>;

namespace {

struct Setup {
    DiscreteDomain domain;
    FormMatrices forms;
    DirichletPencil pencil;
};

Setup make_1d(int n, Complex c0 = 0.0) {
    Setup s;
    s.domain = build_interval_mesh(n, 1.0);
    s.forms = assemble_forms(s.domain, schroedinger_coefficients(s.domain, c0));
    s.pencil = dirichlet_pencil(s.forms);
    return s;
}

} // namespace

TEST_CASE("D(0) of the 1D Laplacian is exact at every resolution") {
    for (const int n : {2, 17, 100}) {
        const Setup s = make_1d(n);
        const Eigen::MatrixXcd D = dtn_eval(s.forms, s.pencil, 0.0);
        CHECK((D - oracles::dtn_1d_closed_form(0.0)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("D(-1) converges to the closed form at order >= 1") {
    const Eigen::Matrix2cd exact = oracles::dtn_1d_closed_form(-1.0);
    CHECK(std::abs(exact(0, 0) - std::cosh(1.0) / std::sinh(1.0)) <= 1e-14);
    double prev = 0.0;
    for (const int n : {25, 50, 100}) {
        const Setup s = make_1d(n);
        const double err =
            (dtn_eval(s.forms, s.pencil, -1.0) - exact).cwiseAbs().maxCoeff();
        if (prev > 0.0)
            CHECK(std::log2(prev / err) >= 1.0);
        prev = err;
    }
}

TEST_CASE("evaluation at a Dirichlet eigenvalue is refused") {
    const Setup s = make_1d(20);
    CHECK_THROWS_AS(dtn_eval(s.forms, s.pencil, s.pencil.spectrum(0)), ResolventViolationError);
}

TEST_CASE("adjoint map duality") {
    SUBCASE("self-adjoint case: adjoint map equals the map") {
        const Setup s = make_1d(15);
        const Eigen::MatrixXcd D = dtn_eval(s.forms, s.pencil, -2.0);
        const Eigen::MatrixXcd Dt = adjoint_dtn_eval(s.forms, s.pencil, -2.0);
        CHECK((D - Dt).norm() <= 1e-13 * D.norm());
    }
    SUBCASE("complex coefficients: conjugate-transpose identity") {
        const Setup s = make_1d(15, Complex(0.0, 1.0));
        const Complex lambda(-1.3, 0.8);
        const Eigen::MatrixXcd D = dtn_eval(s.forms, s.pencil, lambda);
        const Eigen::MatrixXcd Dt = adjoint_dtn_eval(s.forms, s.pencil, std::conj(lambda));
        CHECK((Dt - D.adjoint()).norm() <= 1e-13 * D.norm());
    }
}

TEST_CASE("pairing duality against the adjoint map") {
    const DiscreteDomain d = build_rectangle_mesh(3, 3, 1.0, 1.0);
    const FormMatrices forms = assemble_forms(d, schroedinger_coefficients(d, Complex(0.5, 2.0)));
    const DirichletPencil pencil = dirichlet_pencil(forms);
    SplitMix64 rng(31);
    for (const Complex lambda : {Complex(-1.0, 0.0), Complex(2.0, 1.5)}) {
        const Eigen::MatrixXcd D = dtn_eval(forms, pencil, lambda);
        const Eigen::MatrixXcd Dt = adjoint_dtn_eval(forms, pencil, std::conj(lambda));
        const Eigen::VectorXcd phi = rng.next_complex_vector(forms.n_boundary());
        const Eigen::VectorXcd psi = rng.next_complex_vector(forms.n_boundary());
        // <D phi, psi> = <phi, Dt psi> with the mixed-order pairings.
        const Complex lhs = psi.dot(D * phi);
        const Complex rhs = (Dt * psi).dot(phi);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + D.norm()));
    }
}

TEST_CASE("Taylor derivatives: order zero and the single-interior-DOF oracle") {
    const Setup s = make_1d(2);
    const Complex lambda0(-0.7, 0.2);
    const DtnDerivatives derivs = dtn_derivatives_taylor(s.forms, s.pencil, lambda0, 4);
    CHECK((derivs.matrices[0] - dtn_eval(s.forms, s.pencil, lambda0)).norm() <= 1e-13);

    const std::vector<Eigen::MatrixXcd> oracle = oracles::schur_derivatives_single_interior(
        s.forms.K, s.forms.mass, s.forms.interior_nodes[0], s.forms.boundary_nodes, lambda0, 4);
    for (int l = 0; l <= 4; ++l)
        CHECK((derivs.matrices[l] - oracle[l]).norm() <= 1e-13 * (1.0 + oracle[l].norm()));
}

TEST_CASE("first derivative agrees with a finite difference") {
    const Setup s = make_1d(40, Complex(0.0, 0.7));
    const Complex lambda0(-1.1, 0.0);
    const DtnDerivatives derivs = dtn_derivatives_taylor(s.forms, s.pencil, lambda0, 1);
    const double delta = 1e-6;
    const Eigen::MatrixXcd fd =
        (dtn_eval(s.forms, s.pencil, lambda0 + delta) - dtn_eval(s.forms, s.pencil, lambda0)) /
        delta;
    CHECK((fd - derivs.matrices[1]).norm() <= 1e-6 * derivs.matrices[1].norm());
}

TEST_CASE("contour derivatives agree with the Taylor recurrence") {
    const DiscreteDomain d = build_rectangle_mesh(4, 4, 1.0, 1.0);
    const FormMatrices forms = assemble_forms(d, schroedinger_coefficients(d, Complex(0.0, 1.0)));
    const DirichletPencil pencil = dirichlet_pencil(forms);
    const Complex lambda0(-1.0, 0.5);
    const DtnDerivatives taylor = dtn_derivatives_taylor(forms, pencil, lambda0, 4);
    const DtnDerivatives contour = dtn_derivatives_contour(forms, pencil, lambda0, 4);
    for (int l = 0; l <= 4; ++l)
        CHECK((taylor.matrices[l] - contour.matrices[l]).norm() <=
              1e-8 * taylor.matrices[l].norm());
    CHECK((contour.matrices[0] - dtn_eval(forms, pencil, lambda0)).norm() <=
          1e-10 * taylor.matrices[0].norm());
}

TEST_CASE("contour preconditions") {
    const Setup s = make_1d(30);
    const double dist = s.pencil.spectrum_distance(-1.0);
    CHECK_THROWS_AS(dtn_derivatives_contour(s.forms, s.pencil, -1.0, 2, dist * 1.5, 32),
                    ContourViolationError);
    CHECK_THROWS_AS(dtn_derivatives_taylor(s.forms, s.pencil, -1.0, kDefaultOrderCap + 1),
                    OrderError);
    CHECK_THROWS_AS(dtn_derivatives_taylor(s.forms, s.pencil, -1.0, -1), OrderError);
}

TEST_CASE("Taylor consistency: remainder decays at the expected rate") {
    const Setup s = make_1d(30);
    const Complex lambda0(-1.0, 0.0);
    const int order = 3;
    const DtnDerivatives derivs = dtn_derivatives_taylor(s.forms, s.pencil, lambda0, order);
    double prev_max = 0.0;
    for (const double delta : {0.2, 0.1}) {
        double worst = 0.0;
        for (const Complex dir : {Complex(1, 0), Complex(0, 1), Complex(-0.7, 0.7)}) {
            const Complex lambda = lambda0 + delta * dir;
            Eigen::MatrixXcd taylor_sum = derivs.matrices[0];
            double factorial = 1.0;
            Complex power = 1.0;
            for (int l = 1; l <= order; ++l) {
                factorial *= l;
                power *= (lambda - lambda0);
                taylor_sum += (power / factorial) * derivs.matrices[l];
            }
            worst = std::max(
                worst, (dtn_eval(s.forms, s.pencil, lambda) - taylor_sum).cwiseAbs().maxCoeff());
        }
        if (prev_max > 0.0)
            CHECK(std::log2(prev_max / worst) >= order + 0.5); // remainder order >= l_max + 1
        prev_max = worst;
    }
}

TEST_CASE("columns of D are the co-normal derivatives of basis solutions") {
    const DiscreteDomain d = build_rectangle_mesh(3, 2, 1.0, 1.0);
    const FormMatrices forms = assemble_forms(d, laplacian_coefficients(d));
    const DirichletPencil pencil = dirichlet_pencil(forms);
    const Complex lambda(-0.4, 0.9);
    const Eigen::MatrixXcd D = dtn_eval(forms, pencil, lambda);
    for (int j = 0; j < forms.n_boundary(); ++j) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(forms.n_boundary());
        e(j) = 1.0;
        const Eigen::VectorXcd f = solve_homogeneous_bvp(forms, pencil, lambda, e);
        const ConormalVector gamma =
            conormal(f, Eigen::VectorXcd::Zero(forms.n()), lambda, forms);
        CHECK((D.col(j) - gamma.values).norm() <= 1e-11 * (1.0 + D.norm()));
    }
}

TEST_CASE("concurrent evaluation at distinct points matches sequential results") {
    const Setup s = make_1d(40, Complex(0.2, 0.9));
    const std::vector<Complex> lambdas = {Complex(-1, 0), Complex(-2, 0.5), Complex(0.5, -1),
                                          Complex(-3.3, 0.1)};
    std::vector<Eigen::MatrixXcd> sequential;
    for (const Complex lambda : lambdas)
        sequential.push_back(dtn_eval(s.forms, s.pencil, lambda));

    std::vector<Eigen::MatrixXcd> parallel(lambdas.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        workers.emplace_back(
            [&, i] { parallel[i] = dtn_eval(s.forms, s.pencil, lambdas[i]); });
    for (auto& w : workers)
        w.join();
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        CHECK((sequential[i] - parallel[i]).norm() == 0.0);
}

TEST_CASE("nodal map: 1D identity Gram and the 2D form representation") {
    const Setup s = make_1d(12);
    CHECK((dtn_nodal(s.forms, s.pencil, -1.5) - dtn_eval(s.forms, s.pencil, -1.5)).norm() ==
          0.0);

    const DiscreteDomain d = build_rectangle_mesh(4, 3, 1.0, 1.0);
    const FormMatrices forms = assemble_forms(d, laplacian_coefficients(d));
    const DirichletPencil pencil = dirichlet_pencil(forms);
    const Complex lambda(-2.0, 0.3);
    const Eigen::MatrixXcd Dn = dtn_nodal(forms, pencil, lambda);
    CHECK((dtn_nodal(forms, pencil, lambda) - dtn_eval(forms, pencil, lambda)).norm() > 1e-6);

    SplitMix64 rng(8);
    const Eigen::VectorXcd phi = rng.next_complex_vector(forms.n_boundary());
    const Eigen::VectorXcd f = solve_homogeneous_bvp(forms, pencil, lambda, phi);
    const Eigen::VectorXcd psi_dual = boundary_to_dual(Dn * phi, forms);
    Eigen::VectorXcd residual = forms.K * f - lambda * apply_real(forms.mass, f);
    for (int r = 0; r < forms.n_boundary(); ++r)
        residual(forms.boundary_nodes[r]) -= psi_dual(r);
    CHECK(residual.norm() <= 1e-12 * forms.k_norm * f.norm());
}
