#include <complex>
#include <vector>

#include "doctest.h"

#include "dtnjordan/assembly.hpp"
#include "dtnjordan/dtn.hpp"
#include "dtnjordan/errors.hpp"
#include "dtnjordan/keldysh.hpp"
#include "dtnjordan/linalg.hpp"
#include "dtnjordan/realizations.hpp"
#include "dtnjordan/rng.hpp"

#include "oracles.hpp"

using namespace dtnjordan;
using Complex = std::complex<double>;

namespace {

DtnDerivatives synthetic_derivs(const std::vector<Eigen::MatrixXcd>& matrices,
                                Complex lambda0 = 0.0) {
    DtnDerivatives d;
    d.lambda0 = lambda0;
    d.order = static_cast<int>(matrices.size()) - 1;
    d.matrices = matrices;
    return d;
}

std::vector<int> length_profile(const std::vector<KeldyshChain>& chains) {
    std::vector<int> lengths;
    for (const auto& c : chains)
        lengths.push_back(c.length());
    std::sort(lengths.begin(), lengths.end(), std::greater<int>());
    return lengths;
}

} // namespace

TEST_CASE("pencil chains: canonical 2x2 Jordan block") {
    Eigen::MatrixXcd K(2, 2);
    K << 2, 1, 0, 2;
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2, 2);
    const auto chains = pencil_jordan_chains(K, M, 2.0, {});
    REQUIRE(chains.size() == 1);
    REQUIRE(chains[0].length() == 2);
    // Eigenvector along e0, first generalized vector along e1 (same phase).
    CHECK(std::abs(chains[0].vectors[0](1)) <= 1e-14);
    CHECK(std::abs(chains[0].vectors[1](0)) <= 1e-14);
    CHECK(std::abs(chains[0].vectors[1](1) - chains[0].vectors[0](0)) <= 1e-14);
    for (double r : chains[0].residuals)
        CHECK(r <= 1e-12);
}

TEST_CASE("pencil chains: semisimple and full-kernel cases") {
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXcd diag(2, 2);
    diag << 1, 0, 0, 2;
    const auto semisimple = pencil_jordan_chains(diag, M, 1.0, {});
    REQUIRE(semisimple.size() == 1);
    CHECK(semisimple[0].length() == 1);

    const auto identity = pencil_jordan_chains(Eigen::MatrixXcd::Identity(2, 2), M, 1.0, {});
    REQUIRE(identity.size() == 2);
    CHECK(identity[0].length() == 1);
    CHECK(identity[1].length() == 1);

    CHECK(pencil_jordan_chains(diag, M, 5.0, {}).empty());
}

TEST_CASE("scalar holomorphic functions with engineered zeros") {
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(1, 1);
    const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(1, 1);

    // M(lambda) = (lambda - lambda0)^2: chain {1, 0} of length two.
    const auto dbl = keldysh_chains(synthetic_derivs({zero, zero, 2.0 * one}), zero,
                                    {.max_len = 3});
    REQUIRE(dbl.size() == 1);
    REQUIRE(dbl[0].length() == 2);
    CHECK(std::abs(std::abs(dbl[0].vectors[0](0)) - 1.0) <= 1e-14);
    CHECK(std::abs(dbl[0].vectors[1](0)) <= 1e-14);

    // M(lambda) = (lambda - lambda0): simple zero, chain of length one.
    const auto simple =
        keldysh_chains(synthetic_derivs({zero, one, zero}), zero, {.max_len = 3});
    REQUIRE(simple.size() == 1);
    CHECK(simple[0].length() == 1);
}

TEST_CASE("order precondition for the extraction") {
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(1, 1);
    CHECK_THROWS_AS(keldysh_chains(synthetic_derivs({zero, zero}), zero, {.max_len = 6}),
                    OrderError);
}

TEST_CASE("greedy extraction matches the block-Toeplitz profile") {
    SplitMix64 rng(0xC0FFEE);
    const std::vector<std::vector<int>> structures = {
        {0, 0, 0, 0}, {1, 0, 0, 0}, {2, 0, 0, 0}, {3, 0, 0, 0},
        {1, 1, 0, 0}, {2, 2, 0, 0}, {1, 1, 1, 1}, {2, 2, 2, 2}};
    const int max_len = 4;
    for (int trial = 0; trial < 12; ++trial) {
        const auto& structure = structures[static_cast<std::size_t>(
            rng.next_u64() % structures.size())];
        const oracles::SmithInstance inst =
            oracles::random_smith_instance(rng, 4, max_len, structure);
        const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(4, 4);

        ChainOptions opts;
        opts.max_len = max_len;
        opts.tol_rank = 1e-8;
        const auto chains = keldysh_chains(synthetic_derivs(inst.derivatives), zero, opts);
        std::vector<int> greedy = length_profile(chains);
        greedy.erase(std::remove(greedy.begin(), greedy.end(), 0), greedy.end());

        const std::vector<int> toeplitz =
            oracles::block_toeplitz_profile(inst.derivatives, max_len, 1e-8);
        CHECK(greedy == toeplitz);

        int total_levels = 0;
        for (int len : greedy)
            total_levels += len;
        int expected = 0;
        for (int m : inst.multiplicities)
            expected += std::min(m, max_len);
        CHECK(total_levels == expected);
    }
}

TEST_CASE("chain space is invariant under scaling of the function") {
    SplitMix64 rng(4242);
    const oracles::SmithInstance inst = oracles::random_smith_instance(rng, 4, 4, {2, 0, 0, 0});
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(4, 4);
    ChainOptions opts;
    opts.max_len = 4;
    opts.tol_rank = 1e-8;

    const Complex c(1.7, -2.4);
    std::vector<Eigen::MatrixXcd> scaled;
    for (const auto& m : inst.derivatives)
        scaled.push_back(c * m);

    const auto base = keldysh_chains(synthetic_derivs(inst.derivatives), zero, opts);
    const auto rescaled = keldysh_chains(synthetic_derivs(scaled), zero, opts);
    CHECK(length_profile(base) == length_profile(rescaled));

    // Chains of M are chains of c*M: re-evaluate the level residuals.
    for (const auto& chain : base) {
        for (int j = 0; j < chain.length(); ++j) {
            Eigen::VectorXcd level = Eigen::VectorXcd::Zero(4);
            double factorial = 1.0;
            for (int l = 0; l <= j; ++l) {
                if (l > 0)
                    factorial *= l;
                level += (1.0 / factorial) * (scaled[l] * chain.vectors[j - l]);
            }
            CHECK(level.norm() <= 1e-7 * std::abs(c) * inst.derivatives[0].norm());
        }
    }
}

TEST_CASE("stored residuals equal recomputed residuals") {
    Eigen::MatrixXcd K(3, 3);
    K << 2, 1, 0, 0, 2, 0, 0, 0, 5;
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3, 3);
    const auto chains = pencil_jordan_chains(K, M, 2.0, {});
    const double mat_scale = (K - 2.0 * M.cast<Complex>()).norm() + M.norm();
    for (const auto& chain : chains) {
        for (int j = 0; j < chain.length(); ++j) {
            const Eigen::VectorXcd prev = j == 0 ? Eigen::VectorXcd::Zero(3).eval()
                                                 : chain.vectors[j - 1];
            const double recomputed =
                ((K - 2.0 * M.cast<Complex>()) * chain.vectors[j] - M.cast<Complex>() * prev)
                    .norm() /
                (j == 0 ? mat_scale
                        : mat_scale * (chain.vectors[j].norm() + prev.norm()));
            CHECK(chain.residuals[j] == doctest::Approx(recomputed).epsilon(1e-12));
        }
    }
}

TEST_CASE("defective boundary operator construction on the interval") {
    const DiscreteDomain d = build_interval_mesh(40, 1.0);
    const FormMatrices forms = assemble_forms(d, laplacian_coefficients(d));
    const DirichletPencil pencil = dirichlet_pencil(forms);
    const Complex lambda0(-1.0, 0.0);
    Eigen::VectorXcd phi0(2);
    phi0 << 1.0, 1.0;

    const BoundaryOperator B = make_defective_boundary_operator(forms, pencil, lambda0, phi0);
    const Eigen::MatrixXcd B_dual = boundary_operator_dual_matrix(forms, B);
    const DtnDerivatives derivs = dtn_derivatives_taylor(forms, pencil, lambda0, 3);

    // Levels 0 and 1 of the chain relation hold for the engineered seed.
    const Eigen::VectorXcd seed = phi0.normalized();
    const Eigen::MatrixXcd M0 = derivs.matrices[0] - B_dual;
    CHECK((M0 * seed).norm() <= 1e-12 * (M0.norm() + derivs.matrices[0].norm()));

    ChainOptions opts;
    opts.max_len = 4;
    opts.tol_rank = 1e-10;
    const auto chains = keldysh_chains(derivs, B_dual, opts);
    REQUIRE(!chains.empty());
    int longest = 0;
    for (const auto& c : chains)
        longest = std::max(longest, c.length());
    CHECK(longest >= 2);
    for (const auto& c : chains) {
        if (c.length() < 2)
            continue;
        const Eigen::VectorXcd level1 =
            M0 * c.vectors[1] + derivs.matrices[1] * c.vectors[0];
        CHECK(level1.norm() <= 1e-8 * (M0.norm() + derivs.matrices[1].norm()));
    }

    // lambda0 is (numerically) an eigenvalue of the Robin pencil.
    const RobinPencil robin = robin_pencil(forms, B);
    const Eigen::MatrixXcd A = robin.K_B - lambda0 * forms.mass.cast<Complex>();
    CHECK(sigma_min(A) <= 1e-8 * sigma_max(A));
    CHECK(robin.spectrum.size() > 0);
    double dist = 1e300;
    for (Eigen::Index i = 0; i < robin.spectrum.size(); ++i)
        dist = std::min(dist, std::abs(robin.spectrum(i) - lambda0));
    CHECK(dist <= 1e-4); // defective eigenvalues split by about sqrt(eps * scale)
}

TEST_CASE("defective construction rejects degenerate seeds") {
    const DiscreteDomain d = build_interval_mesh(10, 1.0);
    const FormMatrices forms = assemble_forms(d, laplacian_coefficients(d));
    const DirichletPencil pencil = dirichlet_pencil(forms);
    CHECK_THROWS_AS(
        make_defective_boundary_operator(forms, pencil, -1.0, Eigen::VectorXcd::Zero(2)),
        DegenerateSeedError);
}

TEST_CASE("seeded extension finds the engineered chain in 2D") {
    const DiscreteDomain d = build_rectangle_mesh(4, 4, 1.0, 1.0);
    const FormMatrices forms = assemble_forms(d, schroedinger_coefficients(d, Complex(0.4, 0.9)));
    const DirichletPencil pencil = dirichlet_pencil(forms);
    const Complex lambda0(-1.3, 0.2);
    const Eigen::VectorXcd phi0 = Eigen::VectorXcd::Ones(forms.n_boundary());

    const BoundaryOperator B = make_defective_boundary_operator(forms, pencil, lambda0, phi0);
    const DtnDerivatives derivs = dtn_derivatives_taylor(forms, pencil, lambda0, 3);
    ChainOptions opts;
    opts.max_len = 3;
    opts.tol_rank = 1e-10;
    const KeldyshChain chain = extend_keldysh_chain(
        derivs, boundary_operator_dual_matrix(forms, B), phi0, opts);
    CHECK(chain.length() >= 2);
}
