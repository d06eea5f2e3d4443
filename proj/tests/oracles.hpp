#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dtnjordan/linalg.hpp"
#include "dtnjordan/rng.hpp"

namespace oracles {

using Complex = std::complex<double>;

/// Closed-form Dirichlet-to-Neumann matrix of -f'' on (0, 1):
/// D(lambda) = (s / sin s) [[cos s, -1], [-1, cos s]] with s = sqrt(lambda),
/// analytic across s = 0 where it equals [[1, -1], [-1, 1]].
inline Eigen::Matrix2cd dtn_1d_closed_form(Complex lambda) {
    Eigen::Matrix2cd d;
    if (std::abs(lambda) < 1e-14) {
        d << 1.0, -1.0, -1.0, 1.0;
        return d;
    }
    const Complex s = std::sqrt(lambda);
    const Complex factor = s / std::sin(s);
    d << factor * std::cos(s), -factor, -factor, factor * std::cos(s);
    return d;
}

/// Dirichlet eigenvalues of -f'' on (0, 1): (k pi)^2, k >= 1.
inline double dirichlet_eigenvalue_1d(int k) { return k * M_PI * k * M_PI; }

// --- truncated Taylor (jet) arithmetic -------------------------------------
// Exact polynomial arithmetic in the expansion variable, used as a symbolic
// differentiation oracle for small Schur complements.

struct Jet {
    std::vector<Complex> c; // c[i] is the coefficient of delta^i

    explicit Jet(int order) : c(order + 1, Complex(0.0)) {}
    static Jet constant(Complex value, int order) {
        Jet j(order);
        j.c[0] = value;
        return j;
    }
    static Jet affine(Complex value, Complex slope, int order) {
        Jet j(order);
        j.c[0] = value;
        if (order >= 1)
            j.c[1] = slope;
        return j;
    }
    int order() const { return static_cast<int>(c.size()) - 1; }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    Jet r(a.order());
    for (int i = 0; i <= a.order(); ++i)
        r.c[i] = a.c[i] + b.c[i];
    return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
    Jet r(a.order());
    for (int i = 0; i <= a.order(); ++i)
        r.c[i] = a.c[i] - b.c[i];
    return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.order());
    for (int i = 0; i <= a.order(); ++i)
        for (int j = 0; i + j <= a.order(); ++j)
            r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

/// 1 / a as a truncated geometric series around a.c[0] (which must be != 0).
inline Jet reciprocal(const Jet& a) {
    const int n = a.order();
    Jet r(n);
    r.c[0] = 1.0 / a.c[0];
    for (int i = 1; i <= n; ++i) {
        Complex acc = 0.0;
        for (int j = 1; j <= i; ++j)
            acc += a.c[j] * r.c[i - j];
        r.c[i] = -acc / a.c[0];
    }
    return r;
}

/// Schur complement derivatives of a pencil (K, M) with a single interior DOF
/// (index set: interior scalar + boundary block), evaluated by jet arithmetic.
/// Returns matrices[l] = l-th derivative of the boundary Schur complement.
inline std::vector<Eigen::MatrixXcd> schur_derivatives_single_interior(
    const Eigen::MatrixXcd& K, const Eigen::MatrixXd& M, int interior_index,
    const std::vector<int>& boundary_indices, Complex lambda0, int order) {
    const int nb = static_cast<int>(boundary_indices.size());
    const auto entry = [&](int i, int j) {
        return Jet::affine(K(i, j) - lambda0 * M(i, j), -M(i, j), order);
    };
    const Jet inv = reciprocal(entry(interior_index, interior_index));
    std::vector<Eigen::MatrixXcd> out(order + 1, Eigen::MatrixXcd::Zero(nb, nb));
    for (int r = 0; r < nb; ++r) {
        for (int s = 0; s < nb; ++s) {
            const Jet value = entry(boundary_indices[r], boundary_indices[s]) -
                              entry(boundary_indices[r], interior_index) * inv *
                                  entry(interior_index, boundary_indices[s]);
            double factorial = 1.0;
            for (int l = 0; l <= order; ++l) {
                if (l > 0)
                    factorial *= l;
                out[l](r, s) = factorial * value.c[l];
            }
        }
    }
    return out;
}

// --- block Toeplitz chain-length profile ------------------------------------

/// Chain-length profile of a holomorphic matrix function at lambda0 from the
/// nullities of the stacked block lower-triangular Toeplitz matrices with
/// blocks (1/(j-l)!) M_{j-l}: the number of chains of length >= j+1 equals
/// nullity(T_j) - nullity(T_{j-1}). Lengths are capped at max_len and the
/// profile is sorted descending.
inline std::vector<int> block_toeplitz_profile(const std::vector<Eigen::MatrixXcd>& m_blocks,
                                               int max_len, double tol_rank_rel = -1.0) {
    const int n = static_cast<int>(m_blocks[0].rows());
    std::vector<int> nullity(max_len, 0);
    for (int j = 0; j < max_len; ++j) {
        Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero((j + 1) * n, (j + 1) * n);
        for (int row = 0; row <= j; ++row) {
            for (int col = 0; col <= row; ++col) {
                const int l = row - col;
                double factorial = 1.0;
                for (int i = 2; i <= l; ++i)
                    factorial *= i;
                T.block(row * n, col * n, n, n) = m_blocks[l] / factorial;
            }
        }
        const dtnjordan::RankRevealingSvd svd(T, tol_rank_rel);
        nullity[j] = (j + 1) * n - svd.rank();
    }
    std::vector<int> ge(max_len + 1, 0); // ge[len] = #chains of length >= len
    for (int len = 1; len <= max_len; ++len)
        ge[len] = nullity[len - 1] - (len >= 2 ? nullity[len - 2] : 0);
    std::vector<int> profile;
    for (int len = max_len; len >= 1; --len) {
        const int exactly = ge[len] - (len < max_len ? ge[len + 1] : 0);
        for (int i = 0; i < exactly; ++i)
            profile.push_back(len);
    }
    std::sort(profile.begin(), profile.end(), std::greater<int>());
    return profile;
}

// --- seeded random polynomial matrix functions -------------------------------

/// Derivative blocks at lambda0 of M(lambda) = P diag((lambda-lambda0)^{m_i}) Q
/// with constant random invertible P, Q: M^(l) = P diag(l! [m_i == l]) Q.
/// Partial multiplicities at lambda0 are exactly the nonzero m_i.
struct SmithInstance {
    std::vector<Eigen::MatrixXcd> derivatives; // index l = 0..order
    std::vector<int> multiplicities;           // nonzero m_i, sorted descending
};

inline SmithInstance random_smith_instance(dtnjordan::SplitMix64& rng, int size, int order,
                                           const std::vector<int>& structure) {
    const auto well_conditioned = [&](const Eigen::MatrixXcd& A) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
        return svd.singularValues().minCoeff() > 0.05 * svd.singularValues().maxCoeff();
    };
    Eigen::MatrixXcd P = rng.next_complex_matrix(size, size);
    while (!well_conditioned(P))
        P = rng.next_complex_matrix(size, size);
    Eigen::MatrixXcd Q = rng.next_complex_matrix(size, size);
    while (!well_conditioned(Q))
        Q = rng.next_complex_matrix(size, size);

    SmithInstance inst;
    inst.derivatives.assign(order + 1, Eigen::MatrixXcd::Zero(size, size));
    for (int l = 0; l <= order; ++l) {
        Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(size, size);
        double factorial = 1.0;
        for (int i = 2; i <= l; ++i)
            factorial *= i;
        for (int i = 0; i < size; ++i) {
            const int m = i < static_cast<int>(structure.size()) ? structure[i] : 0;
            if (m == l)
                diag(i, i) = factorial;
        }
        inst.derivatives[l] = P * diag * Q;
    }
    for (int m : structure)
        if (m > 0)
            inst.multiplicities.push_back(m);
    std::sort(inst.multiplicities.begin(), inst.multiplicities.end(), std::greater<int>());
    return inst;
}

} // namespace oracles
