#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace dtnjordan {

/// SplitMix64 stream with Box-Muller normals. This exact algorithm is part of
/// the config contract (docs/config_schema.md): seeded instances must be
/// reproducible across implementations, so no std:: distribution is used.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double next_normal() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Complex with independent N(0,1) real and imaginary parts, scaled by 1/sqrt(2).
    std::complex<double> next_complex_normal() {
        const double re = next_normal();
        const double im = next_normal();
        return {re * M_SQRT1_2, im * M_SQRT1_2};
    }

    Eigen::MatrixXcd next_complex_matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXcd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                m(i, j) = next_complex_normal();
        return m;
    }

    Eigen::VectorXcd next_complex_vector(Eigen::Index size) {
        Eigen::VectorXcd v(size);
        for (Eigen::Index i = 0; i < size; ++i)
            v(i) = next_complex_normal();
        return v;
    }

private:
    std::uint64_t state_;
};

} // namespace dtnjordan
