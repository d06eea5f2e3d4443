#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dtnjordan/coefficients.hpp"
#include "dtnjordan/mesh.hpp"

namespace dtnjordan {

inline constexpr const char* kConfigSchemaVersion = "1";

struct DomainSpec {
    std::string kind; // "interval" | "rectangle"
    int n = 0, nx = 0, ny = 0;
    double length = 1.0, width = 1.0, height = 1.0;
};

struct CoefficientSpec {
    std::string preset; // "laplacian" | "schroedinger_complex" | "anisotropic" | "" (explicit)
    std::complex<double> c0{0.0, 0.0};
    Eigen::MatrixXcd c_matrix; // anisotropic preset
    // explicit per-element data (row-major complex entries in the JSON)
    std::vector<Eigen::MatrixXcd> c_principal;
    std::vector<Eigen::VectorXcd> b_conv, c_conv;
    std::vector<std::complex<double>> c_zero;
};

struct BoundaryOperatorSpec {
    std::string kind;           // "zero" | "explicit" | "defective" | "random"
    std::string coordinates;    // explicit: "nodal" | "dual"
    Eigen::MatrixXcd matrix;    // explicit
    Eigen::VectorXcd seed_phi;  // defective: empty means the all-ones seed
    double scale = 1.0;         // random
};

struct ToleranceSet {
    double chain = 1e-8;
    double resolvent = 1e-10;
    double consistency = 1e-8;
    double theorem = 1e-8;
    double rank = -1.0; // <= 0: auto
};

struct ContourSpec {
    double radius = 0.0; // <= 0: auto (half distance to the Dirichlet spectrum)
    int nodes = 64;
};

struct ExperimentConfig {
    DomainSpec domain;
    CoefficientSpec coefficients;
    BoundaryOperatorSpec boundary_operator;
    std::complex<double> lambda0{0.0, 0.0};
    std::string lambda0_policy = "exact"; // "exact" | "nearest_robin"
    int chain_order = 2;                  // chains up to length chain_order + 1
    double mu_target = -1.0;              // <= 0: 0.5 * coefficient mu
    ContourSpec contour;
    ToleranceSet tolerances;
    std::vector<std::string> checks; // empty: all applicable
    std::uint64_t seed = 1;
    nlohmann::json raw; // echo of the parsed file
};

/// Parse and validate a config JSON document. Throws ConfigError with the
/// offending key path in the message.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

DiscreteDomain build_domain(const DomainSpec& spec);
CoefficientSet build_coefficients(const CoefficientSpec& spec, const DiscreteDomain& domain);

} // namespace dtnjordan
