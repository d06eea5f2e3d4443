#include "dtnjordan/config.hpp"

#include <fstream>

#include "dtnjordan/errors.hpp"

namespace dtnjordan {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError("config: " + path + ": " + message);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key))
        fail(path + "." + key, "missing required key");
    return j.at(key);
}

std::complex<double> parse_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(path, "complex numbers are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::MatrixXcd parse_complex_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        fail(path, "expected a non-empty array of rows");
    const std::size_t cols = j[0].size();
    Eigen::MatrixXcd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            fail(path, "ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_complex(j[r][c], path);
    }
    return m;
}

Eigen::VectorXcd parse_complex_vector(const json& j, const std::string& path) {
    if (!j.is_array())
        fail(path, "expected an array of [re, im] pairs");
    Eigen::VectorXcd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = parse_complex(j[i], path);
    return v;
}

DomainSpec parse_domain(const json& j) {
    DomainSpec spec;
    spec.kind = require(j, "kind", "domain").get<std::string>();
    if (spec.kind == "interval") {
        spec.n = require(j, "n", "domain").get<int>();
        spec.length = j.value("length", 1.0);
    } else if (spec.kind == "rectangle") {
        spec.nx = require(j, "nx", "domain").get<int>();
        spec.ny = require(j, "ny", "domain").get<int>();
        spec.width = j.value("width", 1.0);
        spec.height = j.value("height", 1.0);
    } else {
        fail("domain.kind", "must be \"interval\" or \"rectangle\"");
    }
    return spec;
}

CoefficientSpec parse_coefficients(const json& j) {
    CoefficientSpec spec;
    if (j.contains("preset")) {
        spec.preset = j.at("preset").get<std::string>();
        if (spec.preset == "laplacian") {
        } else if (spec.preset == "schroedinger_complex") {
            spec.c0 = parse_complex(require(j, "c0", "coefficients"), "coefficients.c0");
        } else if (spec.preset == "anisotropic") {
            spec.c_matrix =
                parse_complex_matrix(require(j, "c", "coefficients"), "coefficients.c");
        } else {
            fail("coefficients.preset",
                 "must be \"laplacian\", \"schroedinger_complex\" or \"anisotropic\"");
        }
        return spec;
    }
    if (!j.contains("explicit"))
        fail("coefficients", "needs either a preset or explicit per-element arrays");
    const json& e = j.at("explicit");
    for (const auto& row : require(e, "c_principal", "coefficients.explicit"))
        spec.c_principal.push_back(parse_complex_matrix(row, "coefficients.explicit.c_principal"));
    for (const auto& row : require(e, "b_conv", "coefficients.explicit"))
        spec.b_conv.push_back(parse_complex_vector(row, "coefficients.explicit.b_conv"));
    for (const auto& row : require(e, "c_conv", "coefficients.explicit"))
        spec.c_conv.push_back(parse_complex_vector(row, "coefficients.explicit.c_conv"));
    for (const auto& z : require(e, "c_zero", "coefficients.explicit"))
        spec.c_zero.push_back(parse_complex(z, "coefficients.explicit.c_zero"));
    return spec;
}

BoundaryOperatorSpec parse_boundary(const json& j) {
    BoundaryOperatorSpec spec;
    spec.kind = require(j, "kind", "boundary_operator").get<std::string>();
    if (spec.kind == "zero") {
    } else if (spec.kind == "explicit") {
        spec.coordinates = j.value("coordinates", std::string("nodal"));
        if (spec.coordinates != "nodal" && spec.coordinates != "dual")
            fail("boundary_operator.coordinates", "must be \"nodal\" or \"dual\"");
        spec.matrix = parse_complex_matrix(require(j, "matrix", "boundary_operator"),
                                           "boundary_operator.matrix");
    } else if (spec.kind == "defective") {
        if (j.contains("seed_phi") && !j.at("seed_phi").is_string())
            spec.seed_phi =
                parse_complex_vector(j.at("seed_phi"), "boundary_operator.seed_phi");
    } else if (spec.kind == "random") {
        spec.scale = j.value("scale", 1.0);
    } else {
        fail("boundary_operator.kind",
             "must be \"zero\", \"explicit\", \"defective\" or \"random\"");
    }
    return spec;
}

} // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    if (j.value("schema_version", std::string("1")) != kConfigSchemaVersion)
        fail("schema_version", "unsupported config schema version");
    cfg.domain = parse_domain(require(j, "domain", ""));
    cfg.coefficients = parse_coefficients(require(j, "coefficients", ""));
    cfg.boundary_operator = parse_boundary(require(j, "boundary_operator", ""));
    cfg.lambda0 = parse_complex(require(j, "lambda0", ""), "lambda0");
    cfg.lambda0_policy = j.value("lambda0_policy", std::string("exact"));
    if (cfg.lambda0_policy != "exact" && cfg.lambda0_policy != "nearest_robin")
        fail("lambda0_policy", "must be \"exact\" or \"nearest_robin\"");
    cfg.chain_order = j.value("chain_order", 2);
    if (cfg.chain_order < 1 || cfg.chain_order > 7)
        fail("chain_order", "must be between 1 and 7 (Taylor order cap is 8)");
    cfg.mu_target = j.value("mu_target", -1.0);
    if (j.contains("contour")) {
        cfg.contour.radius = j.at("contour").value("radius", 0.0);
        cfg.contour.nodes = j.at("contour").value("nodes", 64);
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        cfg.tolerances.chain = t.value("chain", cfg.tolerances.chain);
        cfg.tolerances.resolvent = t.value("resolvent", cfg.tolerances.resolvent);
        cfg.tolerances.consistency = t.value("consistency", cfg.tolerances.consistency);
        cfg.tolerances.theorem = t.value("theorem", cfg.tolerances.theorem);
        cfg.tolerances.rank = t.value("rank", cfg.tolerances.rank);
    }
    if (j.contains("checks"))
        for (const auto& c : j.at("checks"))
            cfg.checks.push_back(c.get<std::string>());
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("config: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }
    return parse_config(j);
}

DiscreteDomain build_domain(const DomainSpec& spec) {
    if (spec.kind == "interval")
        return build_interval_mesh(spec.n, spec.length);
    return build_rectangle_mesh(spec.nx, spec.ny, spec.width, spec.height);
}

CoefficientSet build_coefficients(const CoefficientSpec& spec, const DiscreteDomain& domain) {
    if (spec.preset == "laplacian")
        return laplacian_coefficients(domain);
    if (spec.preset == "schroedinger_complex")
        return schroedinger_coefficients(domain, spec.c0);
    if (spec.preset == "anisotropic")
        return anisotropic_coefficients(domain, spec.c_matrix);

    CoefficientSet coeffs;
    coeffs.c_principal = spec.c_principal;
    coeffs.b_conv = spec.b_conv;
    coeffs.c_conv = spec.c_conv;
    coeffs.c_zero = spec.c_zero;
    coeffs.mu = verified_ellipticity_constant(coeffs);
    return coeffs;
}

} // namespace dtnjordan
