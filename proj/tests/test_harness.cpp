#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "dtnjordan/config.hpp"
#include "dtnjordan/errors.hpp"
#include "dtnjordan/realizations.hpp"
#include "dtnjordan/report.hpp"
#include "dtnjordan/runner.hpp"

using namespace dtnjordan;
using nlohmann::json;

namespace {

json minimal_config_json() {
    return json::parse(R"({
        "schema_version": "1",
        "domain": {"kind": "interval", "n": 30, "length": 1.0},
        "coefficients": {"preset": "laplacian"},
        "boundary_operator": {"kind": "zero"},
        "lambda0": [0.0, 0.0],
        "lambda0_policy": "nearest_robin",
        "chain_order": 1,
        "seed": 3
    })");
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text)
        if (c == '\n')
            ++lines;
    return lines;
}

} // namespace

TEST_CASE("config parsing: happy path and diagnostics") {
    const ExperimentConfig cfg = parse_config(minimal_config_json());
    CHECK(cfg.domain.kind == "interval");
    CHECK(cfg.domain.n == 30);
    CHECK(cfg.lambda0_policy == "nearest_robin");
    CHECK(cfg.tolerances.theorem == 1e-8);

    json broken = minimal_config_json();
    broken.erase("lambda0");
    CHECK_THROWS_WITH_AS(parse_config(broken), doctest::Contains("lambda0"), ConfigError);

    json bad_complex = minimal_config_json();
    bad_complex["lambda0"] = {1.0};
    CHECK_THROWS_AS(parse_config(bad_complex), ConfigError);

    json bad_preset = minimal_config_json();
    bad_preset["coefficients"] = {{"preset", "unknown"}};
    CHECK_THROWS_WITH_AS(parse_config(bad_preset), doctest::Contains("preset"), ConfigError);

    json bad_policy = minimal_config_json();
    bad_policy["lambda0_policy"] = "snap";
    CHECK_THROWS_AS(parse_config(bad_policy), ConfigError);
}

TEST_CASE("bundled configs run green") {
    for (const std::string name :
         {"configs/neumann_1d.json", "configs/defective_1d.json",
          "configs/defective_2d.json", "configs/random_robin_1d.json"}) {
        CAPTURE(name);
        const ExperimentConfig cfg = load_config(name);
        const RunOutcome outcome = run_experiment(cfg);
        for (const auto& report : outcome.reports) {
            CAPTURE(report.name);
            CHECK(report.passed);
        }
        CHECK(outcome.passed);
    }
}

TEST_CASE("defective config demonstrates a chain of length at least two") {
    const ExperimentConfig cfg = load_config("configs/defective_1d.json");
    const RunOutcome outcome = run_experiment(cfg, {"round_trip"});
    REQUIRE(outcome.reports.size() == 1);
    const auto& context = outcome.reports[0].context;
    const auto it = std::find_if(context.begin(), context.end(),
                                 [](const auto& kv) { return kv.first == "chain_length"; });
    REQUIRE(it != context.end());
    CHECK(std::stoi(it->second) >= 2);
}

TEST_CASE("lambda0 on the Dirichlet spectrum is reported, not crashed") {
    // Compute a true discrete Dirichlet eigenvalue, then run with it.
    const ExperimentConfig base = parse_config(minimal_config_json());
    const Instance probe = build_instance(base);
    const std::complex<double> bad = probe.pencil.spectrum(0);

    json j = minimal_config_json();
    j["lambda0"] = {bad.real(), bad.imag()};
    j["lambda0_policy"] = "exact";
    const RunOutcome outcome = run_experiment(parse_config(j));
    CHECK_FALSE(outcome.passed);
    bool found_reason = false;
    for (const auto& report : outcome.reports)
        for (const auto& [key, value] : report.context)
            if (key == "reason" && value == "resolvent-violation")
                found_reason = true;
    CHECK(found_reason);
}

TEST_CASE("boundary operator dimension mismatch surfaces as a named failure") {
    json j = minimal_config_json();
    j["boundary_operator"] = {
        {"kind", "explicit"},
        {"coordinates", "nodal"},
        {"matrix",
         json::array({json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0}),
                                   json::array({0.0, 0.0})}),
                      json::array({json::array({0.0, 0.0}), json::array({1.0, 0.0}),
                                   json::array({0.0, 0.0})}),
                      json::array({json::array({0.0, 0.0}), json::array({0.0, 0.0}),
                                   json::array({1.0, 0.0})})})}};
    const RunOutcome outcome = run_experiment(parse_config(j));
    CHECK_FALSE(outcome.passed);
    REQUIRE(outcome.reports.size() == 1);
    CHECK(outcome.reports[0].name == "preconditions");
    bool dimension_reason = false;
    for (const auto& [key, value] : outcome.reports[0].context)
        if (key == "reason" && value == "dimension")
            dimension_reason = true;
    CHECK(dimension_reason);
}

TEST_CASE("reports are bit-identical across runs") {
    const ExperimentConfig cfg = load_config("configs/neumann_1d.json");
    const RunOutcome a = run_experiment(cfg);
    const RunOutcome b = run_experiment(cfg);
    CHECK(a.bundle.dump() == b.bundle.dump());
}

TEST_CASE("report bundle round trip and version gate") {
    const ExperimentConfig cfg = parse_config(minimal_config_json());
    const RunOutcome outcome = run_experiment(cfg, {"exact_identities"});
    const std::string dir = "build/test_bundles/roundtrip";
    write_report_bundle(outcome.bundle, dir);
    const json loaded = load_report_bundle(dir + "/report.json");
    CHECK(loaded == outcome.bundle);
    CHECK(std::filesystem::exists(dir + "/summary.txt"));

    json tampered = outcome.bundle;
    tampered["schema_version"] = "99";
    const std::string bad_path = dir + "/tampered.json";
    {
        std::ofstream os(bad_path);
        os << tampered.dump();
    }
    CHECK_THROWS_AS(load_report_bundle(bad_path), ConfigError);
}

TEST_CASE("check subset filtering") {
    const ExperimentConfig cfg = parse_config(minimal_config_json());
    const RunOutcome outcome = run_experiment(cfg, {"sectoriality", "birman_schwinger"});
    REQUIRE(outcome.reports.size() == 2);
    CHECK(outcome.reports[0].name == "sectoriality");
    CHECK(outcome.reports[1].name == "birman_schwinger");
}

TEST_CASE("grid spec parsing") {
    const GridSpec g = parse_grid_spec("-4:-0.1:8");
    CHECK(g.re0 == -4.0);
    CHECK(g.re1 == -0.1);
    CHECK(g.count == 8);
    CHECK(g.im == 0.0);
    const GridSpec gi = parse_grid_spec("0:1:5:0.25");
    CHECK(gi.im == 0.25);
    CHECK_THROWS_AS(parse_grid_spec("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_grid_spec("a:b:c"), ConfigError);
}

TEST_CASE("sweep tables") {
    json j = minimal_config_json();
    const ExperimentConfig cfg = parse_config(j);

    SUBCASE("empty grid keeps the header") {
        const std::string csv = sweep_dtn_csv(cfg, GridSpec{-4.0, -0.1, 0, 0.0});
        CHECK(count_lines(csv) == 1);
        CHECK(csv.find("lambda_re,lambda_im,flagged,dist_to_dirichlet_spectrum") == 0);
    }
    SUBCASE("margin-safe grid has no flags; errors shrink with resolution") {
        const std::string csv = sweep_dtn_csv(cfg, GridSpec{-4.0, -0.1, 8, 0.0});
        CHECK(count_lines(csv) == 9);
        CHECK(csv.find(",1,") == std::string::npos);
    }
    SUBCASE("grid point inside the margin around an eigenvalue flags the row") {
        const Instance probe = build_instance(cfg);
        const std::complex<double> ev = probe.pencil.spectrum(0);
        const std::string csv =
            sweep_dtn_csv(cfg, GridSpec{ev.real(), ev.real() + 1.0, 3, ev.imag()});
        CHECK(csv.find("nan") != std::string::npos); // the on-eigenvalue row
        CHECK(csv.find(",0,") != std::string::npos); // the safe rows
    }
}

TEST_CASE("spectrum table lists both pencils") {
    const ExperimentConfig cfg = parse_config(minimal_config_json());
    const std::string csv = spectrum_csv(cfg);
    CHECK(csv.find("dirichlet,") != std::string::npos);
    CHECK(csv.find("robin,") != std::string::npos);
    CHECK(count_lines(csv) == 1 + 29 + 31); // header + interior + full pencil
}
