#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dtnjordan/config.hpp"
#include "dtnjordan/dtn.hpp"
#include "dtnjordan/keldysh.hpp"
#include "dtnjordan/report.hpp"
#include "dtnjordan/verify.hpp"

namespace dtnjordan {

/// Everything the checks need, built once per experiment.
struct Instance {
    DiscreteDomain domain;
    CoefficientSet coeffs;
    FormMatrices forms;
    DirichletPencil pencil;
    BoundaryOperator B;
    RobinPencil robin;
    std::complex<double> lambda0;
    Eigen::VectorXcd defective_seed; // nonzero size iff the defective construction was used
};

Instance build_instance(const ExperimentConfig& cfg);

struct RunOutcome {
    std::vector<VerificationReport> reports;
    bool passed = false;
    nlohmann::json bundle;
};

/// Names understood by the runner and by `check --only`.
const std::vector<std::string>& known_check_names();

/// Executes the pipeline (mesh -> forms -> pencils -> derivatives -> chains ->
/// verification reports). `only` restricts to a subset of check names; every
/// precondition failure is converted into a failed report naming the reason.
RunOutcome run_experiment(const ExperimentConfig& cfg,
                          const std::vector<std::string>& only = {});

struct GridSpec {
    double re0 = 0.0, re1 = 0.0;
    int count = 0;
    double im = 0.0;
};

/// "re0:re1:count[:im]".
GridSpec parse_grid_spec(const std::string& text);

/// CSV table of D(lambda) entries over a real-axis-parallel grid. Rows whose
/// lambda violates the resolvent margin are flagged, not fatal. The header is
/// emitted even for an empty grid.
std::string sweep_dtn_csv(const ExperimentConfig& cfg, const GridSpec& grid);

/// CSV table of the Dirichlet and Robin spectra.
std::string spectrum_csv(const ExperimentConfig& cfg);

} // namespace dtnjordan
