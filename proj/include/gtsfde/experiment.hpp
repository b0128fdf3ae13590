#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtsfde/problems.hpp"
#include "gtsfde/solver.hpp"

namespace gtsfde {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VerifyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AgreementError : SolverError {
    using SolverError::SolverError;
};

enum class SweepAxis { Temporal, Spatial, Coupled };

struct ParamSet {
    double gamma = 0.5, alpha = 1.5, b = 1.0, p = 0.7;
};

struct ExperimentConfig {
    std::string example = "1";  // 1 | 2 | A1 | custom
    std::vector<ParamSet> parameters;
    double xi_const = 5.0;

    SweepAxis axis = SweepAxis::Temporal;
    std::vector<std::size_t> m_values, n_values;
    std::size_t fixed_n = 0, fixed_m = 0;
    double coupled_prefactor = 2.0;  // N = ceil(pref * M^{(2-gamma)/2})

    Scheme scheme = Scheme::Direct;
    bool two_grid = false;
    bool final_time_only = true;

    SolveConfig solver;
    SolverPath path = SolverPath::Auto;
    double soe_epsilon = 1e-9;
    double agreement_bound = 1e-5;
    std::string output = "report.csv";

    // custom example
    double custom_x_left = 0.0, custom_x_right = 1.0, custom_horizon = 1.0;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct ReportRow {
    std::string example;
    double gamma = 0.0, alpha = 0.0, b = 0.0, p = 0.0;
    std::string scheme, precond;
    std::size_t n = 0, m = 0;
    std::optional<double> err_inf, rate_inf, err_l2, rate_l2;
    double iters_avg = 0.0, wall_s = 0.0;
    std::size_t mem_bytes = 0;
    bool agreement_violation = false;
};

struct RunOptions {
    int threads = 1;
    std::optional<double> tol_override;
    unsigned seed = 12345;
    bool verify = false;
    bool emit_timing = true;
};

/// Execute the configured sweep; one row per run, rates attached from the
/// second row of each sweep on. Verify mode cross-checks the structured
/// solver against a dense reference on a small grid first.
std::vector<ReportRow> run_experiment(const ExperimentConfig& config, const RunOptions& opt);

/// Run the direct and fast schemes side by side on the same grids and check
/// their reported errors agree within config.agreement_bound.
std::vector<ReportRow> compare_schemes(const ExperimentConfig& config, const RunOptions& opt);

/// Fixed-header delimited table. With emit_timing off the wall_s column is
/// written as 0 so identical configurations reproduce byte-identical files.
void write_table(const std::vector<ReportRow>& rows, std::ostream& os, bool emit_timing = true);

/// Data file of the w_2(alpha) curve on (1, 2].
void write_w2_curve(std::ostream& os, std::size_t samples = 512);

/// Dense-oracle cross-check at N=17, M=8 for the first parameter set.
void verify_small_grid(const ExperimentConfig& config);

ManufacturedProblem build_problem(const ExperimentConfig& config, const ParamSet& ps,
                                  unsigned seed);

}  // namespace gtsfde
