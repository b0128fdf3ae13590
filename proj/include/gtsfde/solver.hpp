#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtsfde/kernels.hpp"
#include "gtsfde/krylov.hpp"
#include "gtsfde/toeplitz.hpp"

namespace gtsfde {

/// Continuous problem on [x_left, x_right] x [0, horizon]:
///   D^{gamma,lambda}_t u = xi(x,t) [ p D^alpha_left + (1-p) D^alpha_right ] u + f
/// with Dirichlet data and initial profile phi.
struct ProblemSpec {
    double x_left = 0.0, x_right = 1.0;
    double horizon = 1.0;
    double gamma = 0.5;
    double alpha = 1.5;
    double p = 0.5;
    WeightingFunction lambda = WeightingFunction::constant();
    std::function<double(double, double)> xi;      // xi(x, t) > 0
    std::function<double(double, double)> source;  // f(x, t)
    std::function<double(double)> initial;         // phi(x)
    std::function<double(double)> boundary_left;   // u(x_left, t)
    std::function<double(double)> boundary_right;  // u(x_right, t)

    void validate() const;
};

enum class Scheme { Direct, Fast };

/// Grid sizes plus every precomputed discretization coefficient the chosen
/// scheme needs (L1 history weights or SOE nodes + local weight).
struct Discretization {
    std::size_t n_space = 0;  // N spatial intervals
    std::size_t m_time = 0;   // M time steps
    double h = 0.0, tau = 0.0;
    WsgdWeights w;
    L1Coefficients l1;                     // direct scheme
    std::optional<SoeApproximation> soe;   // fast scheme
    double local_coeff = 0.0;              // fast scheme diagonal time weight
};

Discretization make_discretization(const ProblemSpec& spec, std::size_t n_space,
                                   std::size_t m_time, Scheme scheme,
                                   double soe_epsilon = 1e-9);

/// Grid values u^j_i. Level rows have N+1 entries with the boundary data in
/// place. In streaming mode the fast scheme retains only the two most recent
/// levels; rows that were dropped are empty.
struct SolutionField {
    std::size_t grid_points = 0;
    double tau = 0.0;
    double h = 0.0;
    bool streaming = false;
    std::vector<std::vector<double>> levels;

    const std::vector<double>& level(std::size_t j) const {
        if (j >= levels.size() || levels[j].empty())
            throw std::logic_error("SolutionField: level not retained");
        return levels[j];
    }
    std::size_t stored_levels() const;
    std::size_t top_level() const { return levels.empty() ? 0 : levels.size() - 1; }
};

/// Per-node history accumulators of the fast scheme, one row per SOE node
/// over the interior grid points. Empty until the second step.
struct HistoryState {
    std::vector<std::vector<double>> accumulators;
};

enum class SolverPath { Auto, Dense, Bicgstab, Gsf };

struct SolverOptions {
    SolveConfig krylov;
    SolverPath path = SolverPath::Auto;
    bool streaming = false;
    bool allow_gsf = true;
    /// Called after every accepted level (including level 0) with the full row.
    std::function<void(std::size_t level, double t, std::span<const double> row)> observer;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveStats {
    std::size_t steps = 0;
    std::size_t linear_solves = 0;
    double total_iterations = 0.0;
    double avg_iterations = 0.0;
    double wall_seconds = 0.0;
    std::string solver_path;
    std::size_t memory_scalars = 0;
};

struct SolveOutcome {
    SolutionField field;
    SolveStats stats;
};

/// Advance the direct scheme by one level: levels 0..j must be present,
/// level j+1 is appended.
void step_direct(SolutionField& state, std::size_t j, const ProblemSpec& spec,
                 const Discretization& disc, const SolveConfig& cfg);

/// Advance the fast scheme by one level, updating the SOE history state.
void step_fast(SolutionField& state, HistoryState& hist, std::size_t j,
               const ProblemSpec& spec, const Discretization& disc,
               const SolveConfig& cfg);

/// Run the whole time loop. The GSF path is picked automatically when the
/// diffusion coefficient is constant on the grid and the options allow it.
SolveOutcome solve(const ProblemSpec& spec, const Discretization& disc, Scheme scheme,
                   const SolverOptions& options = {});

}  // namespace gtsfde
