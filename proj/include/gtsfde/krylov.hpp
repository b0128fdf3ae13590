#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gtsfde {

enum class PreconditionerKind { None, Banded, SkewCirculant, ExactGsf };

struct SolveConfig {
    double rtol = 1e-12;
    int max_iter = 1000;
    PreconditionerKind preconditioner = PreconditionerKind::SkewCirculant;
    std::size_t bandwidth = 8;
};

enum class SolveStatus { Converged, MaxIterations, Breakdown };

struct SolveResult {
    std::vector<double> x;
    /// Full steps count 1.0, an exit at the intermediate residual counts 0.5.
    double iterations = 0.0;
    bool converged = false;
    double final_relative_residual = 0.0;
    SolveStatus status = SolveStatus::Converged;
};

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Right-preconditioned BiCGSTAB: iterates on A P^{-1}, so the stopping
/// criterion ||b - A x|| / ||b - A x0|| <= rtol is on the true residual.
/// Breakdown (vanishing rho or omega) is reported distinctly from running
/// out of iterations; in both failure modes the best iterate is returned.
SolveResult bicgstab(const LinearMap& apply_a, const LinearMap& apply_pinv,
                     std::span<const double> b, std::span<const double> x0,
                     const SolveConfig& cfg);

}  // namespace gtsfde
