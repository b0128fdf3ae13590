#pragma once

#include <functional>
#include <optional>
#include <string>

#include "gtsfde/solver.hpp"

namespace gtsfde {

/// A ProblemSpec bundled with its exact solution (when one exists) and, for
/// the splitting construction, a closed-form addend that has to be added to
/// the numeric field to recover the reported solution.
struct ManufacturedProblem {
    std::string id;
    double gamma = 0.0, alpha = 0.0, b = 0.0, p = 0.0;
    ProblemSpec spec;
    std::function<double(double, double)> exact;   // null when unavailable
    std::function<double(double, double)> addend;  // null when not needed
};

/// Smooth manufactured problem on [0,2] x [0,1] with xi = 1 + x^2 + sin t and
/// exact solution g(t) x^2 (2-x)^2, tempered weighting e^{-bt}, b > 0.
ManufacturedProblem example1(double gamma, double alpha, double b, double p);

/// Splitting problem on [0,1]^2 with constant xi: the nonsmooth part
/// 5 x^3 (1-x)^3 [1 - sqrt(t) e^{-bt} / Gamma(1.5)] is closed form and the
/// remainder v solves the auxiliary problem carried by `spec`. No exact
/// solution; errors are estimated on two grids.
ManufacturedProblem example2(double gamma, double alpha, double b, double p, double xi_const);

/// Example 1 with the diffusion coefficient scaled to 10 (1/2 + x^2 + sin t).
ManufacturedProblem exampleA1(double gamma, double alpha, double b, double p);

/// Max-over-levels norms of the differences on the grid. The discrete L2
/// norm is sqrt(h * sum over interior points).
struct ErrorReport {
    double error_inf = 0.0;
    double error_l2 = 0.0;
    double final_inf = 0.0;
    double final_l2 = 0.0;
};

/// Errors of a stored field against an exact solution.
ErrorReport compute_errors(const SolutionField& numeric,
                           const std::function<double(double, double)>& exact,
                           double x_left, double h);

/// Two-grid errors: coarse levels are compared with the fine solution at the
/// shared time levels. Grids must share the spatial mesh and the fine time
/// step must refine the coarse one.
ErrorReport compute_errors(const SolutionField& coarse, const SolutionField& fine);

/// log(e_coarse / e_fine) / log(ratio).
double convergence_rate(double e_coarse, double e_fine, double ratio);

}  // namespace gtsfde
