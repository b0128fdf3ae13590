#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace gtsfde {

/// Shared Gamma-function entry point. Every coefficient formula in the
/// library goes through this so cross-term Gamma ratios stay consistent.
inline double gamma_fn(double x) { return std::tgamma(x); }

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive Gauss-Kronrod integration of f over [a, b] to the given
/// relative tolerance. Throws QuadratureError when the error estimate
/// does not meet the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

/// (l+1)^sigma - l^sigma without cancellation for large l.
inline double pow_diff(double l, double sigma) {
    if (l == 0.0) return 1.0;
    return std::pow(l, sigma) * std::expm1(sigma * std::log1p(1.0 / l));
}

}  // namespace gtsfde
