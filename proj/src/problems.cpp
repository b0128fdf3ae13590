#include "gtsfde/problems.hpp"

#include <cmath>

#include "gtsfde/numerics.hpp"

namespace gtsfde {

namespace {

double two_sided_power(double p, double x, double mirror, double expo) {
    return p * std::pow(x, expo) + (1.0 - p) * std::pow(mirror - x, expo);
}

ManufacturedProblem example1_impl(double gamma, double alpha, double b, double p,
                                  double xi_scale, double xi_base, const char* id) {
    if (!(b > 0.0)) throw std::invalid_argument("example1: b must be positive (g(t) is defined for b > 0)");

    ManufacturedProblem mp;
    mp.id = id;
    mp.gamma = gamma;
    mp.alpha = alpha;
    mp.b = b;
    mp.p = p;

    auto g = [b](double t) {
        return 1.0 + (2.0 - (2.0 + 2.0 * b * t + b * b * t * t) * std::exp(-b * t)) / (b * b * b);
    };
    auto xi = [xi_scale, xi_base](double x, double t) {
        return xi_scale * (xi_base + x * x + std::sin(t));
    };

    const double g3 = gamma_fn(3.0) / gamma_fn(3.0 - alpha);
    const double g4 = gamma_fn(4.0) / gamma_fn(4.0 - alpha);
    const double g5 = gamma_fn(5.0) / gamma_fn(5.0 - alpha);
    const double gt = 2.0 / gamma_fn(4.0 - gamma);

    mp.spec.x_left = 0.0;
    mp.spec.x_right = 2.0;
    mp.spec.horizon = 1.0;
    mp.spec.gamma = gamma;
    mp.spec.alpha = alpha;
    mp.spec.p = p;
    mp.spec.lambda = WeightingFunction::tempered(b);
    mp.spec.xi = xi;
    mp.spec.source = [=](double x, double t) {
        const double a_poly = x * x * (2.0 - x) * (2.0 - x);
        const double bracket = 4.0 * g3 * two_sided_power(p, x, 2.0, 2.0 - alpha) -
                               4.0 * g4 * two_sided_power(p, x, 2.0, 3.0 - alpha) +
                               g5 * two_sided_power(p, x, 2.0, 4.0 - alpha);
        return gt * std::pow(t, 3.0 - gamma) * std::exp(-b * t) * a_poly -
               g(t) * xi(x, t) * bracket;
    };
    mp.spec.initial = [g](double x) { return g(0.0) * x * x * (2.0 - x) * (2.0 - x); };
    mp.spec.boundary_left = [](double) { return 0.0; };
    mp.spec.boundary_right = [](double) { return 0.0; };
    mp.exact = [g](double x, double t) { return g(t) * x * x * (2.0 - x) * (2.0 - x); };
    return mp;
}

}  // namespace

ManufacturedProblem example1(double gamma, double alpha, double b, double p) {
    return example1_impl(gamma, alpha, b, p, 1.0, 1.0, "1");
}

ManufacturedProblem exampleA1(double gamma, double alpha, double b, double p) {
    return example1_impl(gamma, alpha, b, p, 10.0, 0.5, "A1");
}

ManufacturedProblem example2(double gamma, double alpha, double b, double p, double xi_const) {
    if (!(xi_const > 0.0)) throw std::invalid_argument("example2: xi must be positive");

    ManufacturedProblem mp;
    mp.id = "2";
    mp.gamma = gamma;
    mp.alpha = alpha;
    mp.b = b;
    mp.p = p;

    const double q3 = gamma_fn(4.0) / gamma_fn(4.0 - alpha);
    const double q4 = 3.0 * gamma_fn(5.0) / gamma_fn(5.0 - alpha);
    const double q5 = 3.0 * gamma_fn(6.0) / gamma_fn(6.0 - alpha);
    const double q6 = gamma_fn(7.0) / gamma_fn(7.0 - alpha);
    auto q = [=](double x) {
        return q3 * two_sided_power(p, x, 1.0, 3.0 - alpha) -
               q4 * two_sided_power(p, x, 1.0, 4.0 - alpha) +
               q5 * two_sided_power(p, x, 1.0, 5.0 - alpha) -
               q6 * two_sided_power(p, x, 1.0, 6.0 - alpha);
    };

    const double inv_g15 = 1.0 / gamma_fn(1.5);
    const double ga = 1.0 / gamma_fn(1.5 - gamma);
    const double gb = b / gamma_fn(2.5 - gamma);
    auto smooth_factor = [=](double t) { return 1.0 - std::sqrt(t) * std::exp(-b * t) * inv_g15; };

    // The auxiliary problem for v: zero data, source assembled from the
    // nonsmooth closed-form part.
    mp.spec.x_left = 0.0;
    mp.spec.x_right = 1.0;
    mp.spec.horizon = 1.0;
    mp.spec.gamma = gamma;
    mp.spec.alpha = alpha;
    mp.spec.p = p;
    mp.spec.lambda = WeightingFunction::tempered(b);
    mp.spec.xi = [xi_const](double, double) { return xi_const; };
    mp.spec.source = [=](double x, double t) {
        const double poly = 5.0 * x * x * x * (1.0 - x) * (1.0 - x) * (1.0 - x);
        const double tpart =
            (ga * std::pow(t, 0.5 - gamma) - gb * std::pow(t, 1.5 - gamma)) * std::exp(-b * t);
        return poly * tpart + 5.0 * xi_const * q(x) * smooth_factor(t);
    };
    mp.spec.initial = [](double) { return 0.0; };
    mp.spec.boundary_left = [](double) { return 0.0; };
    mp.spec.boundary_right = [](double) { return 0.0; };

    // Reported solution: u = 5 x^3 (1-x)^3 [1 - sqrt(t) e^{-bt}/Gamma(1.5)] + v.
    mp.addend = [=](double x, double t) {
        return 5.0 * x * x * x * (1.0 - x) * (1.0 - x) * (1.0 - x) * smooth_factor(t);
    };
    return mp;
}

namespace {

void accumulate(ErrorReport& rep, std::span<const double> a, std::span<const double> b,
                double h, bool final_level) {
    double worst = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        worst = std::max(worst, d);
        if (i > 0 && i + 1 < a.size()) sq += d * d;  // interior-point L2 norm
    }
    const double l2 = std::sqrt(h * sq);
    rep.error_inf = std::max(rep.error_inf, worst);
    rep.error_l2 = std::max(rep.error_l2, l2);
    if (final_level) {
        rep.final_inf = worst;
        rep.final_l2 = l2;
    }
}

}  // namespace

ErrorReport compute_errors(const SolutionField& numeric,
                           const std::function<double(double, double)>& exact,
                           double x_left, double h) {
    if (!exact) throw std::invalid_argument("compute_errors: exact solution is required");
    ErrorReport rep;
    const std::size_t points = numeric.grid_points;
    std::vector<double> row(points);
    for (std::size_t j = 0; j < numeric.levels.size(); ++j) {
        if (numeric.levels[j].empty()) continue;
        const double t = numeric.tau * static_cast<double>(j);
        for (std::size_t i = 0; i < points; ++i)
            row[i] = exact(x_left + h * static_cast<double>(i), t);
        accumulate(rep, numeric.levels[j], row, h, j + 1 == numeric.levels.size());
    }
    return rep;
}

ErrorReport compute_errors(const SolutionField& coarse, const SolutionField& fine) {
    if (coarse.grid_points != fine.grid_points)
        throw std::invalid_argument("compute_errors: spatial grids differ");
    const std::size_t mc = coarse.levels.size() - 1, mf = fine.levels.size() - 1;
    if (mc == 0 || mf % mc != 0)
        throw std::invalid_argument("compute_errors: time grids are not nested");
    const std::size_t ratio = mf / mc;
    ErrorReport rep;
    for (std::size_t j = 0; j <= mc; ++j) {
        if (coarse.levels[j].empty() || fine.levels[j * ratio].empty()) continue;
        accumulate(rep, coarse.levels[j], fine.levels[j * ratio], coarse.h, j == mc);
    }
    return rep;
}

double convergence_rate(double e_coarse, double e_fine, double ratio) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0))
        throw std::invalid_argument("convergence_rate: errors must be positive");
    if (!(ratio > 1.0)) throw std::invalid_argument("convergence_rate: ratio must exceed 1");
    return std::log(e_coarse / e_fine) / std::log(ratio);
}

}  // namespace gtsfde
