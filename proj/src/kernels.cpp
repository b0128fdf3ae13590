#include "gtsfde/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gtsfde/numerics.hpp"

namespace gtsfde {

namespace {

// Embedded Gauss pair on [-1, 1]; the panel error estimate is |G15 - G7|.
constexpr double kG7[][2] = {
    {-0.9491079123427585, 0.12948496616887065}, {-0.7415311855993945, 0.2797053914892766},
    {-0.4058451513773972, 0.3818300505051183},  {0.0, 0.41795918367346896},
    {0.4058451513773972, 0.3818300505051183},   {0.7415311855993945, 0.2797053914892766},
    {0.9491079123427585, 0.12948496616887065}};
constexpr double kG15[][2] = {
    {-0.9879925180204854, 0.030753241996118647}, {-0.937273392400706, 0.07036604748810807},
    {-0.8482065834104272, 0.10715922046717177},  {-0.7244177313601701, 0.1395706779261539},
    {-0.5709721726085388, 0.16626920581699378},  {-0.3941513470775634, 0.18616100001556188},
    {-0.20119409399743451, 0.19843148532711125}, {0.0, 0.2025782419255609},
    {0.20119409399743451, 0.19843148532711125},  {0.3941513470775634, 0.18616100001556188},
    {0.5709721726085388, 0.16626920581699378},   {0.7244177313601701, 0.1395706779261539},
    {0.8482065834104272, 0.10715922046717177},   {0.937273392400706, 0.07036604748810807},
    {0.9879925180204854, 0.030753241996118647}};

struct Panel {
    double a, b, value, error;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double g7 = 0.0, g15 = 0.0;
    for (const auto& node : kG7) g7 += node[1] * f(mid + half * node[0]);
    for (const auto& node : kG15) g15 += node[1] * f(mid + half * node[0]);
    return {a, b, g15 * half, std::abs(g15 - g7) * half};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
    if (a == b) return 0.0;
    std::vector<Panel> active{evaluate_panel(f, a, b)};
    const std::size_t max_panels = 4000;
    for (std::size_t round = 0; round < 60; ++round) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            total += active[i].value;
            err += active[i].error;
            if (active[i].error > active[worst].error) worst = i;
        }
        const double scale = std::max(std::abs(total), 1e-300);
        if (err <= rel_tol * scale) return total;
        if (active.size() >= max_panels) break;
        // split the worst panel plus every panel close to it in error
        const double cut = 0.25 * active[worst].error;
        std::vector<Panel> next;
        next.reserve(2 * active.size());
        for (const Panel& p : active) {
            if (p.error >= cut && p.b - p.a > 1e-15 * std::abs(b - a)) {
                const double mid = 0.5 * (p.a + p.b);
                next.push_back(evaluate_panel(f, p.a, mid));
                next.push_back(evaluate_panel(f, mid, p.b));
            } else {
                next.push_back(p);
            }
        }
        active = std::move(next);
    }
    throw QuadratureError("adaptive quadrature did not reach the requested tolerance");
}

WeightingFunction WeightingFunction::constant() {
    WeightingFunction w;
    w.kind_ = Kind::Constant;
    return w;
}

WeightingFunction WeightingFunction::tempered(double decay) {
    if (decay < 0.0) throw std::invalid_argument("tempered decay rate must be >= 0");
    WeightingFunction w;
    w.kind_ = Kind::Tempered;
    w.decay_ = decay;
    return w;
}

WeightingFunction WeightingFunction::custom(std::function<double(double)> fn) {
    WeightingFunction w;
    w.kind_ = Kind::Custom;
    w.fn_ = std::move(fn);
    return w;
}

double WeightingFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::Constant: return 1.0;
        case Kind::Tempered: return std::exp(-decay_ * t);
        case Kind::Custom: return fn_(t);
    }
    return 1.0;
}

WsgdWeights wsgd_weights(double alpha, std::size_t count) {
    if (!(alpha > 1.0) || !(alpha <= 2.0))
        throw std::invalid_argument("wsgd_weights: alpha must lie in (1, 2]");
    if (count < 2) throw std::invalid_argument("wsgd_weights: need count >= 2");

    WsgdWeights out;
    out.alpha = alpha;
    out.kappa1 = (alpha * alpha + 3.0 * alpha + 2.0) / 12.0;
    out.kappa0 = (4.0 - alpha * alpha) / 6.0;
    out.kappa_m1 = (alpha * alpha - 3.0 * alpha + 2.0) / 12.0;

    std::vector<double> g(count + 1);
    g[0] = 1.0;
    for (std::size_t k = 1; k <= count; ++k)
        g[k] = (1.0 - (alpha + 1.0) / static_cast<double>(k)) * g[k - 1];

    out.w.resize(count + 1);
    out.w[0] = out.kappa1 * g[0];
    out.w[1] = out.kappa1 * g[1] + out.kappa0 * g[0];
    for (std::size_t k = 2; k <= count; ++k)
        out.w[k] = out.kappa1 * g[k] + out.kappa0 * g[k - 1] + out.kappa_m1 * g[k - 2];
    return out;
}

double w2_value(double alpha) {
    if (!(alpha > 1.0) || !(alpha <= 2.0))
        throw std::invalid_argument("w2_value: alpha must lie in (1, 2]");
    const double a = alpha;
    return (a * a * a * a + 6.0 * a * a * a + a * a - 24.0 * a + 4.0) / 24.0;
}

double wsgd_sign_change_alpha() {
    // w2_value is strictly increasing on (1, 2), so the root is unique.
    static const double root = [] {
        double lo = 1.0 + 1e-12, hi = 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (w2_value(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return root;
}

L1Coefficients l1_coefficients(double gamma, const WeightingFunction& lambda,
                               double tau, std::size_t steps) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("l1_coefficients: gamma must lie in (0, 1)");
    if (!(tau > 0.0)) throw std::invalid_argument("l1_coefficients: tau must be positive");
    if (steps == 0) throw std::invalid_argument("l1_coefficients: need at least one step");

    L1Coefficients out;
    out.gamma = gamma;
    out.tau = tau;
    out.c.resize(steps);

    const double pref = std::pow(tau, -gamma) / gamma_fn(2.0 - gamma);
    auto sample = [&](double t) {
        const double v = lambda(t);
        if (!(v > 0.0))
            throw std::invalid_argument("l1_coefficients: lambda must be positive on [0, M tau]");
        return v;
    };

    double lam_lo = sample(0.0);
    for (std::size_t l = 0; l < steps; ++l) {
        const double ld = static_cast<double>(l);
        const double a_l = pow_diff(ld, 1.0 - gamma);
        const double b_l = pow_diff(ld, 2.0 - gamma) / (2.0 - gamma) -
                           0.5 * (std::pow(ld + 1.0, 1.0 - gamma) + std::pow(ld, 1.0 - gamma));
        const double lam_mid = sample((ld + 0.5) * tau);
        const double lam_hi = sample((ld + 1.0) * tau);
        out.c[l] = pref * (lam_mid * a_l + (lam_lo - lam_hi) * b_l);
        lam_lo = lam_hi;
    }
    return out;
}

double SoeApproximation::evaluate(double t) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        acc += weights[k] * std::exp(-nodes[k] * t);
    return acc;
}

namespace {

// One construction pass: trapezoid rule on the log axis for
// t^-gamma = (1/Gamma(gamma)) int exp(gamma*y - t e^y) dy, with the
// slowly-varying lower tail collapsed into a single moment-matched node.
SoeApproximation soe_pass(double gamma, double delta, double horizon, double epsilon,
                          double step_shrink, double range_pad, double merge_shrink) {
    SoeApproximation soe;
    soe.gamma = gamma;
    soe.delta = delta;
    soe.horizon = horizon;
    soe.epsilon = epsilon;

    const double gam_g = gamma_fn(gamma);
    const double eps_rel = epsilon * std::pow(delta, gamma);
    const double strip = 1.30;
    const double h = step_shrink * 2.0 * std::numbers::pi * strip / std::log(30.0 / eps_rel);

    // Lower truncation: dropped mass below e^A is at most epsilon/6.
    const double a_cut =
        std::log(epsilon * gamma_fn(gamma + 1.0) / 6.0) / gamma - range_pad;

    // Upper truncation: find B with u^{gamma-1} e^{-delta u} / (delta Gamma(gamma)) <= epsilon/6.
    double lo = 1.0 / horizon, hi = 1e6 * std::log(30.0 / eps_rel) / delta;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double tail = std::pow(mid, gamma - 1.0) * std::exp(-delta * mid) / (delta * gam_g);
        (tail > epsilon / 6.0 ? lo : hi) = mid;
    }
    const double b_cut = std::log(hi) + range_pad;

    // Nodes below s_merge contribute an almost constant exponential over
    // [0, horizon]; replace the block by its first-moment match.
    const double s_merge = merge_shrink *
        std::pow(epsilon * gam_g * (gamma + 2.0) / (6.0 * horizon * horizon),
                 1.0 / (gamma + 2.0));

    double merged_w = 0.0, merged_ws = 0.0;
    for (double y = a_cut; y <= b_cut; y += h) {
        const double s = std::exp(y);
        const double w = h * std::exp(gamma * y) / gam_g;
        if (s < s_merge) {
            merged_w += w;
            merged_ws += w * s;
        } else {
            soe.nodes.push_back(s);
            soe.weights.push_back(w);
        }
    }
    if (merged_w > 0.0) {
        soe.nodes.insert(soe.nodes.begin(), merged_ws / merged_w);
        soe.weights.insert(soe.weights.begin(), merged_w);
    }
    return soe;
}

double certify(const SoeApproximation& soe, std::size_t samples = 10000) {
    const double la = std::log(soe.delta), lb = std::log(soe.horizon);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = std::exp(la + (lb - la) * static_cast<double>(i) /
                                           static_cast<double>(samples - 1));
        worst = std::max(worst, std::abs(std::pow(t, -soe.gamma) - soe.evaluate(t)));
    }
    return worst;
}

}  // namespace

SoeApproximation soe_build(double gamma, double delta, double horizon, double epsilon) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("soe_build: gamma must lie in (0, 1)");
    if (!(delta > 0.0) || !(delta < horizon))
        throw std::invalid_argument("soe_build: need 0 < delta < horizon");
    if (!(epsilon > 0.0)) throw std::invalid_argument("soe_build: epsilon must be positive");

    double shrink = 1.0, pad = 0.0, merge = 1.0;
    for (int round = 0; round < 4; ++round) {
        SoeApproximation soe = soe_pass(gamma, delta, horizon, epsilon, shrink, pad, merge);
        soe.certified_error = certify(soe);
        if (soe.certified_error < epsilon) return soe;
        shrink *= 0.8;
        pad += 0.5;
        merge *= 0.25;
    }
    throw SoeCertificationError("soe_build: certification failed after refinement");
}

double local_weight(double gamma, double b, double tau) {
    if (b < 0.0) throw std::invalid_argument("local_weight: b must be >= 0");
    if (!(tau > 0.0)) throw std::invalid_argument("local_weight: tau must be positive");
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("local_weight: gamma must lie in (0, 1)");

    double value = std::exp(-b * tau) * std::pow(tau, 1.0 - gamma);
    if (b > 0.0) {
        // theta = u^4 flattens the theta^{1-gamma} endpoint so the panel
        // error estimates certify the requested tolerance
        value += b * integrate(
                         [&](double u) {
                             const double theta = u * u * u * u;
                             return std::exp(-b * theta) * std::pow(theta, 1.0 - gamma) *
                                    4.0 * u * u * u;
                         },
                         0.0, std::pow(tau, 0.25), 1e-12);
    }
    return value / (tau * gamma_fn(2.0 - gamma));
}

}  // namespace gtsfde
