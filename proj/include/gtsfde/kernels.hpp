#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gtsfde {

/// Weighting function lambda(t) inside the generalized Caputo kernel.
/// lambda == 1 gives the classical Caputo derivative, lambda = e^{-bt}
/// the tempered one. Must stay positive on [0, T]; the stability theory
/// additionally assumes lambda'(t) <= 0.
class WeightingFunction {
public:
    enum class Kind { Constant, Tempered, Custom };

    static WeightingFunction constant();
    static WeightingFunction tempered(double decay);
    static WeightingFunction custom(std::function<double(double)> fn);

    double operator()(double t) const;
    Kind kind() const { return kind_; }
    /// Decay rate b of the tempered variant (0 for the constant one).
    double decay() const { return decay_; }
    bool is_tempered() const { return kind_ != Kind::Custom; }

private:
    WeightingFunction() = default;
    Kind kind_ = Kind::Constant;
    double decay_ = 0.0;
    std::function<double(double)> fn_;
};

/// Second-order shifted Grunwald weights w_0..w_K for the two-sided
/// Riemann-Liouville derivative of order alpha in (1, 2].
struct WsgdWeights {
    double alpha = 0.0;
    double kappa1 = 0.0, kappa0 = 0.0, kappa_m1 = 0.0;
    std::vector<double> w;

    std::size_t count() const { return w.size() - 1; }
};

/// Build WSGD weights. The Grunwald coefficients g_k are generated by the
/// recurrence g_k = (1 - (alpha+1)/k) g_{k-1} rather than binomials, so
/// large K stays stable.
WsgdWeights wsgd_weights(double alpha, std::size_t count);

/// Closed form of w_2 as a quartic in alpha. Matches wsgd_weights(alpha, 2).w[2]
/// to machine precision; its unique root in (1, 2) separates the sign of w_2.
double w2_value(double alpha);

/// Root alpha0 of w2_value in (1, 2): for alpha >= alpha0 all off-diagonal
/// weights are nonnegative and the spatial operator is diagonally dominant.
double wsgd_sign_change_alpha();

/// Generalized L1 coefficients c_0..c_{M-1} (units time^-gamma). Strictly
/// decreasing, with c_l > lambda(t_{l+1/2}) / (Gamma(1-gamma) t_{l+1}^gamma).
struct L1Coefficients {
    double gamma = 0.0;
    double tau = 0.0;
    std::vector<double> c;
};

L1Coefficients l1_coefficients(double gamma, const WeightingFunction& lambda,
                               double tau, std::size_t steps);

/// Sum-of-exponentials compression of t^-gamma on [delta, horizon]:
/// |t^-gamma - sum_k weights[k] e^{ -nodes[k] t }| < epsilon there.
struct SoeApproximation {
    double gamma = 0.0;
    double delta = 0.0;
    double horizon = 0.0;
    double epsilon = 0.0;
    std::vector<double> nodes;    // s_k > 0
    std::vector<double> weights;  // omega_k > 0
    double certified_error = 0.0; // max error over the certification sample

    std::size_t size() const { return nodes.size(); }
    double evaluate(double t) const;
};

struct SoeCertificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Construct an SOE approximation of t^-gamma and certify it against a
/// dense log-spaced sample of [delta, horizon]. Certification failure after
/// refinement is an error, never a silent pass.
SoeApproximation soe_build(double gamma, double delta, double horizon,
                           double epsilon);

/// Local-part time coefficient of the fast scheme for lambda = e^{-bt}:
/// (e^{-b tau} tau^{1-gamma} + b * int_0^tau e^{-b theta} theta^{1-gamma} dtheta)
/// / (tau Gamma(2-gamma)). Equals c_0 of the constant-weight L1 when b = 0.
double local_weight(double gamma, double b, double tau);

}  // namespace gtsfde
