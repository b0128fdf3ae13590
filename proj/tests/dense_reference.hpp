// Dense reference implementation of the implicit scheme: explicit matrix
// assembly and direct solves, no structured operators anywhere. Used as the
// oracle the fast paths are measured against.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "gtsfde/kernels.hpp"
#include "gtsfde/solver.hpp"

namespace gtsfde::testing {

inline Eigen::MatrixXd dense_wsgd_matrix(const WsgdWeights& w, std::size_t n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const long d = static_cast<long>(i) - static_cast<long>(j);
            if (d >= -1) m(i, j) = w.w[static_cast<std::size_t>(d + 1)];
        }
    return m;
}

/// Full direct-scheme run with dense assembly and LU solves.
inline std::vector<std::vector<double>> dense_direct_solve(const ProblemSpec& spec,
                                                           std::size_t n_space,
                                                           std::size_t m_time) {
    const double h = (spec.x_right - spec.x_left) / static_cast<double>(n_space);
    const double tau = spec.horizon / static_cast<double>(m_time);
    const std::size_t n = n_space - 1;

    std::vector<double> x(n_space + 1);
    for (std::size_t i = 0; i <= n_space; ++i)
        x[i] = spec.x_left + h * static_cast<double>(i);

    const WsgdWeights w = wsgd_weights(spec.alpha, n_space);
    const L1Coefficients l1 = l1_coefficients(spec.gamma, spec.lambda, tau, m_time);
    const Eigen::MatrixXd wm = dense_wsgd_matrix(w, n);
    const double hs = std::pow(h, spec.alpha);

    std::vector<std::vector<double>> u(m_time + 1, std::vector<double>(n_space + 1, 0.0));
    for (std::size_t i = 0; i <= n_space; ++i) u[0][i] = spec.initial(x[i]);
    if (spec.boundary_left) u[0][0] = spec.boundary_left(0.0);
    if (spec.boundary_right) u[0][n_space] = spec.boundary_right(0.0);

    for (std::size_t j = 0; j < m_time; ++j) {
        const double t1 = tau * static_cast<double>(j + 1);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = spec.xi(x[i + 1], t1);
            for (std::size_t k = 0; k < n; ++k)
                m(i, k) = -xi / hs * (spec.p * wm(i, k) + (1.0 - spec.p) * wm(k, i));
            m(i, i) += l1.c[0];
        }
        Eigen::VectorXd rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs(i) = l1.c[j] * u[0][i + 1];
        for (std::size_t s = 1; s <= j; ++s)
            for (std::size_t i = 0; i < n; ++i)
                rhs(i) += (l1.c[s - 1] - l1.c[s]) * u[j + 1 - s][i + 1];
        const double ul = spec.boundary_left ? spec.boundary_left(t1) : 0.0;
        const double ur = spec.boundary_right ? spec.boundary_right(t1) : 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const double xi = spec.xi(x[i], t1);
            if (spec.source) rhs(i - 1) += spec.source(x[i], t1);
            double bc = spec.p * w.w[i + 1] * ul + (1.0 - spec.p) * w.w[n_space - i + 1] * ur;
            if (i == n_space - 1) bc += spec.p * w.w[0] * ur;
            if (i == 1) bc += (1.0 - spec.p) * w.w[0] * ul;
            rhs(i - 1) += xi / hs * bc;
        }
        Eigen::VectorXd sol = m.partialPivLu().solve(rhs);
        for (std::size_t i = 0; i < n; ++i) u[j + 1][i + 1] = sol(i);
        u[j + 1][0] = ul;
        u[j + 1][n_space] = ur;
    }
    return u;
}

}  // namespace gtsfde::testing
