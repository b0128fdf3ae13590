#include "gtsfde/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace gtsfde {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

SolveResult bicgstab(const LinearMap& apply_a, const LinearMap& apply_pinv,
                     std::span<const double> b, std::span<const double> x0,
                     const SolveConfig& cfg) {
    const std::size_t n = b.size();
    if (x0.size() != n) throw std::invalid_argument("bicgstab: dimension mismatch");
    if (!(cfg.rtol > 0.0) || cfg.max_iter < 1)
        throw std::invalid_argument("bicgstab: invalid solve configuration");

    auto precond = [&](std::span<const double> v, std::span<double> out) {
        if (apply_pinv)
            apply_pinv(v, out);
        else
            std::copy(v.begin(), v.end(), out.begin());
    };

    SolveResult res;
    res.x.assign(x0.begin(), x0.end());

    std::vector<double> r(n), rhat(n), v(n), p(n), phat(n), s(n), shat(n), t(n), tmp(n);
    apply_a(res.x, tmp);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];

    const double r0_norm = norm2(r);
    if (r0_norm == 0.0) {
        res.converged = true;
        return res;
    }

    // true residual of the current iterate, refreshing the recurred one
    auto true_relative_residual = [&]() {
        apply_a(res.x, tmp);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
        return norm2(r) / r0_norm;
    };

    const double rho_floor = 1e-30 * r0_norm * r0_norm;
    double iterations = 0.0;
    SolveStatus reason = SolveStatus::MaxIterations;

    // Breakdown of the two-sided recurrence is cured by restarting with the
    // current residual as the shadow vector; a restart that makes no progress
    // ends the solve.
    double last_restart_residual = 2.0;  // anything above any relative residual
    bool done = false;
    while (!done) {
        const double rel_now = true_relative_residual();
        if (rel_now <= cfg.rtol) {
            res.converged = true;
            reason = SolveStatus::Converged;
            break;
        }
        if (rel_now >= last_restart_residual * 0.999) {
            reason = SolveStatus::Breakdown;  // stagnated across a restart
            break;
        }
        last_restart_residual = rel_now;
        rhat = r;
        std::fill(v.begin(), v.end(), 0.0);
        std::fill(p.begin(), p.end(), 0.0);
        double rho_old = 1.0, alpha = 1.0, omega = 1.0;

        while (iterations < cfg.max_iter) {
            const double rho = dot(rhat, r);
            if (std::abs(rho) < rho_floor) break;  // restart
            const double beta = (rho / rho_old) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
            precond(p, phat);
            apply_a(phat, v);
            const double denom = dot(rhat, v);
            if (std::abs(denom) < rho_floor) break;  // restart
            alpha = rho / denom;
            for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];

            if (norm2(s) / r0_norm <= cfg.rtol) {
                for (std::size_t i = 0; i < n; ++i) res.x[i] += alpha * phat[i];
                iterations += 0.5;
                if (true_relative_residual() <= cfg.rtol) {
                    res.converged = true;
                    reason = SolveStatus::Converged;
                    done = true;
                    break;
                }
                for (std::size_t i = 0; i < n; ++i) res.x[i] -= alpha * phat[i];
                iterations -= 0.5;
            }

            precond(s, shat);
            apply_a(shat, t);
            const double tt = dot(t, t);
            if (tt == 0.0) break;  // restart (s is in the null direction)
            omega = dot(t, s) / tt;
            if (std::abs(omega) < 1e-30) break;  // restart
            for (std::size_t i = 0; i < n; ++i) {
                res.x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
            }
            iterations += 1.0;
            if (norm2(r) / r0_norm <= cfg.rtol && true_relative_residual() <= cfg.rtol) {
                res.converged = true;
                reason = SolveStatus::Converged;
                done = true;
                break;
            }
            rho_old = rho;
        }
        if (iterations >= cfg.max_iter && !res.converged) {
            reason = SolveStatus::MaxIterations;
            break;
        }
    }

    res.iterations = iterations;
    res.status = reason;
    res.final_relative_residual = true_relative_residual();
    if (res.final_relative_residual <= cfg.rtol) res.converged = true;
    return res;
}

}  // namespace gtsfde
