// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Expected values and tolerances are pinned in code.
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dense_reference.hpp"
#include "gtsfde/experiment.hpp"
#include "gtsfde/numerics.hpp"
#include "gtsfde/problems.hpp"
#include "gtsfde/solver.hpp"

using namespace gtsfde;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw Failure(msg);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5g", v);
    return buf;
}

struct RunSummary {
    ErrorReport errors;
    SolveStats stats;
    SolutionField field;
};

// Convergence-study runs use rtol 1e-9: the measured discretization errors
// sit 4+ orders above it, while residuals below ~4e-10 are unattainable in
// double precision once xi/h^alpha dwarfs c0 (coarse tau, fine h; worst at
// alpha = 1.9, h = 2^-12). Criterion 7 pins the published 1e-12 stopping rule
// in the regime it was reported for.
SolverOptions study_options() {
    SolverOptions opt;
    opt.krylov.rtol = 1e-9;
    return opt;
}

RunSummary run_manufactured(const ManufacturedProblem& mp, std::size_t n, std::size_t m,
                            Scheme scheme, SolverOptions opt = study_options(),
                            double soe_eps = 1e-9, double horizon_override = 0.0) {
    ProblemSpec spec = mp.spec;
    if (horizon_override > 0.0) spec.horizon = horizon_override;
    const Discretization disc = make_discretization(spec, n, m, scheme, soe_eps);
    RunSummary rs;
    SolveOutcome out = solve(spec, disc, scheme, opt);
    rs.stats = out.stats;
    rs.field = std::move(out.field);
    if (mp.exact) rs.errors = compute_errors(rs.field, mp.exact, spec.x_left, rs.field.h);
    return rs;
}

// Reference temporal sweep at h = 2^-12, b = 1, p = 0.7; shared by the
// first two criteria.
struct TemporalSweep {
    std::vector<double> errors;  // Error_inf at M = 8, 16, 32, 64
};

const TemporalSweep& temporal_sweep(double gamma, double alpha) {
    static std::map<std::pair<double, double>, TemporalSweep> cache;
    const auto key = std::make_pair(gamma, alpha);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const ManufacturedProblem mp = example1(gamma, alpha, 1.0, 0.7);
    TemporalSweep sweep;
    for (std::size_t m : {8, 16, 32, 64}) {
        const RunSummary rs = run_manufactured(mp, 8192, m, Scheme::Direct);
        sweep.errors.push_back(rs.errors.error_inf);
    }
    return cache.emplace(key, std::move(sweep)).first->second;
}

double fitted_slope(const std::vector<double>& ms, const std::vector<double>& errs) {
    // least squares of ln E against ln tau; tau = 1/M so the slope sign flips
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const double x = -std::log(ms[i]);  // ln tau up to a constant
        const double y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

void criterion1_temporal_table(std::ostream& log) {
    const std::vector<double> expected{1.0328e-3, 3.7458e-4, 1.3450e-4, 4.8098e-5};
    const std::vector<double> expected_rates{1.4632, 1.4777, 1.4836};
    const TemporalSweep& sweep = temporal_sweep(0.5, 1.5);
    for (std::size_t k = 0; k < expected.size(); ++k) {
        const double rel = std::abs(sweep.errors[k] - expected[k]) / expected[k];
        log << "  M=" << (8u << k) << " err=" << num(sweep.errors[k]) << " (ref "
            << num(expected[k]) << ", rel dev " << num(rel) << ")\n";
        require(rel <= 0.02, "temporal error at row " + std::to_string(k) + " deviates " +
                                 num(rel) + " (> 2%)");
    }
    for (std::size_t k = 0; k < expected_rates.size(); ++k) {
        const double rate = convergence_rate(sweep.errors[k], sweep.errors[k + 1], 2.0);
        log << "  rate " << num(rate) << " (ref " << num(expected_rates[k]) << ")\n";
        require(std::abs(rate - expected_rates[k]) <= 0.05,
                "temporal rate " + num(rate) + " outside " + num(expected_rates[k]) + " +- 0.05");
    }
}

void criterion2_temporal_trend(std::ostream& log) {
    const std::vector<std::pair<double, double>> pairs{{0.2, 1.1}, {0.5, 1.5}, {0.9, 1.9}};
    for (const auto& [gamma, alpha] : pairs) {
        const TemporalSweep& sweep = temporal_sweep(gamma, alpha);
        const double slope = fitted_slope({8, 16, 32, 64}, sweep.errors);
        log << "  gamma=" << gamma << " fitted rate " << num(slope) << " (target "
            << num(2.0 - gamma) << ")\n";
        require(slope >= 2.0 - gamma - 0.15 && slope <= 2.0 - gamma + 0.1,
                "fitted temporal rate " + num(slope) + " outside [2-gamma-0.15, 2-gamma+0.1]");
    }
}

void criterion3_spatial_table(std::ostream& log) {
    const std::vector<double> expected{6.6930e-2, 1.6307e-2, 3.9886e-3, 9.7927e-4};
    const std::vector<double> expected_rate2{2.0435, 2.0391, 2.0353};
    const ManufacturedProblem mp = example1(0.9, 1.9, 2.0, 0.7);
    std::vector<double> errs, errs_l2;
    std::size_t n = 8;
    for (std::size_t k = 0; k < 4; ++k, n *= 2) {
        const RunSummary rs = run_manufactured(mp, n, 1024, Scheme::Direct);
        errs.push_back(rs.errors.error_inf);
        errs_l2.push_back(rs.errors.error_l2);
        const double rel = std::abs(errs.back() - expected[k]) / expected[k];
        log << "  N=" << n << " err=" << num(errs.back()) << " (ref " << num(expected[k])
            << ", rel dev " << num(rel) << ")\n";
        require(rel <= 0.02,
                "spatial error at N=" + std::to_string(n) + " deviates " + num(rel) + " (> 2%)");
    }
    for (std::size_t k = 0; k + 1 < errs_l2.size(); ++k) {
        const double rate = convergence_rate(errs_l2[k], errs_l2[k + 1], 2.0);
        log << "  L2 rate " << num(rate) << " (ref " << num(expected_rate2[k]) << ")\n";
        require(std::abs(rate - expected_rate2[k]) <= 0.05,
                "spatial L2 rate " + num(rate) + " outside " + num(expected_rate2[k]) +
                    " +- 0.05");
    }
}

void criterion4_nonsmooth_two_grid(std::ostream& log) {
    const std::vector<double> expected_rates{1.111, 1.079, 1.057};
    const ManufacturedProblem mp = example2(0.5, 1.5, 3.0, 0.4, 5.0);
    std::map<std::size_t, SolutionField> fields;
    for (std::size_t m : {20, 40, 80, 160, 320})
        fields[m] = run_manufactured(mp, 2048, m, Scheme::Direct).field;

    // reported solution includes the closed-form nonsmooth part (it cancels
    // in the two-grid difference, so the fields can be compared directly)
    std::vector<double> diffs;
    for (std::size_t m : {20, 40, 80, 160}) {
        const ErrorReport er = compute_errors(fields[m], fields[2 * m]);
        diffs.push_back(er.final_inf);
        log << "  tau=1/" << m << " vs 1/" << 2 * m << ": final-time diff " << num(er.final_inf)
            << "\n";
    }
    for (std::size_t k = 0; k < expected_rates.size(); ++k) {
        const double rate = convergence_rate(diffs[k], diffs[k + 1], 2.0);
        log << "  two-grid rate " << num(rate) << " (ref " << num(expected_rates[k]) << ")\n";
        require(std::abs(rate - expected_rates[k]) <= 0.08,
                "two-grid temporal rate " + num(rate) + " outside " + num(expected_rates[k]) +
                    " +- 0.08");
    }
}

void criterion5_fast_scheme_fidelity(std::ostream& log) {
    const ManufacturedProblem mp = exampleA1(0.5, 1.5, 1.0, 0.7);
    const double ref_direct = 4.8279e-2, ref_fast = 4.8274e-2;
    for (std::size_t n : {10, 20, 40, 80}) {
        const RunSummary direct = run_manufactured(mp, n, 2048, Scheme::Direct);
        const RunSummary fast = run_manufactured(mp, n, 2048, Scheme::Fast);
        const double gap = std::abs(direct.errors.error_inf - fast.errors.error_inf);
        log << "  N=" << n << " direct=" << num(direct.errors.error_inf)
            << " fast=" << num(fast.errors.error_inf) << " |gap|=" << num(gap) << "\n";
        require(gap <= 1e-5, "fast/direct error gap " + num(gap) + " exceeds 1e-5 at N=" +
                                 std::to_string(n));
        if (n == 10) {
            require(std::abs(direct.errors.error_inf - ref_direct) / ref_direct <= 0.02,
                    "direct error " + num(direct.errors.error_inf) + " deviates from " +
                        num(ref_direct) + " by more than 2%");
            require(std::abs(fast.errors.error_inf - ref_fast) / ref_fast <= 0.02,
                    "fast error " + num(fast.errors.error_inf) + " deviates from " +
                        num(ref_fast) + " by more than 2%");
        }
    }
}

void criterion6_coupled_sweep(std::ostream& log) {
    const std::vector<double> expected_rates{1.1870, 1.0922, 1.1380};
    const ManufacturedProblem mp = exampleA1(0.9, 1.9, 1.0, 0.7);
    std::vector<double> errs;
    std::vector<std::size_t> ms{128, 256, 512, 1024};
    for (std::size_t m : ms) {
        const std::size_t n = static_cast<std::size_t>(
            std::ceil(2.0 * std::pow(static_cast<double>(m), (2.0 - 0.9) / 2.0)));
        const RunSummary rs = run_manufactured(mp, n, m, Scheme::Direct);
        errs.push_back(rs.errors.error_inf);
        log << "  M=" << m << " N=" << n << " err=" << num(errs.back()) << "\n";
    }
    for (std::size_t k = 0; k < expected_rates.size(); ++k) {
        const double rate = convergence_rate(errs[k], errs[k + 1], 2.0);
        log << "  rate " << num(rate) << " (ref " << num(expected_rates[k]) << ")\n";
        require(std::abs(rate - expected_rates[k]) <= 0.08,
                "coupled-sweep rate " + num(rate) + " outside " + num(expected_rates[k]) +
                    " +- 0.08");
    }
}

void criterion7_preconditioner_effectiveness(std::ostream& log) {
    // tau = 2^-12 kept, horizon trimmed to 64 steps
    const double horizon = 64.0 / 4096.0;

    auto average_iters = [&](double gamma, double alpha, std::size_t n,
                             PreconditionerKind pre) {
        const ManufacturedProblem mp = example1(gamma, alpha, 1.0, 0.7);
        SolverOptions opt;
        opt.path = SolverPath::Bicgstab;
        opt.krylov.preconditioner = pre;
        opt.krylov.rtol = 1e-12;  // the published stopping criterion
        opt.krylov.max_iter = 2000;
        const RunSummary rs =
            run_manufactured(mp, n, 64, Scheme::Direct, opt, 1e-9, horizon);
        return rs.stats.avg_iterations;
    };

    const double skew_small = average_iters(0.5, 1.5, 128, PreconditionerKind::SkewCirculant);
    const double skew_large = average_iters(0.5, 1.5, 1024, PreconditionerKind::SkewCirculant);
    log << "  skew-circulant avg iters: N=128 -> " << num(skew_small) << ", N=1024 -> "
        << num(skew_large) << "\n";
    require(skew_large <= 25.0, "skew-circulant average iterations " + num(skew_large) +
                                    " exceed 25 at N=1024");
    require(skew_large <= 1.5 * skew_small,
            "skew-circulant iterations grow by more than 1.5x from N=128 to N=1024");

    bool unpreconditioned_struggles = false;
    std::string note;
    try {
        const double plain = average_iters(0.2, 1.1, 256, PreconditionerKind::None);
        note = "avg iters " + num(plain);
        unpreconditioned_struggles = plain > 100.0;
    } catch (const SolverError& e) {
        note = std::string("failed: ") + e.what();
        unpreconditioned_struggles = true;
    }
    log << "  unpreconditioned (0.2,1.1) N=256: " << note << "\n";
    require(unpreconditioned_struggles,
            "unpreconditioned BiCGSTAB neither exceeded 100 iterations nor failed");
}

void criterion8_dense_oracle_equivalence(std::ostream& log) {
    double worst = 0.0;
    for (double gamma : {0.2, 0.5, 0.9})
        for (double alpha : {1.1, 1.5, 1.9})
            for (double p : {0.0, 0.5, 1.0}) {
                const ManufacturedProblem mp = example1(gamma, alpha, 1.0, p);
                SolverOptions opt;
                opt.path = SolverPath::Bicgstab;
                const RunSummary rs = run_manufactured(mp, 17, 8, Scheme::Direct, opt);
                const auto dense = testing::dense_direct_solve(mp.spec, 17, 8);
                double scale = 0.0, diff = 0.0;
                for (std::size_t j = 0; j < dense.size(); ++j)
                    for (std::size_t i = 0; i < dense[j].size(); ++i) {
                        scale = std::max(scale, std::abs(dense[j][i]));
                        diff = std::max(diff, std::abs(dense[j][i] - rs.field.levels[j][i]));
                    }
                const double rel = diff / std::max(scale, 1.0);
                worst = std::max(worst, rel);
                require(rel <= 1e-10, "structured vs dense deviation " + num(rel) +
                                          " at (gamma,alpha,p)=(" + num(gamma) + "," +
                                          num(alpha) + "," + num(p) + ")");
            }
    log << "  worst relative deviation over 27 runs: " << num(worst) << "\n";
}

void criterion9_soe_certification(std::ostream& log) {
    for (double gamma : {0.2, 0.5, 0.9})
        for (double eps : {1e-6, 1e-9}) {
            const SoeApproximation soe = soe_build(gamma, 1e-3, 1.0, eps);
            double worst = 0.0;
            for (int i = 0; i < 10000; ++i) {
                const double t = std::exp(std::log(1e-3) +
                                          (0.0 - std::log(1e-3)) * i / 9999.0);
                worst = std::max(worst, std::abs(std::pow(t, -gamma) - soe.evaluate(t)));
            }
            log << "  gamma=" << gamma << " eps=" << num(eps) << ": n_exp=" << soe.size()
                << " max err=" << num(worst) << "\n";
            require(worst < eps, "certified SOE error " + num(worst) + " not below " + num(eps));
            require(soe.size() < 80, "n_exp = " + std::to_string(soe.size()) + " not below 80");
        }
}

void criterion10_structure_exactness(std::ostream& log) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    // Toeplitz matvec vs dense
    for (std::size_t n : {7, 33, 64}) {
        std::vector<double> col(n), row(n), v(n);
        for (auto& x : col) x = dist(rng);
        for (auto& x : row) x = dist(rng);
        for (auto& x : v) x = dist(rng);
        row[0] = col[0];
        const ToeplitzMatrix t(col, row);
        const auto fast = toeplitz_matvec(t, v);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += t.entry(i, j) * v[j];
            require(std::abs(fast[i] - acc) <= 1e-12 * std::max(std::abs(acc), 1.0),
                    "Toeplitz matvec deviates from dense at n=" + std::to_string(n));
        }
    }

    // common operator for the factorizations
    const std::size_t big_n = 48, n = big_n - 1;
    const WsgdWeights w = wsgd_weights(1.5, big_n);
    std::vector<double> xi(n);
    for (std::size_t i = 0; i < n; ++i)
        xi[i] = 1.0 + std::pow(0.125 * static_cast<double>(i + 1), 2.0);
    const double c0 = 3.1;
    SystemOperator op(c0, 2.0 / big_n, 1.5, 0.7, xi, ToeplitzMatrix::wsgd(w, n));
    const std::vector<double> d = op.dense();
    Eigen::MatrixXd dense(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dense(i, j) = d[i * n + j];
    std::vector<double> y(n);
    for (auto& x : y) x = dist(rng);

    // skew-circulant inverse vs dense wrap-rule solve
    {
        const SkewCirculantFactor pre = SkewCirculantFactor::from_operator(op);
        std::vector<double> s(n);
        for (std::size_t m = 0; m + 1 < n; ++m) s[m] = op.toeplitz().first_col[m];
        s[n - 1] = -op.toeplitz().first_row[1];
        Eigen::MatrixXd skw(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                skw(i, j) = i >= j ? s[i - j] : -s[n + i - j];
        const double hs = std::pow(op.h(), op.alpha());
        const Eigen::MatrixXd pd = c0 * Eigen::MatrixXd::Identity(n, n) -
                                   op.mean_xi() / hs *
                                       (0.7 * skw + 0.3 * skw.transpose());
        const Eigen::VectorXd oracle =
            pd.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
        std::vector<double> z(n);
        pre.solve(y, z);
        for (std::size_t i = 0; i < n; ++i)
            require(std::abs(z[i] - oracle(i)) <= 1e-11 * std::max(oracle.norm(), 1.0),
                    "skew-circulant inverse deviates from the dense oracle");
    }

    // banded LU vs dense truncation
    {
        const std::size_t ell = 5;
        const BandedFactor banded = BandedFactor::from_operator(op, ell);
        Eigen::MatrixXd trunc = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i > j + ell || j > i + ell) continue;
                trunc(i, j) = -xi[i] / std::pow(op.h(), op.alpha()) *
                              (0.7 * op.toeplitz().entry(i, j) +
                               0.3 * op.toeplitz().entry(j, i));
                if (i == j) trunc(i, j) += c0;
            }
        const Eigen::VectorXd oracle =
            trunc.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
        std::vector<double> z(n);
        banded.solve(y, z);
        for (std::size_t i = 0; i < n; ++i)
            require(std::abs(z[i] - oracle(i)) <= 1e-11 * std::max(oracle.norm(), 1.0),
                    "banded solve deviates from the dense truncated oracle");
    }

    // GSF apply vs dense inverse (constant coefficient)
    {
        SystemOperator cop(c0, 2.0 / big_n, 1.5, 0.7, std::vector<double>(n, 1.7),
                           ToeplitzMatrix::wsgd(w, n), true);
        const GsfInverse gsf = GsfInverse::from_operator(cop);
        const std::vector<double> dc = cop.dense();
        Eigen::MatrixXd cd(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) cd(i, j) = dc[i * n + j];
        const Eigen::VectorXd oracle =
            cd.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
        std::vector<double> z(n);
        gsf.apply(y, z);
        for (std::size_t i = 0; i < n; ++i)
            require(std::abs(z[i] - oracle(i)) <= 1e-10 * std::max(oracle.norm(), 1.0),
                    "GSF apply deviates from the dense inverse");
    }
    log << "  all structured kernels match their dense oracles\n";
}

void criterion11_stability_smoke(std::ostream& log) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_ratio = 0.0;
    for (double gamma : {0.2, 0.9})
        for (double alpha : {1.1, 1.9})
            for (std::size_t m : {16, 256})
                for (std::size_t big_n : {32, 512}) {
                    ProblemSpec spec;
                    spec.x_left = 0.0;
                    spec.x_right = 1.0;
                    spec.horizon = 1.0;
                    spec.gamma = gamma;
                    spec.alpha = alpha;
                    spec.p = 0.7;
                    spec.lambda = WeightingFunction::tempered(1.0);
                    const double base = 0.5 + unit(rng), amp = 0.4 * unit(rng);
                    const double freq = 1.0 + 5.0 * unit(rng);
                    spec.xi = [=](double x, double t) {
                        return base + amp * std::sin(freq * x + t);
                    };
                    std::vector<double> modes(5);
                    for (auto& a : modes) a = 2.0 * unit(rng) - 1.0;
                    spec.initial = [modes](double x) {
                        double acc = 0.0;
                        for (std::size_t k = 0; k < modes.size(); ++k)
                            acc += modes[k] *
                                   std::sin(std::numbers::pi * static_cast<double>(k + 1) * x);
                        return acc;
                    };
                    const Discretization disc =
                        make_discretization(spec, big_n, m, Scheme::Direct);
                    const SolveOutcome out =
                        solve(spec, disc, Scheme::Direct, study_options());

                    double xi_min = 1e300;
                    for (std::size_t j = 0; j <= m; ++j)
                        for (std::size_t i = 0; i <= big_n; ++i)
                            xi_min = std::min(
                                xi_min, spec.xi(disc.h * static_cast<double>(i),
                                                disc.tau * static_cast<double>(j)));
                    double u0 = 0.0;
                    for (std::size_t i = 1; i < big_n; ++i) {
                        const double v = out.field.levels[0][i];
                        u0 += disc.h * v * v;
                    }
                    const double bound = std::sqrt(u0 / xi_min);
                    for (std::size_t j = 1; j <= m; ++j) {
                        double weighted = 0.0;
                        for (std::size_t i = 1; i < big_n; ++i) {
                            const double v = out.field.levels[j][i];
                            weighted += disc.h * v * v /
                                        spec.xi(disc.h * static_cast<double>(i),
                                                disc.tau * static_cast<double>(j));
                        }
                        const double ratio = std::sqrt(weighted) / bound;
                        worst_ratio = std::max(worst_ratio, ratio);
                        require(ratio <= 1.0 + 1e-8,
                                "weighted norm exceeded the stability bound (ratio " +
                                    num(ratio) + ") at level " + std::to_string(j) + ", N=" +
                                    std::to_string(big_n) + ", M=" + std::to_string(m));
                    }
                }
    log << "  worst weighted-norm ratio over 16 runs: " << num(worst_ratio) << "\n";
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        std::function<void(std::ostream&)> body;
    };
    const std::vector<Criterion> criteria{
        {1, "temporal order, smooth problem reference values", criterion1_temporal_table},
        {2, "temporal order trend across gamma", criterion2_temporal_trend},
        {3, "spatial order reference values", criterion3_spatial_table},
        {4, "nonsmooth two-grid temporal order", criterion4_nonsmooth_two_grid},
        {5, "fast-scheme fidelity", criterion5_fast_scheme_fidelity},
        {6, "coupled space-time sweep", criterion6_coupled_sweep},
        {7, "preconditioner effectiveness", criterion7_preconditioner_effectiveness},
        {8, "dense-oracle equivalence", criterion8_dense_oracle_equivalence},
        {9, "sum-of-exponentials certification", criterion9_soe_certification},
        {10, "structure-exactness suite", criterion10_structure_exactness},
        {11, "unconditional-stability smoke test", criterion11_stability_smoke},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::ostringstream log;
        std::string error;
        try {
            c.body(log);
        } catch (const std::exception& e) {
            error = e.what();
        }
        if (error.empty()) {
            std::cout << "[PASS] criterion " << c.id << ": " << c.name << "\n" << log.str();
        } else {
            ++failures;
            std::cout << "[FAIL] criterion " << c.id << ": " << c.name << "\n"
                      << log.str() << "  reason: " << error << "\n";
        }
        std::cout.flush();
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) +
                  " criteria failed")
              << "\n";
    return failures;
}
