#include "gtsfde/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace gtsfde {

namespace {

using nlohmann::json;

SweepAxis parse_axis(const std::string& s) {
    if (s == "temporal") return SweepAxis::Temporal;
    if (s == "spatial") return SweepAxis::Spatial;
    if (s == "coupled") return SweepAxis::Coupled;
    throw ConfigError("sweep.axis: expected temporal|spatial|coupled, got '" + s + "'");
}

void parse_solver(const json& j, ExperimentConfig& cfg) {
    cfg.solver.rtol = j.value("rtol", 1e-12);
    cfg.solver.max_iter = j.value("max_iter", 1000);
    cfg.solver.bandwidth = j.value("bandwidth", std::size_t{8});
    const std::string pre = j.value("preconditioner", "auto");
    if (pre == "auto") {
        cfg.path = SolverPath::Auto;
        cfg.solver.preconditioner = PreconditionerKind::SkewCirculant;
    } else if (pre == "none") {
        cfg.path = SolverPath::Bicgstab;
        cfg.solver.preconditioner = PreconditionerKind::None;
    } else if (pre == "banded") {
        cfg.path = SolverPath::Bicgstab;
        cfg.solver.preconditioner = PreconditionerKind::Banded;
    } else if (pre == "skew") {
        cfg.path = SolverPath::Bicgstab;
        cfg.solver.preconditioner = PreconditionerKind::SkewCirculant;
    } else if (pre == "gsf") {
        cfg.path = SolverPath::Gsf;
    } else if (pre == "dense") {
        cfg.path = SolverPath::Dense;
    } else {
        throw ConfigError("solver.preconditioner: unknown value '" + pre + "'");
    }
}

ParamSet parse_param_set(const json& j) {
    ParamSet ps;
    ps.gamma = j.at("gamma").get<double>();
    ps.alpha = j.at("alpha").get<double>();
    ps.b = j.value("b", 1.0);
    ps.p = j.value("p", 0.7);
    return ps;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        cfg.example = j.value("example", "1");
        if (cfg.example != "1" && cfg.example != "2" && cfg.example != "A1" &&
            cfg.example != "custom")
            throw ConfigError("example: expected 1|2|A1|custom, got '" + cfg.example + "'");

        if (!j.contains("parameters")) throw ConfigError("parameters: field is required");
        if (j["parameters"].is_array()) {
            for (const auto& e : j["parameters"]) cfg.parameters.push_back(parse_param_set(e));
        } else {
            cfg.parameters.push_back(parse_param_set(j["parameters"]));
        }
        if (cfg.parameters.empty()) throw ConfigError("parameters: at least one set is required");

        cfg.xi_const = j.value("xi_const", 5.0);

        if (!j.contains("sweep")) throw ConfigError("sweep: field is required");
        const json& sw = j["sweep"];
        cfg.axis = parse_axis(sw.value("axis", "temporal"));
        if (sw.contains("m_values")) cfg.m_values = sw["m_values"].get<std::vector<std::size_t>>();
        if (sw.contains("n_values")) cfg.n_values = sw["n_values"].get<std::vector<std::size_t>>();
        cfg.fixed_n = sw.value("n", std::size_t{0});
        cfg.fixed_m = sw.value("m", std::size_t{0});
        cfg.coupled_prefactor = sw.value("prefactor", 2.0);
        switch (cfg.axis) {
            case SweepAxis::Temporal:
            case SweepAxis::Coupled:
                if (cfg.m_values.empty()) throw ConfigError("sweep.m_values: must be nonempty");
                if (cfg.axis == SweepAxis::Temporal && cfg.fixed_n == 0)
                    throw ConfigError("sweep.n: fixed spatial size is required");
                break;
            case SweepAxis::Spatial:
                if (cfg.n_values.empty()) throw ConfigError("sweep.n_values: must be nonempty");
                if (cfg.fixed_m == 0) throw ConfigError("sweep.m: fixed time-step count is required");
                break;
        }

        const std::string scheme = j.value("scheme", "direct");
        if (scheme == "direct")
            cfg.scheme = Scheme::Direct;
        else if (scheme == "fast")
            cfg.scheme = Scheme::Fast;
        else
            throw ConfigError("scheme: expected direct|fast, got '" + scheme + "'");

        cfg.two_grid = j.value("two_grid", false);
        cfg.final_time_only = j.value("final_time_only", true);
        if (j.contains("solver")) parse_solver(j["solver"], cfg);
        cfg.soe_epsilon = j.value("soe_epsilon", 1e-9);
        cfg.agreement_bound = j.value("agreement_bound", 1e-5);
        cfg.output = j.value("output", "report.csv");
        if (j.contains("custom")) {
            const json& c = j["custom"];
            cfg.custom_x_left = c.value("x_left", 0.0);
            cfg.custom_x_right = c.value("x_right", 1.0);
            cfg.custom_horizon = c.value("horizon", 1.0);
            cfg.xi_const = c.value("xi", cfg.xi_const);
        }
        if (cfg.two_grid) {
            if (cfg.axis != SweepAxis::Temporal)
                throw ConfigError("two_grid: nested-grid errors are defined on temporal sweeps");
            for (std::size_t k = 1; k < cfg.m_values.size(); ++k)
                if (cfg.m_values[k] != 2 * cfg.m_values[k - 1])
                    throw ConfigError("sweep.m_values: two-grid mode needs doubling step counts");
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ManufacturedProblem build_problem(const ExperimentConfig& config, const ParamSet& ps,
                                  unsigned seed) {
    if (config.example == "1") return example1(ps.gamma, ps.alpha, ps.b, ps.p);
    if (config.example == "A1") return exampleA1(ps.gamma, ps.alpha, ps.b, ps.p);
    if (config.example == "2") return example2(ps.gamma, ps.alpha, ps.b, ps.p, config.xi_const);

    // custom: constant diffusion, zero source and boundaries, seeded smooth
    // initial profile vanishing at the endpoints
    ManufacturedProblem mp;
    mp.id = "custom";
    mp.gamma = ps.gamma;
    mp.alpha = ps.alpha;
    mp.b = ps.b;
    mp.p = ps.p;
    mp.spec.x_left = config.custom_x_left;
    mp.spec.x_right = config.custom_x_right;
    mp.spec.horizon = config.custom_horizon;
    mp.spec.gamma = ps.gamma;
    mp.spec.alpha = ps.alpha;
    mp.spec.p = ps.p;
    mp.spec.lambda = ps.b > 0.0 ? WeightingFunction::tempered(ps.b) : WeightingFunction::constant();
    const double xiv = config.xi_const;
    mp.spec.xi = [xiv](double, double) { return xiv; };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> amps(8);
    for (auto& a : amps) a = unit(rng);
    const double xl = mp.spec.x_left, span = mp.spec.x_right - mp.spec.x_left;
    mp.spec.initial = [amps, xl, span](double x) {
        double acc = 0.0;
        const double s = (x - xl) / span;
        for (std::size_t k = 0; k < amps.size(); ++k)
            acc += amps[k] * std::sin(std::numbers::pi * static_cast<double>(k + 1) * s);
        return acc;
    };
    return mp;
}

namespace {

struct RunPlan {
    std::size_t param_index = 0;
    std::size_t n = 0, m = 0;
    Scheme scheme = Scheme::Direct;
};

struct RunResult {
    SolutionField field;
    SolveStats stats;
    ErrorReport errors;
    bool has_exact = false;
};

std::size_t coupled_n(double prefactor, std::size_t m, double gamma) {
    const double v = prefactor * std::pow(static_cast<double>(m), (2.0 - gamma) / 2.0);
    return static_cast<std::size_t>(std::ceil(v));
}

RunResult execute_run(const ExperimentConfig& config, const ManufacturedProblem& mp,
                      const RunPlan& plan, const RunOptions& opt) {
    SolverOptions solver_opt;
    solver_opt.krylov = config.solver;
    if (opt.tol_override) solver_opt.krylov.rtol = *opt.tol_override;
    solver_opt.path = config.path;

    Discretization disc =
        make_discretization(mp.spec, plan.n, plan.m, plan.scheme, config.soe_epsilon);
    RunResult rr;
    SolveOutcome outcome = solve(mp.spec, disc, plan.scheme, solver_opt);
    rr.stats = outcome.stats;
    rr.field = std::move(outcome.field);

    if (mp.addend) {
        for (std::size_t j = 0; j < rr.field.levels.size(); ++j) {
            auto& row = rr.field.levels[j];
            if (row.empty()) continue;
            const double t = rr.field.tau * static_cast<double>(j);
            for (std::size_t i = 0; i < row.size(); ++i)
                row[i] += mp.addend(mp.spec.x_left + rr.field.h * static_cast<double>(i), t);
        }
    }
    if (mp.exact) {
        rr.errors = compute_errors(rr.field, mp.exact, mp.spec.x_left, rr.field.h);
        rr.has_exact = true;
    }
    return rr;
}

double refinement_ratio(const ExperimentConfig& config, const RunPlan& prev, const RunPlan& cur) {
    if (config.axis == SweepAxis::Spatial)
        return static_cast<double>(cur.n) / static_cast<double>(prev.n);
    return static_cast<double>(cur.m) / static_cast<double>(prev.m);
}

std::string precond_name(const ExperimentConfig& config) {
    switch (config.path) {
        case SolverPath::Gsf: return "gsf";
        case SolverPath::Dense: return "dense";
        case SolverPath::Auto: return "auto";
        case SolverPath::Bicgstab: break;
    }
    switch (config.solver.preconditioner) {
        case PreconditionerKind::None: return "none";
        case PreconditionerKind::Banded: return "banded";
        case PreconditionerKind::SkewCirculant: return "skew";
        case PreconditionerKind::ExactGsf: return "gsf";
    }
    return "auto";
}

/// Run every plan, preserving order; plans are independent so a small
/// worker pool is enough.
std::vector<RunResult> execute_all(const ExperimentConfig& config,
                                   const std::vector<ManufacturedProblem>& problems,
                                   const std::vector<RunPlan>& plans, const RunOptions& opt) {
    std::vector<RunResult> results(plans.size());
    std::vector<std::string> failures(plans.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(plans.size())));

    auto body = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= plans.size()) return;
            try {
                results[idx] = execute_run(config, problems[plans[idx].param_index], plans[idx], opt);
            } catch (const std::exception& e) {
                failures[idx] = e.what();
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    for (std::size_t idx = 0; idx < plans.size(); ++idx)
        if (!failures[idx].empty())
            throw SolverError("run " + std::to_string(idx) + " (N=" + std::to_string(plans[idx].n) +
                              ", M=" + std::to_string(plans[idx].m) + "): " + failures[idx]);
    return results;
}

std::vector<std::pair<std::size_t, std::size_t>> sweep_grids(const ExperimentConfig& config,
                                                             const ParamSet& ps) {
    std::vector<std::pair<std::size_t, std::size_t>> grids;  // (N, M)
    switch (config.axis) {
        case SweepAxis::Temporal:
            for (std::size_t m : config.m_values) grids.emplace_back(config.fixed_n, m);
            break;
        case SweepAxis::Spatial:
            for (std::size_t n : config.n_values) grids.emplace_back(n, config.fixed_m);
            break;
        case SweepAxis::Coupled:
            for (std::size_t m : config.m_values)
                grids.emplace_back(coupled_n(config.coupled_prefactor, m, ps.gamma), m);
            break;
    }
    return grids;
}

ReportRow base_row(const ExperimentConfig& config, const ParamSet& ps, const RunPlan& plan,
                   const RunResult& rr, const RunOptions& opt) {
    ReportRow row;
    row.example = config.example;
    row.gamma = ps.gamma;
    row.alpha = ps.alpha;
    row.b = ps.b;
    row.p = ps.p;
    row.scheme = plan.scheme == Scheme::Direct ? "direct" : "fast";
    row.precond = rr.stats.solver_path.empty() ? precond_name(config) : rr.stats.solver_path;
    row.n = plan.n;
    row.m = plan.m;
    row.iters_avg = rr.stats.avg_iterations;
    row.wall_s = opt.emit_timing ? rr.stats.wall_seconds : 0.0;
    row.mem_bytes = rr.stats.memory_scalars * sizeof(double);
    return row;
}

}  // namespace

void verify_small_grid(const ExperimentConfig& config) {
    const ParamSet ps = config.parameters.front();
    ManufacturedProblem mp = build_problem(config, ps, 1);
    Discretization disc = make_discretization(mp.spec, 17, 8, Scheme::Direct, 1e-9);

    SolverOptions structured;
    structured.krylov = config.solver;
    structured.krylov.preconditioner = PreconditionerKind::SkewCirculant;
    structured.path = SolverPath::Bicgstab;
    SolverOptions dense;
    dense.path = SolverPath::Dense;

    const SolutionField a = solve(mp.spec, disc, Scheme::Direct, structured).field;
    const SolutionField b = solve(mp.spec, disc, Scheme::Direct, dense).field;
    double worst = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < a.levels.size(); ++j)
        for (std::size_t i = 0; i < a.levels[j].size(); ++i) {
            worst = std::max(worst, std::abs(a.levels[j][i] - b.levels[j][i]));
            scale = std::max(scale, std::abs(b.levels[j][i]));
        }
    if (worst > 1e-10 * std::max(scale, 1.0))
        throw VerifyError("dense-oracle cross-check failed: max deviation " + std::to_string(worst));
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& config, const RunOptions& opt) {
    if (opt.verify) verify_small_grid(config);

    std::vector<ManufacturedProblem> problems;
    for (const ParamSet& ps : config.parameters)
        problems.push_back(build_problem(config, ps, opt.seed));

    // Flatten the sweep into an ordered run list.
    std::vector<RunPlan> plans;
    std::vector<std::size_t> first_of_param;
    for (std::size_t pi = 0; pi < config.parameters.size(); ++pi) {
        first_of_param.push_back(plans.size());
        auto grids = sweep_grids(config, config.parameters[pi]);
        if (config.two_grid)  // one finer companion run for the last row
            grids.emplace_back(grids.back().first, 2 * grids.back().second);
        for (auto [n, m] : grids) plans.push_back({pi, n, m, config.scheme});
    }
    first_of_param.push_back(plans.size());

    const std::vector<RunResult> results = execute_all(config, problems, plans, opt);

    std::vector<ReportRow> rows;
    for (std::size_t pi = 0; pi < config.parameters.size(); ++pi) {
        const ParamSet& ps = config.parameters[pi];
        const std::size_t begin = first_of_param[pi], end = first_of_param[pi + 1];
        const std::size_t n_rows = (end - begin) - (config.two_grid ? 1 : 0);
        std::optional<double> prev_inf, prev_l2;
        for (std::size_t k = 0; k < n_rows; ++k) {
            const RunPlan& plan = plans[begin + k];
            const RunResult& rr = results[begin + k];
            ReportRow row = base_row(config, ps, plan, rr, opt);
            if (config.two_grid) {
                const ErrorReport er = compute_errors(rr.field, results[begin + k + 1].field);
                row.err_inf = config.final_time_only ? er.final_inf : er.error_inf;
                row.err_l2 = config.final_time_only ? er.final_l2 : er.error_l2;
            } else if (rr.has_exact) {
                row.err_inf = rr.errors.error_inf;
                row.err_l2 = rr.errors.error_l2;
            }
            if (k > 0 && row.err_inf && prev_inf) {
                const double ratio = refinement_ratio(config, plans[begin + k - 1], plan);
                row.rate_inf = convergence_rate(*prev_inf, *row.err_inf, ratio);
                row.rate_l2 = convergence_rate(*prev_l2, *row.err_l2, ratio);
            }
            prev_inf = row.err_inf;
            prev_l2 = row.err_l2;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<ReportRow> compare_schemes(const ExperimentConfig& config, const RunOptions& opt) {
    if (config.example == "2")
        throw ConfigError("compare: the splitting problem has no per-run exact errors to compare");
    if (opt.verify) verify_small_grid(config);

    std::vector<ManufacturedProblem> problems;
    for (const ParamSet& ps : config.parameters)
        problems.push_back(build_problem(config, ps, opt.seed));

    std::vector<RunPlan> plans;
    std::vector<std::size_t> first_of_param;
    for (std::size_t pi = 0; pi < config.parameters.size(); ++pi) {
        first_of_param.push_back(plans.size());
        for (auto [n, m] : sweep_grids(config, config.parameters[pi])) {
            plans.push_back({pi, n, m, Scheme::Direct});
            plans.push_back({pi, n, m, Scheme::Fast});
        }
    }
    first_of_param.push_back(plans.size());

    const std::vector<RunResult> results = execute_all(config, problems, plans, opt);

    std::vector<ReportRow> rows;
    std::vector<std::string> violations;
    for (std::size_t pi = 0; pi < config.parameters.size(); ++pi) {
        const ParamSet& ps = config.parameters[pi];
        const std::size_t begin = first_of_param[pi], end = first_of_param[pi + 1];
        std::optional<double> prev_inf[2], prev_l2[2];
        for (std::size_t k = begin; k < end; ++k) {
            const RunPlan& plan = plans[k];
            const RunResult& rr = results[k];
            const std::size_t side = plan.scheme == Scheme::Direct ? 0 : 1;
            ReportRow row = base_row(config, ps, plan, rr, opt);
            if (rr.has_exact) {
                row.err_inf = rr.errors.error_inf;
                row.err_l2 = rr.errors.error_l2;
                if (prev_inf[side] && k >= begin + 2) {
                    const double ratio = refinement_ratio(config, plans[k - 2], plan);
                    row.rate_inf = convergence_rate(*prev_inf[side], *row.err_inf, ratio);
                    row.rate_l2 = convergence_rate(*prev_l2[side], *row.err_l2, ratio);
                }
                prev_inf[side] = row.err_inf;
                prev_l2[side] = row.err_l2;
            }
            if (side == 1 && row.err_inf && rows.back().err_inf) {
                const double diff = std::abs(*row.err_inf - *rows.back().err_inf);
                if (diff > config.agreement_bound) {
                    row.agreement_violation = true;
                    violations.push_back("N=" + std::to_string(plan.n) +
                                         " M=" + std::to_string(plan.m) +
                                         ": |fast - direct| = " + std::to_string(diff));
                }
            }
            rows.push_back(std::move(row));
        }
    }
    if (!violations.empty()) {
        std::string msg = "fast/direct agreement violated:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw AgreementError(msg);
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

void write_table(const std::vector<ReportRow>& rows, std::ostream& os, bool emit_timing) {
    os << "example,gamma,alpha,b,p,scheme,precond,N,M,err_inf,rate_inf,err_l2,rate_l2,"
          "iters_avg,wall_s,mem_bytes\n";
    for (const ReportRow& r : rows) {
        os << r.example << ',' << fmt(r.gamma) << ',' << fmt(r.alpha) << ',' << fmt(r.b) << ','
           << fmt(r.p) << ',' << r.scheme << ',' << r.precond << ',' << r.n << ',' << r.m << ','
           << fmt_opt(r.err_inf) << ',' << fmt_opt(r.rate_inf) << ',' << fmt_opt(r.err_l2) << ','
           << fmt_opt(r.rate_l2) << ',' << fmt(r.iters_avg) << ','
           << fmt(emit_timing ? r.wall_s : 0.0) << ',' << r.mem_bytes << '\n';
    }
}

void write_w2_curve(std::ostream& os, std::size_t samples) {
    os << "alpha,w2\n";
    for (std::size_t i = 1; i <= samples; ++i) {
        const double a = 1.0 + static_cast<double>(i) / static_cast<double>(samples);
        os << fmt(a) << ',' << fmt(w2_value(a)) << '\n';
    }
}

}  // namespace gtsfde
