#include "gtsfde/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "gtsfde/fft.hpp"
#include "gtsfde/numerics.hpp"

namespace gtsfde {

void ProblemSpec::validate() const {
    if (!(x_right > x_left)) throw std::invalid_argument("ProblemSpec: empty spatial domain");
    if (!(horizon > 0.0)) throw std::invalid_argument("ProblemSpec: horizon must be positive");
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("ProblemSpec: gamma must lie in (0, 1)");
    if (!(alpha > 1.0) || !(alpha <= 2.0))
        throw std::invalid_argument("ProblemSpec: alpha must lie in (1, 2]");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("ProblemSpec: skewness must lie in [0, 1]");
    if (!xi || !initial) throw std::invalid_argument("ProblemSpec: xi and initial data are required");
}

Discretization make_discretization(const ProblemSpec& spec, std::size_t n_space,
                                   std::size_t m_time, Scheme scheme, double soe_epsilon) {
    spec.validate();
    if (n_space < 5) throw std::invalid_argument("make_discretization: need N >= 5");
    if (m_time < 1) throw std::invalid_argument("make_discretization: need M >= 1");

    Discretization d;
    d.n_space = n_space;
    d.m_time = m_time;
    d.h = (spec.x_right - spec.x_left) / static_cast<double>(n_space);
    d.tau = spec.horizon / static_cast<double>(m_time);
    d.w = wsgd_weights(spec.alpha, n_space);
    if (scheme == Scheme::Direct) {
        d.l1 = l1_coefficients(spec.gamma, spec.lambda, d.tau, m_time);
    } else {
        if (spec.lambda.kind() == WeightingFunction::Kind::Custom)
            throw std::invalid_argument(
                "make_discretization: the fast scheme needs lambda = e^{-bt} (or constant)");
        if (m_time >= 2)
            d.soe = soe_build(spec.gamma, d.tau, spec.horizon, soe_epsilon);
        d.local_coeff = local_weight(spec.gamma, spec.lambda.decay(), d.tau);
    }
    return d;
}

std::size_t SolutionField::stored_levels() const {
    std::size_t n = 0;
    for (const auto& row : levels)
        if (!row.empty()) ++n;
    return n;
}

namespace {

class Engine {
public:
    Engine(const ProblemSpec& spec, const Discretization& disc, Scheme scheme,
           const SolverOptions& opt, SolutionField& field, HistoryState& hist)
        : spec_(spec), disc_(disc), scheme_(scheme), opt_(opt), field_(field), hist_(hist) {
        n_ = disc_.n_space - 1;
        x_.resize(disc_.n_space + 1);
        for (std::size_t i = 0; i <= disc_.n_space; ++i)
            x_[i] = spec_.x_left + disc_.h * static_cast<double>(i);

        c0_ = scheme_ == Scheme::Direct ? disc_.l1.c.at(0) : disc_.local_coeff;
        if (scheme_ == Scheme::Direct && disc_.l1.c.size() < disc_.m_time)
            throw std::invalid_argument("Engine: L1 coefficients shorter than the time loop");
        if (scheme_ == Scheme::Fast) {
            if (disc_.m_time >= 2 && !disc_.soe)
                throw std::invalid_argument("Engine: fast scheme needs an SOE approximation");
            const std::size_t n_exp = disc_.soe ? disc_.soe->size() : 0;
            if (hist_.accumulators.empty())
                hist_.accumulators.assign(n_exp, std::vector<double>(n_, 0.0));
        }

        xi_constant_ = detect_constant_xi();
        op_ = std::make_unique<SystemOperator>(c0_, disc_.h, spec_.alpha, spec_.p,
                                               sample_xi(disc_.tau), ToeplitzMatrix::wsgd(disc_.w, n_),
                                               xi_constant_);

        path_ = opt_.path;
        if (path_ == SolverPath::Auto)
            path_ = (xi_constant_ && opt_.allow_gsf) ? SolverPath::Gsf : SolverPath::Bicgstab;
        if (path_ == SolverPath::Gsf && !xi_constant_)
            throw std::invalid_argument("Engine: GSF path needs a constant diffusion coefficient");

        stats_.solver_path = path_name();
        if (scheme_ == Scheme::Direct) {
            cdiff_.resize(disc_.m_time);
            for (std::size_t s = 1; s < disc_.m_time; ++s)
                cdiff_[s] = disc_.l1.c[s - 1] - disc_.l1.c[s];
        }
    }

    void ensure_initial() {
        if (!field_.levels.empty()) return;
        field_.grid_points = disc_.n_space + 1;
        field_.tau = disc_.tau;
        field_.h = disc_.h;
        field_.streaming = opt_.streaming && scheme_ == Scheme::Fast;
        std::vector<double> row(disc_.n_space + 1);
        for (std::size_t i = 0; i <= disc_.n_space; ++i) row[i] = spec_.initial(x_[i]);
        row[0] = boundary_left(0.0);
        row[disc_.n_space] = boundary_right(0.0);
        field_.levels.push_back(std::move(row));
        if (opt_.observer) opt_.observer(0, 0.0, field_.levels[0]);
    }

    void step(std::size_t j) {
        const double t1 = disc_.tau * static_cast<double>(j + 1);
        op_->set_diffusion(sample_xi(t1));

        std::vector<double> rhs =
            scheme_ == Scheme::Direct ? direct_rhs(j, t1) : fast_rhs(j, t1);
        std::vector<double> u_new = solve_linear(rhs, j);

        std::vector<double> row(disc_.n_space + 1);
        row[0] = boundary_left(t1);
        row[disc_.n_space] = boundary_right(t1);
        std::copy(u_new.begin(), u_new.end(), row.begin() + 1);

        if (field_.levels.size() != j + 1)
            throw std::invalid_argument("step: levels 0..j must be present");
        field_.levels.push_back(std::move(row));
        if (field_.streaming && j >= 1) {
            field_.levels[j - 1].clear();
            field_.levels[j - 1].shrink_to_fit();
        }
        ++stats_.steps;
        if (opt_.observer) opt_.observer(j + 1, t1, field_.levels[j + 1]);
    }

    SolveStats finish() {
        stats_.avg_iterations =
            stats_.linear_solves ? stats_.total_iterations / static_cast<double>(stats_.linear_solves)
                                 : 0.0;
        stats_.memory_scalars = count_memory();
        return stats_;
    }

private:
    const ProblemSpec& spec_;
    const Discretization& disc_;
    Scheme scheme_;
    const SolverOptions& opt_;
    SolutionField& field_;
    HistoryState& hist_;

    std::size_t n_ = 0;
    std::vector<double> x_;
    double c0_ = 0.0;
    bool xi_constant_ = false;
    SolverPath path_ = SolverPath::Bicgstab;
    std::unique_ptr<SystemOperator> op_;
    std::vector<double> cdiff_;

    std::unique_ptr<GsfInverse> gsf_;
    std::unique_ptr<SkewCirculantFactor> skew_;
    std::unique_ptr<BandedFactor> banded_;
    std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> dense_lu_;
    SolveStats stats_;

    double boundary_left(double t) const { return spec_.boundary_left ? spec_.boundary_left(t) : 0.0; }
    double boundary_right(double t) const { return spec_.boundary_right ? spec_.boundary_right(t) : 0.0; }

    std::vector<double> sample_xi(double t) const {
        std::vector<double> row(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            row[i] = spec_.xi(x_[i + 1], t);
            if (!(row[i] > 0.0))
                throw std::invalid_argument("xi must be positive on the whole grid");
        }
        return row;
    }

    bool detect_constant_xi() const {
        double lo = spec_.xi(x_[0], 0.0), hi = lo;
        for (double t : {0.0, 0.5 * disc_.tau, disc_.tau, 0.5 * spec_.horizon, spec_.horizon})
            for (std::size_t i = 0; i <= disc_.n_space; ++i) {
                const double v = spec_.xi(x_[i], t);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        return hi - lo <= 1e-14 * std::max(std::abs(hi), 1.0);
    }

    // Known boundary values of the WSGD sums, moved to the right-hand side.
    void add_boundary_terms(std::vector<double>& rhs, double t1) const {
        const double ul = boundary_left(t1), ur = boundary_right(t1);
        if (ul == 0.0 && ur == 0.0) return;
        const double hs = std::pow(disc_.h, spec_.alpha);
        const auto& w = disc_.w.w;
        const auto& xi = op_->diag_xi();
        const std::size_t big_n = disc_.n_space;
        for (std::size_t i = 1; i <= n_; ++i) {
            double acc = spec_.p * w[i + 1] * ul + (1.0 - spec_.p) * w[big_n - i + 1] * ur;
            if (i == big_n - 1) acc += spec_.p * w[0] * ur;
            if (i == 1) acc += (1.0 - spec_.p) * w[0] * ul;
            rhs[i - 1] += xi[i - 1] / hs * acc;
        }
    }

    std::vector<double> direct_rhs(std::size_t j, double t1) {
        std::vector<double> rhs(n_);
        const auto& u0 = field_.level(0);
        const double cj = disc_.l1.c[j];
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = cj * u0[i + 1];
        for (std::size_t s = 1; s <= j; ++s) {
            const double d = cdiff_[s];
            const auto& lvl = field_.level(j + 1 - s);
            for (std::size_t i = 0; i < n_; ++i) rhs[i] += d * lvl[i + 1];
        }
        for (std::size_t i = 0; i < n_; ++i)
            rhs[i] += spec_.source ? spec_.source(x_[i + 1], t1) : 0.0;
        add_boundary_terms(rhs, t1);
        return rhs;
    }

    std::vector<double> fast_rhs(std::size_t j, double t1) {
        const double tau = disc_.tau;
        const double b = spec_.lambda.decay();
        std::vector<double> rhs(n_);
        const auto& uj = field_.level(j);

        if (j >= 1) {
            const auto& um = field_.level(j - 1);
            const auto& soe = *disc_.soe;
            for (std::size_t k = 0; k < soe.size(); ++k) {
                const double st = soe.nodes[k] + b;
                const double decay = std::exp(-st * tau);
                const double kick = (1.0 - decay) / (tau * st) * decay;
                auto& acc = hist_.accumulators[k];
                for (std::size_t i = 0; i < n_; ++i)
                    acc[i] = decay * acc[i] + kick * (uj[i + 1] - um[i + 1]);
            }
        }

        for (std::size_t i = 0; i < n_; ++i) rhs[i] = disc_.local_coeff * uj[i + 1];
        if (disc_.soe) {
            const auto& soe = *disc_.soe;
            const double inv_g = 1.0 / gamma_fn(1.0 - spec_.gamma);
            for (std::size_t k = 0; k < soe.size(); ++k) {
                const double wk = soe.weights[k] * inv_g;
                const auto& acc = hist_.accumulators[k];
                for (std::size_t i = 0; i < n_; ++i) rhs[i] -= wk * acc[i];
            }
        }
        for (std::size_t i = 0; i < n_; ++i)
            rhs[i] += spec_.source ? spec_.source(x_[i + 1], t1) : 0.0;
        add_boundary_terms(rhs, t1);
        return rhs;
    }

    std::vector<double> solve_linear(const std::vector<double>& rhs, std::size_t j) {
        switch (path_) {
            case SolverPath::Gsf: {
                if (!gsf_) gsf_ = std::make_unique<GsfInverse>(GsfInverse::from_operator(*op_));
                std::vector<double> u(n_);
                gsf_->apply(rhs, u);
                ++stats_.linear_solves;
                return u;
            }
            case SolverPath::Dense: {
                if (n_ > 4096)
                    throw std::invalid_argument("dense solver path is meant for small systems");
                if (!dense_lu_ || !xi_constant_) {
                    const std::vector<double> d = op_->dense();
                    Eigen::MatrixXd m(n_, n_);
                    for (std::size_t i = 0; i < n_; ++i)
                        for (std::size_t k = 0; k < n_; ++k)
                            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                                d[i * n_ + k];
                    dense_lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(m);
                }
                Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size());
                Eigen::VectorXd u = dense_lu_->solve(b);
                ++stats_.linear_solves;
                return {u.data(), u.data() + u.size()};
            }
            default:
                break;
        }

        const auto& cfg = opt_.krylov;
        LinearMap pinv;
        switch (cfg.preconditioner) {
            case PreconditionerKind::None:
                break;
            case PreconditionerKind::SkewCirculant:
                if (!skew_ || !xi_constant_)
                    skew_ = std::make_unique<SkewCirculantFactor>(
                        SkewCirculantFactor::from_operator(*op_));
                pinv = [this](std::span<const double> v, std::span<double> out) {
                    skew_->solve(v, out);
                };
                break;
            case PreconditionerKind::Banded:
                if (!banded_ || !xi_constant_)
                    banded_ = std::make_unique<BandedFactor>(
                        BandedFactor::from_operator(*op_, std::min(cfg.bandwidth, n_ - 1)));
                pinv = [this](std::span<const double> v, std::span<double> out) {
                    banded_->solve(v, out);
                };
                break;
            case PreconditionerKind::ExactGsf:
                if (!gsf_) gsf_ = std::make_unique<GsfInverse>(GsfInverse::from_operator(*op_));
                pinv = [this](std::span<const double> v, std::span<double> out) {
                    gsf_->apply(v, out);
                };
                break;
        }
        auto apply_a = [this](std::span<const double> v, std::span<double> out) {
            op_->apply(v, out);
        };
        const std::vector<double> x0(n_, 0.0);
        SolveResult r = bicgstab(apply_a, pinv, rhs, x0, cfg);
        ++stats_.linear_solves;
        stats_.total_iterations += r.iterations;
        if (!r.converged) {
            const char* why = r.status == SolveStatus::Breakdown ? "breakdown" : "max iterations";
            throw SolverError("linear solve failed at time level " + std::to_string(j + 1) +
                              " (" + why + ", relative residual " +
                              std::to_string(r.final_relative_residual) + ")");
        }
        return std::move(r.x);
    }

    std::string path_name() const {
        switch (path_) {
            case SolverPath::Gsf: return "gsf";
            case SolverPath::Dense: return "dense";
            default: break;
        }
        switch (opt_.krylov.preconditioner) {
            case PreconditionerKind::None: return "bicgstab";
            case PreconditionerKind::Banded:
                return "bicgstab+banded(" + std::to_string(opt_.krylov.bandwidth) + ")";
            case PreconditionerKind::SkewCirculant: return "bicgstab+skew";
            case PreconditionerKind::ExactGsf: return "bicgstab+gsf";
        }
        return "bicgstab";
    }

    std::size_t count_memory() const {
        std::size_t scalars = field_.stored_levels() * (disc_.n_space + 1);
        scalars += disc_.w.w.size() + disc_.l1.c.size();
        if (disc_.soe) scalars += 2 * disc_.soe->size();
        for (const auto& acc : hist_.accumulators) scalars += acc.size();
        scalars += 4 * fft::next_pow2(2 * n_ - 1);  // Toeplitz spectra held by the operator
        if (skew_) scalars += skew_->stored_scalars();
        if (banded_) scalars += banded_->stored_scalars();
        if (gsf_) scalars += gsf_->stored_scalars();
        if (dense_lu_) scalars += n_ * n_;
        return scalars;
    }
};

}  // namespace

void step_direct(SolutionField& state, std::size_t j, const ProblemSpec& spec,
                 const Discretization& disc, const SolveConfig& cfg) {
    SolverOptions opt;
    opt.krylov = cfg;
    HistoryState hist;
    Engine eng(spec, disc, Scheme::Direct, opt, state, hist);
    eng.ensure_initial();
    eng.step(j);
}

void step_fast(SolutionField& state, HistoryState& hist, std::size_t j,
               const ProblemSpec& spec, const Discretization& disc, const SolveConfig& cfg) {
    SolverOptions opt;
    opt.krylov = cfg;
    Engine eng(spec, disc, Scheme::Fast, opt, state, hist);
    eng.ensure_initial();
    eng.step(j);
}

SolveOutcome solve(const ProblemSpec& spec, const Discretization& disc, Scheme scheme,
                   const SolverOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    SolveOutcome out;
    HistoryState hist;
    Engine eng(spec, disc, scheme, options, out.field, hist);
    eng.ensure_initial();
    for (std::size_t j = 0; j < disc.m_time; ++j) eng.step(j);
    out.stats = eng.finish();
    out.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace gtsfde
