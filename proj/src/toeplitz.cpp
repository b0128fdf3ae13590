#include "gtsfde/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gtsfde/fft.hpp"
#include "gtsfde/krylov.hpp"

namespace gtsfde {

namespace {
using cplx = std::complex<double>;

void check_dim(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace

ToeplitzMatrix::ToeplitzMatrix(std::vector<double> col, std::vector<double> row)
    : first_col(std::move(col)), first_row(std::move(row)) {
    if (first_col.empty() || first_col.size() != first_row.size())
        throw std::invalid_argument("ToeplitzMatrix: column/row sizes must match and be nonzero");
    const double scale = std::max(std::abs(first_col[0]), std::abs(first_row[0]));
    if (std::abs(first_col[0] - first_row[0]) > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("ToeplitzMatrix: first column and row must share the corner entry");
    first_row[0] = first_col[0];
}

std::vector<double> ToeplitzMatrix::to_dense() const {
    const std::size_t n = dim();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = entry(i, j);
    return d;
}

ToeplitzMatrix ToeplitzMatrix::wsgd(const WsgdWeights& w, std::size_t n) {
    if (w.count() < n) throw std::invalid_argument("ToeplitzMatrix::wsgd: need weights up to w_n");
    std::vector<double> col(n), row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) col[i] = w.w[i + 1];
    row[0] = w.w[1];
    if (n > 1) row[1] = w.w[0];
    return {std::move(col), std::move(row)};
}

ToeplitzOperator::ToeplitzOperator(const ToeplitzMatrix& t) : n_(t.dim()) {
    fft_len_ = fft::next_pow2(2 * n_ - 1);
    std::vector<cplx> c(fft_len_, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n_; ++k) c[k] = t.first_col[k];
    for (std::size_t k = 1; k < n_; ++k) c[fft_len_ - k] = t.first_row[k];
    fft::forward(c);
    spectrum_ = std::move(c);
}

void ToeplitzOperator::apply(std::span<const double> v, std::span<double> out) const {
    check_dim(n_, v.size(), "ToeplitzOperator::apply");
    check_dim(n_, out.size(), "ToeplitzOperator::apply");
    std::vector<cplx> buf(fft_len_, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n_; ++i) buf[i] = v[i];
    fft::forward(buf);
    for (std::size_t i = 0; i < fft_len_; ++i) buf[i] *= spectrum_[i];
    fft::inverse(buf);
    for (std::size_t i = 0; i < n_; ++i) out[i] = buf[i].real();
}

std::vector<double> toeplitz_matvec(const ToeplitzMatrix& t, std::span<const double> v) {
    ToeplitzOperator op(t);
    std::vector<double> out(t.dim());
    op.apply(v, out);
    return out;
}

SystemOperator::SystemOperator(double c0, double h, double alpha, double p,
                               std::vector<double> diag_xi, ToeplitzMatrix w,
                               bool time_independent)
    : c0_(c0), h_(h), alpha_(alpha), p_(p), diag_xi_(std::move(diag_xi)),
      w_(std::move(w)), time_independent_(time_independent) {
    if (p_ < 0.0 || p_ > 1.0) throw std::invalid_argument("SystemOperator: skewness must lie in [0, 1]");
    check_dim(w_.dim(), diag_xi_.size(), "SystemOperator");
    if (p_ > 0.0) w_op_ = std::make_shared<ToeplitzOperator>(w_);
    if (p_ < 1.0) wt_op_ = std::make_shared<ToeplitzOperator>(w_.transposed());
}

void SystemOperator::set_diffusion(std::vector<double> diag_xi) {
    check_dim(dim(), diag_xi.size(), "SystemOperator::set_diffusion");
    diag_xi_ = std::move(diag_xi);
}

double SystemOperator::mean_xi() const {
    return std::accumulate(diag_xi_.begin(), diag_xi_.end(), 0.0) /
           static_cast<double>(diag_xi_.size());
}

void SystemOperator::apply(std::span<const double> v, std::span<double> out) const {
    const std::size_t n = dim();
    check_dim(n, v.size(), "SystemOperator::apply");
    check_dim(n, out.size(), "SystemOperator::apply");
    std::vector<double> acc(n, 0.0), tmp(n);
    if (w_op_) {
        w_op_->apply(v, tmp);
        for (std::size_t i = 0; i < n; ++i) acc[i] += p_ * tmp[i];
    }
    if (wt_op_) {
        wt_op_->apply(v, tmp);
        for (std::size_t i = 0; i < n; ++i) acc[i] += (1.0 - p_) * tmp[i];
    }
    const double hs = std::pow(h_, alpha_);
    for (std::size_t i = 0; i < n; ++i) out[i] = c0_ * v[i] - diag_xi_[i] / hs * acc[i];
}

std::vector<double> apply_system(const SystemOperator& op, std::span<const double> v) {
    std::vector<double> out(op.dim());
    op.apply(v, out);
    return out;
}

std::vector<double> SystemOperator::dense() const {
    const std::size_t n = dim();
    const double hs = std::pow(h_, alpha_);
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double a = -diag_xi_[i] / hs *
                       (p_ * w_.entry(i, j) + (1.0 - p_) * w_.entry(j, i));
            if (i == j) a += c0_;
            d[i * n + j] = a;
        }
    return d;
}

// ---------------------------------------------------------------------------
// Skew-circulant factor
// ---------------------------------------------------------------------------

SkewCirculantFactor SkewCirculantFactor::from_operator(const SystemOperator& op) {
    const std::size_t n = op.dim();
    if (n < 2) throw std::invalid_argument("SkewCirculantFactor: need dimension >= 2");
    const ToeplitzMatrix& t = op.toeplitz();

    // Wrap rule: keep all sub-diagonals but the deepest corner, whose slot
    // carries the (negated) first super-diagonal instead.
    std::vector<double> s(n);
    for (std::size_t m = 0; m + 1 < n; ++m) s[m] = t.first_col[m];
    s[n - 1] = -t.first_row[1];

    // The transposed part has the mode-wise conjugate spectrum, i.e. first
    // column (s_0, -s_{n-1}, ..., -s_1).
    const double scale = op.mean_xi() / std::pow(op.h(), op.alpha());
    const double p = op.skewness();
    std::vector<double> q(n);
    q[0] = op.c0() - scale * s[0];
    for (std::size_t m = 1; m < n; ++m)
        q[m] = -scale * (p * s[m] - (1.0 - p) * s[n - m]);
    return from_column(std::move(q));
}

SkewCirculantFactor SkewCirculantFactor::from_column(std::vector<double> col) {
    SkewCirculantFactor f;
    f.n_ = col.size();
    if (f.n_ == 0) throw std::invalid_argument("SkewCirculantFactor: empty column");
    const double pi = std::numbers::pi;
    f.omega_.resize(f.n_);
    f.spectrum_.resize(f.n_);
    for (std::size_t j = 0; j < f.n_; ++j) {
        const double phase = pi * static_cast<double>(j) / static_cast<double>(f.n_);
        f.omega_[j] = std::polar(1.0, -phase);
        f.spectrum_[j] = col[j] * std::polar(1.0, phase);
    }
    fft::forward(f.spectrum_);

    double top = 0.0;
    for (const auto& lam : f.spectrum_) top = std::max(top, std::abs(lam));
    const double floor = 1e-14 * top;
    for (std::size_t k = 0; k < f.n_; ++k) {
        const double mag = std::abs(f.spectrum_[k]);
        if (mag < floor) {
            f.clamped_modes_.push_back(k);
            f.spectrum_[k] = mag > 0.0 ? f.spectrum_[k] * (floor / mag) : cplx{floor, 0.0};
        }
    }
    return f;
}

void SkewCirculantFactor::transform(std::span<const double> in, std::span<double> out,
                                    bool invert) const {
    check_dim(n_, in.size(), "SkewCirculantFactor");
    check_dim(n_, out.size(), "SkewCirculantFactor");
    std::vector<cplx> buf(n_);
    for (std::size_t j = 0; j < n_; ++j) buf[j] = in[j] * std::conj(omega_[j]);
    fft::forward(buf);
    for (std::size_t k = 0; k < n_; ++k)
        buf[k] = invert ? buf[k] / spectrum_[k] : buf[k] * spectrum_[k];
    fft::inverse(buf);
    for (std::size_t j = 0; j < n_; ++j) out[j] = (buf[j] * omega_[j]).real();
}

void SkewCirculantFactor::solve(std::span<const double> y, std::span<double> z) const {
    transform(y, z, true);
}

void SkewCirculantFactor::apply(std::span<const double> v, std::span<double> out) const {
    transform(v, out, false);
}

// ---------------------------------------------------------------------------
// Banded factor
// ---------------------------------------------------------------------------

BandedFactor BandedFactor::from_operator(const SystemOperator& op, std::size_t bandwidth) {
    const std::size_t n = op.dim();
    if (bandwidth < 1 || bandwidth > n - 1)
        throw std::invalid_argument("BandedFactor: bandwidth must lie in [1, n-1]");

    BandedFactor f;
    f.n_ = n;
    f.kl_ = bandwidth;
    f.ku_ = bandwidth;
    f.band_.assign((2 * f.kl_ + f.ku_ + 1) * n, 0.0);
    f.piv_.assign(n, 0);

    const ToeplitzMatrix& t = op.toeplitz();
    const double hs = std::pow(op.h(), op.alpha());
    const double p = op.skewness();
    const auto& xi = op.diag_xi();
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = j > f.ku_ ? j - f.ku_ : 0;
        const std::size_t hi = std::min(n - 1, j + f.kl_);
        for (std::size_t i = lo; i <= hi; ++i) {
            double a = -xi[i] / hs * (p * t.entry(i, j) + (1.0 - p) * t.entry(j, i));
            if (i == j) a += op.c0();
            f.at(i, j) = a;
        }
    }
    f.factor();
    return f;
}

void BandedFactor::factor() {
    const std::size_t n = n_;
    double scale = 0.0;
    for (double v : band_) scale = std::max(scale, std::abs(v));
    const double tiny = std::max(1e-16 * scale, 1e-300);

    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t last = std::min(n - 1, j + kl_);
        std::size_t ip = j;
        for (std::size_t i = j + 1; i <= last; ++i)
            if (std::abs(at(i, j)) > std::abs(at(ip, j))) ip = i;
        piv_[j] = ip;
        if (std::abs(at(ip, j)) < tiny)
            throw SingularFactorError("BandedFactor: singular pivot at column " + std::to_string(j));
        const std::size_t cend = std::min(n - 1, j + kl_ + ku_);
        if (ip != j)
            for (std::size_t k = j; k <= cend; ++k) std::swap(at(j, k), at(ip, k));
        const double pivot = at(j, j);
        for (std::size_t i = j + 1; i <= last; ++i) {
            const double m = at(i, j) / pivot;
            at(i, j) = m;
            for (std::size_t k = j + 1; k <= cend; ++k) at(i, k) -= m * at(j, k);
        }
    }
}

void BandedFactor::solve(std::span<const double> y, std::span<double> z) const {
    check_dim(n_, y.size(), "BandedFactor::solve");
    check_dim(n_, z.size(), "BandedFactor::solve");
    std::copy(y.begin(), y.end(), z.begin());
    auto val = [&](std::size_t i, std::size_t j) {
        return band_[(kl_ + ku_ + i - j) * n_ + j];
    };
    for (std::size_t j = 0; j < n_; ++j) {
        if (piv_[j] != j) std::swap(z[j], z[piv_[j]]);
        const std::size_t last = std::min(n_ - 1, j + kl_);
        for (std::size_t i = j + 1; i <= last; ++i) z[i] -= val(i, j) * z[j];
    }
    for (std::size_t jr = n_; jr-- > 0;) {
        const std::size_t cend = std::min(n_ - 1, jr + kl_ + ku_);
        double acc = z[jr];
        for (std::size_t k = jr + 1; k <= cend; ++k) acc -= val(jr, k) * z[k];
        z[jr] = acc / val(jr, jr);
    }
}

// ---------------------------------------------------------------------------
// Gohberg-Semencul inverse
// ---------------------------------------------------------------------------

namespace {

std::vector<cplx> embed_spectrum(std::span<const double> col, std::span<const double> row,
                                 std::size_t fft_len) {
    std::vector<cplx> c(fft_len, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < col.size(); ++k) c[k] = col[k];
    for (std::size_t k = 1; k < row.size(); ++k) c[fft_len - k] = row[k];
    fft::forward(c);
    return c;
}

}  // namespace

GsfInverse GsfInverse::from_operator(const SystemOperator& op, double column_rtol) {
    if (!op.time_independent())
        throw std::invalid_argument("GsfInverse: operator must be time independent");
    const auto& xi = op.diag_xi();
    const auto [mn, mx] = std::minmax_element(xi.begin(), xi.end());
    if (*mx - *mn > 1e-14 * std::max(std::abs(*mx), 1.0))
        throw std::invalid_argument("GsfInverse: diffusion coefficient must be constant in space");

    const std::size_t n = op.dim();
    SkewCirculantFactor pre = SkewCirculantFactor::from_operator(op);
    SolveConfig cfg;
    cfg.rtol = column_rtol;
    cfg.max_iter = static_cast<int>(std::max<std::size_t>(4 * n, 200));

    auto apply_a = [&](std::span<const double> v, std::span<double> out) { op.apply(v, out); };
    auto apply_p = [&](std::span<const double> v, std::span<double> out) { pre.solve(v, out); };

    std::vector<double> e(n, 0.0), zero(n, 0.0);
    e[0] = 1.0;
    SolveResult rx = bicgstab(apply_a, apply_p, e, zero, cfg);
    e[0] = 0.0;
    e[n - 1] = 1.0;
    SolveResult ry = bicgstab(apply_a, apply_p, e, zero, cfg);
    if (!rx.converged || !ry.converged)
        throw SingularFactorError("GsfInverse: inverse-column solves did not converge");

    const std::vector<double>& x = rx.x;
    const std::vector<double>& y = ry.x;
    double xmax = 0.0;
    for (double v : x) xmax = std::max(xmax, std::abs(v));
    if (std::abs(x[0]) < 1e-14 * xmax)
        throw SingularFactorError("GsfInverse: leading scalar of the decomposition is near zero");

    GsfInverse g;
    g.n_ = n;
    g.leading_ = x[0];
    g.fft_len_ = fft::next_pow2(2 * n - 1);

    std::vector<double> zeros(n, 0.0);
    std::vector<double> col(n), row(n);

    // L(x): lower triangular from the first inverse column.
    row.assign(n, 0.0);
    row[0] = x[0];
    g.lower_x_ = embed_spectrum(x, row, g.fft_len_);

    // U(y reversed): upper triangular with first row (y_{n-1}, ..., y_0).
    for (std::size_t k = 0; k < n; ++k) row[k] = y[n - 1 - k];
    col.assign(n, 0.0);
    col[0] = row[0];
    g.upper_y_ = embed_spectrum(col, row, g.fft_len_);

    // L(y shifted): first column (0, y_0, ..., y_{n-2}).
    col.assign(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) col[k] = y[k - 1];
    g.lower_y_ = embed_spectrum(col, zeros, g.fft_len_);

    // U(x shifted, reversed): first row (0, x_{n-1}, ..., x_1).
    row.assign(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) row[k] = x[n - k];
    g.upper_x_ = embed_spectrum(zeros, row, g.fft_len_);
    return g;
}

void GsfInverse::apply(std::span<const double> y, std::span<double> x) const {
    check_dim(n_, y.size(), "GsfInverse::apply");
    check_dim(n_, x.size(), "GsfInverse::apply");

    std::vector<cplx> z(fft_len_, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n_; ++i) z[i] = y[i];
    fft::forward(z);

    std::vector<cplx> w2(fft_len_), w4(fft_len_);
    for (std::size_t i = 0; i < fft_len_; ++i) {
        w2[i] = z[i] * upper_y_[i];
        w4[i] = z[i] * upper_x_[i];
    }
    fft::inverse(w2);
    fft::inverse(w4);
    // re-pad the truncated intermediate products before the second round
    for (std::size_t i = n_; i < fft_len_; ++i) w2[i] = w4[i] = cplx{0.0, 0.0};
    for (std::size_t i = 0; i < n_; ++i) {
        w2[i] = cplx{w2[i].real(), 0.0};
        w4[i] = cplx{w4[i].real(), 0.0};
    }
    fft::forward(w2);
    fft::forward(w4);
    for (std::size_t i = 0; i < fft_len_; ++i) w2[i] = w2[i] * lower_x_[i] - w4[i] * lower_y_[i];
    fft::inverse(w2);
    for (std::size_t i = 0; i < n_; ++i) x[i] = w2[i].real() / leading_;
}

std::size_t GsfInverse::stored_scalars() const {
    return 2 * (lower_x_.size() + upper_y_.size() + lower_y_.size() + upper_x_.size());
}

// ---------------------------------------------------------------------------

bool is_diagonally_dominant(const SystemOperator& op) {
    const std::size_t n = op.dim();
    for (double v : op.diag_xi())
        if (!(v > 0.0)) return false;
    if (n <= 63) {
        const std::vector<double> d = op.dense();
        for (std::size_t i = 0; i < n; ++i) {
            double off = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) off += std::abs(d[i * n + j]);
            if (std::abs(d[i * n + i]) < off - 1e-12 * std::abs(d[i * n + i])) return false;
        }
        return true;
    }
    return op.alpha() >= wsgd_sign_change_alpha();
}

}  // namespace gtsfde
