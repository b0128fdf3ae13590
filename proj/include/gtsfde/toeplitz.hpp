#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "gtsfde/kernels.hpp"

namespace gtsfde {

/// Constant-diagonal matrix described by its first column and first row
/// (first entries equal). Entry (i, j) = col[i-j] for i >= j, row[j-i] else.
struct ToeplitzMatrix {
    std::vector<double> first_col;
    std::vector<double> first_row;

    ToeplitzMatrix() = default;
    ToeplitzMatrix(std::vector<double> col, std::vector<double> row);

    std::size_t dim() const { return first_col.size(); }
    ToeplitzMatrix transposed() const { return {first_row, first_col}; }
    double entry(std::size_t i, std::size_t j) const {
        return i >= j ? first_col[i - j] : first_row[j - i];
    }
    std::vector<double> to_dense() const;  // row-major, for oracles and small-n checks

    /// The spatial WSGD matrix of dimension n: first column (w_1 .. w_n),
    /// first row (w_1, w_0, 0, ...). Requires weights up to index n.
    static ToeplitzMatrix wsgd(const WsgdWeights& w, std::size_t n);
};

/// Toeplitz matrix with a precomputed circulant embedding; products cost
/// two transforms of the (power-of-two) embedding length.
class ToeplitzOperator {
public:
    explicit ToeplitzOperator(const ToeplitzMatrix& t);

    void apply(std::span<const double> v, std::span<double> out) const;
    std::size_t dim() const { return n_; }
    std::size_t stored_scalars() const { return 2 * spectrum_.size(); }

private:
    std::size_t n_ = 0;
    std::size_t fft_len_ = 0;
    std::vector<std::complex<double>> spectrum_;
};

/// One-shot structured product; prefer ToeplitzOperator for repeated use.
std::vector<double> toeplitz_matvec(const ToeplitzMatrix& t, std::span<const double> v);

/// The per-step system matrix
///   M = c0 I - diag(xi)/h^alpha [ p W + (1-p) W^T ]
/// held in structured form. W is the WSGD Toeplitz matrix (or any Toeplitz
/// stand-in supplied by a test).
class SystemOperator {
public:
    SystemOperator(double c0, double h, double alpha, double p,
                   std::vector<double> diag_xi, ToeplitzMatrix w,
                   bool time_independent = false);

    void apply(std::span<const double> v, std::span<double> out) const;

    std::size_t dim() const { return diag_xi_.size(); }
    double c0() const { return c0_; }
    double h() const { return h_; }
    double alpha() const { return alpha_; }
    double skewness() const { return p_; }
    bool time_independent() const { return time_independent_; }
    const std::vector<double>& diag_xi() const { return diag_xi_; }
    double mean_xi() const;
    const ToeplitzMatrix& toeplitz() const { return w_; }

    /// Swap in the diffusion samples of the next time level; the Toeplitz
    /// spectra are shared and stay untouched.
    void set_diffusion(std::vector<double> diag_xi);

    std::vector<double> dense() const;  // row-major assembly (small n only)

private:
    double c0_, h_, alpha_, p_;
    std::vector<double> diag_xi_;
    ToeplitzMatrix w_;
    std::shared_ptr<const ToeplitzOperator> w_op_, wt_op_;
    bool time_independent_;
};

std::vector<double> apply_system(const SystemOperator& op, std::span<const double> v);

/// Skew-circulant preconditioner P = c0 I - mean(xi)/h^alpha [p sk(W) + (1-p) sk(W)^T],
/// diagonalized by a modulated Fourier transform. Near-zero spectral values
/// are clamped and flagged instead of silently inverted.
class SkewCirculantFactor {
public:
    static SkewCirculantFactor from_operator(const SystemOperator& op);
    /// Factor a plain skew-circulant given its first column (tests, internals).
    static SkewCirculantFactor from_column(std::vector<double> col);

    void solve(std::span<const double> y, std::span<double> z) const;
    void apply(std::span<const double> v, std::span<double> out) const;

    std::size_t dim() const { return n_; }
    bool clamped() const { return !clamped_modes_.empty(); }
    const std::vector<std::size_t>& clamped_modes() const { return clamped_modes_; }
    std::size_t stored_scalars() const { return 2 * (spectrum_.size() + omega_.size()); }

private:
    std::size_t n_ = 0;
    std::vector<std::complex<double>> spectrum_;   // possibly clamped
    std::vector<std::complex<double>> omega_;      // modulation diagonal
    std::vector<std::size_t> clamped_modes_;

    void transform(std::span<const double> in, std::span<double> out, bool invert) const;
};

struct SingularFactorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Banded LU (partial pivoting) of the truncated operator
///   c0 I - diag(xi)/h^alpha [p W_l + (1-p) W_l^T],
/// where W_l keeps the diagonals of W within distance l. For l = n-1 the
/// truncation is the full operator.
class BandedFactor {
public:
    static BandedFactor from_operator(const SystemOperator& op, std::size_t bandwidth);

    void solve(std::span<const double> y, std::span<double> z) const;
    std::size_t dim() const { return n_; }
    std::size_t bandwidth() const { return kl_; }
    std::size_t stored_scalars() const { return band_.size() + piv_.size(); }

private:
    std::size_t n_ = 0, kl_ = 0, ku_ = 0;
    std::vector<double> band_;       // LAPACK-style band storage, factored
    std::vector<std::size_t> piv_;

    void factor();
    double& at(std::size_t i, std::size_t j) { return band_[(kl_ + ku_ + i - j) * n_ + j]; }
};

/// Gohberg-Semencul representation of M^{-1} for a time-independent system:
/// two triangular-Toeplitz products built from the first and last columns of
/// the inverse, applied with a handful of FFTs.
class GsfInverse {
public:
    static GsfInverse from_operator(const SystemOperator& op, double column_rtol = 1e-13);

    void apply(std::span<const double> y, std::span<double> x) const;
    std::size_t dim() const { return n_; }
    std::size_t stored_scalars() const;

private:
    std::size_t n_ = 0, fft_len_ = 0;
    double leading_ = 0.0;  // first entry of M^{-1} e_1
    std::vector<std::complex<double>> lower_x_, upper_y_, lower_y_, upper_x_;
};

/// Row-sum dominance check for small systems, the alpha >= alpha0 criterion
/// otherwise (sufficient once all off-diagonal weights share one sign).
bool is_diagonally_dominant(const SystemOperator& op);

}  // namespace gtsfde
