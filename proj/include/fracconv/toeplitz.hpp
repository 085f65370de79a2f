#pragma once

// First-column/first-row representations of the scheme matrices.
//
// B-hat_m is lower-triangular Toeplitz with first column 2 W^(m) (twice the
// lag weights); the two-sided operator is the beta-weighted combination
// (1+beta)/2 * B-hat + (1-beta)/2 * B-hat^T. Products come in an exact O(N^2)
// flavor and an FFT-accelerated circulant-embedding flavor; dense
// materialization exists for oracles and small-N spectral checks only.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "coeff.hpp"

namespace fracconv::toeplitz {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Lower-triangular Toeplitz matrix: entry (i,j) = first_col[i-j] for i >= j.
struct LowerToeplitz {
    std::vector<double> first_col;

    [[nodiscard]] std::size_t size() const noexcept { return first_col.size(); }

    [[nodiscard]] Matrix to_dense() const {
        const auto n = static_cast<Eigen::Index>(first_col.size());
        Matrix dense = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j)
                dense(i, j) = first_col[static_cast<std::size_t>(i - j)];
        return dense;
    }
};

/// First column of B-hat_m: 2 * prefactor * W^(m) truncated to length N, i.e.
/// 2(b + c/2) for M1 (the 1/2 prefactor folds the leading 2 back in),
/// 2(b + c/2 + d/4) for M2, and twice the shifted M3 combination — the +1/+2
/// lag shifts are already folded into the weights, which is exactly what
/// multiplying by the down-shift matrix J (and J^2) produces.
inline LowerToeplitz build_bhat(coeff::Scheme scheme, coeff::FracOrder alpha, std::size_t N) {
    if (N < 3) throw std::invalid_argument("build_bhat: N must be >= 3");
    coeff::WeightTable table = coeff::scheme_weights(scheme, alpha, N);
    for (double& w : table.weights) w *= 2.0 * table.prefactor;
    return LowerToeplitz{std::move(table.weights)};
}

/// Toeplitz operator (1+beta)/2 * B-hat + (1-beta)/2 * B-hat^T held as first
/// column + first row (first_col[0] == first_row[0]); the FFT path caches the
/// spectrum of its circulant embedding at construction, so matvec calls are
/// reentrant and the operator is safe to share across threads.
class ToeplitzOperator {
public:
    ToeplitzOperator(std::vector<double> first_col, std::vector<double> first_row)
        : col_(std::move(first_col)), row_(std::move(first_row)) {
        if (col_.size() != row_.size() || col_.empty())
            throw std::invalid_argument("ToeplitzOperator: column/row size mismatch");
        if (col_[0] != row_[0])
            throw std::invalid_argument("ToeplitzOperator: corner entries disagree");
        const std::size_t n = col_.size();
        fft_size_ = 1;
        while (fft_size_ < 2 * n - 1) fft_size_ <<= 1;
        // Circulant first column: diagonals k = 0..N-1 in place, upper
        // diagonals wrapped to the tail.
        std::vector<std::complex<double>> embed(fft_size_, 0.0);
        for (std::size_t k = 0; k < n; ++k) embed[k] = col_[k];
        for (std::size_t k = 1; k < n; ++k) embed[fft_size_ - k] = row_[k];
        symbol_fft_.resize(fft_size_);
        Eigen::FFT<double> fft;
        fft.fwd(symbol_fft_, embed);
    }

    [[nodiscard]] std::size_t size() const noexcept { return col_.size(); }
    [[nodiscard]] const std::vector<double>& first_col() const noexcept { return col_; }
    [[nodiscard]] const std::vector<double>& first_row() const noexcept { return row_; }

    /// Exact O(N^2) product of the materialized matrix with v.
    [[nodiscard]] Vector matvec_dense(const Vector& v) const {
        const auto n = static_cast<Eigen::Index>(col_.size());
        if (v.size() != n) throw std::invalid_argument("matvec_dense: dimension mismatch");
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j <= i; ++j)
                acc += col_[static_cast<std::size_t>(i - j)] * v[j];
            for (Eigen::Index j = i + 1; j < n; ++j)
                acc += row_[static_cast<std::size_t>(j - i)] * v[j];
            y[i] = acc;
        }
        return y;
    }

    /// Circulant-embedding product: two transforms per call against the cached
    /// symbol spectrum. Matches matvec_dense to ~1e-12 relative.
    [[nodiscard]] Vector matvec_fft(const Vector& v) const {
        const auto n = static_cast<Eigen::Index>(col_.size());
        if (v.size() != n) throw std::invalid_argument("matvec_fft: dimension mismatch");
        thread_local Eigen::FFT<double> fft;  // caches plans per transform size
        std::vector<std::complex<double>> padded(fft_size_, 0.0);
        for (Eigen::Index i = 0; i < n; ++i) padded[static_cast<std::size_t>(i)] = v[i];
        std::vector<std::complex<double>> spectrum(fft_size_);
        fft.fwd(spectrum, padded);
        for (std::size_t k = 0; k < fft_size_; ++k) spectrum[k] *= symbol_fft_[k];
        fft.inv(padded, spectrum);
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = padded[static_cast<std::size_t>(i)].real();
        return y;
    }

    [[nodiscard]] Matrix to_dense() const {
        const auto n = static_cast<Eigen::Index>(col_.size());
        Matrix dense(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                dense(i, j) = i >= j ? col_[static_cast<std::size_t>(i - j)]
                                     : row_[static_cast<std::size_t>(j - i)];
        return dense;
    }

private:
    std::vector<double> col_, row_;
    std::size_t fft_size_ = 0;
    std::vector<std::complex<double>> symbol_fft_;
};

/// (1+beta)/2 * B-hat + (1-beta)/2 * B-hat^T. beta = 1 is the pure left-sided
/// (lower-triangular) operator, beta = -1 pure right-sided, beta = 0 symmetric.
inline ToeplitzOperator combine_beta(const LowerToeplitz& bhat, double beta) {
    if (!(beta >= -1.0 && beta <= 1.0))
        throw std::invalid_argument("combine_beta: beta must lie in [-1, 1]");
    const std::size_t n = bhat.first_col.size();
    std::vector<double> col(n), row(n);
    col[0] = row[0] = bhat.first_col[0];
    for (std::size_t k = 1; k < n; ++k) {
        col[k] = 0.5 * (1.0 + beta) * bhat.first_col[k];
        row[k] = 0.5 * (1.0 - beta) * bhat.first_col[k];
    }
    return ToeplitzOperator{std::move(col), std::move(row)};
}

}  // namespace fracconv::toeplitz
