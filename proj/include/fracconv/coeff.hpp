#pragma once

// Coefficient sequences behind the fractional-derivative stencils.
//
// Everything here derives from a single sequence
//
//     a_0 = 1,   a_k = (k+1)^(2-alpha) - 2 k^(2-alpha) + (k-1)^(2-alpha)
//
// whose backward differences of increasing order give b_k, c_k, d_k (with the
// convention a_j = 0 for j < 0, so the low-k boundary terms come out as
// b_0 = c_0 = d_0 = 1, c_1 = a_1 - 2, d_1 = a_1 - 3, d_2 = a_2 - 3 a_1 + 3).
// The three schemes combine these into lag weights W_k; the approximation to
// the left (right) fractional derivative of order alpha reads
//
//     prefactor / (Gamma(3-alpha) h^alpha) * sum_k W_k f(x -+ k h).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracconv::coeff {

enum class Scheme { M1, M2, M3 };

/// Fractional order restricted to the open interval (0,1).
class FracOrder {
public:
    explicit FracOrder(double alpha) : value_(alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("FracOrder: alpha must lie in (0,1)");
    }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    double value_;
};

/// a_k evaluated in a cancellation-free form.
///
/// The textbook difference of three k^(2-alpha) terms loses ~ k^(2-alpha)*eps
/// absolutely; at k ~ 1e5 and small alpha that noise is ~1e-7 per term and
/// random-walks to ~1e-4 in the oscillatory sums built on top. Factoring out
/// k^(2-alpha) and using expm1/log1p keeps the absolute error near 1e-11.
inline double a_seq(FracOrder alpha, std::size_t k) {
    if (k == 0) return 1.0;
    const double p = 2.0 - alpha.value();
    if (k == 1) return std::pow(2.0, p) - 2.0;
    const double kd = static_cast<double>(k);
    const double bracket =
        std::expm1(p * std::log1p(1.0 / kd)) + std::expm1(p * std::log1p(-1.0 / kd));
    return std::pow(kd, p) * bracket;
}

/// First backward difference of a (b_0 = 1).
inline double b_seq(FracOrder alpha, std::size_t k) {
    if (k == 0) return 1.0;
    return a_seq(alpha, k) - a_seq(alpha, k - 1);
}

/// Second backward difference of a (c_0 = 1, c_1 = a_1 - 2).
inline double c_seq(FracOrder alpha, std::size_t k) {
    if (k == 0) return 1.0;
    if (k == 1) return a_seq(alpha, 1) - 2.0;
    return a_seq(alpha, k) - 2.0 * a_seq(alpha, k - 1) + a_seq(alpha, k - 2);
}

/// Third backward difference of a (d_0 = 1, d_1 = a_1 - 3, d_2 = a_2 - 3 a_1 + 3).
inline double d_seq(FracOrder alpha, std::size_t k) {
    if (k == 0) return 1.0;
    if (k == 1) return a_seq(alpha, 1) - 3.0;
    if (k == 2) return a_seq(alpha, 2) - 3.0 * a_seq(alpha, 1) + 3.0;
    return a_seq(alpha, k) - 3.0 * a_seq(alpha, k - 1) + 3.0 * a_seq(alpha, k - 2) -
           a_seq(alpha, k - 3);
}

/// a_0 .. a_{K-1} in one pass.
inline std::vector<double> a_table(FracOrder alpha, std::size_t K) {
    std::vector<double> a(K);
    for (std::size_t k = 0; k < K; ++k) a[k] = a_seq(alpha, k);
    return a;
}

/// Per-scheme lag weights with the scheme prefactor rho_m.
struct WeightTable {
    Scheme scheme;
    double alpha;
    std::vector<double> weights;  ///< W_k, lag index k = 0..K-1
    double prefactor;             ///< 1/2 for M1, 1 for M2/M3
};

/// M1: W_k = 2 b_k + c_k (prefactor 1/2).
/// M2: W_k = b_k + c_k/2 + d_k/4.
/// M3: W_k = b_k + 0.5 c_k + 0.369 d_k - 0.23 d_{k-1} + 0.111 d_{k-2},
///     d at negative index taken as 0. The shift constants are fixed decimal
///     values, not recomputed from the defining constraints.
inline WeightTable scheme_weights(Scheme scheme, FracOrder alpha, std::size_t K) {
    if (K < 3) throw std::invalid_argument("scheme_weights: K must be >= 3");
    const std::vector<double> a = a_table(alpha, K);
    auto at = [&a](std::ptrdiff_t j) { return j < 0 ? 0.0 : a[static_cast<std::size_t>(j)]; };

    WeightTable table{scheme, alpha.value(), std::vector<double>(K), 1.0};
    std::vector<double> b(K), c(K), d(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto j = static_cast<std::ptrdiff_t>(k);
        b[k] = k == 0 ? 1.0 : a[k] - a[k - 1];
        c[k] = k == 0 ? 1.0 : at(j) - 2.0 * at(j - 1) + at(j - 2);
        d[k] = k == 0 ? 1.0 : at(j) - 3.0 * at(j - 1) + 3.0 * at(j - 2) - at(j - 3);
    }
    switch (scheme) {
        case Scheme::M1:
            table.prefactor = 0.5;
            for (std::size_t k = 0; k < K; ++k) table.weights[k] = 2.0 * b[k] + c[k];
            break;
        case Scheme::M2:
            for (std::size_t k = 0; k < K; ++k)
                table.weights[k] = b[k] + 0.5 * c[k] + 0.25 * d[k];
            break;
        case Scheme::M3:
            for (std::size_t k = 0; k < K; ++k) {
                const double dm1 = k >= 1 ? d[k - 1] : 0.0;
                const double dm2 = k >= 2 ? d[k - 2] : 0.0;
                table.weights[k] = b[k] + 0.5 * c[k] + 0.369 * d[k] - 0.23 * dm1 + 0.111 * dm2;
            }
            break;
    }
    return table;
}

/// Partial sum of the lag weights, sum_{k<K} W_k.
///
/// The full series sums to zero for every scheme (g_m(0, alpha) = 0), so the
/// partial sum is the negated tail; it decays like K^{-alpha}.
inline double weight_tail_sum(Scheme scheme, FracOrder alpha, std::size_t K) {
    const WeightTable table = scheme_weights(scheme, alpha, K);
    double sum = 0.0;
    for (double w : table.weights) sum += w;
    return sum;
}

}  // namespace fracconv::coeff
