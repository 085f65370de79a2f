#pragma once

// Generating functions g_1, g_2, g_3 of the three stencils, evaluated by three
// independent routes:
//
//   * g_direct    — partial sum  sum_{k<K} W_k e^{ik theta}  of the lag weights
//                   (for M1 the weights enter without the 1/2 prefactor, so the
//                   value matches the symbol the stability analysis works with);
//   * re_g_closed — the closed real-part formulas built from the positive sums
//                   H1, H2 and trig polynomials of theta/2;
//   * g_k_form    — the zeta-series form of I1 = sum b_k e^{ik theta} together
//                   with I2 = (1-z) I1, I3 = (1-z)^2 I1.
//
// Nonnegativity of Re g_m over (0,pi] x (0,1) is what makes the symmetrized
// scheme matrices positive semidefinite, hence the scan utilities here.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "coeff.hpp"
#include "special.hpp"

namespace fracconv::genfun {

using coeff::FracOrder;
using coeff::Scheme;
using GenFunValue = std::complex<double>;

/// M3 shift-weight constants (F-Q) and R, matching the stencil table.
inline constexpr double kFMinusQ = -0.23;
inline constexpr double kShiftR = 0.111;

/// Truncation controls for the H-sums and the zeta r-series.
///
/// `tail_correction` appends a closed-form Euler-Maclaurin estimate of the
/// discarded n-tail to the H-sums, which drops their truncation error from
/// ~1e-5 (absolute, at n_max = 1000) to round-off.  The raw sums are what
/// h1()/h2() return; the correction is an explicit, separately reported term.
struct HSeriesParams {
    int n_max = 1000;
    int r_max = 40;
    double tail_tol = 1e-16;
    bool tail_correction = true;
};

namespace detail {

inline void check_theta_0_pi(double theta) {
    if (!(theta > 0.0 && theta <= std::numbers::pi))
        throw std::invalid_argument("theta must lie in (0, pi]");
}

struct HSums {
    double h1, h2;
    double h1_tail, h2_tail;  // Euler-Maclaurin tail estimates (not yet added)
};

// sum_{n > n_max} (2 n pi + w)^(alpha-3), via Euler-Maclaurin off n = n_max+1.
inline double em_tail(double w, double alpha, int n_max) {
    const double x = 2.0 * (n_max + 1) * std::numbers::pi + w;
    const double integral = std::pow(x, alpha - 2.0) / (2.0 * std::numbers::pi * (2.0 - alpha));
    const double half = 0.5 * std::pow(x, alpha - 3.0);
    const double deriv = -(alpha - 3.0) * 2.0 * std::numbers::pi * std::pow(x, alpha - 4.0) / 12.0;
    return integral + half + deriv;
}

inline HSums h_sums(double theta, double alpha, int n_max) {
    check_theta_0_pi(theta);
    if (n_max < 1) throw std::invalid_argument("h_sums: n_max must be >= 1");
    const double pi = std::numbers::pi;
    double sum_minus = 0.0, sum_plus = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = std::pow(2.0 * n * pi + theta, alpha - 3.0);
        const double q = std::pow(2.0 * (n + 1) * pi - theta, alpha - 3.0);
        sum_minus += p - q;
        sum_plus += p + q;
    }
    const double tp = em_tail(theta, alpha, n_max);
    const double tq = em_tail(2.0 * pi - theta, alpha, n_max);
    const double ca = std::cos(alpha * pi / 2.0);
    const double sa = std::sin(alpha * pi / 2.0);
    return {ca * sum_minus, sa * sum_plus, ca * (tp - tq), sa * (tp + tq)};
}

struct ReGParts {
    double value;      // Re g_m per the requested params
    double tail_part;  // contribution of the Euler-Maclaurin H-tail to Re g_m
};

inline ReGParts re_g_parts(Scheme scheme, double theta, double al, const HSeriesParams& params) {
    const HSums hs = h_sums(theta, al, params.n_max);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const double s3 = s * s * s;
    const double gamma = std::tgamma(3.0 - al);
    double w1 = 0.0, w2 = 0.0;  // Re g = w1 * H1 + w2 * H2
    switch (scheme) {
        case Scheme::M1: {
            const double g11 = c + s * std::sin(theta);
            const double g12 = s - s * std::cos(theta);
            w1 = 16.0 * s3 * gamma * g11;
            w2 = 16.0 * s3 * gamma * g12;
            break;
        }
        case Scheme::M2: {
            const double g21 = c + s * std::sin(theta) - s * s * std::cos(1.5 * theta);
            const double g22 = s - s * std::cos(theta) - s * s * std::sin(1.5 * theta);
            w1 = 8.0 * s3 * gamma * g21;
            w2 = 8.0 * s3 * gamma * g22;
            break;
        }
        case Scheme::M3: {
            const double c2 = c * c, s2 = s * s;
            const double g31 = c * (6.0 + c2 * (-9.0 + 4.0 * c2)) +
                               4.0 * kFMinusQ * c *
                                   (-8.0 + c2 * (32.0 + c2 * (-40.0 + 16.0 * c2))) +
                               4.0 * kShiftR * c *
                                   (4.0 + c2 * (-56.0 + c2 * (164.0 + c2 * (-176.0 + 64.0 * c2))));
            const double g32 = s3 * (-1.0 + 4.0 * s2) +
                               8.0 * s3 * kFMinusQ * (-1.0 + s2 * (8.0 - 8.0 * s2)) +
                               16.0 * s3 * kShiftR *
                                   (-1.0 + s2 * (13.0 + s2 * (-28.0 + 16.0 * s2)));
            w1 = 8.0 * s3 * gamma * g31;
            w2 = 8.0 * s3 * gamma * g32;
            break;
        }
    }
    const double base = w1 * hs.h1 + w2 * hs.h2;
    const double tail = w1 * hs.h1_tail + w2 * hs.h2_tail;
    return {base + (params.tail_correction ? tail : 0.0), tail};
}

}  // namespace detail

/// H1(theta, alpha) truncated at n_max: cos(alpha pi/2) sum ((2n pi + theta)^(a-3)
/// - (2(n+1) pi - theta)^(a-3)). Strictly positive on (0, pi) x (0,1); exactly
/// zero at theta = pi where every difference term cancels pairwise.
inline double h1(double theta, FracOrder alpha, int n_max) {
    return detail::h_sums(theta, alpha.value(), n_max).h1;
}

/// H2, the "+" analogue of H1. Strictly positive on (0, pi] x (0,1).
inline double h2(double theta, FracOrder alpha, int n_max) {
    return detail::h_sums(theta, alpha.value(), n_max).h2;
}

/// Euler-Maclaurin estimates of the n > n_max remainders of H1 and H2.
inline std::array<double, 2> h_tail_estimate(double theta, FracOrder alpha, int n_max) {
    const detail::HSums hs = detail::h_sums(theta, alpha.value(), n_max);
    return {hs.h1_tail, hs.h2_tail};
}

/// Closed-form real part of g_m on theta in (0, pi].
inline double re_g_closed(Scheme scheme, double theta, FracOrder alpha,
                          const HSeriesParams& params = {}) {
    return detail::re_g_parts(scheme, theta, alpha.value(), params).value;
}

/// Partial sum sum_{k<K} W_k e^{ik theta} of the scheme's lag weights.
///
/// For M1 this is the symbol g_1 itself (weights without the 1/2 prefactor);
/// truncation leaves a tail of roughly 2 alpha(2-alpha)(1-alpha) K^{-1-alpha}
/// / (2 sin(theta/2)), which callers comparing routes must budget for.
inline GenFunValue g_direct(Scheme scheme, double theta, FracOrder alpha, std::size_t K) {
    const coeff::WeightTable table = coeff::scheme_weights(scheme, alpha, K);
    const std::complex<double> z = std::polar(1.0, theta);
    std::complex<double> sum = 0.0, zk = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
        sum += table.weights[k] * zk;
        zk *= z;
        // Resync the phase recurrence so rounding cannot accumulate over long sums.
        if ((k & 1023u) == 1023u) zk = std::polar(1.0, theta * static_cast<double>(k + 1));
    }
    return sum;
}

/// Zeta-series (K-form) evaluation, valid on 0 < theta < 2 pi:
///   I1 = 8 i e^{i theta/2} sin^3(theta/2)
///        (Gamma(3-a) (-i theta)^{a-3} + sum_r zeta(a-2-r) (i theta)^r / r!)
/// with the principal branch (-i theta)^p = theta^p e^{-i p pi/2}, then
///   g_1 = (3 - z) I1,  g_2 = G2(z) I1,  g_3 = (G2(z) - (F-Q)(1-z)^3
///         - R (1-z^2)(1-z)^2) I1,  G2(z) = 1 + (1-z)/2 + (1-z)^2/4.
inline GenFunValue g_k_form(Scheme scheme, double theta, FracOrder alpha,
                            const HSeriesParams& params = {}) {
    if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi))
        throw std::invalid_argument("g_k_form: theta must lie in (0, 2 pi)");
    if (params.r_max < 1) throw std::invalid_argument("g_k_form: r_max must be >= 1");
    const double al = alpha.value();
    const double pi = std::numbers::pi;

    std::complex<double> core =
        std::tgamma(3.0 - al) * std::polar(std::pow(theta, al - 3.0), -(al - 3.0) * pi / 2.0);
    const std::complex<double> itheta(0.0, theta);
    std::complex<double> pw = 1.0;  // (i theta)^r / r!
    for (int r = 0; r <= params.r_max; ++r) {
        const std::complex<double> term = special::zeta_real(al - 2.0 - r) * pw;
        core += term;
        if (std::abs(term) < params.tail_tol && r > 2) break;
        pw *= itheta / static_cast<double>(r + 1);
    }

    const double s = std::sin(theta / 2.0);
    const std::complex<double> I1 =
        std::complex<double>(0.0, 8.0) * std::polar(1.0, theta / 2.0) * (s * s * s) * core;
    const std::complex<double> z = std::polar(1.0, theta);
    switch (scheme) {
        case Scheme::M1:
            return (3.0 - z) * I1;
        case Scheme::M2: {
            const std::complex<double> one_z = 1.0 - z;
            return (1.0 + 0.5 * one_z + 0.25 * one_z * one_z) * I1;
        }
        case Scheme::M3: {
            const std::complex<double> one_z = 1.0 - z;
            const std::complex<double> G2 = 1.0 + 0.5 * one_z + 0.25 * one_z * one_z;
            const std::complex<double> G3 = G2 - kFMinusQ * one_z * one_z * one_z -
                                            kShiftR * (1.0 - z * z) * one_z * one_z;
            return G3 * I1;
        }
    }
    throw std::logic_error("g_k_form: unknown scheme");
}

/// Grid scan of Re g_m with per-alpha nonnegativity verdicts.
struct ScanReport {
    Scheme scheme;
    std::vector<double> theta_grid;
    std::vector<double> alpha_grid;
    double min_value = 0.0;
    double argmin_theta = 0.0;
    double argmin_alpha = 0.0;
    std::vector<bool> nonnegative;  ///< per alpha: min over theta >= -tol_scan
    double tol_scan = 1e-10;
    double max_tail_estimate = 0.0;  ///< largest |H-tail contribution to Re g| on the grid
};

/// Evaluate re_g_closed on theta_grid x alpha_grid. The minimum is reduced
/// deterministically (ties broken toward smaller theta, then smaller alpha,
/// by iteration order).
inline ScanReport stability_scan(Scheme scheme, const std::vector<double>& alpha_grid,
                                 const std::vector<double>& theta_grid,
                                 const HSeriesParams& params = {}, double tol_scan = 1e-10) {
    if (alpha_grid.empty() || theta_grid.empty())
        throw std::invalid_argument("stability_scan: empty grid");
    ScanReport report;
    report.scheme = scheme;
    report.theta_grid = theta_grid;
    report.alpha_grid = alpha_grid;
    report.tol_scan = tol_scan;
    report.min_value = std::numeric_limits<double>::infinity();
    report.nonnegative.assign(alpha_grid.size(), true);
    for (std::size_t ia = 0; ia < alpha_grid.size(); ++ia) {
        double alpha_min = std::numeric_limits<double>::infinity();
        for (double theta : theta_grid) {
            const auto parts = detail::re_g_parts(scheme, theta, alpha_grid[ia], params);
            report.max_tail_estimate =
                std::max(report.max_tail_estimate, std::abs(parts.tail_part));
            alpha_min = std::min(alpha_min, parts.value);
            if (parts.value < report.min_value) {
                report.min_value = parts.value;
                report.argmin_theta = theta;
                report.argmin_alpha = alpha_grid[ia];
            }
        }
        report.nonnegative[ia] = alpha_min >= -tol_scan;
    }
    return report;
}

/// The three left-hand sides of the weight-feasibility system
/// (-1 - 8(F-Q) - 16R, 8(F-Q) + 24R, 1 + 8(F-Q) + 8R); all three simultaneously
/// nonnegative is impossible, so every input leaves at least one negative.
inline std::array<double, 3> g3_weight_feasibility(double f_minus_q, double r) {
    return {-1.0 - 8.0 * f_minus_q - 16.0 * r, 8.0 * f_minus_q + 24.0 * r,
            1.0 + 8.0 * f_minus_q + 8.0 * r};
}

/// Least-squares slope of log |g_m(theta) - kappa_m Gamma(3-a)(-i theta)^a|
/// against log theta, with kappa_1 = 2 and kappa_2 = kappa_3 = 1. Expected
/// 2 + alpha for M1 and about 3 for M2/M3. Uses the K-form internally because
/// the samples sit at small theta where partial sums would need huge K.
inline double consistency_slope(Scheme scheme, FracOrder alpha,
                                const std::vector<double>& theta_samples,
                                const HSeriesParams& params = {}) {
    if (theta_samples.size() < 4)
        throw std::invalid_argument("consistency_slope: need at least 4 samples");
    for (std::size_t i = 0; i < theta_samples.size(); ++i) {
        if (!(theta_samples[i] > 0.0 && theta_samples[i] <= 0.5))
            throw std::invalid_argument("consistency_slope: samples must lie in (0, 0.5]");
        if (i > 0 && !(theta_samples[i] < theta_samples[i - 1]))
            throw std::invalid_argument("consistency_slope: samples must decrease");
    }
    const double al = alpha.value();
    const double kappa = scheme == Scheme::M1 ? 2.0 : 1.0;
    const double gamma = std::tgamma(3.0 - al);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (double theta : theta_samples) {
        const std::complex<double> lead =
            kappa * gamma * std::polar(std::pow(theta, al), -al * std::numbers::pi / 2.0);
        const double x = std::log(theta);
        const double y = std::log(std::abs(g_k_form(scheme, theta, alpha, params) - lead));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(theta_samples.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Default geometric sample set 0.5 * 0.7^j, j = 0..7.
inline std::vector<double> default_theta_samples() {
    std::vector<double> samples(8);
    double t = 0.5;
    for (auto& s : samples) {
        s = t;
        t *= 0.7;
    }
    return samples;
}

}  // namespace fracconv::genfun
