#pragma once

// Small special-function kit: sin(pi x) with exact range reduction, the real
// Riemann zeta function, and a log-gamma ratio helper. Double precision only;
// accuracy targets are what the generating-function series need (relative
// error ~1e-12 over the arguments that actually occur there).

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fracconv::special {

/// sin(pi*x), reducing the argument against the nearest integer first so the
/// result stays accurate for large |x| and vanishes exactly at integers.
inline double sin_pi(double x) {
    const double n = std::nearbyint(x);
    const double y = x - n;  // |y| <= 0.5
    const double s = std::sin(std::numbers::pi * y);
    return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

namespace detail {

// Bernoulli ratios B_{2j}/(2j)! for the Euler-Maclaurin tail, j = 1..12.
inline constexpr double kBernoulliRatio[12] = {
    8.3333333333333333333e-02, -1.3888888888888888889e-03, 3.3068783068783068783e-05,
    -8.2671957671957671958e-07, 2.0876756987868098979e-08, -5.2841901386874931848e-10,
    1.3382536530684678833e-11, -3.3896802963225828668e-13, 8.5860620562778445641e-15,
    -2.1748686985580618730e-16, 5.5090028283602295152e-18, -1.3954464685812523340e-19};

// Euler-Maclaurin evaluation, reliable for s >= 0.5 (s != 1).
inline double zeta_em(double s) {
    constexpr int N = 24;
    double sum = 0.0;
    for (int n = 1; n < N; ++n) sum += std::pow(static_cast<double>(n), -s);
    const double Nd = static_cast<double>(N);
    sum += std::pow(Nd, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(Nd, -s);
    double poch = s;                       // (s)_{2j-1}, built incrementally
    double npow = std::pow(Nd, -s - 1.0);  // N^{-s-2j+1}
    for (int j = 1; j <= 12; ++j) {
        sum += kBernoulliRatio[j - 1] * poch * npow;
        poch *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        npow /= Nd * Nd;
    }
    return sum;
}

}  // namespace detail

/// Riemann zeta on the real line.
///
/// s >= 0 uses Euler-Maclaurin directly; s < 0 goes through the reflection
/// formula zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s). The
/// reflection route must not be used on [0, 1) because zeta(1-s) would then
/// sit on or near the pole (at s = 0 it lands exactly on it). s = 1 is the
/// pole and is rejected, as are non-finite arguments and s so negative that
/// Gamma(1-s) overflows (far outside the range the series here need).
inline double zeta_real(double s) {
    if (!std::isfinite(s)) throw std::invalid_argument("zeta_real: non-finite argument");
    if (s == 1.0) throw std::invalid_argument("zeta_real: pole at s = 1");
    if (s >= 0.0) return detail::zeta_em(s);
    if (s < -170.0) throw std::invalid_argument("zeta_real: argument too negative");
    return std::pow(2.0, s) * std::pow(std::numbers::pi, s - 1.0) * sin_pi(0.5 * s) *
           std::tgamma(1.0 - s) * detail::zeta_em(1.0 - s);
}

/// Gamma(x)/Gamma(y) for positive arguments, via lgamma to dodge overflow.
inline double gamma_ratio(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw std::invalid_argument("gamma_ratio: arguments must be positive");
    return std::exp(std::lgamma(x) - std::lgamma(y));
}

}  // namespace fracconv::special
