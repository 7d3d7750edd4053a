#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "mrcwpt/error.hpp"

namespace mrcwpt {

namespace detail {

// Ascending series below kBesselSeriesLimit, where its cancellation stays
// under ~2e-15; Hankel expansion from kBesselAsymptoticLimit, where its
// optimal truncation error drops below 1e-15. The band between uses the
// trapezoidal rule on the periodic integral representation.
inline constexpr double kBesselSeriesLimit = 5.0;
inline constexpr double kBesselAsymptoticLimit = 16.0;

inline constexpr int kSeriesTerms = 64;

// 1 / (m (m + order)) for m = 1..kSeriesTerms, per order.
inline constexpr auto kSeriesRatios = [] {
    std::array<std::array<double, kSeriesTerms + 1>, 2> table{};
    for (int order = 0; order < 2; ++order) {
        for (int m = 1; m <= kSeriesTerms; ++m) {
            table[order][m] = 1.0 / (static_cast<double>(m) * static_cast<double>(m + order));
        }
    }
    return table;
}();

// Ascending series sum_m (-1)^m (x/2)^(2m+order) / (m! (m+order)!), x >= 0.
inline double bessel_series(int order, double x) {
    const double half = 0.5 * x;
    const double neg_half_sq = -half * half;
    const auto& ratio = kSeriesRatios[order];
    double term = order == 0 ? 1.0 : half;
    double sum = term;
    for (int m = 1; m <= kSeriesTerms; ++m) {
        term *= neg_half_sq * ratio[m];
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum) && m > half) {
            break;
        }
    }
    return sum;
}

inline double bessel_hankel(int order, double x) {
    // J_a(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - (a/2 + 1/4) pi.
    const double mu = 4.0 * order * order;
    double p = 1.0;
    double q = 0.0;
    double a_k = 1.0;  // a_k(order) / x^k, signs folded in below
    double last = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        a_k *= (mu - odd * odd) / (k * 8.0 * x);
        const double magnitude = std::abs(a_k);
        if (magnitude > last) {
            break;  // asymptotic series has started to diverge
        }
        last = magnitude;
        // k odd feeds Q, k even feeds P; both alternate in sign every second term.
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 1) {
            q += sign * a_k;
        } else {
            p += sign * a_k;
        }
        if (magnitude < 1e-17) {
            break;
        }
    }
    const double chi = x - (0.5 * order + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// sin(pi k / 24), k = 1..11.
inline const std::array<double, 11> kTrapezoidSines = [] {
    std::array<double, 11> s{};
    for (int k = 1; k <= 11; ++k) s[k - 1] = std::sin(std::numbers::pi * k / 24.0);
    return s;
}();

// J_a(x) = (1 / 2 pi) int_0^{2 pi} cos(a t - x sin t) dt, trapezoidal rule on
// 48 nodes (spectrally accurate for a periodic integrand: aliasing error
// ~ J_48(x), below 1e-17 for x < 16). Symmetry about pi and pi/2 folds the
// sum to 12 terms.
inline double bessel_trapezoid(int order, double x) {
    double sum = 0.0;
    if (order == 0) {
        for (double s : kTrapezoidSines) sum += std::cos(x * s);
        return (1.0 + 2.0 * sum + std::cos(x)) / 24.0;
    }
    for (double s : kTrapezoidSines) sum += s * std::sin(x * s);
    return (2.0 * sum + std::sin(x)) / 24.0;
}

}  // namespace detail

/// Bessel function of the first kind, orders 0 and 1.
inline double bessel_j(int order, double x) {
    detail::require(order == 0 || order == 1, "bessel_j: order must be 0 or 1");
    const double ax = std::abs(x);
    double value;
    if (ax < detail::kBesselSeriesLimit) {
        value = detail::bessel_series(order, ax);
    } else if (ax < detail::kBesselAsymptoticLimit) {
        value = detail::bessel_trapezoid(order, ax);
    } else {
        value = detail::bessel_hankel(order, ax);
    }
    return (order == 1 && x < 0.0) ? -value : value;
}

inline double bessel_j0(double x) { return bessel_j(0, x); }
inline double bessel_j1(double x) { return bessel_j(1, x); }

}  // namespace mrcwpt
