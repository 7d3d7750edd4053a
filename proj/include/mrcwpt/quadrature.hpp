#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mrcwpt {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    double magnitude = 0.0;  // Kronrod estimate of the integral of |f|
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (positive half).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
QuadratureResult gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double magnitude = std::abs(fc) * kKronrodWeights[7];
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kKronrodWeights[i] * (f1 + f2);
        magnitude += kKronrodWeights[i] * (std::abs(f1) + std::abs(f2));
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * (f1 + f2);
        }
    }
    const double width = std::abs(half);
    return {kronrod * half, std::abs((kronrod - gauss) * half), magnitude * width};
}

template <class F>
QuadratureResult adaptive_gk(F& f, double a, double b, double abs_tol, int depth,
                             const QuadratureResult& whole) {
    if (depth <= 0 || whole.error <= abs_tol) {
        return whole;
    }
    const double mid = 0.5 * (a + b);
    const QuadratureResult left = gauss_kronrod_15(f, a, mid);
    const QuadratureResult right = gauss_kronrod_15(f, mid, b);
    if (left.error + right.error <= abs_tol) {
        return {left.value + right.value, left.error + right.error,
                left.magnitude + right.magnitude};
    }
    const QuadratureResult l = adaptive_gk(f, a, mid, 0.5 * abs_tol, depth - 1, left);
    const QuadratureResult r = adaptive_gk(f, mid, b, 0.5 * abs_tol, depth - 1, right);
    return {l.value + r.value, l.error + r.error, l.magnitude + r.magnitude};
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
inline constexpr std::array<double, 8> kLegendre16Nodes = {
    0.095012509837637454, 0.28160355077925892, 0.45801677765722737, 0.61787624440264377,
    0.755404408355003,    0.86563120238783176, 0.9445750230732326,  0.98940093499164994};
inline constexpr std::array<double, 8> kLegendre16Weights = {
    0.18945061045506859, 0.18260341504492361, 0.16915651939500262,  0.14959598881657676,
    0.12462897125553403, 0.095158511682492591, 0.062253523938647706, 0.027152459411754037};

}  // namespace detail

/// Appends composite 16-point Gauss-Legendre nodes and weights covering
/// [a, b] split into `panels` equal panels.
inline void composite_legendre(double a, double b, std::size_t panels, std::vector<double>& nodes,
                               std::vector<double>& weights) {
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double center = a + (static_cast<double>(p) + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < detail::kLegendre16Nodes.size(); ++i) {
            const double dx = half * detail::kLegendre16Nodes[i];
            nodes.push_back(center - dx);
            weights.push_back(half * detail::kLegendre16Weights[i]);
            nodes.push_back(center + dx);
            weights.push_back(half * detail::kLegendre16Weights[i]);
        }
    }
}

/// Adaptive Gauss-Kronrod (G7/K15) integral of f over [a, b]. Bisects until the
/// Kronrod-Gauss difference drops below max(abs_tol, rel_tol * integral of |f|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                           int max_depth = 30) {
    const QuadratureResult whole = detail::gauss_kronrod_15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * whole.magnitude);
    return detail::adaptive_gk(f, a, b, tol, max_depth, whole);
}

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// latest extrapolated limit. Used for slowly converging oscillatory tails.
class WynnEpsilon {
public:
    double push(double partial_sum) {
        std::vector<double> next;
        next.reserve(row_.size() + 1);
        next.push_back(partial_sum);
        // row_ holds the previous anti-diagonal e_0..e_k; build the new one.
        double prev_prev = 0.0;  // e_{k-1} of the column two steps back
        for (std::size_t k = 0; k < row_.size(); ++k) {
            const double diff = next[k] - row_[k];
            const double inv = diff == 0.0 ? HUGE_VAL : 1.0 / diff;
            const double value = (k == 0 ? 0.0 : prev_prev) + inv;
            prev_prev = row_[k];
            next.push_back(value);
        }
        row_ = std::move(next);
        // Even columns hold the extrapolants; take the deepest finite one.
        for (std::size_t k = row_.size(); k-- > 0;) {
            if (k % 2 == 0 && std::isfinite(row_[k])) {
                return row_[k];
            }
        }
        return partial_sum;
    }

private:
    std::vector<double> row_;
};

}  // namespace mrcwpt
