#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "mrcwpt/bessel.hpp"
#include "mrcwpt/coil.hpp"
#include "mrcwpt/error.hpp"
#include "mrcwpt/quadrature.hpp"

namespace mrcwpt {

/// Centre of a coil lying in a horizontal plane.
struct CoilPose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const CoilPose&, const CoilPose&) = default;
};

/// Signed transmitter-to-receiver mutual inductances h_n0 (H), one per transmitter.
using MutualVector = std::vector<double>;

enum class MutualMode { exact, approx };

inline std::string_view to_string(MutualMode mode) {
    return mode == MutualMode::exact ? "exact" : "approx";
}

inline MutualMode parse_mutual_mode(std::string_view text) {
    if (text == "exact") return MutualMode::exact;
    if (text == "approx") return MutualMode::approx;
    throw ValidationError("mode: expected 'exact' or 'approx', got '" + std::string(text) + "'");
}

inline double lateral_distance(const CoilPose& a, const CoilPose& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

namespace detail {

// Integral of J0(d u) J1(a u) J1(b u) exp(-dz u) over [0, inf).
//
// The integrand is summed panel by panel, each panel about half a period of
// the fastest oscillation, with adaptive Gauss-Kronrod inside the panel. The
// damped case stops once exp(-dz u) < 1e-16 or a panel adds < 1e-12 of the
// total. Weakly damped or undamped tails decay only algebraically, so partial
// sums there are fed to a Wynn epsilon extrapolation.
inline double coupling_integral(double d, double a, double b, double dz) {
    auto integrand = [=](double u) {
        const double damping = dz > 0.0 ? std::exp(-dz * u) : 1.0;
        return bessel_j0(d * u) * bessel_j1(a * u) * bessel_j1(b * u) * damping;
    };

    const double frequency = d + a + b;
    const double panel = std::numbers::pi / frequency;
    const double cutoff = dz > 0.0 ? -std::log(1e-16) / dz : HUGE_VAL;
    const bool extrapolate = !(cutoff / panel < 400.0);
    constexpr int kMaxPanels = 20000;

    double total = 0.0;
    double lo = 0.0;
    WynnEpsilon wynn;
    double last_estimate = 0.0;
    int stable = 0;
    for (int i = 0; i < kMaxPanels; ++i) {
        const double hi = std::min(lo + panel, cutoff);
        const QuadratureResult piece = integrate(integrand, lo, hi, 1e-16, 1e-12);
        total += piece.value;
        lo = hi;
        if (lo >= cutoff) {
            return total;
        }
        if (!extrapolate) {
            if (i > 2 && std::abs(piece.value) < 1e-12 * std::abs(total)) {
                return total;
            }
            continue;
        }
        const double estimate = wynn.push(total);
        if (i > 8 && std::abs(estimate - last_estimate) <= 1e-11 * std::abs(estimate)) {
            if (++stable >= 3) {
                return estimate;
            }
        } else {
            stable = 0;
        }
        last_estimate = estimate;
    }
    if (extrapolate) {
        return last_estimate;
    }
    throw NumericError("coupling integral did not converge");
}

}  // namespace detail

/// Mutual inductance between two parallel horizontal circular coils.
///
/// mu pi b_a b_b e_a e_b * int_0^inf J0(d u) J1(e_a u) J1(e_b u) exp(-|dz| u) du
/// with d the lateral centre distance. Symmetric in its two coils. Coincident
/// coplanar coils are rejected: that integral is a self-inductance.
inline double mutual_exact(const CoilSpec& a, const CoilPose& pose_a, const CoilSpec& b,
                           const CoilPose& pose_b) {
    const double d = lateral_distance(pose_a, pose_b);
    const double dz = std::abs(pose_b.z - pose_a.z);
    detail::require(std::isfinite(d) && std::isfinite(dz), "mutual_exact: non-finite pose");
    detail::require(d > 0.0 || dz > 0.0, "mutual_exact: coincident coplanar coils");
    // Order the radii so the result is bit-identical under argument swap.
    const double ra = std::min(a.coil_radius, b.coil_radius);
    const double rb = std::max(a.coil_radius, b.coil_radius);
    const double turns = static_cast<double>(a.turns) * static_cast<double>(b.turns);
    const double prefactor =
        kPermeability * std::numbers::pi * turns * (a.coil_radius * b.coil_radius);
    return prefactor * detail::coupling_integral(d, ra, rb, dz);
}

/// Fast evaluator of mutual_exact for one coil pair at a fixed vertical
/// separation dz > 0, as a function of lateral distance only.
///
/// The d-independent factor J1(e_a u) J1(e_b u) exp(-dz u) is tabulated once
/// on composite Gauss-Legendre nodes fine enough to resolve J0(d u) for every
/// d <= max_distance; each evaluation is then a single weighted sum of J0.
/// Distances beyond max_distance fall back to the adaptive integral.
class MutualKernel {
public:
    MutualKernel(const CoilSpec& a, const CoilSpec& b, double dz, double max_distance)
        : a_(a), b_(b), dz_(dz), max_distance_(max_distance) {
        detail::require(dz > 0.0, "MutualKernel: vertical separation must be > 0");
        detail::require(max_distance > 0.0, "MutualKernel: max_distance must be > 0");
        const double frequency = max_distance + a.coil_radius + b.coil_radius;
        const double cutoff = -std::log(1e-17) / dz;
        // One 16-node panel per oscillation period of the fastest factor.
        const auto panels = static_cast<std::size_t>(
            std::ceil(cutoff * frequency / (2.0 * std::numbers::pi)));
        std::vector<double> weights;
        composite_legendre(0.0, cutoff, panels, nodes_, weights);
        const double turns = static_cast<double>(a.turns) * static_cast<double>(b.turns);
        const double prefactor =
            kPermeability * std::numbers::pi * turns * (a.coil_radius * b.coil_radius);
        coefficients_.resize(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const double u = nodes_[i];
            coefficients_[i] = prefactor * weights[i] * bessel_j1(a.coil_radius * u) *
                               bessel_j1(b.coil_radius * u) * std::exp(-dz * u);
        }
    }

    double operator()(double d) const {
        if (!(d <= max_distance_)) {
            return mutual_exact(a_, CoilPose{0.0, 0.0, 0.0}, b_, CoilPose{d, 0.0, dz_});
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            sum += coefficients_[i] * bessel_j0(d * nodes_[i]);
        }
        return sum;
    }

    double vertical_separation() const { return dz_; }
    double max_distance() const { return max_distance_; }
    std::size_t node_count() const { return nodes_.size(); }

private:
    CoilSpec a_;
    CoilSpec b_;
    double dz_;
    double max_distance_;
    std::vector<double> nodes_;
    std::vector<double> coefficients_;
};

/// Small-coil approximation beta (2 z0^2 - d^2) / (z0^2 + d^2)^(5/2).
inline double mutual_approx(double beta, double d, double z0) {
    detail::require(z0 > 0.0, "mutual_approx: z0 must be > 0");
    const double d2 = d * d;
    const double z2 = z0 * z0;
    const double r2 = z2 + d2;
    return beta * (2.0 * z2 - d2) / (r2 * r2 * std::sqrt(r2));
}

/// Dense symmetric N x N matrix of transmitter-transmitter mutuals, zero diagonal.
class CrossMutuals {
public:
    CrossMutuals() = default;
    explicit CrossMutuals(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    static CrossMutuals zero(std::size_t n) { return CrossMutuals(n); }

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    void set_symmetric(std::size_t i, std::size_t j, double value) {
        data_[i * n_ + j] = value;
        data_[j * n_ + i] = value;
    }

    bool is_valid() const {
        for (std::size_t i = 0; i < n_; ++i) {
            if ((*this)(i, i) != 0.0) return false;
            for (std::size_t j = i + 1; j < n_; ++j) {
                if ((*this)(i, j) != (*this)(j, i) || !std::isfinite((*this)(i, j))) return false;
            }
        }
        return true;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Exact coplanar transmitter-transmitter mutual inductances.
inline CrossMutuals cross_mutuals(std::span<const CoilPose> transmitters, const CoilSpec& tx) {
    CrossMutuals h(transmitters.size());
    for (std::size_t i = 0; i < transmitters.size(); ++i) {
        for (std::size_t j = i + 1; j < transmitters.size(); ++j) {
            h.set_symmetric(i, j, mutual_exact(tx, transmitters[i], tx, transmitters[j]));
        }
    }
    return h;
}

}  // namespace mrcwpt
