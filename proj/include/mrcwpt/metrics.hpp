#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mrcwpt/beamforming.hpp"
#include "mrcwpt/error.hpp"
#include "mrcwpt/system.hpp"
#include "mrcwpt/parallel.hpp"

namespace mrcwpt {

struct LineRegion {
    double half_length = 0.0;  // receiver x in [-d, d], y = 0
};

struct DiskRegion {
    double radius = 0.0;  // receiver (x, y) with x^2 + y^2 <= rho^2
};

struct Sampling {
    std::size_t line_points = 2001;
    std::size_t disk_radii = 101;
    std::size_t disk_angles = 360;
    bool refine_minimum = true;
};

/// Set of receiver positions at height z0 over which coverage is measured.
struct Region {
    std::variant<LineRegion, DiskRegion> shape;
    double height = 0.0;
    Sampling sampling;

    static Region line(double half_length, double height, Sampling sampling = {}) {
        Region r{LineRegion{half_length}, height, sampling};
        r.validate();
        return r;
    }
    static Region disk(double radius, double height, Sampling sampling = {}) {
        Region r{DiskRegion{radius}, height, sampling};
        r.validate();
        return r;
    }

    bool is_line() const { return std::holds_alternative<LineRegion>(shape); }
    /// Half-length for a line, radius for a disk.
    double extent() const {
        return is_line() ? std::get<LineRegion>(shape).half_length : std::get<DiskRegion>(shape).radius;
    }

    void validate() const {
        detail::require(std::isfinite(extent()) && extent() > 0.0,
                        is_line() ? "region.half_length: must be > 0" : "region.radius: must be > 0");
        detail::require(std::isfinite(height) && height > 0.0, "region.height: must be > 0");
        if (is_line()) {
            detail::require(sampling.line_points >= 2, "sampling.line_points: must be >= 2");
        } else {
            detail::require(sampling.disk_radii >= 1, "sampling.disk_radii: must be >= 1");
            detail::require(sampling.disk_angles >= 3, "sampling.disk_angles: must be >= 3");
        }
    }
};

struct ProfileSample {
    double x = 0.0;
    double y = 0.0;
    double p0 = 0.0;  // W
};

/// Delivered load power sampled over a region, with the placement and
/// allocation policy that produced it.
struct PowerProfile {
    std::vector<ProfileSample> samples;
    Strategy strategy = Strategy::optimal;
    std::vector<CoilPose> placement;
};

struct RegionMetrics {
    double p_avg = 0.0;
    double p_min = 0.0;
    double p_max = 0.0;
    double xi = 0.0;  // p_min / p_max, 0 when p_max == 0
};

/// Load power at one receiver position, currents re-optimised for that position.
inline double power_at(std::span<const CoilPose> placement, double x0, double y0,
                       const Region& region, const SystemModel& model, Strategy strategy,
                       MutualMode mode) {
    const CoilPose receiver{x0, y0, region.height};
    const MutualVector h = mutual_vector(placement, receiver, model, mode);
    return delivered_power(strategy, h, model);
}

/// Golden-section minimiser of a unimodal function on [lo, hi].
/// Returns the abscissa of the best point seen.
inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                 int iterations = 60) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iterations && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

namespace detail {

inline std::vector<ProfileSample> region_grid(const Region& region) {
    std::vector<ProfileSample> grid;
    if (region.is_line()) {
        const double d = region.extent();
        const std::size_t n = region.sampling.line_points;
        grid.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(n - 1);
            grid.push_back({-d + 2.0 * d * t, 0.0, 0.0});
        }
        return grid;
    }
    const double rho = region.extent();
    const std::size_t radii = region.sampling.disk_radii;
    const std::size_t angles = region.sampling.disk_angles;
    grid.reserve(1 + radii * angles);
    grid.push_back({0.0, 0.0, 0.0});
    for (std::size_t i = 1; i <= radii; ++i) {
        const double r = rho * static_cast<double>(i) / static_cast<double>(radii);
        for (std::size_t j = 0; j < angles; ++j) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(angles);
            grid.push_back({r * std::cos(theta), r * std::sin(theta), 0.0});
        }
    }
    return grid;
}

// Local golden-section polish around the grid minimum. Returns a sample only
// if it improves on the grid.
inline std::optional<ProfileSample> refine_minimum(const std::vector<ProfileSample>& grid,
                                                   std::size_t argmin, const Region& region,
                                                   const std::function<double(double, double)>& p0) {
    const ProfileSample& best = grid[argmin];
    if (region.is_line()) {
        const double d = region.extent();
        const double step = 2.0 * d / static_cast<double>(region.sampling.line_points - 1);
        const double lo = std::max(-d, best.x - step);
        const double hi = std::min(d, best.x + step);
        const double x = golden_section_min([&](double t) { return p0(t, 0.0); }, lo, hi);
        const double value = p0(x, 0.0);
        if (value < best.p0) return ProfileSample{x, 0.0, value};
        return std::nullopt;
    }
    const double rho = region.extent();
    const double dr = rho / static_cast<double>(region.sampling.disk_radii);
    const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(region.sampling.disk_angles);
    double r = std::hypot(best.x, best.y);
    double theta = std::atan2(best.y, best.x);
    auto at = [&](double rr, double tt) { return p0(rr * std::cos(tt), rr * std::sin(tt)); };
    for (int round = 0; round < 3; ++round) {
        const double r_lo = std::max(0.0, r - dr);
        const double r_hi = std::min(rho, r + dr);
        r = golden_section_min([&](double rr) { return at(rr, theta); }, r_lo, r_hi, 40);
        if (r > 0.0) {
            theta = golden_section_min([&](double tt) { return at(r, tt); }, theta - dtheta,
                                       theta + dtheta, 40);
        }
    }
    const double value = at(r, theta);
    if (value < best.p0) return ProfileSample{r * std::cos(theta), r * std::sin(theta), value};
    return std::nullopt;
}

}  // namespace detail

/// Samples the delivered power over `region` for a fixed transmitter placement.
/// With sampling.refine_minimum set, the grid sample holding the minimum is
/// moved to the golden-section polished minimiser when that is lower.
inline PowerProfile profile(std::span<const CoilPose> placement, const Region& region,
                            const SystemModel& model, Strategy strategy, MutualMode mode,
                            unsigned threads = 1) {
    region.validate();
    detail::require(!placement.empty(), "profile: placement is empty");
    PowerProfile out;
    out.strategy = strategy;
    out.placement.assign(placement.begin(), placement.end());
    out.samples = detail::region_grid(region);

    auto p0 = [&](double x, double y) {
        return power_at(placement, x, y, region, model, strategy, mode);
    };
    parallel_for(out.samples.size(), threads, [&](std::size_t i) {
        out.samples[i].p0 = p0(out.samples[i].x, out.samples[i].y);
    });

    if (region.sampling.refine_minimum) {
        const auto it = std::min_element(out.samples.begin(), out.samples.end(),
                                         [](const auto& a, const auto& b) { return a.p0 < b.p0; });
        const auto argmin = static_cast<std::size_t>(it - out.samples.begin());
        if (auto refined = detail::refine_minimum(out.samples, argmin, region, p0)) {
            out.samples[argmin] = *refined;
        }
    }
    return out;
}

/// Average (sample mean), minimum, maximum and min/max ratio of a profile.
inline RegionMetrics summarize(const PowerProfile& profile) {
    detail::require(!profile.samples.empty(), "summarize: empty profile");
    RegionMetrics m;
    m.p_min = std::numeric_limits<double>::infinity();
    m.p_max = -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& s : profile.samples) {
        total += s.p0;
        m.p_min = std::min(m.p_min, s.p0);
        m.p_max = std::max(m.p_max, s.p0);
    }
    m.p_avg = total / static_cast<double>(profile.samples.size());
    m.xi = m.p_max > 0.0 ? m.p_min / m.p_max : 0.0;
    return m;
}

}  // namespace mrcwpt
