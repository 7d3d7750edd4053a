#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mrcwpt/error.hpp"
#include "mrcwpt/metrics.hpp"
#include "mrcwpt/parallel.hpp"
#include "mrcwpt/search.hpp"
#include "mrcwpt/system.hpp"

namespace mrcwpt {

enum class Parity { even, odd };

/// Transmitters mirrored about x = 0 on the line [-d, d]. Odd parity adds
/// one fixed transmitter at the origin.
struct SymmetricPlacement1D {
    std::vector<double> half_positions;  // d_n in [0, d]
    Parity parity = Parity::even;
    double half_length = 0.0;

    std::size_t transmitter_count() const {
        return 2 * half_positions.size() + (parity == Parity::odd ? 1 : 0);
    }

    void validate() const {
        detail::require(std::isfinite(half_length) && half_length > 0.0,
                        "placement.half_length: must be > 0");
        for (double dn : half_positions) {
            detail::require(dn >= 0.0 && dn <= half_length, "placement.half_positions: must lie in [0, d]");
        }
        detail::require(transmitter_count() >= 1, "placement: no transmitters");
    }

    /// x_n = d_n and x_{M+n} = -d_n, then the centre coil for odd N. All at z = 0.
    std::vector<CoilPose> expand() const {
        std::vector<CoilPose> poses;
        poses.reserve(transmitter_count());
        for (double dn : half_positions) poses.push_back({dn, 0.0, 0.0});
        for (double dn : half_positions) poses.push_back({-dn, 0.0, 0.0});
        if (parity == Parity::odd) poses.push_back({0.0, 0.0, 0.0});
        return poses;
    }
};

struct PlacementResult {
    SymmetricPlacement1D placement;
    double tau_star = 0.0;       // W, bisection lower bound under the approximate model
    double certified_min = 0.0;  // W, exact-model minimum over the refined line grid
    std::vector<BisectionStep> trace;
    int search_iterations = 0;
    std::uint64_t seed = 0;
};

/// Evenly spread line placement x_n = -d + 2d(n-1)/(N-1); a single coil sits at 0.
inline std::vector<CoilPose> uniform_line_placement(std::size_t count, double half_length) {
    detail::require(count >= 1, "uniform placement: count must be >= 1");
    std::vector<CoilPose> poses(count);
    if (count == 1) return poses;
    for (std::size_t n = 0; n < count; ++n) {
        poses[n].x = -half_length + 2.0 * half_length * static_cast<double>(n) / static_cast<double>(count - 1);
    }
    return poses;
}

/// (h(u) / beta)^2 for a single coil at lateral offset u.
inline double coupling_term(double u, double z0) {
    const double u2 = u * u;
    const double z2 = z0 * z0;
    const double num = 2.0 * z2 - u2;
    const double r2 = z2 + u2;
    const double r4 = r2 * r2;
    return num * num / (r4 * r4 * r2);
}

inline double coupling_term_derivative(double u, double z0) {
    const double u2 = u * u;
    const double z2 = z0 * z0;
    const double r2 = z2 + u2;
    const double r6 = r2 * r2 * r2;
    return -6.0 * (8.0 * z2 * z2 + u2 * u2 - 6.0 * z2 * u2) * u / (r6 * r6);
}

/// Normalised squared coupling of the mirrored pair at +-d_n seen from x0.
inline double f_kernel(double dn, double x0, double z0) {
    detail::require(z0 > 0.0, "f_kernel: z0 must be > 0");
    return coupling_term(dn - x0, z0) + coupling_term(dn + x0, z0);
}

/// Partial derivative of f_kernel with respect to d_n.
inline double f_gradient(double dn, double x0, double z0) {
    detail::require(z0 > 0.0, "f_gradient: z0 must be > 0");
    return coupling_term_derivative(dn - x0, z0) + coupling_term_derivative(dn + x0, z0);
}

/// Left-hand side of the coverage constraint at receiver position x0.
inline double coupling_sum_1d(const std::vector<double>& half, Parity parity, double x0, double z0) {
    double s = parity == Parity::odd ? 0.5 * f_kernel(0.0, x0, z0) : 0.0;
    for (double dn : half) s += f_kernel(dn, x0, z0);
    return s;
}

struct CoverageMinimum {
    double value = 0.0;
    double x0 = 0.0;
};

/// Minimum of coupling_sum_1d over x0 in [0, d]: grid, then golden-section
/// polish between the neighbours of the grid minimiser.
inline CoverageMinimum coverage_minimum_1d(const std::vector<double>& half, Parity parity, double d,
                                           double z0, std::size_t grid_points = 501) {
    auto f = [&](double x) { return coupling_sum_1d(half, parity, x, z0); };
    CoverageMinimum best{std::numeric_limits<double>::infinity(), 0.0};
    std::size_t arg = 0;
    const double h = d / static_cast<double>(grid_points - 1);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = h * static_cast<double>(i);
        const double v = f(x);
        if (v < best.value) {
            best = {v, x};
            arg = i;
        }
    }
    const double lo = h * static_cast<double>(arg == 0 ? 0 : arg - 1);
    const double hi = std::min(d, h * static_cast<double>(arg + 1));
    const double x = golden_section_min(f, lo, hi);
    const double v = f(x);
    if (v < best.value) best = {v, x};
    return best;
}

struct FeasibilityOutcome {
    std::optional<std::vector<double>> half_positions;
    int iterations = 0;
    int restart = -1;  // index of the restart that succeeded
};

namespace detail {

inline std::vector<double> initial_half_positions(std::size_t m, std::size_t n_total, double d) {
    std::vector<double> base(m);
    for (std::size_t n = 1; n <= m; ++n) {
        base[n - 1] = std::min(d, static_cast<double>(2 * n - 1) * d / static_cast<double>(n_total - 1));
    }
    return base;
}

struct RestartRun {
    std::optional<std::vector<double>> found;
    int iterations = 0;
    bool stalled = false;  // never improved on the starting coverage minimum
};

inline RestartRun sign_gradient_run(std::vector<double> ds, Parity parity, double d, double z0,
                                    double threshold, double step, int itr_max) {
    RestartRun run;
    double initial = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int it = 0; it <= itr_max; ++it) {
        const CoverageMinimum m = coverage_minimum_1d(ds, parity, d, z0);
        if (it == 0) initial = m.value;
        best = std::max(best, m.value);
        if (m.value >= threshold) {
            run.found = std::move(ds);
            return run;
        }
        if (it == itr_max) break;
        ++run.iterations;
        for (double& dn : ds) {
            const int s = sign_of(f_gradient(dn, m.x0, z0));
            dn = std::clamp(dn + s * step, 0.0, d);
        }
    }
    run.stalled = best <= initial;
    return run;
}

}  // namespace detail

/// Searches for half-positions whose coverage minimum reaches the threshold
/// implied by tau. Restart 0 starts from (2n-1)d/(N-1); later restarts perturb
/// that point by U[-d/(N-1), d/(N-1)] per coordinate. The lowest feasible
/// restart index wins, independent of the thread count.
inline FeasibilityOutcome feasibility_search(double tau, Parity parity, std::size_t m, double d,
                                             const SystemModel& model, const SearchParams& params,
                                             std::uint64_t seed, int level = 0) {
    params.validate();
    detail::require(d > 0.0, "feasibility_search: half length must be > 0");
    FeasibilityOutcome out;
    const double threshold = coupling_threshold(tau, model);
    if (!std::isfinite(threshold)) return out;

    const std::size_t n_total = 2 * m + (parity == Parity::odd ? 1 : 0);
    const double z0 = model.z0();
    const double step = params.step_for(d);
    const double spread = n_total > 1 ? d / static_cast<double>(n_total - 1) : d;
    const std::vector<double> base = n_total > 1 ? detail::initial_half_positions(m, n_total, d)
                                                 : std::vector<double>{};

    auto run_restart = [&](int r) {
        std::vector<double> start = base;
        if (r > 0) {
            auto gen = detail::substream(seed, level, r);
            for (double& dn : start) dn = std::clamp(dn + detail::uniform(gen, -spread, spread), 0.0, d);
        }
        detail::RestartRun run = detail::sign_gradient_run(start, parity, d, z0, threshold, step, params.itr_max);
        if (!run.found && run.stalled && params.retry_smaller_step) {
            detail::RestartRun fine = detail::sign_gradient_run(start, parity, d, z0, threshold, step / 10.0,
                                                                params.itr_max);
            fine.iterations += run.iterations;
            run = std::move(fine);
        }
        return run;
    };

    const unsigned batch = std::max(1u, params.threads);
    for (int first = 0; first < params.rpt_max; first += static_cast<int>(batch)) {
        const int count = std::min<int>(static_cast<int>(batch), params.rpt_max - first);
        std::vector<detail::RestartRun> runs(static_cast<std::size_t>(count));
        parallel_for(runs.size(), batch, [&](std::size_t i) { runs[i] = run_restart(first + static_cast<int>(i)); });
        for (int i = 0; i < count; ++i) {
            out.iterations += runs[static_cast<std::size_t>(i)].iterations;
            if (runs[static_cast<std::size_t>(i)].found) {
                out.half_positions = std::move(runs[static_cast<std::size_t>(i)].found);
                out.restart = first + i;
                return out;
            }
        }
    }
    return out;
}

/// Exact-model minimum of the optimally beamformed load power over [-d, d].
inline double certified_minimum_1d(const SymmetricPlacement1D& placement, const SystemModel& model,
                                   unsigned threads = 1, Sampling sampling = {}) {
    const std::vector<CoilPose> poses = placement.expand();
    const Region region = Region::line(placement.half_length, model.z0(), sampling);
    return summarize(profile(poses, region, model, Strategy::optimal, MutualMode::exact, threads)).p_min;
}

/// Bisection on tau over [0, p_max] with a sign-gradient feasibility search
/// over symmetric placements of `count` transmitters on [-d, d].
inline PlacementResult optimize_placement_1d(std::size_t count, const SystemModel& model, double d,
                                             const SearchParams& params, std::uint64_t seed) {
    detail::require(count >= 2, "optimize_placement_1d: need at least 2 transmitters");
    detail::require(std::isfinite(d) && d > 0.0, "region.half_length: must be > 0");
    params.validate();
    const Parity parity = count % 2 == 0 ? Parity::even : Parity::odd;
    const std::size_t m = count / 2;

    PlacementResult result;
    result.seed = seed;
    result.placement = {detail::initial_half_positions(m, count, d), parity, d};

    auto probe = [&](double tau, int level, int& iterations) {
        FeasibilityOutcome o = feasibility_search(tau, parity, m, d, model, params, seed, level);
        iterations = o.iterations;
        result.search_iterations += o.iterations;
        return o.half_positions;
    };
    auto best = detail::bisect<std::vector<double>>(model.p_max(), params.epsilon, probe, result.trace,
                                                     result.tau_star);
    if (best) result.placement.half_positions = std::move(*best);
    result.certified_min = certified_minimum_1d(result.placement, model, params.threads);
    return result;
}

}  // namespace mrcwpt
