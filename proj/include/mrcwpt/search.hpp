#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "mrcwpt/error.hpp"
#include "mrcwpt/system.hpp"

namespace mrcwpt {

/// Parameters shared by the 1D and 2D placement searches.
struct SearchParams {
    double epsilon = 1e-3;           // bisection width on tau, W
    std::optional<double> step;      // gradient step delta; default is region extent / 100
    int itr_max = 100;               // sign-gradient steps per restart
    int rpt_max = 100;               // restarts per feasibility check
    bool retry_smaller_step = false; // rerun a stalled restart once with delta / 10
    unsigned threads = 1;

    void validate() const {
        detail::require(std::isfinite(epsilon) && epsilon > 0.0, "solver.epsilon: must be > 0");
        if (step) {
            detail::require(std::isfinite(*step) && *step > 0.0, "solver.delta: must be > 0");
        }
        detail::require(itr_max >= 1, "solver.itr_max: must be >= 1");
        detail::require(rpt_max >= 1, "solver.rpt_max: must be >= 1");
    }

    double step_for(double extent) const { return step ? *step : extent / 100.0; }
};

/// One outer bisection probe.
struct BisectionStep {
    double tau = 0.0;
    bool feasible = false;
    int search_iterations = 0;
};

/// Minimum weighted coupling sum needed for tau watts at the receiver, in the
/// normalisation where each transmitter contributes (h / beta)^2 * beta.
/// Infinite when tau is at or beyond the single-receiver ceiling.
inline double g_of_tau(double tau, const SystemModel& model) {
    detail::require(tau >= 0.0, "g_of_tau: tau must be >= 0");
    const double ceiling = model.power_ceiling();
    if (tau >= ceiling) return std::numeric_limits<double>::infinity();
    const double r_rx = model.r_rx();
    const double w = model.w();
    return r_rx * r_rx * model.r_tx() * tau /
           (w * w * model.beta() * (model.r_load() * model.p_max() - r_rx * tau));
}

/// Threshold on the normalised coupling sum sum_n (h_n / beta)^2 that makes
/// the optimally beamformed load power reach tau.
inline double coupling_threshold(double tau, const SystemModel& model) {
    return g_of_tau(tau, model) / model.beta();
}

namespace detail {

// Independent generator per (seed, bisection level, restart) so that changing
// rpt_max or the thread count never shifts earlier draws.
inline std::mt19937_64 substream(std::uint64_t seed, int level, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(restart)};
    return std::mt19937_64(seq);
}

// Uniform on [lo, hi) from the top 53 bits, identical on every standard library.
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Outer bisection on [0, p_max]. `probe(tau, level)` returns a certificate
// when tau is achievable. lo stays feasible, hi stays infeasible or untested.
template <class State, class Probe>
std::optional<State> bisect(double p_max, double epsilon, Probe&& probe,
                            std::vector<BisectionStep>& trace, double& tau_star) {
    double lo = 0.0;
    double hi = p_max;
    std::optional<State> best;
    int level = 0;
    while (hi - lo > epsilon) {
        const double mid = 0.5 * (lo + hi);
        int iterations = 0;
        std::optional<State> found = probe(mid, level, iterations);
        trace.push_back({mid, found.has_value(), iterations});
        if (found) {
            lo = mid;
            best = std::move(found);
        } else {
            hi = mid;
        }
        ++level;
    }
    tau_star = lo;
    return best;
}

}  // namespace detail

}  // namespace mrcwpt
