#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>

#include "mrcwpt/circuit.hpp"
#include "mrcwpt/coil.hpp"
#include "mrcwpt/error.hpp"

namespace mrcwpt {

/// Current-allocation policy applied at each receiver position.
enum class Strategy { optimal, equal, selection };

inline std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::optimal: return "optimal";
        case Strategy::equal: return "equal";
        case Strategy::selection: return "selection";
    }
    return "unknown";
}

inline Strategy parse_strategy(std::string_view text) {
    if (text == "optimal") return Strategy::optimal;
    if (text == "equal") return Strategy::equal;
    if (text == "selection") return Strategy::selection;
    throw ValidationError("strategy: expected optimal|equal|selection, got '" + std::string(text) + "'");
}

namespace detail {

inline double sum_of_squares(std::span<const double> h) {
    return std::inner_product(h.begin(), h.end(), h.begin(), 0.0);
}

inline void check_budget(double p_max) {
    require(std::isfinite(p_max) && p_max > 0.0, "p_max: must be > 0");
}

}  // namespace detail

/// Maximiser of load power under the sum-power budget: every transmitter
/// current is proportional to its own mutual inductance with the receiver,
/// scaled so the budget is met with equality.
inline CurrentAllocation optimal_currents(std::span<const double> h, double p_max, double r_tx,
                                          double r_rx, double w) {
    detail::check_budget(p_max);
    const double s = detail::sum_of_squares(h);
    if (!(s > 0.0)) {
        throw ValidationError("optimal_currents: degenerate coupling (all mutual inductances are zero)");
    }
    const double scale = std::sqrt(p_max) / std::sqrt(s * (r_tx + w * w / r_rx * s));
    std::vector<double> currents(h.size());
    for (std::size_t n = 0; n < h.size(); ++n) {
        currents[n] = scale * h[n];
    }
    return CurrentAllocation::real(std::move(currents));
}

/// Closed-form load power under optimal beamforming. Depends on the h_n0 only
/// through their squares; zero when there is no coupling.
inline double delivered_power_optimal(std::span<const double> h, const SystemModel& model) {
    const double s = detail::sum_of_squares(h);
    const double gain = model.w() * model.w() / (model.r_rx() * model.r_tx()) * s;
    return model.r_load() / model.r_rx() * (gain / (1.0 + gain)) * model.p_max();
}

/// Uncoordinated baseline: the same positive current in every transmitter,
/// sized so the sum power equals p_max.
inline CurrentAllocation equal_currents(std::span<const double> h, double p_max, double r_tx,
                                        double r_rx, double w) {
    detail::check_budget(p_max);
    detail::require(!h.empty(), "equal_currents: need at least one transmitter");
    const double n = static_cast<double>(h.size());
    const double coupled = std::accumulate(h.begin(), h.end(), 0.0);
    const double c = std::sqrt(p_max / (r_tx * n + w * w / r_rx * coupled * coupled));
    return CurrentAllocation::real(std::vector<double>(h.size(), c));
}

/// Full budget on the transmitter with the largest h_n0^2 (lowest index on ties).
inline CurrentAllocation transmitter_selection(std::span<const double> h, double p_max, double r_tx,
                                               double r_rx, double w) {
    detail::check_budget(p_max);
    detail::require(!h.empty(), "transmitter_selection: need at least one transmitter");
    std::size_t best = 0;
    for (std::size_t n = 1; n < h.size(); ++n) {
        if (h[n] * h[n] > h[best] * h[best]) best = n;
    }
    std::vector<double> currents(h.size(), 0.0);
    const double hb = h[best];
    if (hb != 0.0) {
        currents[best] = std::copysign(std::sqrt(p_max / (r_tx + w * w / r_rx * hb * hb)), hb);
    } else {
        currents[best] = std::sqrt(p_max / r_tx);
    }
    return CurrentAllocation::real(std::move(currents));
}

inline CurrentAllocation allocate(Strategy strategy, std::span<const double> h,
                                  const SystemModel& model) {
    switch (strategy) {
        case Strategy::optimal:
            return optimal_currents(h, model.p_max(), model.r_tx(), model.r_rx(), model.w());
        case Strategy::equal:
            return equal_currents(h, model.p_max(), model.r_tx(), model.r_rx(), model.w());
        case Strategy::selection:
            return transmitter_selection(h, model.p_max(), model.r_tx(), model.r_rx(), model.w());
    }
    throw ValidationError("unknown strategy");
}

/// Load power achieved by `strategy` for the given coupling vector.
inline double delivered_power(Strategy strategy, std::span<const double> h, const SystemModel& model) {
    if (strategy == Strategy::optimal) {
        return delivered_power_optimal(h, model);
    }
    const CurrentAllocation alloc = allocate(strategy, h, model);
    return load_power(alloc, h, model.r_rx(), model.r_load(), model.w());
}

}  // namespace mrcwpt
