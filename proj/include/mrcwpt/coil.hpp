#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "mrcwpt/error.hpp"

namespace mrcwpt {

/// Magnetic permeability of air (N/A^2).
inline constexpr double kPermeability = 4.0e-7 * std::numbers::pi;

/// Physical description of a multi-turn circular coil. All lengths in metres.
struct CoilSpec {
    double coil_radius = 0.0;
    int turns = 0;
    double wire_radius = 0.0;
    /// Wire resistivity, fed verbatim into the resistance formula.
    double resistivity = 0.0;

    void validate(const std::string& name = "coil") const {
        detail::require(std::isfinite(coil_radius) && coil_radius > 0.0,
                        name + ".coil_radius: must be > 0");
        detail::require(turns >= 1, name + ".turns: must be >= 1");
        detail::require(std::isfinite(wire_radius) && wire_radius > 0.0,
                        name + ".wire_radius: must be > 0");
        detail::require(wire_radius < coil_radius,
                        name + ".wire_radius: must be smaller than coil_radius");
        detail::require(std::isfinite(resistivity) && resistivity > 0.0,
                        name + ".resistivity: must be > 0");
    }
};

struct ElectricalParams {
    double resistance = 0.0;               // ohm
    double self_inductance = 0.0;          // henry
    double compensator_capacitance = 0.0;  // farad
};

/// Parasitic resistance, self-inductance and the series capacitor that tunes
/// the coil to resonate at `angular_frequency`.
inline ElectricalParams derive_electrical(const CoilSpec& coil, double angular_frequency) {
    coil.validate();
    detail::require(std::isfinite(angular_frequency) && angular_frequency > 0.0,
                    "angular_frequency: must be > 0");

    const double log_term = std::log(8.0 * coil.coil_radius / coil.wire_radius);
    detail::require(log_term > 2.0,
                    "coil: ln(8 coil_radius / wire_radius) must exceed 2 "
                    "(self-inductance would be non-positive)");

    const double turns = static_cast<double>(coil.turns);
    ElectricalParams out;
    out.resistance = 2.0 * coil.resistivity * turns * coil.coil_radius /
                     (coil.wire_radius * coil.wire_radius);
    out.self_inductance = kPermeability * turns * turns * coil.coil_radius * (log_term - 2.0);
    out.compensator_capacitance =
        1.0 / (out.self_inductance * angular_frequency * angular_frequency);
    return out;
}

/// Parasitic plus load resistance of the receiver loop.
inline double total_receiver_resistance(const ElectricalParams& receiver, double load_resistance) {
    detail::require(receiver.resistance > 0.0, "receiver resistance must be > 0");
    detail::require(std::isfinite(load_resistance) && load_resistance > 0.0,
                    "load_resistance: must be > 0");
    return receiver.resistance + load_resistance;
}

struct SystemConfig {
    double angular_frequency = 0.0;  // rad/s
    double sum_power_budget = 0.0;   // W, budget shared by all transmitters
    double receiver_height = 0.0;    // m, z0
    double load_resistance = 0.0;    // ohm
    CoilSpec tx_coil;
    CoilSpec rx_coil;

    void validate() const {
        detail::require(std::isfinite(angular_frequency) && angular_frequency > 0.0,
                        "system.angular_frequency: must be > 0");
        detail::require(std::isfinite(sum_power_budget) && sum_power_budget > 0.0,
                        "system.sum_power_budget: must be > 0");
        detail::require(std::isfinite(receiver_height) && receiver_height > 0.0,
                        "system.receiver_height: must be > 0");
        detail::require(std::isfinite(load_resistance) && load_resistance > 0.0,
                        "system.load_resistance: must be > 0");
        tx_coil.validate("tx_coil");
        rx_coil.validate("rx_coil");
    }
};

/// Coupling constant of the small-coil dipole approximation,
/// mu * pi * b_tx * b_rx * e_tx^2 * e_rx^2 / 4.
inline double coupling_beta(const CoilSpec& tx, const CoilSpec& rx) {
    const double etx2 = tx.coil_radius * tx.coil_radius;
    const double erx2 = rx.coil_radius * rx.coil_radius;
    return kPermeability * std::numbers::pi * tx.turns * rx.turns * etx2 * erx2 / 4.0;
}

}  // namespace mrcwpt
