#pragma once

#include "mrcwpt/coil.hpp"

namespace mrcwpt::presets {

/// 50 mm, 400-turn copper transmitter coil with 0.1 mm wire.
inline CoilSpec transmitter_coil() { return {0.05, 400, 1.0e-4, 1.68e-8}; }

/// 25 mm, 200-turn copper receiver coil with 0.1 mm wire.
inline CoilSpec receiver_coil() { return {0.025, 200, 1.0e-4, 1.68e-8}; }

/// Reference operating point: 42.6 Mrad/s, 30 W budget, receiver 0.2 m above
/// the transmitters, 100 ohm load.
inline SystemConfig reference_system() {
    SystemConfig cfg;
    cfg.angular_frequency = 42.6e6;
    cfg.sum_power_budget = 30.0;
    cfg.receiver_height = 0.2;
    cfg.load_resistance = 100.0;
    cfg.tx_coil = transmitter_coil();
    cfg.rx_coil = receiver_coil();
    return cfg;
}

/// Single large transmitter whose radius equals the five small coils combined.
inline SystemConfig centralized_system() {
    SystemConfig cfg = reference_system();
    cfg.tx_coil.coil_radius = 0.25;
    return cfg;
}

}  // namespace mrcwpt::presets
