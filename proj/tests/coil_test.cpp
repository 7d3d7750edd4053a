#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mrcwpt/coil.hpp"
#include "mrcwpt/presets.hpp"

using namespace mrcwpt;

namespace {

constexpr double kW = 42.6e6;

void expect_rel(double actual, double expected, double tol) {
    EXPECT_LE(std::abs(actual - expected), tol * std::abs(expected)) << actual << " vs " << expected;
}

}  // namespace

TEST(Coil, ReferenceTransmitterElectricals) {
    const ElectricalParams e = derive_electrical(presets::transmitter_coil(), kW);
    expect_rel(e.resistance, 67.20, 5e-3);
    expect_rel(e.self_inductance, 63.27e-3, 5e-3);
    expect_rel(e.compensator_capacitance, 8.71e-15, 5e-3);
}

TEST(Coil, ReferenceReceiverElectricals) {
    const ElectricalParams e = derive_electrical(presets::receiver_coil(), kW);
    expect_rel(e.resistance, 16.80, 5e-3);
    expect_rel(e.self_inductance, 7.04e-3, 5e-3);
    expect_rel(e.compensator_capacitance, 78.29e-15, 5e-3);
}

TEST(Coil, CompensatorResonatesAtSourceFrequency) {
    for (double w : {1e5, 6.78e6 * 2.0 * 3.141592653589793, kW}) {
        const ElectricalParams e = derive_electrical(presets::receiver_coil(), w);
        EXPECT_NEAR(e.self_inductance * e.compensator_capacitance * w * w, 1.0, 1e-12);
    }
}

TEST(Coil, ResistanceScalesLinearlyWithTurnsAndRadius) {
    CoilSpec c = presets::transmitter_coil();
    const double base = derive_electrical(c, kW).resistance;
    c.turns *= 2;
    expect_rel(derive_electrical(c, kW).resistance, 2.0 * base, 1e-14);
    c.coil_radius *= 3.0;
    expect_rel(derive_electrical(c, kW).resistance, 6.0 * base, 1e-14);
}

TEST(Coil, InductanceScalesWithTurnsSquared) {
    CoilSpec c = presets::receiver_coil();
    const double base = derive_electrical(c, kW).self_inductance;
    c.turns *= 3;
    expect_rel(derive_electrical(c, kW).self_inductance, 9.0 * base, 1e-14);
}

TEST(Coil, RejectsNonPositiveFields) {
    CoilSpec c = presets::transmitter_coil();
    c.coil_radius = 0.0;
    EXPECT_THROW(c.validate("tx_coil"), ValidationError);
    try {
        c.validate("tx_coil");
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("tx_coil.coil_radius"), std::string::npos);
    }
    c = presets::transmitter_coil();
    c.turns = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = presets::transmitter_coil();
    c.wire_radius = -1.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = presets::transmitter_coil();
    c.resistivity = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Coil, RejectsThickWireThatMakesInductanceNonPositive) {
    CoilSpec c = presets::transmitter_coil();
    c.wire_radius = c.coil_radius * 8.0 / std::exp(2.0) * 1.01;  // ln(8e/e_w) just below 2
    EXPECT_THROW(derive_electrical(c, kW), ValidationError);
}

TEST(Coil, RejectsZeroFrequency) {
    EXPECT_THROW(derive_electrical(presets::transmitter_coil(), 0.0), ValidationError);
    SystemConfig cfg = presets::reference_system();
    cfg.angular_frequency = 0.0;
    EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Coil, ReceiverTotalResistanceAddsLoad) {
    const ElectricalParams e = derive_electrical(presets::receiver_coil(), kW);
    EXPECT_DOUBLE_EQ(total_receiver_resistance(e, 100.0), e.resistance + 100.0);
    EXPECT_THROW(total_receiver_resistance(e, 0.0), ValidationError);
}

TEST(Coil, CouplingBetaMatchesClosedForm) {
    const SystemConfig cfg = presets::reference_system();
    const double expected = kPermeability * 3.141592653589793 * 400.0 * 200.0 * std::pow(0.05, 2) *
                            std::pow(0.025, 2) / 4.0;
    expect_rel(coupling_beta(cfg.tx_coil, cfg.rx_coil), expected, 1e-14);
}
