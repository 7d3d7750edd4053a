#pragma once

#include <memory>
#include <span>

#include "mrcwpt/coil.hpp"
#include "mrcwpt/error.hpp"
#include "mrcwpt/magnetics.hpp"

namespace mrcwpt {

/// A validated SystemConfig with every derived quantity the solvers need.
/// Immutable after construction.
class SystemModel {
public:
    explicit SystemModel(const SystemConfig& config) : config_(config) {
        config_.validate();
        tx_ = derive_electrical(config_.tx_coil, config_.angular_frequency);
        rx_ = derive_electrical(config_.rx_coil, config_.angular_frequency);
        r_rx_ = total_receiver_resistance(rx_, config_.load_resistance);
        beta_ = coupling_beta(config_.tx_coil, config_.rx_coil);
        kernel_ = std::make_shared<const MutualKernel>(config_.tx_coil, config_.rx_coil,
                                                       config_.receiver_height, kKernelRange);
    }

    /// Lateral distance up to which exact receiver mutuals use the cached kernel.
    static constexpr double kKernelRange = 2.5;

    const SystemConfig& config() const { return config_; }
    const ElectricalParams& tx_electrical() const { return tx_; }
    const ElectricalParams& rx_electrical() const { return rx_; }

    double w() const { return config_.angular_frequency; }
    double p_max() const { return config_.sum_power_budget; }
    double z0() const { return config_.receiver_height; }
    double r_tx() const { return tx_.resistance; }
    double r_rx() const { return r_rx_; }
    double r_load() const { return config_.load_resistance; }
    double beta() const { return beta_; }

    /// Supremum of the power deliverable to the load, (r_load / r_rx) p_max.
    double power_ceiling() const { return r_load() / r_rx() * p_max(); }

    /// Exact transmitter-receiver mutual at the configured height.
    const MutualKernel& receiver_kernel() const { return *kernel_; }

private:
    SystemConfig config_;
    ElectricalParams tx_;
    ElectricalParams rx_;
    double r_rx_ = 0.0;
    double beta_ = 0.0;
    std::shared_ptr<const MutualKernel> kernel_;
};

/// Mutual inductance of every transmitter (at the given poses) with the receiver.
inline MutualVector mutual_vector(std::span<const CoilPose> transmitters, const CoilPose& receiver,
                                  const SystemModel& model, MutualMode mode) {
    detail::require(!transmitters.empty(), "mutual_vector: need at least one transmitter");
    MutualVector h(transmitters.size());
    const auto& cfg = model.config();
    const MutualKernel& kernel = model.receiver_kernel();
    for (std::size_t n = 0; n < transmitters.size(); ++n) {
        const CoilPose& tx = transmitters[n];
        const double d = lateral_distance(tx, receiver);
        const double dz = receiver.z - tx.z;
        if (mode == MutualMode::approx) {
            h[n] = mutual_approx(model.beta(), d, dz);
        } else if (dz == kernel.vertical_separation()) {
            h[n] = kernel(d);
        } else {
            h[n] = mutual_exact(cfg.tx_coil, tx, cfg.rx_coil, receiver);
        }
    }
    return h;
}

}  // namespace mrcwpt
