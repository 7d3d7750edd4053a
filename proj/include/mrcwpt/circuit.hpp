#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mrcwpt/error.hpp"
#include "mrcwpt/system.hpp"

namespace mrcwpt {

using Complex = std::complex<double>;

/// Transmitter phasor currents i_n = re_n + j im_n (A).
struct CurrentAllocation {
    std::vector<double> re;
    std::vector<double> im;

    static CurrentAllocation real(std::vector<double> currents) {
        CurrentAllocation out;
        out.im.assign(currents.size(), 0.0);
        out.re = std::move(currents);
        return out;
    }

    std::size_t size() const { return re.size(); }
    Complex current(std::size_t n) const { return {re[n], im[n]}; }

    void validate() const {
        detail::require(re.size() == im.size(), "current allocation: re/im length mismatch");
        for (std::size_t n = 0; n < re.size(); ++n) {
            detail::require(std::isfinite(re[n]) && std::isfinite(im[n]),
                            "current allocation: non-finite current");
        }
    }
};

struct CircuitSolution {
    Complex receiver_current;
    std::vector<Complex> source_voltages;
    std::vector<double> per_tx_power;
    double load_power = 0.0;
    double sum_power = 0.0;
};

namespace detail {

inline void check_dimensions(const CurrentAllocation& alloc, std::span<const double> h) {
    alloc.validate();
    require(alloc.size() == h.size(), "current allocation and mutual vector differ in length");
}

inline double weighted_sum(std::span<const double> h, const std::vector<double>& currents) {
    double sum = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n) {
        sum += h[n] * currents[n];
    }
    return sum;
}

}  // namespace detail

/// Receiver loop current from Kirchhoff's voltage law: j w sum(h_n0 i_n) / r_rx.
inline Complex receiver_current(const CurrentAllocation& alloc, std::span<const double> h,
                                double r_rx, double w) {
    detail::check_dimensions(alloc, h);
    const double coupled_re = detail::weighted_sum(h, alloc.re);
    const double coupled_im = detail::weighted_sum(h, alloc.im);
    return Complex(0.0, w) * Complex(coupled_re, coupled_im) / r_rx;
}

/// Active power dissipated in the receiver load.
inline double load_power(const CurrentAllocation& alloc, std::span<const double> h, double r_rx,
                         double r_load, double w) {
    detail::check_dimensions(alloc, h);
    const double s_re = detail::weighted_sum(h, alloc.re);
    const double s_im = detail::weighted_sum(h, alloc.im);
    return w * w * r_load / (r_rx * r_rx) * (s_re * s_re + s_im * s_im);
}

/// Total active power drawn from all transmitter sources.
inline double sum_power(const CurrentAllocation& alloc, std::span<const double> h, double r_tx,
                        double r_rx, double w) {
    detail::check_dimensions(alloc, h);
    double ohmic = 0.0;
    for (std::size_t n = 0; n < alloc.size(); ++n) {
        ohmic += alloc.re[n] * alloc.re[n] + alloc.im[n] * alloc.im[n];
    }
    const double s_re = detail::weighted_sum(h, alloc.re);
    const double s_im = detail::weighted_sum(h, alloc.im);
    return r_tx * ohmic + w * w / r_rx * (s_re * s_re + s_im * s_im);
}

/// Active power drawn from each transmitter's source, including the
/// transmitter-transmitter coupling term (zero for purely real currents).
inline std::vector<double> per_transmitter_power(const CurrentAllocation& alloc,
                                                 std::span<const double> h,
                                                 const CrossMutuals& h_cross, double r_tx,
                                                 double r_rx, double w) {
    detail::check_dimensions(alloc, h);
    detail::require(h_cross.size() == h.size(), "per_transmitter_power: h_cross size mismatch");
    detail::require(h_cross.is_valid(), "per_transmitter_power: h_cross must be symmetric with zero diagonal");
    const std::size_t n_tx = h.size();
    std::vector<double> power(n_tx, 0.0);
    for (std::size_t n = 0; n < n_tx; ++n) {
        const double mag2 = alloc.re[n] * alloc.re[n] + alloc.im[n] * alloc.im[n];
        double p = (r_tx + w * w / r_rx * h[n] * h[n]) * mag2;
        for (std::size_t k = 0; k < n_tx; ++k) {
            if (k == n) continue;
            p += w * w / r_rx * h[n] * h[k] * (alloc.re[n] * alloc.re[k] + alloc.im[n] * alloc.im[k]);
            p += w * h_cross(n, k) * (alloc.im[n] * alloc.re[k] - alloc.re[n] * alloc.im[k]);
        }
        power[n] = p;
    }
    return power;
}

/// Source voltages that drive the given currents:
/// v_n = r_tx i_n - j w h_n0 i_0 + j w sum_{k != n} h_nk i_k.
inline std::vector<Complex> source_voltages(const CurrentAllocation& alloc, std::span<const double> h,
                                            const CrossMutuals& h_cross, Complex i0, double r_tx,
                                            double w) {
    detail::check_dimensions(alloc, h);
    detail::require(h_cross.size() == h.size(), "source_voltages: h_cross size mismatch");
    const Complex jw(0.0, w);
    std::vector<Complex> v(h.size());
    for (std::size_t n = 0; n < h.size(); ++n) {
        Complex coupled = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (k != n) coupled += h_cross(n, k) * alloc.current(k);
        }
        v[n] = r_tx * alloc.current(n) - jw * h[n] * i0 + jw * coupled;
    }
    return v;
}

/// Full phasor solution for driven transmitter currents.
inline CircuitSolution solve_circuit(const CurrentAllocation& alloc, std::span<const double> h,
                                     const CrossMutuals& h_cross, const SystemModel& model) {
    CircuitSolution out;
    out.receiver_current = receiver_current(alloc, h, model.r_rx(), model.w());
    out.source_voltages =
        source_voltages(alloc, h, h_cross, out.receiver_current, model.r_tx(), model.w());
    out.per_tx_power = per_transmitter_power(alloc, h, h_cross, model.r_tx(), model.r_rx(), model.w());
    out.load_power = load_power(alloc, h, model.r_rx(), model.r_load(), model.w());
    out.sum_power = sum_power(alloc, h, model.r_tx(), model.r_rx(), model.w());
    return out;
}

}  // namespace mrcwpt
