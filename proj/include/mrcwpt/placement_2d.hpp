#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "mrcwpt/error.hpp"
#include "mrcwpt/metrics.hpp"
#include "mrcwpt/parallel.hpp"
#include "mrcwpt/placement_1d.hpp"
#include "mrcwpt/search.hpp"
#include "mrcwpt/system.hpp"

namespace mrcwpt {

/// Transmitters equally spaced on a circle of `radius` about the origin, the
/// first one at angle `rotation`.
struct Ring {
    int count = 0;
    double radius = 0.0;
    double rotation = 0.0;
};

/// Concentric rings plus coils stacked at the origin.
struct RingStructure {
    std::vector<Ring> rings;
    int origin_count = 0;

    int total() const {
        int n = origin_count;
        for (const Ring& r : rings) n += r.count;
        return n;
    }

    /// Greatest common ring size; 0 when there are no rings.
    int symmetry_order() const {
        int g = 0;
        for (const Ring& r : rings) g = std::gcd(g, r.count);
        return g;
    }

    /// Angular extent of the sector that repeats under the structure's rotations.
    double sector_angle() const {
        const int u = symmetry_order();
        return u >= 2 ? 2.0 * std::numbers::pi / u : 2.0 * std::numbers::pi;
    }

    std::vector<CoilPose> expand() const {
        std::vector<CoilPose> poses;
        poses.reserve(static_cast<std::size_t>(total()));
        for (const Ring& ring : rings) {
            for (int k = 0; k < ring.count; ++k) {
                const double theta = ring.rotation + 2.0 * std::numbers::pi * k / ring.count;
                poses.push_back({ring.radius * std::cos(theta), ring.radius * std::sin(theta), 0.0});
            }
        }
        for (int k = 0; k < origin_count; ++k) poses.push_back({0.0, 0.0, 0.0});
        return poses;
    }
};

/// True when some u >= 2 divides every ring size. Vacuously true without rings.
inline bool is_rotationally_symmetric(const RingStructure& s) {
    if (s.rings.empty()) return true;
    for (const Ring& r : s.rings) {
        if (r.count < 2) return false;
    }
    return s.symmetry_order() >= 2;
}

inline std::vector<int> primes_up_to(int n) {
    std::vector<int> primes;
    if (n < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
    for (int p = 2; p <= n; ++p) {
        if (composite[static_cast<std::size_t>(p)]) continue;
        primes.push_back(p);
        for (long long q = static_cast<long long>(p) * p; q <= n; q += p) composite[static_cast<std::size_t>(q)] = true;
    }
    return primes;
}

/// Distinct rotationally symmetric templates for n transmitters, ascending by
/// ring size u: floor(n/u) rings of u coils and n mod u coils at the origin.
/// Radii and rotations are left at zero.
inline std::vector<RingStructure> enumerate_structures(int n) {
    detail::require(n >= 1, "enumerate_structures: N must be >= 1");
    if (n == 1) return {RingStructure{{}, 1}};
    std::vector<RingStructure> catalog;
    for (int u : primes_up_to(n)) {
        RingStructure s;
        s.rings.assign(static_cast<std::size_t>(n / u), Ring{u, 0.0, 0.0});
        s.origin_count = n % u;
        catalog.push_back(std::move(s));
    }
    return catalog;
}

/// Polar sampling of the repeating sector used while optimising and when
/// certifying a structure.
struct SectorSampling {
    std::size_t search_radii = 61;
    std::size_t search_angles = 31;
    std::size_t certify_radii = 201;
    std::size_t certify_angles = 121;
};

struct SectorMinimum {
    double value = std::numeric_limits<double>::infinity();
    double x = 0.0;
    double y = 0.0;
};

/// Minimum of f over the sector {r <= rho, 0 <= angle <= sector}: polar grid
/// (origin included) then alternating radial/angular golden-section polish.
inline SectorMinimum sector_minimum(const std::function<double(double, double)>& f, double rho, double sector,
                                    std::size_t radii, std::size_t angles) {
    detail::require(radii >= 1 && angles >= 2, "sector_minimum: grid too small");
    auto at = [&](double r, double t) { return f(r * std::cos(t), r * std::sin(t)); };
    SectorMinimum best{f(0.0, 0.0), 0.0, 0.0};
    double br = 0.0;
    double bt = 0.0;
    const double dr = rho / static_cast<double>(radii);
    const double dt = sector / static_cast<double>(angles - 1);
    for (std::size_t i = 1; i <= radii; ++i) {
        const double r = dr * static_cast<double>(i);
        for (std::size_t j = 0; j < angles; ++j) {
            const double t = dt * static_cast<double>(j);
            const double v = at(r, t);
            if (v < best.value) {
                best = {v, r * std::cos(t), r * std::sin(t)};
                br = r;
                bt = t;
            }
        }
    }
    double r = br;
    double t = bt;
    for (int round = 0; round < 3; ++round) {
        r = golden_section_min([&](double rr) { return at(rr, t); }, std::max(0.0, r - dr), std::min(rho, r + dr), 40);
        if (r > 0.0) {
            t = golden_section_min([&](double tt) { return at(r, tt); }, std::max(0.0, t - dt),
                                   std::min(sector, t + dt), 40);
        }
    }
    const double v = at(r, t);
    if (v < best.value) best = {v, r * std::cos(t), r * std::sin(t)};
    return best;
}

/// Normalised coupling sum sum_n (h_n / beta)^2 of a structure at (x, y).
inline double coupling_sum_2d(const std::vector<CoilPose>& poses, double x, double y, double z0) {
    double s = 0.0;
    for (const CoilPose& p : poses) s += coupling_term(std::hypot(p.x - x, p.y - y), z0);
    return s;
}

struct StructureResult {
    RingStructure structure;  // optimised radii and rotations
    int prime = 0;            // common ring size u, 0 for the origin-only layout
    double tau_star = 0.0;
    double certified_min = 0.0;
    std::vector<BisectionStep> trace;
    int search_iterations = 0;
};

struct Placement2DReport {
    std::vector<StructureResult> structures;
    std::size_t selected = 0;  // argmax tau_star, lowest index on ties
    double radius = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

// Decision vector layout: [rho_1 .. rho_Q, phi_2 .. phi_Q].
inline RingStructure apply_variables(RingStructure s, const std::vector<double>& v) {
    const std::size_t q = s.rings.size();
    if (q == 0) return s;
    for (std::size_t i = 0; i < q; ++i) s.rings[i].radius = v[i];
    s.rings[0].rotation = 0.0;
    for (std::size_t i = 1; i < q; ++i) s.rings[i].rotation = v[q + i - 1];
    return s;
}

struct StructureSpace {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> step;
    std::vector<double> spread;
    std::vector<double> initial;
};

inline StructureSpace structure_space(const RingStructure& s, double rho, std::optional<double> delta) {
    StructureSpace sp;
    const std::size_t q = s.rings.size();
    const double sector = s.sector_angle();
    for (std::size_t i = 0; i < q; ++i) {
        sp.lower.push_back(0.0);
        sp.upper.push_back(rho);
        sp.step.push_back(delta ? *delta : rho / 100.0);
        sp.spread.push_back(rho / (2.0 * static_cast<double>(q)));
        sp.initial.push_back(static_cast<double>(2 * i + 1) * rho / (2.0 * static_cast<double>(q)));
    }
    for (std::size_t i = 1; i < q; ++i) {
        sp.lower.push_back(0.0);
        sp.upper.push_back(sector);
        sp.step.push_back(sector / 100.0);
        sp.spread.push_back(sector);
        sp.initial.push_back(static_cast<double>(i) * sector / static_cast<double>(q));
    }
    return sp;
}

struct Run2D {
    std::optional<std::vector<double>> found;
    int iterations = 0;
};

}  // namespace detail

/// Bisection on tau with a sign-gradient search over ring radii and the
/// rotations of rings 2..Q. The coverage constraint is checked on one
/// repeating sector with the small-coil approximation; partial derivatives are
/// central differences (step rho/200) at the current sector minimiser.
inline StructureResult optimize_structure(const RingStructure& templ, const SystemModel& model, double rho,
                                          const SearchParams& params, std::uint64_t seed,
                                          const SectorSampling& sampling = {}) {
    params.validate();
    detail::require(std::isfinite(rho) && rho > 0.0, "region.radius: must be > 0");
    detail::require(is_rotationally_symmetric(templ), "optimize_structure: template is not rotationally symmetric");
    detail::require(templ.total() >= 1, "optimize_structure: empty template");

    const double z0 = model.z0();
    const double sector = templ.sector_angle();
    const detail::StructureSpace space = detail::structure_space(templ, rho, params.step);
    const std::size_t dims = space.initial.size();
    const double fd = rho / 200.0;

    auto coverage = [&](const std::vector<double>& v) {
        const std::vector<CoilPose> poses = detail::apply_variables(templ, v).expand();
        return sector_minimum([&](double x, double y) { return coupling_sum_2d(poses, x, y, z0); }, rho, sector,
                              sampling.search_radii, sampling.search_angles);
    };
    auto coupling_at = [&](const std::vector<double>& v, double x, double y) {
        return coupling_sum_2d(detail::apply_variables(templ, v).expand(), x, y, z0);
    };

    auto run_from = [&](std::vector<double> v, double threshold) {
        detail::Run2D run;
        for (int it = 0; it <= params.itr_max; ++it) {
            const SectorMinimum m = coverage(v);
            if (m.value >= threshold) {
                run.found = std::move(v);
                return run;
            }
            if (it == params.itr_max || dims == 0) break;
            ++run.iterations;
            std::vector<int> signs(dims);
            for (std::size_t i = 0; i < dims; ++i) {
                std::vector<double> plus = v;
                std::vector<double> minus = v;
                plus[i] += fd;
                minus[i] -= fd;
                signs[i] = detail::sign_of(coupling_at(plus, m.x, m.y) - coupling_at(minus, m.x, m.y));
            }
            for (std::size_t i = 0; i < dims; ++i) {
                v[i] = std::clamp(v[i] + signs[i] * space.step[i], space.lower[i], space.upper[i]);
            }
        }
        return run;
    };

    StructureResult result;
    result.prime = templ.symmetry_order();
    result.structure = detail::apply_variables(templ, space.initial);

    auto probe = [&](double tau, int level, int& iterations) -> std::optional<std::vector<double>> {
        const double threshold = coupling_threshold(tau, model);
        iterations = 0;
        if (!std::isfinite(threshold)) return std::nullopt;
        const int restarts = dims == 0 ? 1 : params.rpt_max;
        const unsigned batch = std::max(1u, params.threads);
        for (int first = 0; first < restarts; first += static_cast<int>(batch)) {
            const int count = std::min<int>(static_cast<int>(batch), restarts - first);
            std::vector<detail::Run2D> runs(static_cast<std::size_t>(count));
            parallel_for(runs.size(), batch, [&](std::size_t k) {
                const int r = first + static_cast<int>(k);
                std::vector<double> start = space.initial;
                if (r > 0) {
                    auto gen = detail::substream(seed, level, r);
                    for (std::size_t i = 0; i < dims; ++i) {
                        start[i] = std::clamp(start[i] + detail::uniform(gen, -space.spread[i], space.spread[i]),
                                              space.lower[i], space.upper[i]);
                    }
                }
                runs[k] = run_from(std::move(start), threshold);
            });
            for (auto& run : runs) {
                iterations += run.iterations;
                if (run.found) return std::move(run.found);
            }
        }
        return std::nullopt;
    };

    auto best = detail::bisect<std::vector<double>>(model.p_max(), params.epsilon, probe, result.trace,
                                                     result.tau_star);
    for (const auto& step : result.trace) result.search_iterations += step.search_iterations;
    if (best) result.structure = detail::apply_variables(templ, *best);

    const std::vector<CoilPose> poses = result.structure.expand();
    const Region region = Region::disk(rho, z0);
    result.certified_min =
        sector_minimum(
            [&](double x, double y) {
                return power_at(poses, x, y, region, model, Strategy::optimal, MutualMode::exact);
            },
            rho, sector, sampling.certify_radii, sampling.certify_angles)
            .value;
    return result;
}

/// Optimises every catalog template for n transmitters over the disk of
/// radius rho and selects the one with the largest tau_star.
inline Placement2DReport optimize_placement_2d(int n, const SystemModel& model, double rho,
                                               const SearchParams& params, std::uint64_t seed,
                                               const SectorSampling& sampling = {}) {
    params.validate();
    const std::vector<RingStructure> catalog = enumerate_structures(n);
    Placement2DReport report;
    report.radius = rho;
    report.seed = seed;
    report.structures.resize(catalog.size());
    SearchParams inner = params;
    inner.threads = 1;
    parallel_for(catalog.size(), params.threads, [&](std::size_t i) {
        report.structures[i] = optimize_structure(catalog[i], model, rho, inner, seed, sampling);
    });
    for (std::size_t i = 1; i < report.structures.size(); ++i) {
        if (report.structures[i].tau_star > report.structures[report.selected].tau_star) report.selected = i;
    }
    return report;
}

}  // namespace mrcwpt
