#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "mrcwpt/beamforming.hpp"
#include "mrcwpt/io.hpp"
#include "mrcwpt/metrics.hpp"
#include "mrcwpt/placement_1d.hpp"
#include "mrcwpt/placement_2d.hpp"
#include "mrcwpt/scenario.hpp"
#include "mrcwpt/system.hpp"

namespace mrcwpt::cli {

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<MutualMode> mode;
    std::optional<unsigned> threads;
};

inline void apply(ScenarioConfig& cfg, const Overrides& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.mode) cfg.mode = *o.mode;
    if (o.threads) cfg.solver.threads = std::max(1u, *o.threads);
}

inline nlohmann::json electrical_json(const ElectricalParams& e) {
    return {{"resistance_ohm", e.resistance},
            {"self_inductance_h", e.self_inductance},
            {"compensator_capacitance_f", e.compensator_capacitance}};
}

inline nlohmann::json poses_json(const std::vector<CoilPose>& poses) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : poses) arr.push_back({p.x, p.y});
    return arr;
}

inline nlohmann::json trace_json(const std::vector<BisectionStep>& trace) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : trace) {
        arr.push_back({{"tau", s.tau}, {"feasible", s.feasible}, {"search_iterations", s.search_iterations}});
    }
    return arr;
}

inline nlohmann::json envelope(const char* command, const ScenarioConfig& cfg) {
    return {{"version", kVersion}, {"command", command}, {"config", scenario_to_json(cfg)}};
}

/// Derived coil electricals.
inline nlohmann::json cmd_params(const ScenarioConfig& cfg, std::ostream& log) {
    const SystemModel model(cfg.system);
    char line[160];
    log << "coil  r (ohm)     l (mH)      c (fF)\n";
    for (const auto& [name, e] : {std::pair{"tx", model.tx_electrical()}, std::pair{"rx", model.rx_electrical()}}) {
        std::snprintf(line, sizeof line, "%-4s  %-10.4f  %-10.4f  %.4f\n", name, e.resistance,
                      e.self_inductance * 1e3, e.compensator_capacitance * 1e15);
        log << line;
    }
    nlohmann::json j = envelope("params", cfg);
    j["results"] = {{"tx", electrical_json(model.tx_electrical())},
                    {"rx", electrical_json(model.rx_electrical())},
                    {"receiver_total_resistance_ohm", model.r_rx()},
                    {"beta", model.beta()}};
    return j;
}

/// Exact and approximate transmitter-receiver mutual inductance versus
/// lateral distance over [0, extent].
inline nlohmann::json cmd_mutual(const ScenarioConfig& cfg, const std::filesystem::path& out, std::size_t points,
                                 std::ostream& log) {
    mrcwpt::detail::require(points >= 2, "--points: must be >= 2");
    const SystemModel model(cfg.system);
    const double extent = cfg.region.extent();
    std::string csv = "d,h_exact,h_approx\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double d = extent * static_cast<double>(i) / static_cast<double>(points - 1);
        const double exact = mutual_exact(cfg.system.tx_coil, {0.0, 0.0, 0.0}, cfg.system.rx_coil,
                                          {d, 0.0, cfg.system.receiver_height});
        const double approx = mutual_approx(model.beta(), d, cfg.system.receiver_height);
        worst = std::max(worst, std::abs(exact - approx));
        csv += format_sig9(d) + "," + format_sig9(exact) + "," + format_sig9(approx) + "\n";
    }
    write_text_file(out / "mutual.csv", csv);
    log << "wrote " << (out / "mutual.csv").string() << " (" << points << " rows, max |exact - approx| = " << worst
        << " H)\n";
    nlohmann::json j = envelope("mutual", cfg);
    j["results"] = {{"csv", "mutual.csv"}, {"points", points}, {"max_abs_difference_h", worst}};
    return j;
}

namespace detail {

inline RegionMetrics emit_profile(const std::vector<CoilPose>& poses, const ScenarioConfig& cfg,
                                  const SystemModel& model, const std::filesystem::path& out) {
    const PowerProfile p =
        quantized(profile(poses, cfg.region, model, cfg.strategy, cfg.mode, cfg.solver.threads));
    const RegionMetrics m = summarize(p);
    write_text_file(out / "profile.csv", profile_csv(p));
    write_text_file(out / "metrics.json", metrics_to_json(m).dump(2) + "\n");
    return m;
}

inline void log_metrics(std::ostream& log, const RegionMetrics& m) {
    char line[160];
    std::snprintf(line, sizeof line, "p_avg %.4f W  p_min %.4f W  p_max %.4f W  xi %.2f%%\n", m.p_avg, m.p_min,
                  m.p_max, 100.0 * m.xi);
    log << line;
}

}  // namespace detail

/// Load power over the region for a fixed placement.
inline nlohmann::json cmd_profile(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    const SystemModel model(cfg.system);
    const std::vector<CoilPose> poses = resolve_placement(cfg);
    const RegionMetrics m = detail::emit_profile(poses, cfg, model, out);
    detail::log_metrics(log, m);
    nlohmann::json j = envelope("profile", cfg);
    j["results"] = {{"placement", poses_json(poses)}, {"profile", "profile.csv"}, {"metrics", metrics_to_json(m)}};
    return j;
}

/// Optimised placement: bisection with sign-gradient search on a line, the structure catalog on a disk.
inline nlohmann::json cmd_place(const ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
    mrcwpt::detail::require(cfg.placement.kind == PlacementKind::optimize,
                    "placement.kind: the place command needs kind \"optimize\"");
    const SystemModel model(cfg.system);
    nlohmann::json j = envelope("place", cfg);
    nlohmann::json results;
    std::vector<CoilPose> poses;
    if (cfg.region.is_line()) {
        const PlacementResult r = optimize_placement_1d(static_cast<std::size_t>(cfg.placement.count), model,
                                                        cfg.region.extent(), cfg.solver, cfg.seed);
        poses = r.placement.expand();
        results = {{"region", "line"},
                   {"half_positions", r.placement.half_positions},
                   {"parity", r.placement.parity == Parity::odd ? "odd" : "even"},
                   {"tau_star", r.tau_star},
                   {"certified_min", r.certified_min},
                   {"bisection", trace_json(r.trace)},
                   {"search_iterations", r.search_iterations},
                   {"seed", r.seed}};
        char line[200];
        std::snprintf(line, sizeof line, "tau* %.4f W  certified min %.4f W  (%zu bisection steps)\n", r.tau_star,
                      r.certified_min, r.trace.size());
        log << line;
    } else {
        const Placement2DReport rep =
            optimize_placement_2d(cfg.placement.count, model, cfg.region.extent(), cfg.solver, cfg.seed, cfg.sector);
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t i = 0; i < rep.structures.size(); ++i) {
            const StructureResult& s = rep.structures[i];
            nlohmann::json rings = nlohmann::json::array();
            for (const Ring& ring : s.structure.rings) {
                rings.push_back({{"count", ring.count}, {"radius", ring.radius}, {"rotation", ring.rotation}});
            }
            list.push_back({{"prime", s.prime},
                            {"rings", rings},
                            {"origin_count", s.structure.origin_count},
                            {"tau_star", s.tau_star},
                            {"certified_min", s.certified_min},
                            {"bisection", trace_json(s.trace)},
                            {"search_iterations", s.search_iterations}});
            char line[200];
            std::snprintf(line, sizeof line, "structure %zu (u=%d): tau* %.4f W  certified min %.4f W\n", i + 1,
                          s.prime, s.tau_star, s.certified_min);
            log << line;
        }
        poses = rep.structures[rep.selected].structure.expand();
        results = {{"region", "disk"}, {"structures", list}, {"selected", rep.selected}, {"seed", rep.seed}};
        log << "selected structure " << rep.selected + 1 << "\n";
    }
    const RegionMetrics m = detail::emit_profile(poses, cfg, model, out);
    detail::log_metrics(log, m);
    results["placement"] = poses_json(poses);
    results["profile"] = "profile.csv";
    results["metrics"] = metrics_to_json(m);
    j["results"] = results;
    return j;
}

/// Catalog of rotationally symmetric structures for n transmitters.
inline nlohmann::json cmd_structures(int n, std::ostream& log) {
    const std::vector<RingStructure> catalog = enumerate_structures(n);
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const RingStructure& s = catalog[i];
        list.push_back({{"prime", s.symmetry_order()},
                        {"rings", s.rings.size()},
                        {"ring_size", s.rings.empty() ? 0 : s.rings.front().count},
                        {"origin_count", s.origin_count}});
        log << "structure " << i + 1 << ": " << s.rings.size() << " ring(s) of "
            << (s.rings.empty() ? 0 : s.rings.front().count) << ", " << s.origin_count << " at origin\n";
    }
    return {{"version", kVersion}, {"command", "structures"}, {"count", n}, {"structures", list}};
}

/// Writes report.json with the wall-clock time under a separate key.
inline void write_report(const std::filesystem::path& out, nlohmann::json report, double seconds) {
    report["timing"] = {{"wall_seconds", seconds}};
    write_text_file(out / "report.json", report.dump(2) + "\n");
}

}  // namespace mrcwpt::cli
