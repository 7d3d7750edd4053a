#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrcwpt/beamforming.hpp"
#include "mrcwpt/coil.hpp"
#include "mrcwpt/error.hpp"
#include "mrcwpt/magnetics.hpp"
#include "mrcwpt/metrics.hpp"
#include "mrcwpt/placement_1d.hpp"
#include "mrcwpt/placement_2d.hpp"
#include "mrcwpt/search.hpp"

namespace mrcwpt {

inline constexpr const char* kVersion = "1.0.0";

enum class PlacementKind { uniform, centralized, explicit_positions, optimize };

struct PlacementSpec {
    PlacementKind kind = PlacementKind::uniform;
    int count = 0;
    std::vector<CoilPose> positions;  // explicit only, z = 0
};

/// Everything one CLI run needs. Lengths in metres once parsed; the file
/// gives coil and wire radii in millimetres.
struct ScenarioConfig {
    SystemConfig system;
    Region region;
    Strategy strategy = Strategy::optimal;
    MutualMode mode = MutualMode::exact;
    PlacementSpec placement;
    SearchParams solver;
    std::uint64_t seed = 1;
    SectorSampling sector;
};

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline const json& object_at(const json& parent, const std::string& key, const std::string& path) {
    const std::string p = join_path(path, key);
    require(parent.contains(key), p + ": missing");
    require(parent.at(key).is_object(), p + ": expected an object");
    return parent.at(key);
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        require(ok, join_path(path, item.key()) + ": unknown field");
    }
}

inline double number_at(const json& obj, const std::string& key, const std::string& path) {
    const std::string p = join_path(path, key);
    require(obj.contains(key), p + ": missing");
    require(obj.at(key).is_number(), p + ": expected a number");
    return obj.at(key).get<double>();
}

inline double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
    return obj.contains(key) ? number_at(obj, key, path) : fallback;
}

inline long long integer_at(const json& obj, const std::string& key, const std::string& path) {
    const std::string p = join_path(path, key);
    require(obj.contains(key), p + ": missing");
    require(obj.at(key).is_number_integer(), p + ": expected an integer");
    return obj.at(key).get<long long>();
}

inline long long integer_or(const json& obj, const std::string& key, const std::string& path, long long fallback) {
    return obj.contains(key) ? integer_at(obj, key, path) : fallback;
}

inline std::string string_at(const json& obj, const std::string& key, const std::string& path) {
    const std::string p = join_path(path, key);
    require(obj.contains(key), p + ": missing");
    require(obj.at(key).is_string(), p + ": expected a string");
    return obj.at(key).get<std::string>();
}

// The parsers' messages already start with the field name.
template <class Parse>
auto parse_enum(const json& obj, const std::string& key, const std::string& path, Parse parse) {
    return parse(string_at(obj, key, path));
}

inline CoilSpec parse_coil(const json& root, const std::string& key) {
    const json& c = object_at(root, key, "");
    reject_unknown(c, key, {"coil_radius_mm", "turns", "wire_radius_mm", "resistivity"});
    CoilSpec coil;
    coil.coil_radius = number_at(c, "coil_radius_mm", key) * 1e-3;
    const long long turns = integer_at(c, "turns", key);
    require(turns >= 1 && turns <= 1000000, key + ".turns: must be in [1, 1e6]");
    coil.turns = static_cast<int>(turns);
    coil.wire_radius = number_at(c, "wire_radius_mm", key) * 1e-3;
    coil.resistivity = number_at(c, "resistivity", key);
    coil.validate(key);
    return coil;
}

inline std::vector<CoilPose> parse_positions(const json& arr, const std::string& path) {
    require(arr.is_array() && !arr.empty(), path + ": expected a non-empty array");
    std::vector<CoilPose> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const json& e = arr[i];
        if (e.is_number()) {
            out.push_back({e.get<double>(), 0.0, 0.0});
        } else {
            require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
                    p + ": expected x or [x, y]");
            out.push_back({e[0].get<double>(), e[1].get<double>(), 0.0});
        }
        require(std::isfinite(out.back().x) && std::isfinite(out.back().y), p + ": must be finite");
    }
    return out;
}

}  // namespace detail

/// Builds and validates a scenario from its JSON form. Errors name the
/// offending field, e.g. "tx_coil.coil_radius_mm: missing".
inline ScenarioConfig parse_scenario(const nlohmann::json& root) {
    using detail::require;
    require(root.is_object(), "config: expected a JSON object");
    detail::reject_unknown(root, "",
                           {"system", "tx_coil", "rx_coil", "region", "strategy", "mode", "placement", "solver",
                            "sampling"});
    ScenarioConfig cfg;

    const auto& sys = detail::object_at(root, "system", "");
    detail::reject_unknown(sys, "system",
                           {"angular_frequency", "sum_power_budget", "receiver_height", "load_resistance"});
    cfg.system.angular_frequency = detail::number_at(sys, "angular_frequency", "system");
    cfg.system.sum_power_budget = detail::number_at(sys, "sum_power_budget", "system");
    cfg.system.receiver_height = detail::number_at(sys, "receiver_height", "system");
    cfg.system.load_resistance = detail::number_at(sys, "load_resistance", "system");
    require(std::isfinite(cfg.system.angular_frequency) && cfg.system.angular_frequency > 0.0,
            "system.angular_frequency: must be > 0");
    require(cfg.system.sum_power_budget > 0.0, "system.sum_power_budget: must be > 0");
    require(cfg.system.receiver_height > 0.0, "system.receiver_height: must be > 0");
    require(cfg.system.load_resistance > 0.0, "system.load_resistance: must be > 0");
    cfg.system.tx_coil = detail::parse_coil(root, "tx_coil");
    cfg.system.rx_coil = detail::parse_coil(root, "rx_coil");

    Sampling sampling;
    if (root.contains("sampling")) {
        const auto& s = detail::object_at(root, "sampling", "");
        detail::reject_unknown(s, "sampling",
                               {"line_points", "disk_radii", "disk_angles", "refine_minimum", "sector_search_radii",
                                "sector_search_angles", "sector_certify_radii", "sector_certify_angles"});
        auto count = [&](const char* key, std::size_t fallback, long long min) {
            const long long v = detail::integer_or(s, key, "sampling", static_cast<long long>(fallback));
            require(v >= min && v <= 10000000, std::string("sampling.") + key + ": out of range");
            return static_cast<std::size_t>(v);
        };
        sampling.line_points = count("line_points", sampling.line_points, 2);
        sampling.disk_radii = count("disk_radii", sampling.disk_radii, 1);
        sampling.disk_angles = count("disk_angles", sampling.disk_angles, 3);
        if (s.contains("refine_minimum")) {
            require(s.at("refine_minimum").is_boolean(), "sampling.refine_minimum: expected a boolean");
            sampling.refine_minimum = s.at("refine_minimum").get<bool>();
        }
        cfg.sector.search_radii = count("sector_search_radii", cfg.sector.search_radii, 1);
        cfg.sector.search_angles = count("sector_search_angles", cfg.sector.search_angles, 2);
        cfg.sector.certify_radii = count("sector_certify_radii", cfg.sector.certify_radii, 1);
        cfg.sector.certify_angles = count("sector_certify_angles", cfg.sector.certify_angles, 2);
    }

    const auto& reg = detail::object_at(root, "region", "");
    const std::string shape = detail::string_at(reg, "shape", "region");
    if (shape == "line") {
        detail::reject_unknown(reg, "region", {"shape", "half_length"});
        const double d = detail::number_at(reg, "half_length", "region");
        require(std::isfinite(d) && d > 0.0, "region.half_length: must be > 0");
        cfg.region = Region::line(d, cfg.system.receiver_height, sampling);
    } else if (shape == "disk") {
        detail::reject_unknown(reg, "region", {"shape", "radius"});
        const double rho = detail::number_at(reg, "radius", "region");
        require(std::isfinite(rho) && rho > 0.0, "region.radius: must be > 0");
        cfg.region = Region::disk(rho, cfg.system.receiver_height, sampling);
    } else {
        throw ValidationError("region.shape: expected \"line\" or \"disk\"");
    }

    if (root.contains("strategy")) cfg.strategy = detail::parse_enum(root, "strategy", "", parse_strategy);
    if (root.contains("mode")) cfg.mode = detail::parse_enum(root, "mode", "", parse_mutual_mode);

    const auto& pl = detail::object_at(root, "placement", "");
    detail::reject_unknown(pl, "placement", {"kind", "count", "positions"});
    const std::string kind = detail::string_at(pl, "kind", "placement");
    if (kind == "explicit") {
        require(pl.contains("positions"), "placement.positions: missing");
        cfg.placement.kind = PlacementKind::explicit_positions;
        cfg.placement.positions = detail::parse_positions(pl.at("positions"), "placement.positions");
        cfg.placement.count = static_cast<int>(cfg.placement.positions.size());
        if (pl.contains("count")) {
            require(detail::integer_at(pl, "count", "placement") == cfg.placement.count,
                    "placement.count: does not match the number of positions");
        }
    } else {
        if (kind == "uniform") {
            cfg.placement.kind = PlacementKind::uniform;
            require(cfg.region.is_line(), "placement.kind: uniform placement needs a line region");
        } else if (kind == "centralized") {
            cfg.placement.kind = PlacementKind::centralized;
        } else if (kind == "optimize") {
            cfg.placement.kind = PlacementKind::optimize;
        } else {
            throw ValidationError("placement.kind: expected uniform, centralized, explicit or optimize");
        }
        require(!pl.contains("positions"), "placement.positions: only allowed with kind \"explicit\"");
        const long long n = detail::integer_at(pl, "count", "placement");
        require(n >= 1 && n <= 10000, "placement.count: must be in [1, 10000]");
        cfg.placement.count = static_cast<int>(n);
        if (cfg.placement.kind == PlacementKind::optimize && cfg.region.is_line()) {
            require(n >= 2, "placement.count: line optimisation needs at least 2 transmitters");
        }
    }

    if (root.contains("solver")) {
        const auto& sv = detail::object_at(root, "solver", "");
        detail::reject_unknown(sv, "solver",
                               {"epsilon", "delta", "itr_max", "rpt_max", "seed", "retry_smaller_step"});
        cfg.solver.epsilon = detail::number_or(sv, "epsilon", "solver", cfg.solver.epsilon);
        if (sv.contains("delta")) cfg.solver.step = detail::number_at(sv, "delta", "solver");
        const long long itr = detail::integer_or(sv, "itr_max", "solver", cfg.solver.itr_max);
        const long long rpt = detail::integer_or(sv, "rpt_max", "solver", cfg.solver.rpt_max);
        require(itr >= 1 && itr <= 1000000, "solver.itr_max: must be in [1, 1e6]");
        require(rpt >= 1 && rpt <= 1000000, "solver.rpt_max: must be in [1, 1e6]");
        cfg.solver.itr_max = static_cast<int>(itr);
        cfg.solver.rpt_max = static_cast<int>(rpt);
        if (sv.contains("seed")) {
            const auto& seed = sv.at("seed");
            require(seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<long long>() >= 0),
                    "solver.seed: expected a non-negative integer");
            cfg.seed = sv.at("seed").get<std::uint64_t>();
        }
        if (sv.contains("retry_smaller_step")) {
            require(sv.at("retry_smaller_step").is_boolean(), "solver.retry_smaller_step: expected a boolean");
            cfg.solver.retry_smaller_step = sv.at("retry_smaller_step").get<bool>();
        }
        cfg.solver.validate();
    }
    cfg.system.validate();
    return cfg;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_scenario(root);
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open config");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError(path + ": read failed");
    return parse_scenario_text(buf.str());
}

inline std::string to_string(PlacementKind k) {
    switch (k) {
        case PlacementKind::uniform: return "uniform";
        case PlacementKind::centralized: return "centralized";
        case PlacementKind::explicit_positions: return "explicit";
        case PlacementKind::optimize: return "optimize";
    }
    return "uniform";
}

/// Canonical JSON echo of a parsed scenario (same schema as the input).
inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
    using nlohmann::json;
    auto coil = [](const CoilSpec& c) {
        return json{{"coil_radius_mm", c.coil_radius * 1e3},
                    {"turns", c.turns},
                    {"wire_radius_mm", c.wire_radius * 1e3},
                    {"resistivity", c.resistivity}};
    };
    json j;
    j["system"] = {{"angular_frequency", cfg.system.angular_frequency},
                   {"sum_power_budget", cfg.system.sum_power_budget},
                   {"receiver_height", cfg.system.receiver_height},
                   {"load_resistance", cfg.system.load_resistance}};
    j["tx_coil"] = coil(cfg.system.tx_coil);
    j["rx_coil"] = coil(cfg.system.rx_coil);
    if (cfg.region.is_line()) {
        j["region"] = {{"shape", "line"}, {"half_length", cfg.region.extent()}};
    } else {
        j["region"] = {{"shape", "disk"}, {"radius", cfg.region.extent()}};
    }
    j["strategy"] = std::string(to_string(cfg.strategy));
    j["mode"] = std::string(to_string(cfg.mode));
    json pl{{"kind", to_string(cfg.placement.kind)}, {"count", cfg.placement.count}};
    if (cfg.placement.kind == PlacementKind::explicit_positions) {
        json arr = json::array();
        for (const auto& p : cfg.placement.positions) arr.push_back({p.x, p.y});
        pl["positions"] = arr;
    }
    j["placement"] = pl;
    json sv{{"epsilon", cfg.solver.epsilon},
            {"itr_max", cfg.solver.itr_max},
            {"rpt_max", cfg.solver.rpt_max},
            {"seed", cfg.seed},
            {"retry_smaller_step", cfg.solver.retry_smaller_step}};
    if (cfg.solver.step) sv["delta"] = *cfg.solver.step;
    j["solver"] = sv;
    const Sampling& s = cfg.region.sampling;
    j["sampling"] = {{"line_points", s.line_points},
                     {"disk_radii", s.disk_radii},
                     {"disk_angles", s.disk_angles},
                     {"refine_minimum", s.refine_minimum},
                     {"sector_search_radii", cfg.sector.search_radii},
                     {"sector_search_angles", cfg.sector.search_angles},
                     {"sector_certify_radii", cfg.sector.certify_radii},
                     {"sector_certify_angles", cfg.sector.certify_angles}};
    return j;
}

/// Transmitter poses for every placement kind except optimize.
inline std::vector<CoilPose> resolve_placement(const ScenarioConfig& cfg) {
    switch (cfg.placement.kind) {
        case PlacementKind::uniform:
            return uniform_line_placement(static_cast<std::size_t>(cfg.placement.count), cfg.region.extent());
        case PlacementKind::centralized:
            return std::vector<CoilPose>(static_cast<std::size_t>(cfg.placement.count));
        case PlacementKind::explicit_positions: return cfg.placement.positions;
        case PlacementKind::optimize: break;
    }
    throw ValidationError("placement.kind: optimize placements are produced by the place command");
}

}  // namespace mrcwpt
