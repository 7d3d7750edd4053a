// Command-line front end: params | mutual | profile | place | structures.
// Exit codes: 0 ok, 2 invalid input, 3 I/O failure, 4 numerical failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mrcwpt/cli.hpp"

namespace {

enum ExitCode { kOk = 0, kInvalid = 2, kIo = 3, kNumeric = 4 };

struct Options {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::string mode;
    std::optional<unsigned> threads;
    std::size_t points = 201;
    int count = 0;
};

void add_common(CLI::App* cmd, Options& o, bool needs_config) {
    auto* c = cmd->add_option("--config", o.config, "Scenario JSON file");
    if (needs_config) c->required();
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Override solver.seed");
    cmd->add_option("--mode", o.mode, "Mutual inductance model")->check(CLI::IsMember({"exact", "approx"}));
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
}

mrcwpt::ScenarioConfig load(const Options& o) {
    mrcwpt::ScenarioConfig cfg = mrcwpt::load_scenario(o.config);
    mrcwpt::cli::Overrides ov;
    ov.seed = o.seed;
    if (!o.mode.empty()) ov.mode = mrcwpt::parse_mutual_mode(o.mode);
    ov.threads = o.threads;
    mrcwpt::cli::apply(cfg, ov);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed magnetic-resonance WPT: coverage profiles and transmitter placement"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mrcwpt::kVersion));
    Options o;

    auto* params = app.add_subcommand("params", "Print derived coil electricals");
    add_common(params, o, true);
    auto* mutual = app.add_subcommand("mutual", "Tabulate exact vs approximate mutual inductance");
    add_common(mutual, o, true);
    mutual->add_option("--points", o.points, "Distances sampled over [0, extent]")->check(CLI::Range(2, 1000000));
    auto* prof = app.add_subcommand("profile", "Load power over the region for a fixed placement");
    add_common(prof, o, true);
    auto* place = app.add_subcommand("place", "Optimise the transmitter placement");
    add_common(place, o, true);
    auto* structures = app.add_subcommand("structures", "List rotationally symmetric structures");
    add_common(structures, o, false);
    structures->add_option("--count", o.count, "Number of transmitters (defaults to placement.count)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    const std::filesystem::path out(o.out);
    try {
        if (params->parsed()) {
            const auto cfg = load(o);
            const auto report = mrcwpt::cli::cmd_params(cfg, std::cout);
            if (params->count("--out") > 0) mrcwpt::cli::write_report(out, report, elapsed());
        } else if (mutual->parsed()) {
            const auto cfg = load(o);
            mrcwpt::cli::write_report(out, mrcwpt::cli::cmd_mutual(cfg, out, o.points, std::cout), elapsed());
        } else if (prof->parsed()) {
            const auto cfg = load(o);
            mrcwpt::cli::write_report(out, mrcwpt::cli::cmd_profile(cfg, out, std::cout), elapsed());
        } else if (place->parsed()) {
            const auto cfg = load(o);
            mrcwpt::cli::write_report(out, mrcwpt::cli::cmd_place(cfg, out, std::cout), elapsed());
        } else if (structures->parsed()) {
            int n = o.count;
            if (n == 0) {
                if (o.config.empty()) throw mrcwpt::ValidationError("structures: give --count or --config");
                n = load(o).placement.count;
            }
            const auto listing = mrcwpt::cli::cmd_structures(n, std::cout);
            if (structures->count("--out") > 0) {
                mrcwpt::write_text_file(out / "structures.json", listing.dump(2) + "\n");
            }
        }
    } catch (const mrcwpt::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const mrcwpt::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return kOk;
}
