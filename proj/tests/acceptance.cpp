// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mrcwpt/beamforming.hpp"
#include "mrcwpt/circuit.hpp"
#include "mrcwpt/metrics.hpp"
#include "mrcwpt/placement_1d.hpp"
#include "mrcwpt/placement_2d.hpp"
#include "mrcwpt/presets.hpp"
#include "mrcwpt/scenario.hpp"

using namespace mrcwpt;

namespace {

class Criterion {
public:
    explicit Criterion(std::string name) : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& what) {
        if (!ok) {
            ok_ = false;
            failures_ += (failures_.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& text) { notes_ += (notes_.empty() ? "" : ", ") + text; }

    bool report() const {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::printf("%s %s (%.1f s) %s%s%s\n", ok_ ? "PASS" : "FAIL", name_.c_str(), s, notes_.c_str(),
                    failures_.empty() ? "" : " | failed: ", failures_.c_str());
        std::fflush(stdout);
        return ok_;
    }

private:
    std::string name_;
    std::string notes_;
    std::string failures_;
    bool ok_ = true;
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

// Relative tolerance, or an absolute one when the target is zero.
bool near_target(double got, double want, double rel, double abs_zero) {
    return want == 0.0 ? std::abs(got) <= abs_zero : within_rel(got, want, rel);
}

void check_row(Criterion& c, const std::string& label, const RegionMetrics& m, const double want[4], double rel) {
    const double got[4] = {m.p_avg, m.p_min, m.p_max, 100.0 * m.xi};
    const char* names[4] = {"p_avg", "p_min", "p_max", "xi%"};
    std::string row = label + " (";
    for (int k = 0; k < 4; ++k) {
        row += fmt(k == 0 ? "%.2f" : " %.2f", got[k]);
        c.check(near_target(got[k], want[k], rel, k == 3 ? 0.05 : 0.05),
                label + " " + names[k] + fmt(" %.4g", got[k]) + fmt(" vs %.4g", want[k]));
    }
    c.note(row + ")");
}

std::string config_path(const char* name) { return std::string(MRCWPT_CONFIG_DIR) + "/" + name; }

RegionMetrics run_profile(const ScenarioConfig& cfg) {
    const SystemModel model(cfg.system);
    return summarize(profile(resolve_placement(cfg), cfg.region, model, cfg.strategy, cfg.mode));
}

bool electrical() {
    Criterion c("1 electrical parameters");
    const SystemModel model(presets::reference_system());
    const ElectricalParams tx = model.tx_electrical();
    const ElectricalParams rx = model.rx_electrical();
    const double got[6] = {tx.resistance, tx.self_inductance * 1e3, tx.compensator_capacitance * 1e15,
                           rx.resistance, rx.self_inductance * 1e3, rx.compensator_capacitance * 1e15};
    const double want[6] = {67.20, 63.27, 8.71, 16.80, 7.04, 78.29};
    const char* names[6] = {"r_tx", "l_tx", "c_tx", "r_rx", "l_rx", "c_rx"};
    for (int k = 0; k < 6; ++k) {
        c.check(within_rel(got[k], want[k], 0.005), std::string(names[k]) + fmt(" %.4g", got[k]));
    }
    c.note(fmt("tx %.2f ohm", got[0]) + fmt(" %.2f mH", got[1]) + fmt(" %.2f fF", got[2]));
    c.note(fmt("rx %.2f ohm", got[3]) + fmt(" %.2f mH", got[4]) + fmt(" %.2f fF", got[5]));
    return c.report();
}

// Projected gradient ascent of the load power on the budget surface, with
// radial retraction (sum power is a homogeneous quadratic in the currents).
std::vector<double> projected_gradient(const std::vector<double>& h, const SystemModel& model, std::mt19937_64& gen) {
    const std::size_t n = h.size();
    const double w = model.w();
    std::normal_distribution<double> normal;
    std::vector<double> x(n);
    for (double& v : x) v = normal(gen);
    auto spend = [&](const std::vector<double>& v) {
        return sum_power(CurrentAllocation::real(v), h, model.r_tx(), model.r_rx(), w);
    };
    auto retract = [&](std::vector<double>& v) {
        const double s = std::sqrt(model.p_max() / spend(v));
        for (double& e : v) e *= s;
    };
    retract(x);
    double step = 1.0;
    for (int it = 0; it < 20000; ++it) {
        // Gradients of load (a (h.x)^2) and budget (r_tx |x|^2 + b (h.x)^2).
        double hx = 0.0;
        for (std::size_t k = 0; k < n; ++k) hx += h[k] * x[k];
        std::vector<double> gl(n), gb(n);
        for (std::size_t k = 0; k < n; ++k) {
            gl[k] = 2.0 * hx * h[k];
            gb[k] = 2.0 * model.r_tx() * x[k] + 2.0 * w * w / model.r_rx() * hx * h[k];
        }
        double dot = 0.0, nb = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            dot += gl[k] * gb[k];
            nb += gb[k] * gb[k];
        }
        std::vector<double> t(n);
        double tn = 0.0, xn = 0.0, gn = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            t[k] = gl[k] - dot / nb * gb[k];
            tn += t[k] * t[k];
            xn += x[k] * x[k];
            gn += gl[k] * gl[k];
        }
        if (std::sqrt(tn) <= 1e-13 * std::sqrt(gn)) break;
        const double before = load_power(CurrentAllocation::real(x), h, model.r_rx(), model.r_load(), w);
        for (;;) {
            std::vector<double> y(n);
            for (std::size_t k = 0; k < n; ++k) y[k] = x[k] + step * std::sqrt(xn / tn) * t[k];
            retract(y);
            const double after = load_power(CurrentAllocation::real(y), h, model.r_rx(), model.r_load(), w);
            if (after >= before) {
                x = std::move(y);
                step = std::min(1.0, step * 2.0);
                break;
            }
            step *= 0.5;
            if (step < 1e-18) return x;
        }
    }
    return x;
}

bool beamforming_optimality() {
    Criterion c("2 beamforming optimality");
    const SystemModel model(presets::reference_system());
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> count(1, 8);
    std::uniform_real_distribution<double> pos(-1.0, 1.0);
    double worst_gap = 0.0;
    double worst_budget = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<CoilPose> tx(static_cast<std::size_t>(count(gen)));
        for (auto& p : tx) p = {pos(gen), pos(gen), 0.0};
        const CoilPose rx{0.5 * pos(gen), 0.5 * pos(gen), model.z0()};
        const MutualVector hv = mutual_vector(tx, rx, model, MutualMode::exact);
        const std::vector<double> h(hv.begin(), hv.end());
        const double closed = delivered_power_optimal(h, model);
        const CurrentAllocation opt = optimal_currents(h, model.p_max(), model.r_tx(), model.r_rx(), model.w());
        const double spent = sum_power(opt, h, model.r_tx(), model.r_rx(), model.w());
        const std::vector<double> x = projected_gradient(h, model, gen);
        const double numeric = load_power(CurrentAllocation::real(x), h, model.r_rx(), model.r_load(), model.w());
        worst_gap = std::max(worst_gap, std::abs(numeric - closed) / closed);
        worst_budget = std::max(worst_budget, std::abs(spent - model.p_max()) / model.p_max());
    }
    c.check(worst_gap <= 1e-6, "closed form vs projected gradient" + fmt(" %.3g", worst_gap));
    c.check(worst_budget <= 1e-12, "budget" + fmt(" %.3g", worst_budget));
    c.note("100 instances" + fmt(", max rel gap %.2e", worst_gap) + fmt(", max budget error %.2e", worst_budget));
    return c.report();
}

bool uniform_line() {
    Criterion c("3 uniform line profiles");
    const double ocul[4] = {21.54, 5.91, 25.54, 23.14};
    const double ecul[4] = {16.79, 1.35, 24.94, 5.41};
    const double tsul[4] = {21.41, 3.23, 25.54, 12.65};
    const double cent[4] = {18.47, 0.0, 25.67, 0.0};
    check_row(c, "OCUL", run_profile(load_scenario(config_path("line_uniform_optimal.json"))), ocul, 0.05);
    check_row(c, "ECUL", run_profile(load_scenario(config_path("line_uniform_equal.json"))), ecul, 0.05);
    check_row(c, "TSUL", run_profile(load_scenario(config_path("line_uniform_selection.json"))), tsul, 0.05);

    const ScenarioConfig cfg = load_scenario(config_path("line_centralized.json"));
    const SystemModel model(cfg.system);
    ScenarioConfig plain = cfg;
    plain.region.sampling.refine_minimum = false;
    const PowerProfile p = profile(resolve_placement(cfg), plain.region, model, cfg.strategy, cfg.mode);
    check_row(c, "centralized", summarize(p), cent, 0.05);
    double null_x = 0.0, null_p = 1e300, peak_x = 0.0, peak_p = -1.0;
    for (const auto& s : p.samples) {
        if (s.x > 0.2 && s.x < 0.45 && s.p0 < null_p) null_p = s.p0, null_x = s.x;
        if (s.x > 0.45 && s.x < 0.7 && s.p0 > peak_p) peak_p = s.p0, peak_x = s.x;
    }
    c.check(std::abs(null_x - 0.389) <= 0.005, "null" + fmt(" at %.3f", null_x));
    c.check(std::abs(peak_x - 0.514) <= 0.005, "local max" + fmt(" at %.3f", peak_x));
    c.note(fmt("null %.3f m", null_x) + fmt(", local max %.3f m", peak_x));
    return c.report();
}

bool line_placement() {
    Criterion c("4 line placement");
    const SystemModel model(presets::reference_system());
    const double d = 1.0;
    const PlacementResult r = optimize_placement_1d(5, model, d, SearchParams{}, 1);
    c.check(r.certified_min >= 18.6, "certified min" + fmt(" %.3f", r.certified_min));
    const std::vector<CoilPose> uniform = uniform_line_placement(5, d);
    // Uniform half positions for N = 5 are 0.5 d and d.
    const double uniform_half[2] = {uniform[3].x, uniform[4].x};
    std::string half = "d_n";
    for (std::size_t k = 0; k < r.placement.half_positions.size(); ++k) {
        const double dn = r.placement.half_positions[k];
        half += fmt(" %.3f", dn);
        c.check(dn < uniform_half[k], "d_n not inside the uniform position" + fmt(" %.3f", dn));
    }
    const Region line = Region::line(d, model.z0());
    const RegionMetrics ecol = summarize(profile(r.placement.expand(), line, model, Strategy::equal, MutualMode::exact));
    c.check(within_rel(ecol.p_min, 8.93, 0.07), "ECOL min" + fmt(" %.3f", ecol.p_min));
    c.note(fmt("tau* %.3f W", r.tau_star) + fmt(", certified min %.3f W", r.certified_min) + ", " + half +
           fmt(", ECOL min %.3f W", ecol.p_min));
    return c.report();
}

bool catalog() {
    Criterion c("5 structure catalog");
    const auto five = enumerate_structures(5);
    c.check(five.size() == 3, "N=5 count");
    // Ascending ring size: two rings of 2 + 1 at the origin, 3 + 2 at the origin, one ring of 5.
    if (five.size() == 3) {
        c.check(five[0].rings.size() == 2 && five[0].rings[0].count == 2 && five[0].origin_count == 1, "u=2 shape");
        c.check(five[1].rings.size() == 1 && five[1].rings[0].count == 3 && five[1].origin_count == 2, "u=3 shape");
        c.check(five[2].rings.size() == 1 && five[2].rings[0].count == 5 && five[2].origin_count == 0, "u=5 shape");
    }
    const int ns[5] = {2, 3, 4, 6, 10};
    const std::size_t want[5] = {1, 2, 2, 3, 4};
    std::string counts = "counts";
    for (int k = 0; k < 5; ++k) {
        const std::size_t got = enumerate_structures(ns[k]).size();
        counts += " N=" + std::to_string(ns[k]) + ":" + std::to_string(got);
        c.check(got == want[k], "N=" + std::to_string(ns[k]));
    }
    c.note(counts);
    return c.report();
}

const StructureResult* by_prime(const Placement2DReport& rep, int u) {
    for (const auto& s : rep.structures) {
        if (s.prime == u) return &s;
    }
    return nullptr;
}

bool disk_placement() {
    Criterion c("6 disk placement");
    const SystemModel model(presets::reference_system());
    const Placement2DReport rep = optimize_placement_2d(5, model, 0.35, SearchParams{}, 1);
    const StructureResult* s1 = by_prime(rep, 5);
    const StructureResult* s2 = by_prime(rep, 3);
    const StructureResult* s3 = by_prime(rep, 2);
    if (!s1 || !s2 || !s3) {
        c.check(false, "catalog for N=5 incomplete");
        return c.report();
    }
    c.check(rep.structures[rep.selected].prime == 5, "selected structure is not the single ring of 5");
    const double rho1 = s1->structure.rings[0].radius;
    c.check(std::abs(rho1 - 0.228) <= 0.02, "rho1" + fmt(" %.4f", rho1));
    c.check(within_rel(s1->tau_star, 17.17, 0.07), "tau1" + fmt(" %.3f", s1->tau_star));
    c.check(s1->tau_star > s3->tau_star && s3->tau_star > s2->tau_star, "tau ordering");
    c.note(fmt("rho1 %.4f m", rho1) + fmt(", tau %.2f", s1->tau_star) + fmt(" / %.2f", s2->tau_star) +
           fmt(" / %.2f W", s3->tau_star));

    const Region disk = Region::disk(0.35, model.z0());
    const RegionMetrics m = summarize(profile(s1->structure.expand(), disk, model, Strategy::optimal, MutualMode::exact));
    const double row[4] = {24.02, 18.24, 25.54, 71.42};
    check_row(c, "ring of 5", m, row, 0.07);

    for (double rho : {0.1, 0.3, 0.6}) {
        const Placement2DReport r = optimize_placement_2d(5, model, rho, SearchParams{}, 1);
        const double p1 = by_prime(r, 5)->certified_min;
        const double p2 = by_prime(r, 3)->certified_min;
        const double p3 = by_prime(r, 2)->certified_min;
        c.note(fmt("rho %.1f:", rho) + fmt(" %.2f", p1) + fmt(" / %.2f", p2) + fmt(" / %.2f W", p3));
        if (rho == 0.1) {
            const double hi = std::max({p1, p2, p3});
            const double lo = std::min({p1, p2, p3});
            c.check(hi - lo <= 0.01 * hi, "rho 0.1 structures differ by more than 1%");
        } else if (rho == 0.3) {
            c.check(p1 > p2 && p1 > p3, "rho 0.3 ring of 5 not best");
        } else {
            c.check(p2 < p1 && p2 < p3, "rho 0.6 ring of 3 not worst");
        }
    }
    return c.report();
}

bool properties() {
    Criterion c("7 property checks");
    const SystemModel model(presets::reference_system());
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double w = model.w();

    double worst_sum = 0.0, worst_kvl = 0.0, worst_flip = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
        std::vector<CoilPose> tx(n);
        for (auto& p : tx) p = {u(gen), u(gen), 0.0};
        const MutualVector hv = mutual_vector(tx, {0.3 * u(gen), 0.3 * u(gen), model.z0()}, model, MutualMode::exact);
        const std::vector<double> h(hv.begin(), hv.end());
        const CrossMutuals hc = cross_mutuals(tx, model.config().tx_coil);
        CurrentAllocation a;
        for (std::size_t k = 0; k < n; ++k) {
            a.re.push_back(0.1 * u(gen));
            a.im.push_back(0.1 * u(gen));
        }
        const CircuitSolution s = solve_circuit(a, h, hc, model);
        double total = 0.0;
        for (double p : s.per_tx_power) total += p;
        worst_sum = std::max(worst_sum, std::abs(total - s.sum_power) / s.sum_power);

        // Receiver loop and each transmitter loop, written out directly.
        std::complex<double> coupled = 0.0;
        for (std::size_t k = 0; k < n; ++k) coupled += h[k] * a.current(k);
        const std::complex<double> jw(0.0, w);
        double scale = std::abs(model.r_rx() * s.receiver_current);
        worst_kvl = std::max(worst_kvl, std::abs(model.r_rx() * s.receiver_current - jw * coupled) / scale);
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> v = model.r_tx() * a.current(k) - jw * h[k] * s.receiver_current;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != k) v += jw * hc(k, j) * a.current(j);
            }
            worst_kvl = std::max(worst_kvl, std::abs(v - s.source_voltages[k]) / std::abs(v));
            const double pk = std::real(s.source_voltages[k] * std::conj(a.current(k)));
            worst_kvl = std::max(worst_kvl, std::abs(pk - s.per_tx_power[k]) / s.sum_power);
        }

        std::vector<double> flipped = h;
        for (std::size_t k = 0; k < n; k += 2) flipped[k] = -flipped[k];
        const double p = delivered_power_optimal(h, model);
        worst_flip = std::max(worst_flip, std::abs(delivered_power_optimal(flipped, model) - p) / p);
    }
    c.check(worst_sum <= 1e-12, "power conservation" + fmt(" %.3g", worst_sum));
    c.check(worst_kvl <= 1e-9, "loop residuals" + fmt(" %.3g", worst_kvl));
    c.check(worst_flip <= 1e-12, "sign flip" + fmt(" %.3g", worst_flip));

    const double z0 = model.z0();
    double worst_grad = 0.0;
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double dn = pos(gen);
        const double x0 = 2.0 * pos(gen) - 1.0;
        const double step = 1e-6;
        const double fd = (f_kernel(dn + step, x0, z0) - f_kernel(dn - step, x0, z0)) / (2.0 * step);
        const double an = f_gradient(dn, x0, z0);
        worst_grad = std::max(worst_grad, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    c.check(worst_grad <= 1e-5, "gradient vs finite differences" + fmt(" %.3g", worst_grad));

    // Small-coil approximation tightens as the receiver rises.
    const CoilSpec txc = model.config().tx_coil;
    const CoilSpec rxc = model.config().rx_coil;
    double previous = 1e300;
    bool tightening = true;
    double err_ref = 0.0;
    for (double z : {0.1, 0.2, 0.4, 0.8}) {
        double worst = 0.0;
        for (double dd : {0.0, 0.1, 0.2, 0.5}) {
            const double exact = mutual_exact(txc, {0, 0, 0}, rxc, {dd, 0.0, z});
            const double peak = mutual_exact(txc, {0, 0, 0}, rxc, {0.0, 0.0, z});
            worst = std::max(worst, std::abs(exact - mutual_approx(model.beta(), dd, z)) / peak);
        }
        tightening = tightening && worst < previous;
        previous = worst;
        if (z == 0.2) err_ref = worst;
    }
    c.check(tightening, "approximation error does not shrink with height");
    // Bounded by the next small-coil expansion term, 1.5 (a^2 + b^2) / z0^2, with margin.
    const double spread = (txc.coil_radius * txc.coil_radius + rxc.coil_radius * rxc.coil_radius) / (z0 * z0);
    c.check(err_ref <= 2.0 * spread, "approximation error at the reference height" + fmt(" %.3g", err_ref));

    SearchParams quick;
    quick.rpt_max = 10;
    const PlacementResult a = optimize_placement_1d(4, model, 1.0, quick, 3);
    double lo = 0.0, hi = model.p_max();
    bool bounds = true;
    for (const auto& s : a.trace) {
        bounds = bounds && s.tau > lo && s.tau < hi && std::abs(s.tau - 0.5 * (lo + hi)) < 1e-12;
        (s.feasible ? lo : hi) = s.tau;
    }
    bounds = bounds && hi - lo <= quick.epsilon && a.tau_star == lo;
    const double approx_min =
        coverage_minimum_1d(a.placement.half_positions, a.placement.parity, 1.0, z0).value;
    bounds = bounds && approx_min >= coupling_threshold(a.tau_star, model) * (1.0 - 1e-12);
    c.check(bounds, "bisection bounds");

    SearchParams threaded = quick;
    threaded.threads = 4;
    const PlacementResult b = optimize_placement_1d(4, model, 1.0, threaded, 3);
    c.check(a.placement.half_positions == b.placement.half_positions && a.tau_star == b.tau_star &&
                a.certified_min == b.certified_min,
            "seed determinism");
    c.note(fmt("conservation %.1e", worst_sum) + fmt(", residual %.1e", worst_kvl) +
           fmt(", gradient %.1e", worst_grad) + fmt(", approx error at z0 %.3f", err_ref));
    return c.report();
}

}  // namespace

int main() {
    bool ok = true;
    for (bool (*criterion)() : {electrical, beamforming_optimality, uniform_line, line_placement, catalog,
                                disk_placement, properties}) {
        try {
            ok = criterion() && ok;
        } catch (const std::exception& e) {
            std::printf("FAIL (exception) %s\n", e.what());
            ok = false;
        }
    }
    std::printf("%s\n", ok ? "all acceptance criteria passed" : "some acceptance criteria failed");
    return ok ? 0 : 1;
}
