// Acceptance checks. Each criterion prints one PASS/FAIL line and the process
// exit code reflects the result.
//
//   acceptance --criterion N [--work DIR]
//   acceptance --all [--work DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "avalanche/circuit.hpp"
#include "avalanche/coherence.hpp"
#include "avalanche/config.hpp"
#include "avalanche/experiments.hpp"
#include "avalanche/meanfield.hpp"
#include "avalanche/stochastic.hpp"

#ifndef AVALANCHE_SOURCE_DIR
#define AVALANCHE_SOURCE_DIR "."
#endif
#ifndef AVALANCHE_CLI_PATH
#define AVALANCHE_CLI_PATH "avalanche"
#endif

using namespace avalanche;
namespace fs = std::filesystem;
namespace mf = avalanche::meanfield;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    double budget_s;
    std::function<Outcome(const fs::path&)> check;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

unsigned threads() { return resolve_threads(0); }

SystemParams ladder(int n, double gain, double kc, double kl, PumpSpec (*preset)(double) = PumpSpec::infinite_temperature) {
    SystemParams p;
    p.ladder_size = n;
    p.hop_rate = 1.0;
    p.pump = preset(gain);
    p.cavity_loss = kc;
    p.last_loss = kl;
    return p;
}

// ---------------------------------------------------------------------------

Outcome phase_points(const fs::path&) {
    const std::vector<std::pair<double, mf::Phase>> cases{
        {2.0, mf::Phase::NonLasing}, {12.0, mf::Phase::SelfPulsing}, {40.0, mf::Phase::Lasing}};
    Outcome o{true, ""};
    for (const auto& [gain, want] : cases) {
        std::string got;
        try {
            got = mf::to_string(mf::classify_point(ladder(10, gain, 20.0, 10.0)).label.phase);
        } catch (const Error& e) {
            got = e.what();
        }
        o.pass = o.pass && got == mf::to_string(want);
        o.detail += "g=" + num(gain) + ":" + got + " ";
    }
    return o;
}

Outcome staggered(const fs::path&) {
    const auto p = ladder(10, 5.0, 40.0, 10.0);
    const double t_end = 4.0 * mf::default_t_end(p);
    const auto trace = mf::integrate(p, MeanFieldState::seeded(10, mf::default_seed_amplitude), t_end, {1e-9, 20001});
    std::vector<double> avg(10, 0.0);
    std::size_t count = 0;
    for (std::size_t k = trace.size() * 3 / 4; k < trace.size(); ++k, ++count)
        for (std::size_t q = 0; q < 10; ++q) avg[q] += trace.states[k].ladder[q];
    for (auto& v : avg) v /= static_cast<double>(count);
    bool zigzag = true;
    for (std::size_t q = 1; q + 1 < avg.size(); ++q) {
        const double d0 = avg[q] - avg[q - 1], d1 = avg[q + 1] - avg[q];
        zigzag = zigzag && d0 * d1 < 0.0;
    }
    const double stag = staggered_population(avg);
    const double edge = avg.back() - avg.front();
    const bool sign_ok = stag != 0.0 && (stag > 0.0) == (edge > 0.0);
    return {zigzag && std::abs(stag) > 0.0 && sign_ok,
            "n_stag=" + num(stag) + " n_N-n_1=" + num(edge) + (zigzag ? " alternating" : " not alternating")};
}

Outcome asip(const fs::path&) {
    const double gain = 5.0, kl = 10.0;
    const int N = 10;
    double homog = 0.0;
    for (double J : {0.1, 1.0, gain, 50.0}) {
        const auto n = mf::asip_steady_profile(J, 1.0, kl, N);
        for (std::size_t q = 0; q + 1 < n.size(); ++q) homog = std::max(homog, std::abs(n[q] * (1.0 + n[q + 1]) - J) / J);
        homog = std::max(homog, std::abs(kl * n.back() - J) / J);
    }
    // infinite-temperature pump injects a net current gamma_g into an empty-cavity ladder
    const auto p = ladder(N, gain, 100.0, kl);
    const auto trace = mf::integrate(p, MeanFieldState::seeded(N, mf::default_seed_amplitude), 200.0, {1e-10, 201});
    const auto expected = mf::asip_steady_profile(gain, 1.0, kl, N);
    double worst = 0.0;
    for (std::size_t q = 0; q < expected.size(); ++q)
        worst = std::max(worst, std::abs(trace.states.back().ladder[q] - expected[q]) / expected[q]);
    return {homog <= 1e-12 && worst <= 0.02, "homogeneity=" + num(homog) + " max_site_dev=" + num(worst)};
}

Outcome collapse(const fs::path&) {
    const auto cfg = config::load(AVALANCHE_SOURCE_DIR "/configs/period_scan.json");
    const auto grid = experiments::period_scan_grid(cfg);
    const auto rows = mf::period_scan(grid, cfg.meanfield.options(), threads());
    std::size_t with_period = 0;
    for (const auto& r : rows) with_period += r.rescaled_period.has_value();
    const auto rep = mf::collapse_spread(rows);
    return {rep.curves >= 2 && rep.max_spread <= 0.15,
            "spread=" + num(rep.max_spread) + " over kc/g in [" + num(rep.overlap_lo) + "," + num(rep.overlap_hi) + "], " +
                std::to_string(rep.curves) + " curves, " + std::to_string(with_period) + "/" +
                std::to_string(rows.size()) + " points with a period"};
}

// N = 2, all rates 1, empty start. Ensemble means are compared with the truncated
// master equation; the standard error is sqrt(Var / K) with Var from the master
// equation, which stays meaningful at early times where few trajectories hold photons.
Outcome master_oracle(const fs::path&) {
    const auto cfg = config::load(AVALANCHE_SOURCE_DIR "/configs/small_ensemble.json");
    stochastic::EnsembleSpec spec;
    spec.params = cfg.system.params();
    spec.initial = cfg.ensemble.initial(spec.params.ladder_size);
    spec.duration = cfg.ensemble.duration;
    spec.trajectories = cfg.ensemble.trajectories;
    spec.master_seed = cfg.seed;
    stochastic::TrajectoryOptions topt;
    topt.sample_dt = cfg.ensemble.sample_dt;
    topt.record_events = false;
    const auto trajs = stochastic::run_ensemble(spec, topt, threads());
    const auto m = stochastic::ensemble_moments(trajs);

    std::vector<double> checkpoints(m.times.begin() + 1, m.times.end());
    const auto ref = stochastic::truncated_master_integrate(spec.params, spec.initial, checkpoints, 6);
    const double K = static_cast<double>(trajs.size());
    double worst = 0.0;
    std::size_t compared = 0;
    auto compare = [&](double sim, double mean, double var) {
        const double se = std::sqrt(var / K);
        worst = std::max(worst, std::abs(sim - mean) / se);
        ++compared;
    };
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        compare(m.cavity_mean[k + 1], ref.cavity_mean[k], ref.cavity_var[k]);
        for (std::size_t q = 0; q < 2; ++q) compare(m.ladder_mean[q][k + 1], ref.ladder_mean[q][k], ref.ladder_var[q][k]);
    }
    const double leak = *std::max_element(ref.leakage.begin(), ref.leakage.end());
    return {checkpoints.size() == 20 && worst <= 5.0,
            std::to_string(compared) + " values at " + std::to_string(checkpoints.size()) +
                " checkpoints, max |dev|/SE=" + num(worst) + ", K=" + std::to_string(trajs.size()) +
                ", master leakage=" + num(leak)};
}

Outcome beta_resonance(const char* config_name, bool full) {
    const auto cfg = config::load(std::string(AVALANCHE_SOURCE_DIR "/configs/") + config_name);
    const auto& ratios = cfg.beta_scan.gain_over_cavity;
    auto opt = cfg.spectrum.options(cfg.seed);
    const auto pts = coherence::beta_sweep(
        cfg.system.params(), ratios, [&](double g) { return cfg.system.pump.spec_for(g); }, opt, threads());
    std::vector<double> beta;
    bool peaks_ok = true;
    std::string detail;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!pts[i].estimate || pts[i].estimate->peak.omega_max <= 0.0) {
            peaks_ok = false;
            detail += num(ratios[i]) + ":none ";
            beta.push_back(-1.0);
            continue;
        }
        beta.push_back(pts[i].estimate->beta);
        detail += num(ratios[i]) + ":" + num(beta.back()) + " ";
    }
    const std::size_t n = beta.size();
    const auto arg = static_cast<std::size_t>(std::distance(beta.begin(), std::max_element(beta.begin(), beta.end())));
    const bool interior = n >= 6 && arg > 0 && arg + 1 < n;
    std::size_t near1 = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(std::log(ratios[i])) < std::abs(std::log(ratios[near1]))) near1 = i;
    const bool near1_ok = beta[near1] > beta.front() && beta[near1] > beta.back();
    detail += "argmax=" + num(ratios[arg]) + " K=" + std::to_string(opt.trajectories);
    if (!full) return {peaks_ok && interior && opt.trajectories >= 50, detail};
    return {peaks_ok && interior && near1_ok && opt.trajectories >= 50, detail};
}

Outcome detector(const fs::path&) {
    const auto cfg = config::load(AVALANCHE_SOURCE_DIR "/configs/detector.json");
    auto params = cfg.system.params();
    params.pump = PumpSpec::off();
    const double T = stochastic::default_detector_duration(params);
    const auto& loads = cfg.detector.n1_values;
    const auto runs = stochastic::detector_ensemble(params, loads, cfg.detector.runs, T, cfg.seed, threads());
    std::uint64_t mx = 0;
    for (const auto& r : runs)
        for (auto v : r) mx = std::max(mx, v);
    std::vector<stochastic::Histogram> hists;
    std::vector<double> means;
    for (const auto& r : runs) {
        auto h = stochastic::detector_histogram(r, 1);
        h.counts.resize(static_cast<std::size_t>(mx) + 1, 0);
        hists.push_back(std::move(h));
        double s = 0.0;
        for (auto v : r) s += static_cast<double>(v);
        means.push_back(s / static_cast<double>(r.size()));
    }
    bool increasing = true, zero_ok = true;
    double max_overlap = 0.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (loads[k] == 0) zero_ok = zero_ok && std::all_of(runs[k].begin(), runs[k].end(), [](auto v) { return v == 0; });
        if (k + 1 < runs.size()) {
            increasing = increasing && means[k + 1] > means[k];
            max_overlap = std::max(max_overlap, stochastic::overlap_fraction(hists[k], hists[k + 1]));
        }
    }
    std::string detail = "means:";
    for (double m : means) detail += " " + num(m);
    detail += " max_overlap=" + num(max_overlap) + " runs=" + std::to_string(cfg.detector.runs);
    return {increasing && zero_ok && max_overlap < 0.5 && runs.size() == 6 && cfg.detector.runs == 500, detail};
}

Outcome circuit_formulas(const fs::path&) {
    const circuit::CircuitParams c;
    const double g = circuit::coupling_g(c);
    const double gamma = circuit::hopping_gamma(g, c.waste_loss);
    const auto signs = circuit::sign_search(c);
    const double kerr = circuit::kerr_scale(c, 0.75);
    const bool g_ok = std::abs(g - 850e3) <= 0.05 * 850e3;
    const bool gamma_ok = gamma >= 90e3 && gamma <= 105e3;
    const bool signs_ok = signs.max_residual <= 5e-3;
    const bool kerr_ok = std::abs(kerr - 30e6) <= 0.1 * 30e6;
    return {g_ok && gamma_ok && signs_ok && kerr_ok,
            "g/2pi=" + num(g) + " Hz, Gamma/2pi=" + num(gamma) + " Hz, best max|r|=" + num(signs.max_residual) +
                " (assignment " + std::to_string(signs.assignment) + "), kerr/2pi=" + num(kerr) + " Hz"};
}

// Three labels on a 7 x 7 half-decade grid gamma_g, kappa_c in [1, 1000] for each kappa_0.
Outcome robustness(const fs::path&) {
    std::vector<double> axis;
    for (int i = 0; i < 7; ++i) axis.push_back(std::pow(10.0, 0.5 * i));
    Outcome o{true, ""};
    for (double k0 : {0.1, 1.0, 10.0}) {
        auto base = ladder(10, 1.0, 1.0, 10.0);
        base.intrinsic_loss = k0;
        const auto pts = mf::phase_diagram_sweep(
            base, axis, axis, [](double g) { return PumpSpec::infinite_temperature(g); }, {}, threads());
        std::set<std::string> labels;
        std::size_t failed = 0;
        for (const auto& p : pts) {
            if (p.label)
                labels.insert(mf::to_string(p.label->phase));
            else
                ++failed;
        }
        o.pass = o.pass && labels.size() == 3;
        o.detail += "k0=" + num(k0) + ":" + std::to_string(labels.size()) + " labels";
        if (failed) o.detail += " (" + std::to_string(failed) + " unclassified)";
        o.detail += " ";
    }
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& work) {
    const std::string config = AVALANCHE_SOURCE_DIR "/configs/small_ensemble.json";
    std::map<std::string, std::string> first;
    std::string detail;
    bool ok = true;
    for (int t : {1, 4}) {
        const fs::path out = work / ("threads_" + std::to_string(t));
        fs::remove_all(out);
        const std::string cmd = std::string("\"") + AVALANCHE_CLI_PATH + "\" trajectories --config \"" + config +
                                "\" --threads " + std::to_string(t) + " --out \"" + out.string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
        std::map<std::string, std::string> files;
        for (const auto& e : fs::directory_iterator(out))
            if (e.path().extension() == ".csv") files[e.path().filename().string()] = slurp(e.path());
        if (first.empty()) {
            first = files;
            continue;
        }
        ok = ok && !files.empty() && files.size() == first.size();
        for (const auto& [name, bytes] : files) {
            const bool same = first.count(name) && first[name] == bytes;
            ok = ok && same;
            detail += name + (same ? " identical (" + std::to_string(bytes.size()) + " bytes) " : " differs ");
        }
    }
    return {ok, detail + "threads 1 vs 4"};
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, 10.0, phase_points},
        {2, 5.0, staggered},
        {3, 10.0, asip},
        {4, 600.0, collapse},
        {5, 120.0, master_oracle},
        {6, 1800.0, [](const fs::path&) { return beta_resonance("beta_scan_infinite_temperature.json", true); }},
        {7, 1800.0, [](const fs::path&) { return beta_resonance("beta_scan_pure_gain.json", false); }},
        {8, 600.0, detector},
        {9, 1.0, circuit_formulas},
        {10, 300.0, robustness},
        {11, 240.0, determinism},
    };
    return all;
}

bool run_one(const Criterion& c, const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.check(work);
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = dt < c.budget_s;
    const bool pass = o.pass && in_budget;
    std::printf("criterion %d: %s %s [%.2f s, budget %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), dt,
                c.budget_s, in_budget ? "" : ", over budget");
    std::fflush(stdout);
    return pass;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    fs::path work = fs::temp_directory_path() / "avalanche_acceptance";
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (a == "--work" && i + 1 < argc)
            work = argv[++i];
        else if (a != "--all") {
            std::fprintf(stderr, "usage: acceptance [--criterion N | --all] [--work DIR]\n");
            return 2;
        }
    }
    fs::create_directories(work);
    bool ok = true, found = false;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        found = true;
        ok = run_one(c, work) && ok;
    }
    if (!found) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    return ok ? 0 : 1;
}
