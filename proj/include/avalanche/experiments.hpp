// experiments.hpp - one runner per CLI subcommand
//
// A runner writes its data files (CSV), an optional SVG plot and a JSON sidecar
// `<experiment>.meta.json` into the output directory. Data files depend only on
// the configuration, never on the worker count.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "avalanche/circuit.hpp"
#include "avalanche/coherence.hpp"
#include "avalanche/config.hpp"
#include "avalanche/meanfield.hpp"
#include "avalanche/output.hpp"
#include "avalanche/rng.hpp"
#include "avalanche/stochastic.hpp"

#ifndef AVALANCHE_VERSION
#define AVALANCHE_VERSION "0.1.0"
#endif

namespace avalanche::experiments {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct RunOptions {
    fs::path out_dir = "out";
    unsigned threads = 1;
    bool plot = false;
};

struct RunResult {
    std::vector<std::string> files;
    json summary = json::object();
    std::vector<std::string> errors; // per-point failures; the run is then flagged partial
    std::vector<std::string> assumptions;
};

namespace detail {

class Session {
public:
    Session(const config::RunConfig& cfg, const RunOptions& opt)
        : cfg(cfg), opt(opt), hash(config::config_hash(cfg)) {
        fs::create_directories(opt.out_dir);
    }

    output::CsvWriter csv(const std::string& name, const std::string& schema, const std::vector<std::string>& cols) {
        result.files.push_back(name);
        return output::CsvWriter(opt.out_dir / name, schema, hash, cols);
    }

    void svg(const std::string& name, const std::string& text) {
        if (!opt.plot) return;
        output::write_text(opt.out_dir / name, text);
        result.files.push_back(name);
    }

    void json_file(const std::string& name, const json& j) {
        output::write_json(opt.out_dir / name, j);
        result.files.push_back(name);
    }

    const config::RunConfig& cfg;
    const RunOptions& opt;
    std::string hash;
    RunResult result;
};

inline std::string ladder_col(std::size_t p, const char* suffix = "") { return "n" + std::to_string(p + 1) + suffix; }

inline json label_json(const meanfield::PhaseLabel& l) {
    json j{{"phase", meanfield::to_string(l.phase)},
           {"n_c", l.steady_cavity},
           {"n_stag", l.steady_staggered},
           {"oscillation_amplitude", l.oscillation_amplitude},
           {"drift_norm", l.drift_norm}};
    j["period"] = l.period ? json(*l.period) : json(nullptr);
    return j;
}

inline int phase_index(meanfield::Phase p) { return static_cast<int>(p); }

} // namespace detail

// ---------------------------------------------------------------------------

inline void run_meanfield(detail::Session& s) {
    const auto params = s.cfg.system.params();
    const auto run = meanfield::classify_point(params, s.cfg.meanfield.options());
    const auto& tr = run.trace;
    const std::size_t N = static_cast<std::size_t>(params.ladder_size);
    std::vector<std::string> cols{"t", "n_c", "n_stag"};
    for (std::size_t p = 0; p < N; ++p) cols.push_back(detail::ladder_col(p));
    auto csv = s.csv("meanfield_trace.csv", "avalanche.meanfield_trace/1", cols);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        std::vector<std::string> row{output::fmt(tr.times[k]), output::fmt(tr.cavity[k]), output::fmt(tr.staggered[k])};
        for (std::size_t p = 0; p < N; ++p) row.push_back(output::fmt(tr.states[k].ladder[p]));
        csv.row_strings(row);
    }
    s.result.summary = detail::label_json(run.label);
    s.result.summary["t_end"] = tr.times.back();
    s.svg("meanfield_trace.svg",
          output::line_plot_svg({"Mean-field cavity occupation", "t", "n_c"}, {{"n_c", tr.times, tr.cavity}}));
}

inline void run_phase_diagram(detail::Session& s) {
    const auto& c = s.cfg;
    const auto base = c.system.params();
    auto pts = meanfield::phase_diagram_sweep(
        base, c.grid.gains, c.grid.cavity_losses, [&](double g) { return c.system.pump.spec_for(g); },
        c.meanfield.options(), s.opt.threads);
    auto csv = s.csv("phase_diagram.csv", "avalanche.phase_diagram/1",
                     {"gain_over_hop", "cavity_over_hop", "label", "n_c", "n_stag", "period", "error"});
    std::vector<output::HeatCell> cells;
    json counts{{"NonLasing", 0}, {"Lasing", 0}, {"SelfPulsing", 0}, {"failed", 0}};
    for (const auto& p : pts) {
        const double gx = p.gain / base.hop_rate, ky = p.cavity_loss / base.hop_rate;
        if (p.label) {
            const auto& l = *p.label;
            csv.row(gx, ky, std::string(meanfield::to_string(l.phase)), l.steady_cavity, l.steady_staggered,
                    l.period ? output::fmt(*l.period) : std::string(), std::string());
            cells.push_back({gx, ky, detail::phase_index(l.phase)});
            counts[meanfield::to_string(l.phase)] = counts[meanfield::to_string(l.phase)].get<int>() + 1;
        } else {
            csv.row(gx, ky, std::string("Failed"), std::string(), std::string(), std::string(), p.error);
            s.result.errors.push_back("gain=" + output::fmt(p.gain) + " cavity_loss=" + output::fmt(p.cavity_loss) +
                                      ": " + p.error);
            counts["failed"] = counts["failed"].get<int>() + 1;
        }
    }
    s.result.summary["counts"] = counts;
    s.svg("phase_diagram.svg", output::category_map_svg({"Mean-field phase diagram", "gamma_g / Gamma", "kappa_c / Gamma"},
                                                        cells, {"NonLasing", "Lasing", "SelfPulsing"}));
}

/// Grid of the period scan: kappa_l fixed at system.last_loss.
inline std::vector<SystemParams> period_scan_grid(const config::RunConfig& c) {
    const auto& ps = c.period_scan;
    const double kl = c.system.last_loss;
    require(kl > 0.0, "period-scan needs system.last_loss > 0");
    std::vector<SystemParams> grid;
    for (int N : ps.ladder_sizes)
        for (double h : ps.hop_over_last)
            for (double k : ps.cavity_over_last)
                for (double x : ps.ratios()) {
                    SystemParams p = c.system.params();
                    p.ladder_size = N;
                    p.hop_rate = h * kl;
                    p.cavity_loss = k * kl;
                    p.pump = c.system.pump.spec_for(p.cavity_loss / x);
                    grid.push_back(p);
                }
    return grid;
}

inline void run_period_scan(detail::Session& s) {
    const auto grid = period_scan_grid(s.cfg);
    const auto rows = meanfield::period_scan(grid, s.cfg.meanfield.options(), s.opt.threads);
    auto csv = s.csv("period_scan.csv", "avalanche.period_scan/1",
                     {"N", "hop_rate", "cavity_loss", "last_loss", "gain", "cavity_over_gain", "status", "period",
                      "rescaled_period"});
    std::map<std::string, output::Series> curves;
    for (const auto& r : rows) {
        csv.row(r.params.ladder_size, r.params.hop_rate, r.params.cavity_loss, r.params.last_loss, r.gain,
                r.cavity_over_gain, r.status, r.period ? output::fmt(*r.period) : std::string(),
                r.rescaled_period ? output::fmt(*r.rescaled_period) : std::string());
        if (!r.rescaled_period) continue;
        const std::string key = "N=" + std::to_string(r.params.ladder_size) + " G=" + output::fmt(r.params.hop_rate) +
                                " kc=" + output::fmt(r.params.cavity_loss);
        auto& c = curves[key];
        c.label = key;
        c.markers = true;
        c.x.push_back(r.cavity_over_gain);
        c.y.push_back(*r.rescaled_period);
    }
    const auto rep = meanfield::collapse_spread(rows, s.cfg.period_scan.probes);
    s.result.summary = {{"points", rows.size()},
                        {"pulsing_points", std::count_if(rows.begin(), rows.end(), [](auto& r) { return r.period.has_value(); })},
                        {"curves", rep.curves},
                        {"overlap_lo", rep.overlap_lo},
                        {"overlap_hi", rep.overlap_hi},
                        {"max_relative_spread", std::isnan(rep.max_spread) ? json(nullptr) : json(rep.max_spread)}};
    std::vector<output::Series> series;
    for (auto& [k, c] : curves) series.push_back(c);
    s.svg("period_collapse.svg", output::line_plot_svg({"Rescaled self-pulsing period", "kappa_c / gamma_g",
                                                        "sqrt(gamma_g Gamma) tau", true, true, 900, 560},
                                                       series));
}

inline void run_trajectories(detail::Session& s) {
    const auto& c = s.cfg;
    stochastic::EnsembleSpec spec;
    spec.params = c.system.params();
    spec.initial = c.ensemble.initial(spec.params.ladder_size);
    spec.duration = c.ensemble.duration;
    spec.trajectories = c.ensemble.trajectories;
    spec.master_seed = c.seed;
    stochastic::TrajectoryOptions topt;
    topt.sample_dt = c.ensemble.sample_dt;
    topt.record_events = c.ensemble.event_log;
    topt.sample_ladder = true;
    topt.event_cap = c.ensemble.event_cap;
    const auto trajs = stochastic::run_ensemble(spec, topt, s.opt.threads);
    const auto m = stochastic::ensemble_moments(trajs);
    const std::size_t N = static_cast<std::size_t>(spec.params.ladder_size);

    std::vector<std::string> cols{"t", "n_c_mean", "n_c_se"};
    for (std::size_t p = 0; p < N; ++p) {
        cols.push_back(detail::ladder_col(p, "_mean"));
        cols.push_back(detail::ladder_col(p, "_se"));
    }
    auto csv = s.csv("ensemble_moments.csv", "avalanche.ensemble_moments/1", cols);
    for (std::size_t k = 0; k < m.times.size(); ++k) {
        std::vector<std::string> row{output::fmt(m.times[k]), output::fmt(m.cavity_mean[k]), output::fmt(m.cavity_se[k])};
        for (std::size_t p = 0; p < N; ++p) {
            row.push_back(output::fmt(m.ladder_mean[p][k]));
            row.push_back(output::fmt(m.ladder_se[p][k]));
        }
        csv.row_strings(row);
    }
    if (c.ensemble.write_samples) {
        std::vector<std::string> scols{"trajectory", "t", "n_c"};
        for (std::size_t p = 0; p < N; ++p) scols.push_back(detail::ladder_col(p));
        auto sc = s.csv("trajectory_samples.csv", "avalanche.trajectory_samples/1", scols);
        for (std::size_t i = 0; i < trajs.size(); ++i) {
            const auto& smp = trajs[i].samples;
            for (std::size_t k = 0; k < smp.count(); ++k) {
                std::vector<std::string> row{output::fmt(i), output::fmt(static_cast<double>(k) * smp.dt),
                                             output::fmt(smp.cavity[k])};
                for (std::size_t p = 0; p < N; ++p) row.push_back(output::fmt(smp.site(k, p)));
                sc.row_strings(row);
            }
        }
    }
    auto tc = s.csv("trajectory_summary.csv", "avalanche.trajectory_summary/1",
                    {"trajectory", "seed", "events", "emitted", "absorbed", "final_n_c"});
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const auto& t = trajs[i];
        tc.row(i, t.seed, t.event_count, t.emitted_count, static_cast<int>(t.absorbed), t.final.cavity);
        total += t.event_count;
        if (c.ensemble.event_log) {
            fs::create_directories(s.opt.out_dir / "events");
            char name[64];
            std::snprintf(name, sizeof name, "events/trajectory_%06zu.bin", i);
            output::write_event_log(s.opt.out_dir / name, t.events);
            s.result.files.push_back(name);
        }
    }
    s.result.summary = {{"trajectories", trajs.size()}, {"total_events", total}, {"samples", m.times.size()}};
    s.svg("ensemble_moments.svg",
          output::line_plot_svg({"Ensemble mean cavity occupation", "t", "<n_c>"}, {{"<n_c>", m.times, m.cavity_mean}}));
}

namespace detail {

inline json peak_json(const coherence::CoherencePoint& pt) {
    json j{{"mean_n_c", pt.mean_cavity}, {"events", pt.events}, {"degenerate_records", pt.degenerate}};
    if (pt.estimate) {
        const auto& e = *pt.estimate;
        j["omega_max"] = e.peak.omega_max;
        j["S_max"] = e.peak.S_max;
        j["half_width"] = e.peak.half_width;
        j["one_sided_width"] = e.peak.one_sided;
        j["beta"] = e.beta;
        j["beta_error"] = e.beta_error;
        j["bootstrap_failures"] = e.bootstrap_failures;
        j["imag_residue"] = e.spectrum.imag_residue;
    }
    if (!pt.error.empty()) j["error"] = pt.error;
    return j;
}

inline json estimator_json(const config::SpectrumConfig& sc) {
    const double floor = sc.omega_floor > 0 ? sc.omega_floor : analysis::default_omega_floor(sc.duration);
    return {{"window", "tukey"},
            {"tukey_flat", sc.tukey_flat},
            {"max_lag", sc.max_lag > 0 ? json(sc.max_lag) : json(sc.duration / 2)},
            {"omega_floor", floor},
            {"record_duration", sc.duration},
            {"burn_in", sc.burn_in},
            {"sample_dt", sc.sample_dt},
            {"averaging", "per-trajectory C(s)/C(0), then mean"}};
}

} // namespace detail

inline void run_spectrum(detail::Session& s) {
    const auto& c = s.cfg;
    const auto pt = coherence::coherence_point(c.system.params(), c.spectrum.options(c.seed), s.opt.threads);
    s.result.summary = detail::peak_json(pt);
    s.result.summary["estimator"] = detail::estimator_json(c.spectrum);
    if (!pt.error.empty()) s.result.errors.push_back(pt.error);
    if (!pt.estimate) return;
    const auto& sp = pt.estimate->spectrum;
    auto csv = s.csv("spectrum.csv", "avalanche.spectrum/1", {"omega", "S"});
    for (std::size_t i = 0; i < sp.omega.size(); ++i) csv.row(sp.omega[i], sp.S[i]);
    s.json_file("spectrum_peak.json", s.result.summary);
    s.svg("spectrum.svg", output::line_plot_svg({"Normalized noise spectrum", "omega", "S(omega)"}, {{"S", sp.omega, sp.S}}));
}

inline void run_beta_scan(detail::Session& s) {
    const auto& c = s.cfg;
    const auto base = c.system.params();
    require(base.cavity_loss > 0.0, "beta-scan needs system.cavity_loss > 0");
    const auto pts = coherence::beta_sweep(
        base, c.beta_scan.gain_over_cavity, [&](double g) { return c.system.pump.spec_for(g); },
        c.spectrum.options(c.seed), s.opt.threads);
    auto csv = s.csv("beta_scan.csv", "avalanche.beta_scan/1",
                     {"gain_over_cavity", "gain", "beta", "beta_error", "omega_max", "S_max", "half_width",
                      "one_sided_width", "mean_n_c", "error"});
    auto spc = s.csv("beta_spectra.csv", "avalanche.beta_spectra/1", {"gain_over_cavity", "omega", "S"});
    output::Series beta{"beta", {}, {}, {}, true, true};
    std::vector<output::Series> spectra;
    json points = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& pt = pts[i];
        const double x = c.beta_scan.gain_over_cavity[i];
        points.push_back(detail::peak_json(pt));
        points.back()["gain_over_cavity"] = x;
        if (pt.estimate) {
            const auto& e = *pt.estimate;
            csv.row(x, x * base.cavity_loss, e.beta, e.beta_error, e.peak.omega_max, e.peak.S_max, e.peak.half_width,
                    static_cast<int>(e.peak.one_sided), pt.mean_cavity, pt.error);
            for (std::size_t k = 0; k < e.spectrum.omega.size(); ++k) spc.row(x, e.spectrum.omega[k], e.spectrum.S[k]);
            beta.x.push_back(x);
            beta.y.push_back(e.beta);
            beta.err.push_back(e.beta_error);
            spectra.push_back({"g/kc=" + output::fmt(x), e.spectrum.omega, e.spectrum.S});
        } else {
            csv.row(x, x * base.cavity_loss, std::string(), std::string(), std::string(), std::string(), std::string(),
                    std::string(), pt.mean_cavity, pt.error);
            s.result.errors.push_back("gain_over_cavity=" + output::fmt(x) + ": " + pt.error);
        }
    }
    s.result.summary = {{"points", points}, {"estimator", detail::estimator_json(c.spectrum)}};
    s.svg("beta_scan.svg", output::line_plot_svg({"Coherence parameter", "gamma_g / kappa_c", "beta", true}, {beta}));
    s.svg("beta_spectra.svg", output::line_plot_svg({"Noise spectra", "omega", "S(omega)"}, spectra));
}

inline void run_detector(detail::Session& s) {
    const auto& c = s.cfg;
    auto params = c.system.params();
    params.pump = PumpSpec::off();
    const double T = c.detector.duration > 0 ? c.detector.duration : stochastic::default_detector_duration(params);
    const auto runs = stochastic::detector_ensemble(params, c.detector.n1_values, c.detector.runs, T, c.seed, s.opt.threads);
    std::uint64_t mx = 0;
    for (const auto& r : runs)
        for (auto v : r) mx = std::max(mx, v);
    std::vector<stochastic::Histogram> hists;
    for (const auto& r : runs) {
        auto h = stochastic::detector_histogram(r, c.detector.bin_width);
        h.counts.resize(static_cast<std::size_t>(static_cast<std::int64_t>(mx) / c.detector.bin_width) + 1, 0);
        hists.push_back(std::move(h));
    }
    auto csv = s.csv("detector_histograms.csv", "avalanche.detector_histograms/1", {"n1_init", "n_out_bin", "count"});
    json loads = json::array();
    std::vector<output::Series> series;
    for (std::size_t k = 0; k < hists.size(); ++k) {
        output::Series sr{"n1=" + std::to_string(c.detector.n1_values[k])};
        for (std::size_t b = 0; b < hists[k].counts.size(); ++b) {
            csv.row(c.detector.n1_values[k], hists[k].bin_left(b), hists[k].counts[b]);
            sr.x.push_back(static_cast<double>(hists[k].bin_left(b)));
            sr.y.push_back(static_cast<double>(hists[k].counts[b]));
        }
        series.push_back(std::move(sr));
        double mean = 0.0;
        for (auto v : runs[k]) mean += static_cast<double>(v);
        mean /= static_cast<double>(runs[k].size());
        json l{{"n1_init", c.detector.n1_values[k]}, {"mean_n_out", mean}};
        if (k + 1 < hists.size()) l["overlap_with_next"] = stochastic::overlap_fraction(hists[k], hists[k + 1]);
        loads.push_back(l);
    }
    auto rc = s.csv("detector_runs.csv", "avalanche.detector_runs/1", {"n1_init", "shot", "n_out"});
    for (std::size_t k = 0; k < runs.size(); ++k)
        for (std::size_t i = 0; i < runs[k].size(); ++i) rc.row(c.detector.n1_values[k], i, runs[k][i]);
    s.result.summary = {{"duration", T}, {"loads", loads}};
    s.result.assumptions.push_back("detection window T = " + output::fmt(T) +
                                   (c.detector.duration > 0 ? " (configured)" : " (default 10 / kappa_0)"));
    s.result.assumptions.push_back("pump disabled during detection; cavity and sites 2..N start empty");
    s.svg("detector_histograms.svg", output::line_plot_svg({"Detector output histograms", "n_out", "count"}, series));
}

inline void run_circuit(detail::Session& s) {
    const auto rep = circuit::design_report(s.cfg.circuit.params, s.cfg.circuit.inputs);
    const auto& b = rep.signs.best;
    auto angle = [](const circuit::AnglePair& a) { return json{{"sin", a.sin}, {"cos", a.cos}}; };
    json j{{"sign_assignment", rep.signs.assignment},
           {"angles", {{"psi_third", angle(b.psi_third)}, {"chi_half", angle(b.chi_half)}, {"theta", angle(b.theta)}}},
           {"residuals", rep.residuals},
           {"max_abs_residual", rep.signs.max_residual},
           {"B", rep.b},
           {"B4_computed", rep.b[3]},
           {"B4_reference", rep.reference_b4},
           {"g", rep.g},
           {"hop_rate", rep.hop_rate},
           {"kerr_scale_reference_B4", rep.kerr_reference},
           {"kerr_scale_computed_B4", rep.kerr_computed},
           {"hierarchy",
            {{"left", rep.hierarchy.left},
             {"kappa_b", rep.hierarchy.waste_loss},
             {"delta_min", rep.hierarchy.min_detuning},
             {"much_less_factor", rep.hierarchy.much_less_factor},
             {"kerr_below_width", rep.hierarchy.kerr_below_width},
             {"width_below_detuning", rep.hierarchy.width_below_detuning},
             {"satisfied", rep.hierarchy.satisfied()}}}};
    if (b.ladder_size >= 2) j["modulation_frequency_hop1"] = circuit::modulation_frequency(b, 1);
    s.result.summary = j;
    s.json_file("circuit_report.json", j);
    auto csv = s.csv("circuit_b_coefficients.csv", "avalanche.circuit_b/1", {"n", "B_n"});
    for (int n = 1; n <= 6; ++n) csv.row(n, rep.b[static_cast<std::size_t>(n - 1)]);
    if (std::abs(std::abs(rep.b[3]) - rep.reference_b4) > 0.05 * rep.reference_b4)
        s.result.assumptions.push_back("computed |B4| = " + output::fmt(std::abs(rep.b[3])) +
                                       " differs from the reference B4 = " + output::fmt(rep.reference_b4) +
                                       "; Kerr scale and hierarchy use the reference value");
}

// ---------------------------------------------------------------------------

/// Runs the configured experiment and writes the metadata sidecar.
inline RunResult run(const config::RunConfig& cfg, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::Session s(cfg, opt);
    switch (cfg.experiment) {
    case config::Experiment::MeanField: run_meanfield(s); break;
    case config::Experiment::PhaseDiagram: run_phase_diagram(s); break;
    case config::Experiment::PeriodScan: run_period_scan(s); break;
    case config::Experiment::Trajectories: run_trajectories(s); break;
    case config::Experiment::Spectrum: run_spectrum(s); break;
    case config::Experiment::BetaScan: run_beta_scan(s); break;
    case config::Experiment::Detector: run_detector(s); break;
    case config::Experiment::Circuit: run_circuit(s); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json meta{{"tool", "avalanche"},
              {"version", AVALANCHE_VERSION},
              {"experiment", config::to_string(cfg.experiment)},
              {"config_hash", s.hash},
              {"status", s.result.errors.empty() ? "complete" : "partial"},
              {"master_seed", cfg.seed},
              {"rng", rng_description},
              {"threads", opt.threads},
              {"wall_time_s", wall},
              {"files", s.result.files},
              {"errors", s.result.errors},
              {"assumptions", s.result.assumptions},
              {"summary", s.result.summary},
              {"config", config::to_json(cfg)}};
    const std::string meta_name = std::string(config::to_string(cfg.experiment)) + ".meta.json";
    output::write_json(opt.out_dir / meta_name, meta);
    s.result.files.push_back(meta_name);
    return s.result;
}

} // namespace avalanche::experiments
