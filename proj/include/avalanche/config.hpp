// config.hpp - run configuration: JSON schema, validation, canonical form and hash
//
// Every field has a default, so a file only needs the keys it changes. Keys that
// are not part of the schema are rejected. The schema is described in README.md.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "avalanche/circuit.hpp"
#include "avalanche/coherence.hpp"
#include "avalanche/core.hpp"
#include "avalanche/errors.hpp"
#include "avalanche/meanfield.hpp"

namespace avalanche::config {

using json = nlohmann::ordered_json;

enum class Experiment { MeanField, PhaseDiagram, PeriodScan, Trajectories, Spectrum, BetaScan, Detector, Circuit };

inline constexpr std::array<std::pair<Experiment, const char*>, 8> experiment_names{{
    {Experiment::MeanField, "meanfield"},
    {Experiment::PhaseDiagram, "phase-diagram"},
    {Experiment::PeriodScan, "period-scan"},
    {Experiment::Trajectories, "trajectories"},
    {Experiment::Spectrum, "spectrum"},
    {Experiment::BetaScan, "beta-scan"},
    {Experiment::Detector, "detector"},
    {Experiment::Circuit, "circuit"},
}};

inline const char* to_string(Experiment e) {
    for (const auto& [k, n] : experiment_names)
        if (k == e) return n;
    return "?";
}

inline Experiment parse_experiment(const std::string& s) {
    for (const auto& [k, n] : experiment_names)
        if (s == n) return k;
    fail(ErrorKind::ValidationError, "unknown experiment '" + s + "'");
}

struct PumpConfig {
    std::string preset = "infinite_temperature"; // infinite_temperature | pure_gain | lindblad | off
    double gain = 0.0;                          // gamma_g
    double zeta = 0.5;                          // lindblad only

    PumpSpec spec_for(double g) const {
        if (preset == "infinite_temperature") return PumpSpec::infinite_temperature(g);
        if (preset == "pure_gain") return PumpSpec::pure_gain(g);
        if (preset == "lindblad") return PumpSpec::lindblad(g, zeta);
        if (preset == "off") return PumpSpec::off();
        fail(ErrorKind::ValidationError, "unknown pump preset '" + preset + "'");
    }
    PumpSpec spec() const { return spec_for(gain); }
    bool operator==(const PumpConfig&) const = default;
};

struct SystemConfig {
    int ladder_size = 10;
    double hop_rate = 1.0;
    PumpConfig pump;
    double cavity_loss = 0.0;
    double last_loss = 0.0;
    double intrinsic_loss = 0.0;

    SystemParams params() const { return params_for(pump.gain); }
    SystemParams params_for(double gain) const {
        SystemParams p;
        p.ladder_size = ladder_size;
        p.hop_rate = hop_rate;
        p.pump = pump.spec_for(gain);
        p.cavity_loss = cavity_loss;
        p.last_loss = last_loss;
        p.intrinsic_loss = intrinsic_loss;
        return p;
    }
    bool operator==(const SystemConfig&) const = default;
};

struct MeanFieldConfig {
    double t_end = 0.0; // 0: 50 / min(kappa_c, gamma_g, Gamma)
    std::size_t samples = 20001;
    double tolerance = 1e-8;
    double seed_amplitude = meanfield::default_seed_amplitude;
    int max_doublings = 3;
    double lasing_occupation = 1e-3;
    double convergence = 1e-6;
    double oscillation = 1e-2;
    double terminal_fraction = 0.25;
    double transient_fraction = 0.2;
    double threshold_sigmas = 0.5;
    std::size_t min_peaks = 4;

    meanfield::ClassifyOptions options() const {
        meanfield::ClassifyOptions o;
        o.seed_amplitude = seed_amplitude;
        o.t_end = t_end;
        o.max_doublings = max_doublings;
        o.integrate.tol = tolerance;
        o.integrate.samples = samples;
        o.thresholds.lasing_occupation = lasing_occupation;
        o.thresholds.convergence = convergence;
        o.thresholds.oscillation = oscillation;
        o.thresholds.terminal_fraction = terminal_fraction;
        o.thresholds.peaks.transient_fraction = transient_fraction;
        o.thresholds.peaks.threshold_sigmas = threshold_sigmas;
        o.thresholds.peaks.min_peaks = min_peaks;
        return o;
    }
    bool operator==(const MeanFieldConfig&) const = default;
};

/// Phase-diagram grid in absolute rates.
struct GridConfig {
    std::vector<double> gains{2, 12, 40};
    std::vector<double> cavity_losses{20};
    bool operator==(const GridConfig&) const = default;
};

/// Period scan over ratios to kappa_l (kept fixed at system.last_loss).
struct PeriodScanConfig {
    std::vector<int> ladder_sizes{10, 20};
    std::vector<double> hop_over_last{0.05, 0.1, 0.5};
    std::vector<double> cavity_over_last{1, 5, 10, 25, 50};
    double ratio_min = 0.3; // kappa_c / gamma_g, log-spaced
    double ratio_max = 30.0;
    std::size_t ratio_points = 25;
    std::size_t probes = 25;

    std::vector<double> ratios() const {
        std::vector<double> r(ratio_points);
        for (std::size_t i = 0; i < ratio_points; ++i)
            r[i] = ratio_points == 1 ? ratio_min
                                     : ratio_min * std::pow(ratio_max / ratio_min, static_cast<double>(i) /
                                                                                      static_cast<double>(ratio_points - 1));
        return r;
    }
    bool operator==(const PeriodScanConfig&) const = default;
};

struct EnsembleConfig {
    std::size_t trajectories = 100;
    double duration = 10.0;
    double sample_dt = 0.1;
    std::int64_t initial_cavity = 0;
    std::vector<std::int64_t> initial_ladder; // empty: all zero
    bool event_log = false;
    bool write_samples = false;
    std::uint64_t event_cap = 100'000'000;

    FockConfig initial(int ladder_size) const {
        FockConfig c = FockConfig::empty(ladder_size);
        c.cavity = initial_cavity;
        if (!initial_ladder.empty()) c.ladder = initial_ladder;
        return c;
    }
    bool operator==(const EnsembleConfig&) const = default;
};

struct SpectrumConfig {
    std::size_t trajectories = 100;
    double duration = 400.0;
    double burn_in = 40.0;
    double sample_dt = 0.01;
    double max_lag = 20.0;    // time; 0 means T/2
    double tukey_flat = 0.8;
    double omega_floor = 0.0; // 0 means 2 pi / (T/4)
    double omega_max = 200.0; // 0 keeps up to Nyquist
    std::size_t pad_factor = 4;
    std::size_t bootstrap = 100;

    coherence::CoherenceOptions options(std::uint64_t seed) const {
        coherence::CoherenceOptions o;
        o.duration = duration;
        o.burn_in = burn_in;
        o.sample_dt = sample_dt;
        o.trajectories = trajectories;
        o.master_seed = seed;
        o.beta.spectrum.tukey_flat = tukey_flat;
        o.beta.spectrum.max_lag = max_lag;
        o.beta.spectrum.omega_max = omega_max;
        o.beta.spectrum.pad_factor = pad_factor;
        o.beta.omega_floor = omega_floor;
        o.beta.bootstrap = bootstrap;
        o.beta.bootstrap_seed = seed;
        return o;
    }
    bool operator==(const SpectrumConfig&) const = default;
};

struct BetaScanConfig {
    std::vector<double> gain_over_cavity{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    bool operator==(const BetaScanConfig&) const = default;
};

struct DetectorConfig {
    std::vector<int> n1_values{0, 1, 2, 3, 4, 5};
    std::size_t runs = 500;
    double duration = 0.0; // 0 means 10 / kappa_0
    std::int64_t bin_width = 1;
    bool operator==(const DetectorConfig&) const = default;
};

struct CircuitConfig {
    circuit::CircuitParams params;
    circuit::DesignInputs inputs;
    bool operator==(const CircuitConfig& o) const;
};

struct RunConfig {
    Experiment experiment = Experiment::MeanField;
    SystemConfig system;
    std::uint64_t seed = 0;
    std::string output = "out";
    MeanFieldConfig meanfield;
    GridConfig grid;
    PeriodScanConfig period_scan;
    EnsembleConfig ensemble;
    SpectrumConfig spectrum;
    BetaScanConfig beta_scan;
    DetectorConfig detector;
    CircuitConfig circuit;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline bool same(const circuit::AnglePair& a, const circuit::AnglePair& b) { return a.sin == b.sin && a.cos == b.cos; }

} // namespace detail

inline bool CircuitConfig::operator==(const CircuitConfig& o) const {
    const auto& a = params;
    const auto& b = o.params;
    return a.josephson_energy == b.josephson_energy && a.alpha2 == b.alpha2 && a.alpha3 == b.alpha3 &&
           detail::same(a.psi_third, b.psi_third) && detail::same(a.chi_half, b.chi_half) &&
           detail::same(a.theta, b.theta) && a.impedance == b.impedance && a.impedance_ref == b.impedance_ref &&
           a.flux_modulation == b.flux_modulation && a.waste_loss == b.waste_loss && a.ladder_size == b.ladder_size &&
           a.ladder_top == b.ladder_top && a.ladder_spacing == b.ladder_spacing &&
           a.cavity_frequency == b.cavity_frequency && a.waste_frequency == b.waste_frequency &&
           a.cavity_loss == b.cavity_loss && a.intrinsic_loss == b.intrinsic_loss &&
           inputs.ladder_occupation == o.inputs.ladder_occupation &&
           inputs.cavity_occupation == o.inputs.cavity_occupation && inputs.min_detuning == o.inputs.min_detuning &&
           inputs.much_less_factor == o.inputs.much_less_factor && inputs.reference_b4 == o.inputs.reference_b4 &&
           inputs.search_signs == o.inputs.search_signs;
}

// ---------------------------------------------------------------------------
// Reading

namespace detail {

/// Walks one JSON object, tracking which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(ErrorKind::ParseError, where() + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.emplace_back(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            fail(ErrorKind::ParseError, field(key) + " has the wrong type (got " + std::string(it->type_name()) + ")");
        }
    }

    std::optional<Reader> child(const char* key) {
        seen_.emplace_back(key);
        auto it = j_.find(key);
        if (it == j_.end()) return std::nullopt;
        return Reader(*it, field(key));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                fail(ErrorKind::ParseError, "unknown key " + field(it.key().c_str()));
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "top level" : path_; }
    const json& j_;
    std::string path_;
    std::vector<std::string> seen_;
};

inline void read_angle(Reader& r, const char* key, circuit::AnglePair& a) {
    if (auto c = r.child(key)) {
        c->get("sin", a.sin);
        c->get("cos", a.cos);
        c->finish();
    }
}

} // namespace detail

inline void validate(const RunConfig& c) {
    const auto p = c.system.params();
    p.validate();
    require(c.system.pump.gain >= 0.0, "system.pump.gain must be >= 0");
    require(c.system.pump.zeta >= 0.0 && c.system.pump.zeta <= 1.0, "system.pump.zeta must lie in [0, 1]");
    const auto& m = c.meanfield;
    require(m.t_end >= 0.0 && m.samples >= 3 && m.tolerance > 0.0 && m.seed_amplitude >= 0.0 && m.max_doublings >= 0,
            "meanfield settings out of range");
    require(m.terminal_fraction > 0.0 && m.terminal_fraction < 1.0, "meanfield.terminal_fraction must lie in (0, 1)");
    require(m.transient_fraction >= 0.0 && m.transient_fraction < 1.0, "meanfield.transient_fraction must lie in [0, 1)");
    for (double g : c.grid.gains) require(g >= 0.0, "grid.gains must be >= 0");
    for (double k : c.grid.cavity_losses) require(k >= 0.0, "grid.cavity_losses must be >= 0");
    const auto& ps = c.period_scan;
    for (int n : ps.ladder_sizes) require(n >= 2, "period_scan.ladder_sizes must be >= 2");
    for (double v : ps.hop_over_last) require(v > 0.0, "period_scan.hop_over_last must be > 0");
    for (double v : ps.cavity_over_last) require(v > 0.0, "period_scan.cavity_over_last must be > 0");
    require(ps.ratio_min > 0.0 && ps.ratio_max >= ps.ratio_min && ps.ratio_points >= 1 && ps.probes >= 2,
            "period_scan ratio range invalid");
    const auto& e = c.ensemble;
    require(e.trajectories >= 1 && e.duration > 0.0 && e.sample_dt > 0.0, "ensemble settings out of range");
    require(e.initial_cavity >= 0, "ensemble.initial_cavity must be >= 0");
    if (!e.initial_ladder.empty()) e.initial(c.system.ladder_size).validate(c.system.ladder_size);
    const auto& s = c.spectrum;
    require(s.trajectories >= 1 && s.duration > 0.0 && s.burn_in >= 0.0 && s.sample_dt > 0.0,
            "spectrum timing out of range");
    require(s.max_lag >= 0.0 && s.omega_floor >= 0.0 && s.omega_max >= 0.0 && s.pad_factor >= 1,
            "spectrum knobs out of range");
    require(s.tukey_flat >= 0.0 && s.tukey_flat <= 1.0, "spectrum.tukey_flat must lie in [0, 1]");
    for (double v : c.beta_scan.gain_over_cavity) require(v > 0.0, "beta_scan.gain_over_cavity must be > 0");
    for (int n : c.detector.n1_values) require(n >= 0, "detector.n1_values must be >= 0");
    require(c.detector.runs >= 1 && c.detector.duration >= 0.0 && c.detector.bin_width >= 1, "detector settings out of range");
    c.circuit.params.validate();
}

/// Builds a RunConfig from parsed JSON. Throws ParseError for schema problems
/// and ValidationError for values that break an invariant.
inline RunConfig from_json(const json& j) {
    RunConfig c;
    detail::Reader top(j, "");
    std::string experiment = to_string(c.experiment);
    top.get("experiment", experiment);
    c.experiment = parse_experiment(experiment);
    top.get("seed", c.seed);
    top.get("output", c.output);
    if (auto s = top.child("system")) {
        s->get("N", c.system.ladder_size);
        s->get("hop_rate", c.system.hop_rate);
        s->get("gain", c.system.pump.gain);
        s->get("pump", c.system.pump.preset);
        s->get("zeta", c.system.pump.zeta);
        s->get("cavity_loss", c.system.cavity_loss);
        s->get("last_loss", c.system.last_loss);
        s->get("intrinsic_loss", c.system.intrinsic_loss);
        s->finish();
    }
    if (auto m = top.child("meanfield")) {
        auto& v = c.meanfield;
        m->get("t_end", v.t_end);
        m->get("samples", v.samples);
        m->get("tolerance", v.tolerance);
        m->get("seed_amplitude", v.seed_amplitude);
        m->get("max_doublings", v.max_doublings);
        m->get("lasing_occupation", v.lasing_occupation);
        m->get("convergence", v.convergence);
        m->get("oscillation", v.oscillation);
        m->get("terminal_fraction", v.terminal_fraction);
        m->get("transient_fraction", v.transient_fraction);
        m->get("threshold_sigmas", v.threshold_sigmas);
        m->get("min_peaks", v.min_peaks);
        m->finish();
    }
    if (auto g = top.child("grid")) {
        g->get("gains", c.grid.gains);
        g->get("cavity_losses", c.grid.cavity_losses);
        g->finish();
    }
    if (auto p = top.child("period_scan")) {
        auto& v = c.period_scan;
        p->get("ladder_sizes", v.ladder_sizes);
        p->get("hop_over_last", v.hop_over_last);
        p->get("cavity_over_last", v.cavity_over_last);
        p->get("ratio_min", v.ratio_min);
        p->get("ratio_max", v.ratio_max);
        p->get("ratio_points", v.ratio_points);
        p->get("probes", v.probes);
        p->finish();
    }
    if (auto e = top.child("ensemble")) {
        auto& v = c.ensemble;
        e->get("trajectories", v.trajectories);
        e->get("duration", v.duration);
        e->get("sample_dt", v.sample_dt);
        e->get("initial_cavity", v.initial_cavity);
        e->get("initial_ladder", v.initial_ladder);
        e->get("event_log", v.event_log);
        e->get("write_samples", v.write_samples);
        e->get("event_cap", v.event_cap);
        e->finish();
    }
    if (auto s = top.child("spectrum")) {
        auto& v = c.spectrum;
        s->get("trajectories", v.trajectories);
        s->get("duration", v.duration);
        s->get("burn_in", v.burn_in);
        s->get("sample_dt", v.sample_dt);
        s->get("max_lag", v.max_lag);
        s->get("tukey_flat", v.tukey_flat);
        s->get("omega_floor", v.omega_floor);
        s->get("omega_max", v.omega_max);
        s->get("pad_factor", v.pad_factor);
        s->get("bootstrap", v.bootstrap);
        s->finish();
    }
    if (auto b = top.child("beta_scan")) {
        b->get("gain_over_cavity", c.beta_scan.gain_over_cavity);
        b->finish();
    }
    if (auto d = top.child("detector")) {
        auto& v = c.detector;
        d->get("n1_values", v.n1_values);
        d->get("runs", v.runs);
        d->get("duration", v.duration);
        d->get("bin_width", v.bin_width);
        d->finish();
    }
    if (auto k = top.child("circuit")) {
        auto& v = c.circuit.params;
        auto& in = c.circuit.inputs;
        k->get("E_J", v.josephson_energy);
        k->get("alpha2", v.alpha2);
        k->get("alpha3", v.alpha3);
        detail::read_angle(*k, "psi_third", v.psi_third);
        detail::read_angle(*k, "chi_half", v.chi_half);
        detail::read_angle(*k, "theta", v.theta);
        k->get("Z", v.impedance);
        k->get("Z0", v.impedance_ref);
        k->get("delta_phi_e", v.flux_modulation);
        k->get("kappa_b", v.waste_loss);
        k->get("N", v.ladder_size);
        k->get("omega_1", v.ladder_top);
        k->get("delta_omega", v.ladder_spacing);
        k->get("omega_c", v.cavity_frequency);
        k->get("omega_b", v.waste_frequency);
        k->get("kappa_c", v.cavity_loss);
        k->get("kappa_0", v.intrinsic_loss);
        k->get("n_bar", in.ladder_occupation);
        k->get("n_bar_c", in.cavity_occupation);
        k->get("delta_min", in.min_detuning);
        k->get("much_less_factor", in.much_less_factor);
        k->get("reference_B4", in.reference_b4);
        k->get("search_signs", in.search_signs);
        k->finish();
    }
    top.finish();
    validate(c);
    return c;
}

inline RunConfig parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    return from_json(j);
}

inline RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + std::string(e.what()).substr(to_string(e.kind()).size() + 2));
    }
}

// ---------------------------------------------------------------------------
// Writing

inline json to_json(const RunConfig& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["seed"] = c.seed;
    j["output"] = c.output;
    j["system"] = {{"N", c.system.ladder_size},           {"hop_rate", c.system.hop_rate},
                   {"gain", c.system.pump.gain},          {"pump", c.system.pump.preset},
                   {"zeta", c.system.pump.zeta},          {"cavity_loss", c.system.cavity_loss},
                   {"last_loss", c.system.last_loss},     {"intrinsic_loss", c.system.intrinsic_loss}};
    const auto& m = c.meanfield;
    j["meanfield"] = {{"t_end", m.t_end},
                      {"samples", m.samples},
                      {"tolerance", m.tolerance},
                      {"seed_amplitude", m.seed_amplitude},
                      {"max_doublings", m.max_doublings},
                      {"lasing_occupation", m.lasing_occupation},
                      {"convergence", m.convergence},
                      {"oscillation", m.oscillation},
                      {"terminal_fraction", m.terminal_fraction},
                      {"transient_fraction", m.transient_fraction},
                      {"threshold_sigmas", m.threshold_sigmas},
                      {"min_peaks", m.min_peaks}};
    j["grid"] = {{"gains", c.grid.gains}, {"cavity_losses", c.grid.cavity_losses}};
    const auto& p = c.period_scan;
    j["period_scan"] = {{"ladder_sizes", p.ladder_sizes}, {"hop_over_last", p.hop_over_last},
                        {"cavity_over_last", p.cavity_over_last}, {"ratio_min", p.ratio_min},
                        {"ratio_max", p.ratio_max}, {"ratio_points", p.ratio_points}, {"probes", p.probes}};
    const auto& e = c.ensemble;
    j["ensemble"] = {{"trajectories", e.trajectories}, {"duration", e.duration},
                     {"sample_dt", e.sample_dt},       {"initial_cavity", e.initial_cavity},
                     {"initial_ladder", e.initial_ladder}, {"event_log", e.event_log},
                     {"write_samples", e.write_samples}, {"event_cap", e.event_cap}};
    const auto& s = c.spectrum;
    j["spectrum"] = {{"trajectories", s.trajectories}, {"duration", s.duration},       {"burn_in", s.burn_in},
                     {"sample_dt", s.sample_dt},       {"max_lag", s.max_lag},         {"tukey_flat", s.tukey_flat},
                     {"omega_floor", s.omega_floor},   {"omega_max", s.omega_max},     {"pad_factor", s.pad_factor},
                     {"bootstrap", s.bootstrap}};
    j["beta_scan"] = {{"gain_over_cavity", c.beta_scan.gain_over_cavity}};
    const auto& d = c.detector;
    j["detector"] = {{"n1_values", d.n1_values}, {"runs", d.runs}, {"duration", d.duration}, {"bin_width", d.bin_width}};
    const auto& k = c.circuit.params;
    const auto& in = c.circuit.inputs;
    auto angle = [](const circuit::AnglePair& a) { return json{{"sin", a.sin}, {"cos", a.cos}}; };
    j["circuit"] = {{"E_J", k.josephson_energy},
                    {"alpha2", k.alpha2},
                    {"alpha3", k.alpha3},
                    {"psi_third", angle(k.psi_third)},
                    {"chi_half", angle(k.chi_half)},
                    {"theta", angle(k.theta)},
                    {"Z", k.impedance},
                    {"Z0", k.impedance_ref},
                    {"delta_phi_e", k.flux_modulation},
                    {"kappa_b", k.waste_loss},
                    {"N", k.ladder_size},
                    {"omega_1", k.ladder_top},
                    {"delta_omega", k.ladder_spacing},
                    {"omega_c", k.cavity_frequency},
                    {"omega_b", k.waste_frequency},
                    {"kappa_c", k.cavity_loss},
                    {"kappa_0", k.intrinsic_loss},
                    {"n_bar", in.ladder_occupation},
                    {"n_bar_c", in.cavity_occupation},
                    {"delta_min", in.min_detuning},
                    {"much_less_factor", in.much_less_factor},
                    {"reference_B4", in.reference_b4},
                    {"search_signs", in.search_signs}};
    return j;
}

inline std::string dump(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

inline void save(const RunConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::ValidationError, "cannot write '" + path + "'");
    out << dump(c);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Hash of everything that can change the data files (the output directory is excluded).
inline std::string config_hash(const RunConfig& c) {
    auto j = to_json(c);
    j.erase("output");
    const auto h = fnv1a64(j.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace avalanche::config
