// stochastic.hpp - exact jump-process simulation of the Fock-diagonal dynamics,
// ensembles, a truncated master-equation oracle and the photon-detector experiment.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avalanche/core.hpp"
#include "avalanche/errors.hpp"
#include "avalanche/ode.hpp"
#include "avalanche/parallel.hpp"
#include "avalanche/rng.hpp"

namespace avalanche::stochastic {

/// Direct-method Gillespie kernel with incrementally maintained rates.
///
/// Hop rates factor as Gamma (1 + n_c) * b_p with the integer bond weight
/// b_p = n_p (1 + n_{p+1}); the bond weights and their sum are kept exactly in
/// integers so long runs accumulate no rounding drift.
class JumpProcess {
public:
    JumpProcess(const SystemParams& params, FockConfig cfg) : params_(params), cfg_(std::move(cfg)) {
        cfg_.validate(params_.ladder_size);
        const std::size_t N = cfg_.ladder.size();
        bond_.assign(N - 1, 0);
        for (std::size_t p = 0; p + 1 < N; ++p) bond_[p] = bond_weight(p);
        bond_sum_ = 0;
        for (auto b : bond_) bond_sum_ += b;
        ladder_sum_ = cfg_.ladder_total();
    }

    const FockConfig& config() const { return cfg_; }

    double hop_total() const { return params_.hop_rate * (1.0 + static_cast<double>(cfg_.cavity)) * static_cast<double>(bond_sum_); }

    double total_rate() const {
        const double n0 = static_cast<double>(cfg_.ladder.front());
        return hop_total() + params_.pump.gain_rate * (1.0 + n0) + params_.pump.loss_rate * n0 +
               params_.last_loss * static_cast<double>(cfg_.ladder.back()) +
               params_.cavity_loss * static_cast<double>(cfg_.cavity) +
               params_.intrinsic_loss * static_cast<double>(ladder_sum_);
    }

    /// Picks the channel whose cumulative rate interval contains `x` in [0, total_rate()).
    JumpEvent select(double x) const {
        const std::size_t N = cfg_.ladder.size();
        const double hop = hop_total();
        if (x < hop && bond_sum_ > 0) {
            const double per_weight = params_.hop_rate * (1.0 + static_cast<double>(cfg_.cavity));
            double acc = 0.0;
            std::size_t last = 0;
            for (std::size_t p = 0; p + 1 < N; ++p) {
                if (bond_[p] == 0) continue;
                last = p;
                acc += per_weight * static_cast<double>(bond_[p]);
                if (x < acc) return {JumpKind::Hop, static_cast<std::uint16_t>(p)};
            }
            return {JumpKind::Hop, static_cast<std::uint16_t>(last)};
        }
        x -= hop;
        const double n0 = static_cast<double>(cfg_.ladder.front());
        const double gain = params_.pump.gain_rate * (1.0 + n0);
        if (x < gain) return {JumpKind::Gain1, 0};
        x -= gain;
        const double down = params_.pump.loss_rate * n0;
        if (x < down) return {JumpKind::Loss1, 0};
        x -= down;
        const double last = params_.last_loss * static_cast<double>(cfg_.ladder.back());
        if (x < last) return {JumpKind::LossN, static_cast<std::uint16_t>(N - 1)};
        x -= last;
        const double cav = params_.cavity_loss * static_cast<double>(cfg_.cavity);
        if (x < cav) return {JumpKind::LossCavity, 0};
        x -= cav;
        if (params_.intrinsic_loss > 0.0) {
            double acc = 0.0;
            for (std::size_t p = 0; p < N; ++p) {
                acc += params_.intrinsic_loss * static_cast<double>(cfg_.ladder[p]);
                if (x < acc && cfg_.ladder[p] > 0) return {JumpKind::Loss0, static_cast<std::uint16_t>(p)};
            }
        }
        return fallback();
    }

    void apply(const JumpEvent& e) {
        apply_event(cfg_, e);
        const std::size_t s = e.site;
        switch (e.kind) {
            case JumpKind::Hop:
                refresh_bonds_around(s);
                refresh_bonds_around(s + 1);
                break;
            case JumpKind::Gain1:
                ++ladder_sum_;
                refresh_bonds_around(0);
                break;
            case JumpKind::Loss1:
                --ladder_sum_;
                refresh_bonds_around(0);
                break;
            case JumpKind::LossN:
                --ladder_sum_;
                refresh_bonds_around(cfg_.ladder.size() - 1);
                break;
            case JumpKind::Loss0:
                --ladder_sum_;
                refresh_bonds_around(s);
                break;
            case JumpKind::LossCavity: break;
        }
    }

private:
    Occupation bond_weight(std::size_t p) const { return cfg_.ladder[p] * (1 + cfg_.ladder[p + 1]); }

    void refresh_bond(std::size_t p) {
        const Occupation b = bond_weight(p);
        bond_sum_ += b - bond_[p];
        bond_[p] = b;
    }

    // bonds touching site s are s-1 and s
    void refresh_bonds_around(std::size_t s) {
        if (s >= 1) refresh_bond(s - 1);
        if (s + 1 < cfg_.ladder.size()) refresh_bond(s);
    }

    // Rounding put x past the last channel: take the last channel with positive rate.
    JumpEvent fallback() const {
        const std::size_t N = cfg_.ladder.size();
        if (params_.intrinsic_loss > 0.0)
            for (std::size_t p = N; p-- > 0;)
                if (cfg_.ladder[p] > 0) return {JumpKind::Loss0, static_cast<std::uint16_t>(p)};
        if (params_.cavity_loss > 0.0 && cfg_.cavity > 0) return {JumpKind::LossCavity, 0};
        if (params_.last_loss > 0.0 && cfg_.ladder.back() > 0) return {JumpKind::LossN, static_cast<std::uint16_t>(N - 1)};
        if (params_.pump.loss_rate > 0.0 && cfg_.ladder.front() > 0) return {JumpKind::Loss1, 0};
        if (params_.pump.gain_rate > 0.0) return {JumpKind::Gain1, 0};
        for (std::size_t p = N - 1; p-- > 0;)
            if (bond_[p] > 0) return {JumpKind::Hop, static_cast<std::uint16_t>(p)};
        throw std::logic_error("no channel with positive rate");
    }

    SystemParams params_;
    FockConfig cfg_;
    std::vector<Occupation> bond_;
    Occupation bond_sum_ = 0;
    Occupation ladder_sum_ = 0;
};

struct GillespieStep {
    double dt = 0.0;
    JumpEvent event;
};

/// One exact step from `cfg`. Returns nullopt when the total rate is zero
/// (absorbed: nothing can ever happen again from this configuration).
inline std::optional<GillespieStep> gillespie_step(const FockConfig& cfg, const SystemParams& params, Rng& rng) {
    JumpProcess proc(params, cfg);
    const double total = proc.total_rate();
    if (!(total > 0.0)) return std::nullopt;
    const double dt = rng.exponential(total);
    return GillespieStep{dt, proc.select(rng.uniform() * total)};
}

// ---------------------------------------------------------------------------
// Trajectories

struct TimedEvent {
    double time = 0.0;
    JumpEvent event;
};

/// Occupations on the grid t_k = k * dt (k = 0..count-1), zero-order hold.
struct SampleSeries {
    double dt = 0.0;
    std::size_t ladder_size = 0;
    std::vector<std::int32_t> cavity;
    std::vector<std::int32_t> ladder; // row-major count x ladder_size; empty if not recorded

    std::size_t count() const { return cavity.size(); }
    std::int32_t site(std::size_t k, std::size_t p) const { return ladder[k * ladder_size + p]; }
};

struct Trajectory {
    std::uint64_t seed = 0;
    double duration = 0.0;
    FockConfig initial;
    FockConfig final;
    std::vector<TimedEvent> events; // empty unless recorded
    SampleSeries samples;
    std::uint64_t event_count = 0;
    std::uint64_t emitted_count = 0; // LossCavity events
    bool absorbed = false;           // total rate hit zero before `duration`
};

struct TrajectoryOptions {
    double sample_dt = 0.0;       // 0 disables sampling
    bool record_events = true;
    bool sample_ladder = true;
    std::uint64_t event_cap = 100'000'000;
};

struct EnsembleSpec {
    SystemParams params;
    FockConfig initial;
    double duration = 0.0;
    std::size_t trajectories = 1;
    std::uint64_t master_seed = 0;
};

namespace detail {

inline void push_sample(SampleSeries& s, const FockConfig& cfg, bool with_ladder) {
    s.cavity.push_back(static_cast<std::int32_t>(cfg.cavity));
    if (with_ladder)
        for (auto v : cfg.ladder) s.ladder.push_back(static_cast<std::int32_t>(v));
}

inline std::size_t sample_count(double duration, double dt) {
    return static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12))) + 1;
}

} // namespace detail

inline Trajectory simulate_trajectory(const EnsembleSpec& spec, std::uint64_t seed, const TrajectoryOptions& opt = {}) {
    spec.params.validate();
    require(spec.duration > 0.0, "trajectory duration must be > 0");
    require(opt.sample_dt >= 0.0, "sample_dt must be >= 0");
    Trajectory tr;
    tr.seed = seed;
    tr.duration = spec.duration;
    tr.initial = spec.initial;
    JumpProcess proc(spec.params, spec.initial);
    Rng rng(seed);

    const bool sampling = opt.sample_dt > 0.0;
    std::size_t n_samples = 0, next_sample = 0;
    if (sampling) {
        n_samples = detail::sample_count(spec.duration, opt.sample_dt);
        tr.samples.dt = opt.sample_dt;
        tr.samples.ladder_size = spec.initial.ladder.size();
        tr.samples.cavity.reserve(n_samples);
        if (opt.sample_ladder) tr.samples.ladder.reserve(n_samples * tr.samples.ladder_size);
    }
    auto fill_until = [&](double t_exclusive) {
        // samples strictly before the next event time see the current state
        while (next_sample < n_samples && static_cast<double>(next_sample) * opt.sample_dt < t_exclusive) {
            detail::push_sample(tr.samples, proc.config(), opt.sample_ladder);
            ++next_sample;
        }
    };

    double t = 0.0;
    for (;;) {
        const double total = proc.total_rate();
        if (!(total > 0.0)) {
            tr.absorbed = true;
            break;
        }
        const double t_next = t + rng.exponential(total);
        const double x = rng.uniform() * total;
        if (t_next > spec.duration) break;
        if (tr.event_count >= opt.event_cap)
            fail(ErrorKind::EventBudgetExceeded,
                 "more than " + std::to_string(opt.event_cap) + " events before t=" + std::to_string(spec.duration));
        if (sampling) fill_until(t_next);
        const JumpEvent e = proc.select(x);
        proc.apply(e);
        t = t_next;
        ++tr.event_count;
        if (e.kind == JumpKind::LossCavity) ++tr.emitted_count;
        if (opt.record_events) tr.events.push_back({t, e});
    }
    if (sampling) fill_until(std::numeric_limits<double>::infinity());
    tr.final = proc.config();
    return tr;
}

/// Recomputes the sample series from the recorded events.
inline SampleSeries replay_samples(const Trajectory& tr, double sample_dt, bool with_ladder = true) {
    require(sample_dt > 0.0, "sample_dt must be > 0");
    SampleSeries s;
    s.dt = sample_dt;
    s.ladder_size = tr.initial.ladder.size();
    FockConfig cfg = tr.initial;
    const std::size_t n = detail::sample_count(tr.duration, sample_dt);
    std::size_t e = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double tk = static_cast<double>(k) * sample_dt;
        while (e < tr.events.size() && tr.events[e].time <= tk) apply_event(cfg, tr.events[e++].event);
        detail::push_sample(s, cfg, with_ladder);
    }
    return s;
}

inline std::vector<Trajectory> run_ensemble(const EnsembleSpec& spec, const TrajectoryOptions& opt = {},
                                            unsigned threads = 1) {
    require(spec.trajectories >= 1, "ensemble needs at least one trajectory");
    spec.params.validate();
    spec.initial.validate(spec.params.ladder_size);
    return parallel_map(spec.trajectories, threads, [&](std::size_t i) {
        return simulate_trajectory(spec, derive_seed(spec.master_seed, i), opt);
    });
}

/// Sample-wise ensemble mean and standard error of the mean.
struct EnsembleMoments {
    std::vector<double> times;
    std::vector<double> cavity_mean, cavity_se;
    std::vector<std::vector<double>> ladder_mean, ladder_se; // [site][time]
};

inline EnsembleMoments ensemble_moments(std::span<const Trajectory> trajs) {
    require(!trajs.empty(), "empty ensemble");
    const auto& s0 = trajs.front().samples;
    require(s0.count() > 0, "trajectories carry no samples");
    const std::size_t T = s0.count(), N = s0.ladder_size;
    const bool ladder = !s0.ladder.empty();
    const double K = static_cast<double>(trajs.size());
    EnsembleMoments m;
    m.times.resize(T);
    for (std::size_t k = 0; k < T; ++k) m.times[k] = static_cast<double>(k) * s0.dt;
    auto finish = [K](std::vector<double>& mean, std::vector<double>& sq) {
        std::vector<double> se(mean.size());
        for (std::size_t k = 0; k < mean.size(); ++k) {
            mean[k] /= K;
            const double var = K > 1 ? std::max(0.0, (sq[k] / K - mean[k] * mean[k]) * K / (K - 1.0)) : 0.0;
            se[k] = std::sqrt(var / K);
        }
        return se;
    };
    std::vector<double> sum(T, 0.0), sq(T, 0.0);
    for (const auto& tr : trajs) {
        require(tr.samples.count() == T, "trajectories sampled on different grids");
        for (std::size_t k = 0; k < T; ++k) {
            const double v = tr.samples.cavity[k];
            sum[k] += v;
            sq[k] += v * v;
        }
    }
    m.cavity_mean = sum;
    m.cavity_se = finish(m.cavity_mean, sq);
    if (ladder) {
        m.ladder_mean.assign(N, std::vector<double>(T, 0.0));
        m.ladder_se.resize(N);
        for (std::size_t p = 0; p < N; ++p) {
            std::vector<double> lsq(T, 0.0);
            for (const auto& tr : trajs)
                for (std::size_t k = 0; k < T; ++k) {
                    const double v = tr.samples.site(k, p);
                    m.ladder_mean[p][k] += v;
                    lsq[k] += v * v;
                }
            m.ladder_se[p] = finish(m.ladder_mean[p], lsq);
        }
    }
    return m;
}

/// Fixed-step scheme: every channel fires independently with probability rate*dt
/// per step (rates frozen at the start of the step). Carries O(dt) bias; kept only
/// to cross-check the exact kernel.
inline Trajectory simulate_trajectory_fixed_dt(const EnsembleSpec& spec, std::uint64_t seed, double dt,
                                               const TrajectoryOptions& opt = {}) {
    spec.params.validate();
    require(dt > 0.0 && spec.duration > 0.0, "need dt > 0 and duration > 0");
    Trajectory tr;
    tr.seed = seed;
    tr.duration = spec.duration;
    tr.initial = spec.initial;
    FockConfig cfg = spec.initial;
    Rng rng(seed);
    const bool sampling = opt.sample_dt > 0.0;
    const std::size_t n_samples = sampling ? detail::sample_count(spec.duration, opt.sample_dt) : 0;
    std::size_t next_sample = 0;
    if (sampling) {
        tr.samples.dt = opt.sample_dt;
        tr.samples.ladder_size = cfg.ladder.size();
    }
    const auto steps = static_cast<std::uint64_t>(std::llround(spec.duration / dt));
    for (std::uint64_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (sampling && next_sample < n_samples && static_cast<double>(next_sample) * opt.sample_dt <= t + 0.5 * dt) {
            detail::push_sample(tr.samples, cfg, opt.sample_ladder);
            ++next_sample;
        }
        if (k == steps) break;
        const auto table = jump_rate_table(cfg, spec.params);
        for (const auto& re : table) {
            if (rng.uniform() >= re.rate * dt) continue;
            FockConfig trial = cfg;
            try {
                apply_event(trial, re.event);
            } catch (const std::logic_error&) {
                continue; // an earlier event this step already emptied the source
            }
            cfg = std::move(trial);
            ++tr.event_count;
            if (re.event.kind == JumpKind::LossCavity) ++tr.emitted_count;
            if (opt.record_events) tr.events.push_back({t + dt, re.event});
        }
        if (tr.event_count > opt.event_cap) fail(ErrorKind::EventBudgetExceeded, "event cap exceeded");
    }
    tr.final = cfg;
    return tr;
}

// ---------------------------------------------------------------------------
// Truncated master equation (brute-force oracle)

struct MasterSolution {
    std::vector<double> times;
    std::vector<double> cavity_mean;
    std::vector<std::vector<double>> ladder_mean; // [site][time]
    std::vector<double> cavity_var;
    std::vector<std::vector<double>> ladder_var;  // [site][time]
    std::vector<double> leakage;                  // 1 - sum P at each time
};

struct MasterOptions {
    double leakage_limit = 1e-6;
    double rtol = 1e-10;
    double atol = 1e-14;
};

/// Integrates dP/dt for every configuration with all occupations <= n_max.
/// Transitions that would leave the box are dropped (their outflow remains), so
/// 1 - sum P is exactly the probability that has reached the truncation boundary.
inline MasterSolution truncated_master_integrate(const SystemParams& params, const FockConfig& initial,
                                                 std::span<const double> times, int n_max,
                                                 const MasterOptions& opt = {}) {
    params.validate();
    initial.validate(params.ladder_size);
    require(n_max >= 1, "n_max must be >= 1");
    require(!times.empty(), "need at least one output time");
    const std::size_t modes = static_cast<std::size_t>(params.ladder_size) + 1; // cavity first
    const double base = n_max + 1.0;
    require(std::pow(base, static_cast<double>(modes)) <= 1e7, "(n_max+1)^(N+1) exceeds 1e7 configurations");
    require(initial.cavity <= n_max, "initial cavity occupation outside truncation");
    for (auto v : initial.ladder) require(v <= n_max, "initial ladder occupation outside truncation");

    std::size_t states = 1;
    for (std::size_t m = 0; m < modes; ++m) states *= static_cast<std::size_t>(n_max + 1);
    auto encode = [&](const FockConfig& c) {
        std::size_t idx = static_cast<std::size_t>(c.cavity);
        for (auto v : c.ladder) idx = idx * static_cast<std::size_t>(n_max + 1) + static_cast<std::size_t>(v);
        return idx;
    };
    auto decode = [&](std::size_t idx) {
        FockConfig c;
        c.ladder.resize(modes - 1);
        for (std::size_t p = modes - 1; p-- > 0;) {
            c.ladder[p] = static_cast<Occupation>(idx % static_cast<std::size_t>(n_max + 1));
            idx /= static_cast<std::size_t>(n_max + 1);
        }
        c.cavity = static_cast<Occupation>(idx);
        return c;
    };

    struct Edge {
        std::uint32_t from, to;
        double rate;
    };
    std::vector<Edge> edges;
    std::vector<double> outflow(states, 0.0);
    std::vector<double> occ_cavity(states);
    std::vector<std::vector<double>> occ_ladder(modes - 1, std::vector<double>(states));
    for (std::size_t s = 0; s < states; ++s) {
        const FockConfig c = decode(s);
        occ_cavity[s] = static_cast<double>(c.cavity);
        for (std::size_t p = 0; p + 1 < modes; ++p) occ_ladder[p][s] = static_cast<double>(c.ladder[p]);
        for (const auto& re : jump_rate_table(c, params)) {
            outflow[s] += re.rate;
            FockConfig d = c;
            apply_event(d, re.event);
            bool inside = d.cavity <= n_max;
            for (auto v : d.ladder) inside = inside && v <= n_max;
            if (inside) edges.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(encode(d)), re.rate});
        }
    }

    std::vector<double> P(states, 0.0);
    P[encode(initial)] = 1.0;
    MasterSolution sol;
    auto observe = [&](double t, const std::vector<double>& y) {
        sol.times.push_back(t);
        double total = 0.0, nc = 0.0, nc2 = 0.0;
        for (std::size_t s = 0; s < states; ++s) {
            total += y[s];
            nc += y[s] * occ_cavity[s];
            nc2 += y[s] * occ_cavity[s] * occ_cavity[s];
        }
        sol.cavity_mean.push_back(nc);
        sol.cavity_var.push_back(nc2 - nc * nc);
        sol.leakage.push_back(1.0 - total);
        if (sol.ladder_mean.empty()) {
            sol.ladder_mean.resize(modes - 1);
            sol.ladder_var.resize(modes - 1);
        }
        for (std::size_t p = 0; p + 1 < modes; ++p) {
            double m = 0.0, m2 = 0.0;
            for (std::size_t s = 0; s < states; ++s) {
                m += y[s] * occ_ladder[p][s];
                m2 += y[s] * occ_ladder[p][s] * occ_ladder[p][s];
            }
            sol.ladder_mean[p].push_back(m);
            sol.ladder_var[p].push_back(m2 - m * m);
        }
    };
    auto rhs = [&](double, std::span<const double> y, std::span<double> dy) {
        for (std::size_t s = 0; s < states; ++s) dy[s] = -outflow[s] * y[s];
        for (const auto& e : edges) dy[e.to] += e.rate * y[e.from];
    };
    ode::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    ode::integrate(rhs, P, 0.0, times, observe, o);
    if (!sol.leakage.empty() && sol.leakage.back() > opt.leakage_limit)
        fail(ErrorKind::TruncationTooSmall, "probability " + std::to_string(sol.leakage.back()) +
                                                " reached the truncation boundary n_max=" + std::to_string(n_max));
    return sol;
}

// ---------------------------------------------------------------------------
// Photon-number detector

inline double default_detector_duration(const SystemParams& p) {
    require(p.intrinsic_loss > 0.0, "detector needs intrinsic_loss > 0");
    return 10.0 / p.intrinsic_loss;
}

/// Number of photons leaving the cavity in [0, T] after loading n1_init bosons into site 0.
inline std::uint64_t detector_run(const SystemParams& params, int n1_init, double duration, std::uint64_t seed) {
    params.validate();
    require(params.pump.gain_rate == 0.0 && params.pump.loss_rate == 0.0, "detector runs need the pump disabled");
    require(params.intrinsic_loss > 0.0, "detector runs need intrinsic_loss > 0");
    require(n1_init >= 0, "n1_init must be >= 0");
    EnsembleSpec spec;
    spec.params = params;
    spec.initial = FockConfig::empty(params.ladder_size);
    spec.initial.ladder[0] = n1_init;
    spec.duration = duration;
    TrajectoryOptions opt;
    opt.record_events = false;
    return simulate_trajectory(spec, seed, opt).emitted_count;
}

/// Emitted-photon counts for `runs` detector shots per initial load. Shot i of
/// load n uses seed derive_seed(derive_seed(master, n), i).
inline std::vector<std::vector<std::uint64_t>> detector_ensemble(const SystemParams& params,
                                                                 std::span<const int> n1_values, std::size_t runs,
                                                                 double duration, std::uint64_t master_seed,
                                                                 unsigned threads = 1) {
    require(runs >= 1, "detector needs at least one run per load");
    std::vector<std::vector<std::uint64_t>> out;
    for (int n1 : n1_values) {
        const auto base = derive_seed(master_seed, static_cast<std::uint64_t>(n1));
        out.push_back(parallel_map(runs, threads, [&](std::size_t i) {
            return detector_run(params, n1, duration, derive_seed(base, i));
        }));
    }
    return out;
}

struct Histogram {
    std::int64_t origin = 0; // left edge of bin 0
    std::int64_t width = 1;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
    std::int64_t bin_left(std::size_t i) const { return origin + static_cast<std::int64_t>(i) * width; }
};

/// Integer histogram with bins [origin + k*width, origin + (k+1)*width), origin = 0.
inline Histogram detector_histogram(std::span<const std::uint64_t> runs, std::int64_t width = 1) {
    require(!runs.empty(), "histogram needs at least one run");
    require(width >= 1, "bin width must be >= 1");
    Histogram h;
    h.width = width;
    const auto mx = *std::max_element(runs.begin(), runs.end());
    h.counts.assign(static_cast<std::size_t>(static_cast<std::int64_t>(mx) / width) + 1, 0);
    for (auto r : runs) ++h.counts[static_cast<std::size_t>(static_cast<std::int64_t>(r) / width)];
    return h;
}

/// Merges `factor` adjacent bins.
inline Histogram rebin(const Histogram& h, std::int64_t factor) {
    require(factor >= 1, "rebin factor must be >= 1");
    Histogram out;
    out.origin = h.origin;
    out.width = h.width * factor;
    out.counts.assign((h.counts.size() + static_cast<std::size_t>(factor) - 1) / static_cast<std::size_t>(factor), 0);
    for (std::size_t i = 0; i < h.counts.size(); ++i) out.counts[i / static_cast<std::size_t>(factor)] += h.counts[i];
    return out;
}

/// Shared probability mass sum_b min(p_a(b), p_b(b)) of two histograms on the same bins.
inline double overlap_fraction(const Histogram& a, const Histogram& b) {
    require(a.width == b.width && a.origin == b.origin, "histograms must share binning");
    const double ta = static_cast<double>(a.total()), tb = static_cast<double>(b.total());
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(a.counts.size(), b.counts.size()); ++i)
        s += std::min(static_cast<double>(a.counts[i]) / ta, static_cast<double>(b.counts[i]) / tb);
    return s;
}

} // namespace avalanche::stochastic
