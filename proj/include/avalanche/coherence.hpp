// coherence.hpp - stochastic simulation -> noise spectrum -> beta

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avalanche/analysis.hpp"
#include "avalanche/parallel.hpp"
#include "avalanche/stochastic.hpp"

namespace avalanche::coherence {

struct CoherenceOptions {
    double duration = 400.0;  // analysed record length T
    double burn_in = 40.0;    // simulated before the record starts
    double sample_dt = 0.01;
    std::size_t trajectories = 100;
    std::uint64_t master_seed = 0;
    analysis::BetaOptions beta{};
};

struct CoherencePoint {
    SystemParams params;
    std::optional<analysis::BetaEstimate> estimate;
    double mean_cavity = 0.0;
    std::uint64_t events = 0;
    std::size_t degenerate = 0;
    std::string error;
};

/// Sampled n_c records of the ensemble with the burn-in removed.
inline std::vector<std::vector<double>> cavity_records(const SystemParams& params, const CoherenceOptions& opt,
                                                       unsigned threads, std::uint64_t* events = nullptr) {
    require(opt.duration > 0.0 && opt.sample_dt > 0.0 && opt.burn_in >= 0.0, "invalid coherence timing");
    stochastic::EnsembleSpec spec;
    spec.params = params;
    spec.initial = FockConfig::empty(params.ladder_size);
    spec.duration = opt.burn_in + opt.duration;
    spec.trajectories = opt.trajectories;
    spec.master_seed = opt.master_seed;
    stochastic::TrajectoryOptions topt;
    topt.sample_dt = opt.sample_dt;
    topt.record_events = false;
    topt.sample_ladder = false;
    const auto skip = static_cast<std::size_t>(std::llround(opt.burn_in / opt.sample_dt));
    const auto length = static_cast<std::size_t>(std::llround(opt.duration / opt.sample_dt));
    auto runs = parallel_map(spec.trajectories, threads, [&](std::size_t i) {
        const auto tr = stochastic::simulate_trajectory(spec, derive_seed(spec.master_seed, i), topt);
        std::vector<double> x(length);
        for (std::size_t k = 0; k < length; ++k) x[k] = tr.samples.cavity[skip + k];
        return std::make_pair(std::move(x), tr.event_count);
    });
    std::vector<std::vector<double>> out;
    out.reserve(runs.size());
    for (auto& [x, n] : runs) {
        if (events) *events += n;
        out.push_back(std::move(x));
    }
    return out;
}

inline CoherencePoint coherence_point(const SystemParams& params, const CoherenceOptions& opt, unsigned threads = 1) {
    CoherencePoint pt;
    pt.params = params;
    const auto records = cavity_records(params, opt, threads, &pt.events);
    std::size_t max_lag = records.front().size() / 2;
    if (opt.beta.spectrum.max_lag > 0.0)
        max_lag = std::min(max_lag, static_cast<std::size_t>(opt.beta.spectrum.max_lag / opt.sample_dt));

    auto lags = parallel_map(records.size(), threads, [&](std::size_t i) -> std::optional<std::vector<double>> {
        try {
            return analysis::normalized_autocorrelation(records[i], opt.sample_dt, max_lag);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateSeries) throw;
            return std::nullopt;
        }
    });
    std::vector<std::vector<double>> good;
    double sum = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (double v : records[i]) sum += v;
        if (lags[i]) good.push_back(std::move(*lags[i]));
        else ++pt.degenerate;
    }
    pt.mean_cavity = sum / static_cast<double>(records.size() * records.front().size());
    if (good.empty()) {
        pt.error = "AllDegenerate: every trajectory has a constant cavity record";
        return pt;
    }
    try {
        pt.estimate = analysis::beta_from_lags(good, opt.sample_dt, params.cavity_loss, opt.duration, opt.beta);
        pt.estimate->spectrum.skipped = pt.degenerate;
    } catch (const Error& e) {
        pt.error = e.what();
    }
    return pt;
}

/// One coherence point per gamma_g / kappa_c ratio; `pump_for(g)` builds the pump.
/// Points are evaluated in order, each using all workers for its ensemble.
template <class PumpFor>
std::vector<CoherencePoint> beta_sweep(const SystemParams& base, std::span<const double> gain_over_cavity,
                                       PumpFor&& pump_for, const CoherenceOptions& opt, unsigned threads = 1) {
    std::vector<CoherencePoint> out;
    for (double x : gain_over_cavity) {
        SystemParams p = base;
        p.pump = pump_for(x * base.cavity_loss);
        out.push_back(coherence_point(p, opt, threads));
    }
    return out;
}

} // namespace avalanche::coherence
