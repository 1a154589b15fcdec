// core.hpp - model parameters, occupation states and the elementary rate formulas
//
// The ladder has N bosonic modes (sites 0..N-1 here; site 0 is the pumped mode,
// site N-1 the drained one) coupled to one cavity mode. A hop from site p to
// p+1 emits one cavity photon.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "avalanche/errors.hpp"

namespace avalanche {

/// Stimulated-gain and loss coefficients acting on the first ladder mode.
struct PumpSpec {
    double gain_rate = 0.0; // up:   gain_rate * (1 + n_1)
    double loss_rate = 0.0; // down: loss_rate * n_1

    /// Equal gain and loss; net injection equals g independent of n_1.
    static PumpSpec infinite_temperature(double g) { return {g, g}; }
    static PumpSpec pure_gain(double g) { return {g, 0.0}; }
    /// Literal reservoir weights (g*zeta, g*(1-zeta)).
    static PumpSpec lindblad(double g, double zeta) { return {g * zeta, g * (1.0 - zeta)}; }
    static PumpSpec off() { return {0.0, 0.0}; }

    bool operator==(const PumpSpec&) const = default;
};

struct SystemParams {
    int ladder_size = 10;       // N
    double hop_rate = 1.0;      // Gamma
    PumpSpec pump{};
    double cavity_loss = 0.0;   // kappa_c
    double last_loss = 0.0;     // kappa_l, acts on site N-1
    double intrinsic_loss = 0.0; // kappa_0, acts on every ladder site

    bool operator==(const SystemParams&) const = default;

    void validate() const {
        require(ladder_size >= 2, "ladder_size must be >= 2");
        auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
        require(std::isfinite(hop_rate) && hop_rate > 0.0, "hop_rate must be finite and > 0");
        require(finite_nonneg(pump.gain_rate), "pump gain_rate must be finite and >= 0");
        require(finite_nonneg(pump.loss_rate), "pump loss_rate must be finite and >= 0");
        require(finite_nonneg(cavity_loss), "cavity_loss must be finite and >= 0");
        require(finite_nonneg(last_loss), "last_loss must be finite and >= 0");
        require(finite_nonneg(intrinsic_loss), "intrinsic_loss must be finite and >= 0");
    }

    double max_rate() const {
        double m = hop_rate;
        for (double r : {pump.gain_rate, pump.loss_rate, cavity_loss, last_loss, intrinsic_loss})
            m = std::max(m, r);
        return m;
    }

    /// Returns a copy with every rate divided by s (the time axis stretched by s).
    SystemParams time_rescaled(double s) const {
        SystemParams p = *this;
        p.hop_rate /= s;
        p.pump.gain_rate /= s;
        p.pump.loss_rate /= s;
        p.cavity_loss /= s;
        p.last_loss /= s;
        p.intrinsic_loss /= s;
        return p;
    }
};

using Occupation = std::int64_t;

struct FockConfig {
    Occupation cavity = 0;
    std::vector<Occupation> ladder;

    static FockConfig empty(int n) { return {0, std::vector<Occupation>(static_cast<std::size_t>(n), 0)}; }

    Occupation ladder_total() const {
        Occupation s = 0;
        for (auto v : ladder) s += v;
        return s;
    }

    bool operator==(const FockConfig&) const = default;

    void validate(int ladder_size) const {
        require(static_cast<int>(ladder.size()) == ladder_size, "FockConfig ladder length must equal N");
        require(cavity >= 0, "cavity occupation must be >= 0");
        for (auto v : ladder) require(v >= 0, "ladder occupations must be >= 0");
    }
};

struct MeanFieldState {
    double amplitude = 0.0; // |alpha_c|
    std::vector<double> ladder;

    double cavity_occupation() const { return amplitude * amplitude; }

    static MeanFieldState seeded(int n, double amplitude) {
        return {amplitude, std::vector<double>(static_cast<std::size_t>(n), 0.0)};
    }
};

struct MeanFieldDerivative {
    double amplitude = 0.0;
    std::vector<double> ladder;
};

enum class JumpKind : std::uint8_t { Hop = 0, Gain1 = 1, Loss1 = 2, LossN = 3, LossCavity = 4, Loss0 = 5 };

inline const char* to_string(JumpKind k) {
    switch (k) {
        case JumpKind::Hop: return "Hop";
        case JumpKind::Gain1: return "Gain1";
        case JumpKind::Loss1: return "Loss1";
        case JumpKind::LossN: return "LossN";
        case JumpKind::LossCavity: return "LossCavity";
        case JumpKind::Loss0: return "Loss0";
    }
    return "?";
}

/// One jump. `site` is the hop source for Hop and the depleted site for Loss0;
/// it is 0 for Gain1/Loss1, N-1 for LossN and unused for LossCavity.
struct JumpEvent {
    JumpKind kind = JumpKind::Hop;
    std::uint16_t site = 0;

    bool operator==(const JumpEvent&) const = default;
};

struct RatedEvent {
    JumpEvent event;
    double rate = 0.0;
};

inline double bond_current(double n_source, double n_target, double hop_rate) {
    return hop_rate * n_source * (1.0 + n_target);
}

inline double cumulative_current(std::span<const double> ladder, double hop_rate) {
    double j = 0.0;
    for (std::size_t p = 0; p + 1 < ladder.size(); ++p) j += bond_current(ladder[p], ladder[p + 1], hop_rate);
    return j;
}

inline double cumulative_current(const MeanFieldState& s, const SystemParams& params) {
    return cumulative_current(s.ladder, params.hop_rate);
}

/// sum_p (-1)^p (n_p - n_1) with 1-based p, i.e. site 0 carries sign -1.
template <class T>
double staggered_population(std::span<const T> n) {
    if (n.empty()) return 0.0;
    const double first = static_cast<double>(n[0]);
    double s = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double sign = (i % 2 == 0) ? -1.0 : 1.0;
        s += sign * (static_cast<double>(n[i]) - first);
    }
    return s;
}

inline double staggered_population(const std::vector<double>& n) { return staggered_population(std::span<const double>(n)); }

/// Ladder part of the mean-field drift for a given cavity occupation.
/// Writes dn/dt into `out` and returns the un-enhanced cumulative current.
inline double ladder_drift(std::span<const double> n, double cavity_occupation, const SystemParams& params,
                           std::span<double> out) {
    const std::size_t N = n.size();
    const double enhance = 1.0 + cavity_occupation;
    double jcum = 0.0;
    for (std::size_t p = 0; p < N; ++p) out[p] = -params.intrinsic_loss * n[p];
    for (std::size_t p = 0; p + 1 < N; ++p) {
        const double j = bond_current(n[p], n[p + 1], params.hop_rate);
        jcum += j;
        out[p] -= enhance * j;
        out[p + 1] += enhance * j;
    }
    out[0] += params.pump.gain_rate * (1.0 + n[0]) - params.pump.loss_rate * n[0];
    out[N - 1] -= params.last_loss * n[N - 1];
    return jcum;
}

inline MeanFieldDerivative meanfield_drift(const MeanFieldState& s, const SystemParams& params) {
    MeanFieldDerivative d;
    d.ladder.resize(s.ladder.size());
    const double jcum = ladder_drift(s.ladder, s.cavity_occupation(), params, d.ladder);
    d.amplitude = 0.5 * (jcum - params.cavity_loss) * s.amplitude;
    return d;
}

/// All jump channels with non-zero rate for the given configuration.
inline std::vector<RatedEvent> jump_rate_table(const FockConfig& cfg, const SystemParams& params) {
    std::vector<RatedEvent> table;
    const std::size_t N = cfg.ladder.size();
    auto push = [&](JumpKind k, std::size_t site, double rate) {
        if (rate > 0.0) table.push_back({{k, static_cast<std::uint16_t>(site)}, rate});
    };
    const double stim = 1.0 + static_cast<double>(cfg.cavity);
    for (std::size_t p = 0; p + 1 < N; ++p)
        push(JumpKind::Hop, p,
             params.hop_rate * stim * static_cast<double>(cfg.ladder[p]) * (1.0 + static_cast<double>(cfg.ladder[p + 1])));
    push(JumpKind::Gain1, 0, params.pump.gain_rate * (1.0 + static_cast<double>(cfg.ladder[0])));
    push(JumpKind::Loss1, 0, params.pump.loss_rate * static_cast<double>(cfg.ladder[0]));
    push(JumpKind::LossN, N - 1, params.last_loss * static_cast<double>(cfg.ladder[N - 1]));
    push(JumpKind::LossCavity, 0, params.cavity_loss * static_cast<double>(cfg.cavity));
    for (std::size_t p = 0; p < N; ++p)
        push(JumpKind::Loss0, p, params.intrinsic_loss * static_cast<double>(cfg.ladder[p]));
    return table;
}

/// Applies one jump in place. Throws std::logic_error if an occupation would go negative.
inline void apply_event(FockConfig& cfg, const JumpEvent& e) {
    auto take = [](Occupation& v) {
        if (v <= 0) throw std::logic_error("jump would drive an occupation negative");
        --v;
    };
    switch (e.kind) {
        case JumpKind::Hop:
            take(cfg.ladder.at(e.site));
            ++cfg.ladder.at(e.site + 1u);
            ++cfg.cavity;
            break;
        case JumpKind::Gain1: ++cfg.ladder.at(0); break;
        case JumpKind::Loss1: take(cfg.ladder.at(0)); break;
        case JumpKind::LossN: take(cfg.ladder.back()); break;
        case JumpKind::LossCavity: take(cfg.cavity); break;
        case JumpKind::Loss0: take(cfg.ladder.at(e.site)); break;
    }
}

} // namespace avalanche
