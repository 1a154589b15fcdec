// meanfield.hpp - semiclassical cavity/ladder dynamics: integration, phase
// classification, pulsing period, and steady profiles of the bare ladder.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "avalanche/core.hpp"
#include "avalanche/errors.hpp"
#include "avalanche/ode.hpp"
#include "avalanche/parallel.hpp"

namespace avalanche::meanfield {

inline constexpr double default_seed_amplitude = 3.1622776601683795; // sqrt(10)

struct MeanFieldTrace {
    std::vector<double> times;
    std::vector<MeanFieldState> states;
    std::vector<double> cavity;    // n_c = a_c^2
    std::vector<double> staggered; // n_stag

    std::size_t size() const { return times.size(); }
    double t_end() const { return times.empty() ? 0.0 : times.back(); }
};

struct IntegrateOptions {
    double tol = 1e-8;
    std::size_t samples = 20001; // uniform grid including both end points
};

namespace detail {

// State layout: y[0] = ln a_c (ignored when the amplitude is exactly zero), y[1..N] = n_p.
// The logarithm keeps relative accuracy while the cavity sits many decades below 1
// between bursts, which is what sets the timing of the next burst.
struct LogSystem {
    const SystemParams& params;
    bool zero_amplitude;

    void operator()(double, std::span<const double> y, std::span<double> dy) const {
        const auto n = y.subspan(1);
        const double nc = zero_amplitude ? 0.0 : std::exp(2.0 * y[0]);
        const double jcum = ladder_drift(n, nc, params, dy.subspan(1));
        dy[0] = zero_amplitude ? 0.0 : 0.5 * (jcum - params.cavity_loss);
    }
};

inline MeanFieldState unpack(std::span<const double> y, bool zero_amplitude) {
    MeanFieldState s;
    s.amplitude = zero_amplitude ? 0.0 : std::exp(y[0]);
    s.ladder.assign(y.begin() + 1, y.end());
    return s;
}

} // namespace detail

/// Integrates the mean-field equations and samples them on `grid` (ascending, grid[0] >= 0;
/// the initial state is taken at t = 0).
inline MeanFieldTrace integrate(const SystemParams& params, const MeanFieldState& initial, std::span<const double> grid,
                                double tol = 1e-8) {
    params.validate();
    require(static_cast<int>(initial.ladder.size()) == params.ladder_size, "initial ladder length must equal N");
    require(initial.amplitude >= 0.0 && std::isfinite(initial.amplitude), "initial amplitude must be finite and >= 0");
    require(tol > 0.0 && tol <= 1e-2, "tol must be in (0, 1e-2]");
    require(!grid.empty() && grid.front() >= 0.0, "sample grid must be non-empty and start at t >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i) require(grid[i] > grid[i - 1], "sample grid must be strictly increasing");

    const bool zero_amp = initial.amplitude == 0.0;
    std::vector<double> y(initial.ladder.size() + 1);
    y[0] = zero_amp ? 0.0 : std::log(initial.amplitude);
    std::copy(initial.ladder.begin(), initial.ladder.end(), y.begin() + 1);

    MeanFieldTrace trace;
    trace.times.reserve(grid.size());
    trace.states.reserve(grid.size());
    auto observe = [&](double t, const std::vector<double>& state) {
        trace.times.push_back(t);
        trace.states.push_back(detail::unpack(state, zero_amp));
    };
    auto clamp = [tol](std::vector<double>& state) {
        double scale = 1.0;
        for (std::size_t i = 1; i < state.size(); ++i) scale = std::max(scale, state[i]);
        for (std::size_t i = 1; i < state.size(); ++i) {
            if (state[i] < 0.0) {
                if (state[i] <= -tol * scale) return false;
                state[i] = 0.0;
            }
        }
        return true;
    };
    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol;
    ode::integrate(detail::LogSystem{params, zero_amp}, y, 0.0, grid, observe, clamp, opt);

    trace.cavity.reserve(trace.size());
    trace.staggered.reserve(trace.size());
    for (const auto& s : trace.states) {
        trace.cavity.push_back(s.cavity_occupation());
        trace.staggered.push_back(staggered_population(s.ladder));
    }
    return trace;
}

inline std::vector<double> uniform_grid(double t_end, std::size_t samples) {
    require(samples >= 2, "need at least two samples");
    std::vector<double> g(samples);
    for (std::size_t i = 0; i < samples; ++i) g[i] = t_end * static_cast<double>(i) / static_cast<double>(samples - 1);
    g.back() = t_end;
    return g;
}

inline MeanFieldTrace integrate(const SystemParams& params, const MeanFieldState& initial, double t_end,
                                const IntegrateOptions& opt = {}) {
    require(t_end > 0.0, "t_end must be > 0");
    const auto grid = uniform_grid(t_end, opt.samples);
    return integrate(params, initial, std::span<const double>(grid), opt.tol);
}

// ---------------------------------------------------------------------------
// Period extraction

struct PeakOptions {
    double transient_fraction = 0.2;
    double threshold_sigmas = 0.5;
    std::size_t min_peaks = 4;
};

/// Times of the bursts in `signal`: one peak per excursion above mean + k*std of the
/// post-transient window, refined by a parabola through the three samples around the maximum.
inline std::vector<double> find_bursts(std::span<const double> times, std::span<const double> signal,
                                       const PeakOptions& opt = {}) {
    require(times.size() == signal.size(), "times and signal must have equal length");
    const std::size_t n = signal.size();
    const std::size_t start = static_cast<std::size_t>(std::floor(opt.transient_fraction * static_cast<double>(n)));
    std::vector<double> peaks;
    if (n < start + 3) return peaks;
    double mean = 0.0;
    for (std::size_t i = start; i < n; ++i) mean += signal[i];
    mean /= static_cast<double>(n - start);
    double var = 0.0;
    for (std::size_t i = start; i < n; ++i) var += (signal[i] - mean) * (signal[i] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n - start));
    if (sd == 0.0) return peaks;
    const double thr = mean + opt.threshold_sigmas * sd;

    std::size_t i = start;
    // skip an excursion already in progress at the window edge
    while (i < n && signal[i] > thr) ++i;
    while (i < n) {
        while (i < n && signal[i] <= thr) ++i;
        if (i >= n) break;
        std::size_t best = i;
        while (i < n && signal[i] > thr) {
            if (signal[i] > signal[best]) best = i;
            ++i;
        }
        if (i >= n) break; // excursion cut off by the end of the record
        double t = times[best];
        if (best > 0 && best + 1 < n) {
            const double y0 = signal[best - 1], y1 = signal[best], y2 = signal[best + 1];
            const double denom = y0 - 2.0 * y1 + y2;
            if (denom < 0.0) {
                const double shift = 0.5 * (y0 - y2) / denom;
                const double dt = 0.5 * (times[best + 1] - times[best - 1]);
                t += std::clamp(shift, -0.5, 0.5) * dt;
            }
        }
        peaks.push_back(t);
    }
    return peaks;
}

inline double median(std::vector<double> v) {
    require(!v.empty(), "median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Median spacing between bursts of the cavity occupation.
inline double extract_period(std::span<const double> times, std::span<const double> cavity, const PeakOptions& opt = {}) {
    const auto peaks = find_bursts(times, cavity, opt);
    if (peaks.size() < opt.min_peaks)
        fail(ErrorKind::TooFewPeaks, "found " + std::to_string(peaks.size()) + " bursts, need " +
                                         std::to_string(opt.min_peaks));
    std::vector<double> gaps;
    for (std::size_t i = 1; i < peaks.size(); ++i) gaps.push_back(peaks[i] - peaks[i - 1]);
    return median(std::move(gaps));
}

inline double extract_period(const MeanFieldTrace& trace, const PeakOptions& opt = {}) {
    return extract_period(trace.times, trace.cavity, opt);
}

// ---------------------------------------------------------------------------
// Phase classification

enum class Phase { NonLasing, Lasing, SelfPulsing };

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::NonLasing: return "NonLasing";
        case Phase::Lasing: return "Lasing";
        case Phase::SelfPulsing: return "SelfPulsing";
    }
    return "?";
}

struct PhaseLabel {
    Phase phase = Phase::NonLasing;
    double steady_cavity = 0.0;     // final n_c (terminal-window mean for SelfPulsing)
    double steady_staggered = 0.0;  // final n_stag
    double oscillation_amplitude = 0.0;
    double drift_norm = 0.0;
    std::optional<double> period;   // only for SelfPulsing
};

struct Thresholds {
    double lasing_occupation = 1e-3;   // eps_c
    double convergence = 1e-6;        // eps_d, multiplied by the largest rate
    double oscillation = 1e-2;        // eps_osc, relative to max n_c in the terminal window
    double terminal_fraction = 0.25;
    PeakOptions peaks{};
};

/// Largest |d/dt| over n_c and the ladder at the given state.
inline double drift_norm(const MeanFieldState& s, const SystemParams& params) {
    std::vector<double> dn(s.ladder.size());
    const double nc = s.cavity_occupation();
    const double jcum = ladder_drift(s.ladder, nc, params, dn);
    double norm = std::abs((jcum - params.cavity_loss) * nc);
    for (double v : dn) norm = std::max(norm, std::abs(v));
    return norm;
}

inline PhaseLabel classify_phase(const MeanFieldTrace& trace, const SystemParams& params, const Thresholds& th = {}) {
    require(trace.size() >= 8, "trace too short to classify");
    const std::size_t n = trace.size();
    const double t_cut = trace.t_end() * (1.0 - th.terminal_fraction);
    std::size_t w0 = 0;
    while (w0 < n && trace.times[w0] < t_cut) ++w0;
    require(n - w0 >= 4, "terminal window holds fewer than 4 samples");

    const auto window = std::span<const double>(trace.cavity).subspan(w0);
    const auto [mn, mx] = std::minmax_element(window.begin(), window.end());
    PhaseLabel label;
    label.oscillation_amplitude = *mx - *mn;
    label.steady_cavity = trace.cavity.back();
    label.steady_staggered = trace.staggered.back();
    label.drift_norm = drift_norm(trace.states.back(), params);
    const double eps_d = th.convergence * params.max_rate();
    const bool converged = label.drift_norm < eps_d;

    if (converged && label.steady_cavity < th.lasing_occupation) {
        label.phase = Phase::NonLasing;
        return label;
    }
    if (converged) {
        label.phase = Phase::Lasing;
        return label;
    }
    if (label.oscillation_amplitude > th.oscillation * *mx) {
        // persistence: the swing must not be dying out across the terminal window
        const std::size_t half = w0 + (n - w0) / 2;
        auto swing = [&](std::size_t a, std::size_t b) {
            const auto [lo, hi] = std::minmax_element(trace.cavity.begin() + a, trace.cavity.begin() + b);
            return *hi - *lo;
        };
        const double early = swing(w0, half), late = swing(half, n);
        if (late >= 0.5 * early) {
            try {
                label.period = extract_period(trace, th.peaks);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::TooFewPeaks) throw;
                fail(ErrorKind::Inconclusive, "oscillating but too few bursts: increase t_end");
            }
            label.phase = Phase::SelfPulsing;
            double mean = 0.0;
            for (double v : window) mean += v;
            label.steady_cavity = mean / static_cast<double>(window.size());
            return label;
        }
    }
    fail(ErrorKind::Inconclusive, "neither converged nor persistently oscillating: increase t_end");
}

struct ClassifyOptions {
    double seed_amplitude = default_seed_amplitude;
    double t_end = 0.0; // 0 selects 50 / min(kappa_c, gamma_g, Gamma) over the non-zero rates
    int max_doublings = 3;
    IntegrateOptions integrate{};
    Thresholds thresholds{};
};

inline double default_t_end(const SystemParams& p) {
    double m = p.hop_rate;
    for (double r : {p.cavity_loss, p.pump.gain_rate})
        if (r > 0.0) m = std::min(m, r);
    return 50.0 / m;
}

struct ClassifiedRun {
    PhaseLabel label;
    MeanFieldTrace trace;
};

/// Integrates from the seeded empty ladder and classifies, doubling t_end on Inconclusive.
inline ClassifiedRun classify_point(const SystemParams& params, const ClassifyOptions& opt = {}) {
    double t_end = opt.t_end > 0.0 ? opt.t_end : default_t_end(params);
    const auto initial = MeanFieldState::seeded(params.ladder_size, opt.seed_amplitude);
    for (int attempt = 0;; ++attempt) {
        auto trace = integrate(params, initial, t_end, opt.integrate);
        try {
            auto label = classify_phase(trace, params, opt.thresholds);
            return {label, std::move(trace)};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Inconclusive || attempt >= opt.max_doublings) throw;
        }
        t_end *= 2.0;
    }
}

// ---------------------------------------------------------------------------
// Sweeps

struct PhasePoint {
    double gain = 0.0;        // gamma_g
    double cavity_loss = 0.0; // kappa_c
    std::optional<PhaseLabel> label;
    std::string error;        // set when classification failed (e.g. Inconclusive)
};

/// Classifies every (gamma_g, kappa_c) pair; gamma_g replaces both pump coefficients
/// scaled like the base pump (base pump given for gamma_g = 1 is reproduced by
/// `pump_for(g)`). Output order is row-major over (gains, cavity_losses).
template <class PumpFor>
std::vector<PhasePoint> phase_diagram_sweep(const SystemParams& base, std::span<const double> gains,
                                            std::span<const double> cavity_losses, PumpFor&& pump_for,
                                            const ClassifyOptions& opt = {}, unsigned threads = 1) {
    const std::size_t total = gains.size() * cavity_losses.size();
    return parallel_map(total, threads, [&](std::size_t k) {
        PhasePoint pt;
        pt.gain = gains[k / cavity_losses.size()];
        pt.cavity_loss = cavity_losses[k % cavity_losses.size()];
        SystemParams p = base;
        p.pump = pump_for(pt.gain);
        p.cavity_loss = pt.cavity_loss;
        try {
            pt.label = classify_point(p, opt).label;
        } catch (const Error& e) {
            pt.error = e.what();
        }
        return pt;
    });
}

struct PeriodRow {
    SystemParams params;
    double gain = 0.0;
    std::optional<double> period;
    std::optional<double> rescaled_period; // sqrt(gamma_g Gamma) tau
    double cavity_over_gain = 0.0;         // kappa_c / gamma_g
    std::string status;                    // phase name or error text when no period
};

inline PeriodRow period_point(const SystemParams& p, const ClassifyOptions& opt = {}) {
    PeriodRow row;
    row.params = p;
    row.gain = p.pump.gain_rate;
    row.cavity_over_gain = p.cavity_loss / p.pump.gain_rate;
    try {
        const auto run = classify_point(p, opt);
        row.status = to_string(run.label.phase);
        if (run.label.period) {
            row.period = run.label.period;
            row.rescaled_period = std::sqrt(p.pump.gain_rate * p.hop_rate) * *run.label.period;
        }
    } catch (const Error& e) {
        row.status = e.what();
    }
    return row;
}

/// One row per grid point; points outside the self-pulsing phase carry no period.
inline std::vector<PeriodRow> period_scan(std::span<const SystemParams> grid, const ClassifyOptions& opt = {},
                                          unsigned threads = 1) {
    return parallel_map(grid.size(), threads, [&](std::size_t i) { return period_point(grid[i], opt); });
}

struct CollapseReport {
    double max_spread = std::numeric_limits<double>::quiet_NaN(); // max over x of (max-min)/mean
    double overlap_lo = 0.0, overlap_hi = 0.0;                    // kappa_c/gamma_g range compared
    std::size_t curves = 0;
    std::size_t probes = 0;
};

/// Rows are grouped into curves by (Gamma, kappa_c, kappa_l, N); each curve is
/// interpolated linearly in log(kappa_c/gamma_g) and compared on `probes` points
/// spanning the range every curve covers.
inline CollapseReport collapse_spread(std::span<const PeriodRow> rows, std::size_t probes = 25) {
    using Key = std::tuple<double, double, double, int>;
    std::map<Key, std::vector<std::pair<double, double>>> curves;
    for (const auto& r : rows) {
        if (!r.rescaled_period) continue;
        curves[{r.params.hop_rate, r.params.cavity_loss, r.params.last_loss, r.params.ladder_size}].emplace_back(
            std::log(r.cavity_over_gain), *r.rescaled_period);
    }
    CollapseReport rep;
    std::vector<std::vector<std::pair<double, double>>> usable;
    for (auto& [k, c] : curves) {
        if (c.size() < 2) continue;
        std::sort(c.begin(), c.end());
        usable.push_back(c);
    }
    rep.curves = usable.size();
    if (usable.size() < 2) return rep;
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (const auto& c : usable) {
        lo = std::max(lo, c.front().first);
        hi = std::min(hi, c.back().first);
    }
    if (!(lo < hi)) return rep;
    rep.overlap_lo = std::exp(lo);
    rep.overlap_hi = std::exp(hi);
    rep.probes = probes;
    auto interp = [](const std::vector<std::pair<double, double>>& c, double x) {
        auto it = std::lower_bound(c.begin(), c.end(), std::make_pair(x, -std::numeric_limits<double>::infinity()));
        if (it == c.begin()) return it->second;
        if (it == c.end()) return c.back().second;
        const auto& [x1, y1] = *it;
        const auto& [x0, y0] = *(it - 1);
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    };
    rep.max_spread = 0.0;
    for (std::size_t k = 0; k < probes; ++k) {
        const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(probes - 1);
        double mn = std::numeric_limits<double>::infinity(), mx = -mn, sum = 0.0;
        for (const auto& c : usable) {
            const double y = interp(c, x);
            mn = std::min(mn, y);
            mx = std::max(mx, y);
            sum += y;
        }
        rep.max_spread = std::max(rep.max_spread, (mx - mn) / (sum / static_cast<double>(usable.size())));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Bare-ladder (empty cavity) steady state

/// Backward recurrence n_N = J/kappa_l, n_p = (J/Gamma)/(1 + n_{p+1}).
inline std::vector<double> asip_steady_profile(double current, double hop_rate, double last_loss, int ladder_size) {
    require(ladder_size >= 1, "ladder_size must be >= 1");
    require(current >= 0.0 && hop_rate > 0.0 && last_loss > 0.0, "need J >= 0, Gamma > 0, kappa_l > 0");
    std::vector<double> n(static_cast<std::size_t>(ladder_size), 0.0);
    if (current == 0.0) return n;
    n.back() = current / last_loss;
    for (int p = ladder_size - 2; p >= 0; --p) n[p] = (current / hop_rate) / (1.0 + n[p + 1]);
    return n;
}

/// Positive root of Gamma n (1 + n) = gamma_g.
inline double boundary_occupation_n1(double gain, double hop_rate) {
    require(hop_rate > 0.0 && gain >= 0.0, "need Gamma > 0 and gamma_g >= 0");
    const double r = 4.0 * gain / hop_rate;
    // (-1 + sqrt(1 + r)) / 2 written without cancellation
    return 0.5 * r / (1.0 + std::sqrt(1.0 + r));
}

/// Propagation speed (sites per unit time) of small density perturbations.
inline double wave_speed(double n1, double hop_rate) {
    require(n1 >= 0.0, "n1 must be >= 0");
    return hop_rate * (1.0 + 2.0 * n1);
}

} // namespace avalanche::meanfield
