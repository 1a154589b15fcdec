// analysis.hpp - autocorrelation, normalized noise spectrum, peak statistics and
// the coherence parameter beta = (omega_max / delta_omega) * S(omega_max).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "avalanche/errors.hpp"
#include "avalanche/rng.hpp"

namespace avalanche::analysis {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

struct Autocorrelation {
    double lag_dt = 0.0;
    std::vector<double> values; // C(k * lag_dt), k = 0..max_lag

    double variance() const { return values.front(); }
};

/// C(s) = <x(t) x(t+s)>_overlap - mean^2 for lags up to half the record.
///
/// The overlap average at lag k runs over the n-k available pairs (no periodic
/// wrap); the mean is the full-record mean, so C(0) is the sample variance.
inline Autocorrelation autocorrelation(std::span<const double> series, double dt, std::size_t max_lag = 0) {
    const std::size_t n = series.size();
    require(n >= 2, "autocorrelation needs at least two samples");
    require(dt > 0.0, "sample spacing must be > 0");
    if (max_lag == 0 || max_lag > n / 2) max_lag = n / 2;

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;

    double c0 = 0.0;
    for (double v : centered) c0 += v * v;
    c0 /= static_cast<double>(n);
    if (!(c0 > 1e-14 * std::max(mean * mean, 1e-300))) fail(ErrorKind::DegenerateSeries, "series has zero variance");

    // sum_i x'_i x'_{i+k} through a zero-padded FFT
    const std::size_t M = next_pow2(2 * n);
    std::vector<double> padded(M, 0.0);
    std::copy(centered.begin(), centered.end(), padded.begin());
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, padded);
    for (auto& z : spec) z = std::complex<double>(std::norm(z), 0.0);
    std::vector<std::complex<double>> raw;
    fft.inv(raw, spec);

    // head(k) = sum_{i < n-k} x'_i, tail(k) = sum_{i >= k} x'_i
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + centered[i];
    Autocorrelation ac;
    ac.lag_dt = dt;
    ac.values.resize(max_lag + 1);
    ac.values[0] = c0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        const double head = prefix[n - k];
        const double tail = prefix[n] - prefix[k];
        ac.values[k] = (raw[k].real() + mean * (head + tail)) / static_cast<double>(n - k);
    }
    return ac;
}

/// Tukey taper on lags 0..L: flat up to flat_fraction * L, raised-cosine to zero at L.
inline std::vector<double> tukey_window(std::size_t max_lag, double flat_fraction) {
    require(flat_fraction >= 0.0 && flat_fraction <= 1.0, "flat fraction must lie in [0, 1]");
    std::vector<double> w(max_lag + 1, 1.0);
    const double L = static_cast<double>(max_lag);
    const double flat = flat_fraction * L;
    const double taper = L - flat;
    for (std::size_t k = 0; k <= max_lag; ++k) {
        const double s = static_cast<double>(k);
        if (s > flat && taper > 0.0) w[k] = 0.5 * (1.0 + std::cos(std::numbers::pi * (s - flat) / taper));
    }
    return w;
}

struct SpectrumOptions {
    double tukey_flat = 0.8;
    double max_lag = 0.0;   // time; 0 means half of the shortest record
    std::size_t pad_factor = 4;
    double omega_max = 0.0; // keep omega <= omega_max in the result; 0 keeps up to Nyquist
};

struct SpectrumResult {
    std::vector<double> omega; // angular frequency, >= 0
    std::vector<double> S;
    double lag_dt = 0.0;
    std::size_t max_lag = 0;
    std::size_t used = 0;     // non-degenerate records averaged
    std::size_t skipped = 0;  // degenerate records excluded
    double imag_residue = 0.0; // max |Im| / max |Re| of the transform
    double record_duration = 0.0;
};

/// Normalized lag function <C(s)/C(0)> for one record.
inline std::vector<double> normalized_autocorrelation(std::span<const double> series, double dt, std::size_t max_lag) {
    auto ac = autocorrelation(series, dt, max_lag);
    const double c0 = ac.values.front();
    for (auto& v : ac.values) v /= c0;
    return std::move(ac.values);
}

/// S(omega) = kappa_c * int ds rho(s) w(s) e^{i omega s} for an even, windowed lag function
/// rho given on lags 0..L; evaluated on the FFT grid omega_j = 2 pi j / (M dt).
inline SpectrumResult spectrum_from_lags(std::span<const double> rho, double dt, double cavity_loss,
                                         const SpectrumOptions& opt = {}) {
    require(rho.size() >= 2, "need at least one non-zero lag");
    const std::size_t L = rho.size() - 1;
    const auto w = tukey_window(L, opt.tukey_flat);
    const std::size_t M = next_pow2(2 * L + 1) * std::max<std::size_t>(opt.pad_factor, 1);
    std::vector<std::complex<double>> g(M, 0.0);
    g[0] = rho[0] * w[0];
    for (std::size_t k = 1; k <= L; ++k) {
        g[k] = rho[k] * w[k];
        g[M - k] = rho[k] * w[k];
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> G;
    fft.fwd(G, g);
    SpectrumResult res;
    res.lag_dt = dt;
    res.max_lag = L;
    double max_re = 0.0, max_im = 0.0;
    const double d_omega = 2.0 * std::numbers::pi / (static_cast<double>(M) * dt);
    for (std::size_t j = 0; j <= M / 2; ++j) {
        // FFT uses e^{-i...}; the transform of an even sequence is real either way
        max_re = std::max(max_re, std::abs(G[j].real()));
        max_im = std::max(max_im, std::abs(G[j].imag()));
        const double om = d_omega * static_cast<double>(j);
        if (opt.omega_max > 0.0 && om > opt.omega_max) continue;
        res.omega.push_back(om);
        res.S.push_back(cavity_loss * dt * G[j].real());
    }
    res.imag_residue = max_re > 0.0 ? max_im / max_re : 0.0;
    return res;
}

/// Direct evaluation of the windowed transform at one frequency (any sign); O(L).
inline std::complex<double> spectrum_at(std::span<const double> rho, double dt, double cavity_loss, double omega,
                                        double tukey_flat = 0.8) {
    const std::size_t L = rho.size() - 1;
    const auto w = tukey_window(L, tukey_flat);
    std::complex<double> acc = rho[0] * w[0];
    for (std::size_t k = 1; k <= L; ++k) {
        const double s = static_cast<double>(k) * dt;
        acc += rho[k] * w[k] * (std::exp(std::complex<double>(0.0, omega * s)) + std::exp(std::complex<double>(0.0, -omega * s)));
    }
    return cavity_loss * dt * acc;
}

/// Averages per-record normalized autocorrelations (records already reduced to
/// their lag functions) and transforms.
inline std::vector<double> average_lags(std::span<const std::vector<double>> lag_functions) {
    require(!lag_functions.empty(), "no lag functions to average");
    std::size_t L = lag_functions.front().size();
    for (const auto& r : lag_functions) L = std::min(L, r.size());
    std::vector<double> avg(L, 0.0);
    for (const auto& r : lag_functions)
        for (std::size_t k = 0; k < L; ++k) avg[k] += r[k];
    for (auto& v : avg) v /= static_cast<double>(lag_functions.size());
    return avg;
}

/// Trajectory-averaged normalized noise spectrum from uniformly sampled n_c records.
inline SpectrumResult noise_spectrum(std::span<const std::vector<double>> records, double dt, double cavity_loss,
                                     const SpectrumOptions& opt = {}) {
    require(!records.empty(), "no records");
    std::size_t shortest = records.front().size();
    for (const auto& r : records) shortest = std::min(shortest, r.size());
    std::size_t max_lag = shortest / 2;
    if (opt.max_lag > 0.0) max_lag = std::min(max_lag, static_cast<std::size_t>(opt.max_lag / dt));
    std::vector<std::vector<double>> lags;
    std::size_t skipped = 0;
    for (const auto& r : records) {
        try {
            lags.push_back(normalized_autocorrelation(r, dt, max_lag));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateSeries) throw;
            ++skipped;
        }
    }
    if (lags.empty()) fail(ErrorKind::AllDegenerate, "every record has zero variance");
    auto res = spectrum_from_lags(average_lags(lags), dt, cavity_loss, opt);
    res.used = lags.size();
    res.skipped = skipped;
    res.record_duration = static_cast<double>(shortest) * dt;
    return res;
}

struct PeakStats {
    double omega_max = 0.0;
    double S_max = 0.0;
    double half_width = 0.0;  // HWHM
    bool one_sided = false;   // only one half-maximum crossing was found
    double bins_in_peak = 0.0; // full width at half maximum in grid steps
};

/// Largest S at omega >= omega_floor, with the half width from linearly
/// interpolated half-maximum crossings.
inline PeakStats peak_stats(std::span<const double> omega, std::span<const double> S, double omega_floor) {
    require(omega.size() == S.size() && omega.size() >= 3, "peak_stats needs matching grids of >= 3 points");
    std::size_t first = 0;
    while (first < omega.size() && omega[first] < omega_floor) ++first;
    if (first + 2 > omega.size()) fail(ErrorKind::NoInteriorPeak, "no grid points above omega_floor");
    std::size_t jmax = first;
    for (std::size_t j = first; j < S.size(); ++j)
        if (S[j] > S[jmax]) jmax = j;
    if (jmax == first) fail(ErrorKind::NoInteriorPeak, "maximum sits at omega_floor");
    if (jmax + 1 == S.size()) fail(ErrorKind::NoInteriorPeak, "maximum sits at the grid edge");
    PeakStats ps;
    ps.omega_max = omega[jmax];
    ps.S_max = S[jmax];
    const double half = 0.5 * ps.S_max;
    auto cross = [&](std::size_t inside, std::size_t outside) {
        const double t = (S[inside] - half) / (S[inside] - S[outside]);
        return omega[inside] + t * (omega[outside] - omega[inside]);
    };
    std::optional<double> right, left;
    for (std::size_t j = jmax + 1; j < S.size(); ++j)
        if (S[j] < half) {
            right = cross(j - 1, j);
            break;
        }
    for (std::size_t j = jmax; j-- > 0;)
        if (S[j] < half) {
            left = cross(j + 1, j);
            break;
        }
    if (!left && !right) fail(ErrorKind::NoInteriorPeak, "no half-maximum crossing on either side");
    if (left && right) {
        ps.half_width = 0.5 * (*right - *left);
    } else {
        ps.one_sided = true;
        ps.half_width = right ? *right - ps.omega_max : ps.omega_max - *left;
    }
    const double step = omega[1] - omega[0];
    ps.bins_in_peak = 2.0 * ps.half_width / step;
    return ps;
}

inline double default_omega_floor(double record_duration) { return 2.0 * std::numbers::pi / (record_duration / 4.0); }

inline double coherence_beta(const PeakStats& p) {
    require(p.half_width > 0.0, "half width must be > 0");
    return p.omega_max / p.half_width * p.S_max;
}

struct BetaEstimate {
    SpectrumResult spectrum;
    PeakStats peak;
    double beta = 0.0;
    double beta_error = 0.0; // bootstrap standard deviation over records
    std::size_t bootstrap_failures = 0;
};

struct BetaOptions {
    SpectrumOptions spectrum{};
    double omega_floor = 0.0; // 0 selects 2 pi / (T/4)
    std::size_t bootstrap = 100;
    std::uint64_t bootstrap_seed = 0;
};

/// Spectrum, peak and beta from per-record lag functions, with a bootstrap over records.
inline BetaEstimate beta_from_lags(std::span<const std::vector<double>> lags, double dt, double cavity_loss,
                                   double record_duration, const BetaOptions& opt = {}) {
    require(!lags.empty(), "no lag functions");
    BetaEstimate est;
    est.spectrum = spectrum_from_lags(average_lags(lags), dt, cavity_loss, opt.spectrum);
    est.spectrum.used = lags.size();
    est.spectrum.record_duration = record_duration;
    const double floor = opt.omega_floor > 0.0 ? opt.omega_floor : default_omega_floor(record_duration);
    est.peak = peak_stats(est.spectrum.omega, est.spectrum.S, floor);
    est.beta = coherence_beta(est.peak);
    if (opt.bootstrap == 0 || lags.size() < 2) return est;

    Rng rng(derive_seed(opt.bootstrap_seed, 0xB007));
    std::vector<double> betas;
    const std::size_t L = est.spectrum.max_lag + 1;
    std::vector<double> avg(L);
    for (std::size_t b = 0; b < opt.bootstrap; ++b) {
        std::fill(avg.begin(), avg.end(), 0.0);
        for (std::size_t i = 0; i < lags.size(); ++i) {
            const auto& pick = lags[static_cast<std::size_t>(rng.uniform() * static_cast<double>(lags.size()))];
            for (std::size_t k = 0; k < L; ++k) avg[k] += pick[k];
        }
        for (auto& v : avg) v /= static_cast<double>(lags.size());
        try {
            const auto sp = spectrum_from_lags(avg, dt, cavity_loss, opt.spectrum);
            betas.push_back(coherence_beta(peak_stats(sp.omega, sp.S, floor)));
        } catch (const Error&) {
            ++est.bootstrap_failures;
        }
    }
    if (betas.size() >= 2) {
        double m = 0.0;
        for (double v : betas) m += v;
        m /= static_cast<double>(betas.size());
        double var = 0.0;
        for (double v : betas) var += (v - m) * (v - m);
        est.beta_error = std::sqrt(var / static_cast<double>(betas.size() - 1));
    }
    return est;
}

} // namespace avalanche::analysis
