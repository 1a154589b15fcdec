// ode.hpp - Dormand-Prince 5(4) integrator with step-size control and dense output

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "avalanche/errors.hpp"

namespace avalanche::ode {

struct Options {
    double rtol = 1e-8;
    double atol = 1e-8;
    double initial_step = 0.0; // 0 picks a step from the initial derivative
    double max_step = 0.0;     // 0 means unbounded
    std::size_t max_steps = 50'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

namespace detail {
// Butcher tableau (Hairer & Wanner, DOPRI5).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension of order 4
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
} // namespace detail

/// Integrates y' = rhs(t, y, dy) from t0 to the last entry of `out_times`.
///
/// `observe(t, y)` is called once per requested output time (ascending, all
/// >= t0) with the dense-output interpolant. `fix_step(y)` runs on every
/// candidate step; it may project the state in place and returns false to
/// reject the step (the step is then retried with a smaller h).
template <class Rhs, class Observe, class FixStep>
    requires std::predicate<FixStep&, std::vector<double>&>
Stats integrate(Rhs&& rhs, std::vector<double>& y, double t0, std::span<const double> out_times, Observe&& observe,
                FixStep&& fix_step, const Options& opt = {}) {
    using namespace detail;
    Stats stats;
    const std::size_t n = y.size();
    if (out_times.empty()) return stats;
    const double t_end = out_times.back();
    std::size_t next_out = 0;
    while (next_out < out_times.size() && out_times[next_out] <= t0) observe(out_times[next_out++], y);
    if (next_out == out_times.size()) return stats;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y1(n), y1_raw(n);
    std::vector<double> r1(n), r2(n), r3(n), r4(n), r5(n), dense(n);
    auto eval = [&](double t, const std::vector<double>& state, std::vector<double>& out) {
        rhs(t, std::span<const double>(state), std::span<double>(out));
        ++stats.rhs_evals;
    };

    double t = t0;
    eval(t, y, k1);

    auto scale = [&](double a, double b) { return opt.atol + opt.rtol * std::max(std::abs(a), std::abs(b)); };

    double h = opt.initial_step;
    if (h <= 0.0) {
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = scale(y[i], y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1n += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / n);
        d1n = std::sqrt(d1n / n);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h = std::min(h, t_end - t0);
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

    const double safety = 0.9, min_factor = 0.2, max_factor = 10.0;
    bool last_rejected = false;

    while (t < t_end) {
        if (stats.accepted + stats.rejected >= opt.max_steps)
            fail(ErrorKind::StepSizeUnderflow, "step budget exhausted at t=" + std::to_string(t));
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            fail(ErrorKind::StepSizeUnderflow, "step size underflow at t=" + std::to_string(t));
        if (t + h > t_end) h = t_end - t;

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        eval(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        eval(t + h, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        eval(t + h, y1, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = scale(y[i], y1[i]);
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err)) err = 1e10;

        bool accept = err <= 1.0;
        if (accept) {
            // the projection may only touch y1; k7 stays the slope at the raw endpoint
            y1_raw = y1;
            if (!fix_step(y1)) {
                accept = false;
                err = 1e3;
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    const double diff = y1_raw[i] - y[i];
                    const double bspl = h * k1[i] - diff;
                    r1[i] = y[i];
                    r2[i] = diff;
                    r3[i] = bspl;
                    r4[i] = diff - h * k7[i] - bspl;
                    r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                const double t_new = (t + h >= t_end) ? t_end : t + h;
                while (next_out < out_times.size() && out_times[next_out] <= t_new) {
                    const double theta = (out_times[next_out] - t) / h;
                    const double theta1 = 1.0 - theta;
                    for (std::size_t i = 0; i < n; ++i)
                        dense[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
                    if (out_times[next_out] == t_new) dense = y1;
                    if (!fix_step(dense)) {
                        // interpolant dipped slightly below the admissible set; clamp via endpoint
                        dense = y1;
                    }
                    observe(out_times[next_out++], dense);
                }
                const bool projected = (y1 != y1_raw);
                y.swap(y1);
                t = t_new;
                ++stats.accepted;
                if (projected) eval(t, y, k1);
                else k1.swap(k7);
            }
        }

        const double fac = std::clamp(safety * std::pow(std::max(err, 1e-10), -0.2), min_factor, max_factor);
        if (accept) {
            h *= last_rejected ? std::min(1.0, fac) : fac;
            last_rejected = false;
        } else {
            ++stats.rejected;
            h *= std::min(1.0, fac);
            last_rejected = true;
        }
        if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
    }
    return stats;
}

template <class Rhs, class Observe>
Stats integrate(Rhs&& rhs, std::vector<double>& y, double t0, std::span<const double> out_times, Observe&& observe,
                const Options& opt = {}) {
    return integrate(std::forward<Rhs>(rhs), y, t0, out_times, std::forward<Observe>(observe),
                     [](std::vector<double>&) { return true; }, opt);
}

} // namespace avalanche::ode
