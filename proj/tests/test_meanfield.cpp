#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "avalanche/meanfield.hpp"

using namespace avalanche;
namespace mf = avalanche::meanfield;

namespace {

SystemParams ladder(int n, double gain, double kc, double kl) {
    SystemParams p;
    p.ladder_size = n;
    p.hop_rate = 1.0;
    p.pump = PumpSpec::infinite_temperature(gain);
    p.cavity_loss = kc;
    p.last_loss = kl;
    return p;
}

// Plain-variable mean-field right-hand side, written out independently of the library.
struct PlainRhs {
    SystemParams p;
    void operator()(const std::vector<double>& y, std::vector<double>& dy, double) const {
        const std::size_t N = y.size() - 1;
        const double a = y[0];
        const double nc = a * a;
        double jcum = 0.0;
        for (std::size_t i = 0; i <= N; ++i) dy[i] = 0.0;
        for (std::size_t q = 1; q < N; ++q) {
            const double j = p.hop_rate * y[q] * (1.0 + y[q + 1]);
            jcum += j;
            dy[q] -= (1.0 + nc) * j;
            dy[q + 1] += (1.0 + nc) * j;
        }
        dy[1] += p.pump.gain_rate * (1.0 + y[1]) - p.pump.loss_rate * y[1];
        dy[N] -= p.last_loss * y[N];
        dy[0] = 0.5 * (jcum - p.cavity_loss) * a;
    }
};

// Median spacing of local maxima of x above mean + 0.5 std after dropping the first fifth.
double naive_period(const std::vector<double>& t, const std::vector<double>& x) {
    const std::size_t start = x.size() / 5;
    double m = 0.0, s = 0.0;
    for (std::size_t i = start; i < x.size(); ++i) m += x[i];
    m /= static_cast<double>(x.size() - start);
    for (std::size_t i = start; i < x.size(); ++i) s += (x[i] - m) * (x[i] - m);
    s = std::sqrt(s / static_cast<double>(x.size() - start));
    std::vector<double> peaks;
    for (std::size_t i = start + 1; i + 1 < x.size(); ++i)
        if (x[i] > m + 0.5 * s && x[i] >= x[i - 1] && x[i] > x[i + 1]) peaks.push_back(t[i]);
    std::vector<double> gaps;
    for (std::size_t i = 1; i < peaks.size(); ++i) gaps.push_back(peaks[i] - peaks[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    return gaps.empty() ? 0.0 : gaps[gaps.size() / 2];
}

} // namespace

TEST(MeanField, PeriodAgreesWithOdeintIntegration) {
    const auto p = ladder(10, 12.0, 20.0, 10.0);
    const double t_end = 50.0;
    const std::size_t samples = 50001;

    namespace odeint = boost::numeric::odeint;
    std::vector<double> y(11, 0.0);
    y[0] = mf::default_seed_amplitude;
    std::vector<double> times, nc;
    for (std::size_t k = 0; k < samples; ++k) times.push_back(t_end * static_cast<double>(k) / (samples - 1));
    auto stepper = odeint::make_dense_output(1e-13, 1e-10, odeint::runge_kutta_dopri5<std::vector<double>>());
    odeint::integrate_times(stepper, PlainRhs{p}, y, times.begin(), times.end(), 1e-4,
                            [&](const std::vector<double>& s, double) { nc.push_back(s[0] * s[0]); });
    const double reference = naive_period(times, nc);
    ASSERT_GT(reference, 0.0);

    const auto trace = mf::integrate(p, MeanFieldState::seeded(10, mf::default_seed_amplitude), t_end, {1e-9, samples});
    const double tau = mf::extract_period(trace);
    EXPECT_NEAR(tau, reference, 0.01 * reference);
}

TEST(MeanField, TrajectoryAgreesWithOdeintBeforeFirstBurst) {
    const auto p = ladder(4, 2.0, 3.0, 1.0);
    namespace odeint = boost::numeric::odeint;
    std::vector<double> y(5, 0.0);
    y[0] = 0.5;
    std::vector<double> times{0.0, 0.5, 1.0, 2.0, 4.0};
    std::vector<std::vector<double>> ref;
    auto stepper = odeint::make_dense_output(1e-13, 1e-12, odeint::runge_kutta_dopri5<std::vector<double>>());
    odeint::integrate_times(stepper, PlainRhs{p}, y, times.begin(), times.end(), 1e-4,
                            [&](const std::vector<double>& s, double) { ref.push_back(s); });
    const auto trace = mf::integrate(p, MeanFieldState::seeded(4, 0.5), std::span<const double>(times), 1e-11);
    ASSERT_EQ(trace.size(), times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        EXPECT_NEAR(trace.states[k].amplitude, ref[k][0], 1e-8);
        for (std::size_t q = 0; q < 4; ++q) EXPECT_NEAR(trace.states[k].ladder[q], ref[k][q + 1], 1e-8);
    }
}

TEST(MeanField, ZeroAmplitudeStaysZero) {
    const auto p = ladder(5, 30.0, 1.0, 1.0);
    const auto trace = mf::integrate(p, MeanFieldState::seeded(5, 0.0), 10.0, {1e-8, 101});
    for (double v : trace.cavity) EXPECT_EQ(v, 0.0);
}

TEST(MeanField, AsipProfileCarriesUniformCurrent) {
    for (double J : {0.3, 2.0, 17.0}) {
        const auto n = mf::asip_steady_profile(J, 1.5, 4.0, 12);
        for (std::size_t q = 0; q + 1 < n.size(); ++q) EXPECT_NEAR(1.5 * n[q] * (1.0 + n[q + 1]), J, 1e-12 * J);
        EXPECT_NEAR(4.0 * n.back(), J, 1e-12 * J);
    }
    const auto zero = mf::asip_steady_profile(0.0, 1.0, 1.0, 3);
    for (double v : zero) EXPECT_EQ(v, 0.0);
}

TEST(MeanField, BareLadderRelaxesToAsipProfile) {
    // with the cavity strongly damped the ladder carries the injected current gamma_g
    const auto p = ladder(6, 2.0, 100.0, 3.0);
    const auto trace = mf::integrate(p, MeanFieldState::seeded(6, 1.0), 200.0, {1e-10, 201});
    const auto expected = mf::asip_steady_profile(2.0, 1.0, 3.0, 6);
    for (std::size_t q = 0; q < 6; ++q) EXPECT_NEAR(trace.states.back().ladder[q], expected[q], 1e-6 * (1 + expected[q]));
}

TEST(MeanField, BoundaryOccupationRoot) {
    for (double g : {0.0, 1e-9, 0.5, 12.0, 1e6}) {
        const double n = mf::boundary_occupation_n1(g, 2.0);
        EXPECT_NEAR(2.0 * n * (1.0 + n), g, 1e-12 * std::max(1.0, g));
        EXPECT_GE(n, 0.0);
    }
    EXPECT_DOUBLE_EQ(mf::wave_speed(0.5, 2.0), 4.0);
}

TEST(MeanField, ExtractPeriodOfSyntheticBursts) {
    std::vector<double> t, x;
    const double tau = 1.7;
    for (int k = 0; k < 20000; ++k) {
        t.push_back(0.002 * k);
        const double phase = std::fmod(t.back(), tau) - tau / 2;
        x.push_back(std::exp(-phase * phase / 0.01));
    }
    EXPECT_NEAR(mf::extract_period(t, x), tau, 1e-3);
    EXPECT_THROW(mf::extract_period(std::span<const double>(t).first(400), std::span<const double>(x).first(400)), Error);
}

TEST(MeanField, ClassifiesDecayAsNonLasing) {
    const auto p = ladder(10, 0.5, 20.0, 10.0);
    const auto run = mf::classify_point(p);
    EXPECT_EQ(run.label.phase, mf::Phase::NonLasing);
    EXPECT_LT(run.label.steady_cavity, 1e-3);
}

TEST(MeanField, CollapseSpreadOfScaledCurves) {
    std::vector<mf::PeriodRow> rows;
    for (int c = 0; c < 2; ++c)
        for (double x : {1.0, 2.0, 4.0, 8.0}) {
            mf::PeriodRow r;
            r.params = ladder(10, 1.0, 1.0 + c, 1.0);
            r.cavity_over_gain = x;
            r.rescaled_period = (c == 0 ? 1.0 : 1.2) * std::log(1.0 + x);
            rows.push_back(r);
        }
    const auto rep = mf::collapse_spread(rows, 11);
    EXPECT_EQ(rep.curves, 2u);
    EXPECT_NEAR(rep.max_spread, 0.2 / 1.1, 1e-12);
    EXPECT_NEAR(rep.overlap_lo, 1.0, 1e-12);
    EXPECT_NEAR(rep.overlap_hi, 8.0, 1e-12);
}
