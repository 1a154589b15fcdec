#include <cmath>
#include <span>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "avalanche/ode.hpp"

using avalanche::ode::integrate;

TEST(Ode, ExponentialDecayMatchesClosedForm) {
    std::vector<double> y{2.0};
    std::vector<double> times{0.5, 1.0, 2.0, 5.0};
    std::vector<double> got;
    avalanche::ode::Options o;
    o.rtol = o.atol = 1e-11;
    integrate([](double, std::span<const double> s, std::span<double> d) { d[0] = -1.3 * s[0]; }, y, 0.0, times,
              [&](double, const std::vector<double>& s) { got.push_back(s[0]); }, o);
    ASSERT_EQ(got.size(), times.size());
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(got[i], 2.0 * std::exp(-1.3 * times[i]), 1e-9);
}

TEST(Ode, DenseOutputOnHarmonicOscillator) {
    // fine output grid, so most samples come from the interpolant
    std::vector<double> y{1.0, 0.0};
    std::vector<double> times;
    for (int k = 1; k <= 400; ++k) times.push_back(0.05 * k);
    double worst = 0.0;
    std::size_t i = 0;
    avalanche::ode::Options o;
    o.rtol = o.atol = 1e-10;
    integrate([](double, std::span<const double> s, std::span<double> d) {
        d[0] = s[1];
        d[1] = -s[0];
    }, y, 0.0, times, [&](double t, const std::vector<double>& s) {
        worst = std::max(worst, std::abs(s[0] - std::cos(t)));
        worst = std::max(worst, std::abs(s[1] + std::sin(t)));
        ++i;
    }, o);
    EXPECT_EQ(i, times.size());
    EXPECT_LT(worst, 1e-7);
}

TEST(Ode, AgreesWithOdeintOnLotkaVolterra) {
    auto f = [](const std::vector<double>& s, std::vector<double>& d) {
        d[0] = 1.1 * s[0] - 0.4 * s[0] * s[1];
        d[1] = 0.1 * s[0] * s[1] - 0.4 * s[1];
    };
    std::vector<double> times{1, 5, 10, 20, 30};

    std::vector<double> ours;
    std::vector<double> y{10.0, 10.0};
    avalanche::ode::Options o;
    o.rtol = o.atol = 1e-11;
    integrate([&](double, std::span<const double> s, std::span<double> d) {
        std::vector<double> sv(s.begin(), s.end()), dv(2);
        f(sv, dv);
        d[0] = dv[0];
        d[1] = dv[1];
    }, y, 0.0, times, [&](double, const std::vector<double>& s) { ours.push_back(s[0]); }, o);

    namespace odeint = boost::numeric::odeint;
    std::vector<double> ref;
    std::vector<double> z{10.0, 10.0};
    std::vector<double> grid{0.0};
    grid.insert(grid.end(), times.begin(), times.end());
    auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<std::vector<double>>());
    odeint::integrate_times(stepper, [&](const std::vector<double>& s, std::vector<double>& d, double) { f(s, d); }, z,
                            grid.begin(), grid.end(), 1e-3,
                            [&](const std::vector<double>& s, double t) {
                                if (t > 0.0) ref.push_back(s[0]);
                            });
    ASSERT_EQ(ours.size(), times.size());
    ASSERT_EQ(ref.size(), times.size());
    for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(ours[i], ref[i], 1e-7 * std::max(1.0, ref[i]));
}

TEST(Ode, RejectingHookShrinksTheStep) {
    std::vector<double> y{1.0};
    std::vector<double> times{3.0};
    double last = 0.0;
    auto stats = integrate([](double, std::span<const double> s, std::span<double> d) { d[0] = -s[0]; }, y, 0.0, times,
                           [&](double, const std::vector<double>& s) { last = s[0]; },
                           [](std::vector<double>& s) { return s[0] > 0.0; });
    EXPECT_GT(stats.accepted, 0u);
    EXPECT_NEAR(last, std::exp(-3.0), 1e-6);
}
