#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "avalanche/circuit.hpp"

using namespace avalanche;
namespace cc = avalanche::circuit;

namespace {

// Branch energy sum 3 a3 cos((psi+phi)/3) + 2 a2 cos((chi+phi)/2) + cos(theta+phi) in units of E_J.
double branch_sum(const cc::CircuitParams& c, double phi) {
    auto shifted_cos = [](const cc::AnglePair& a, double x) { return a.cos * std::cos(x) - a.sin * std::sin(x); };
    return 3.0 * c.alpha3 * shifted_cos(c.psi_third, phi / 3.0) + 2.0 * c.alpha2 * shifted_cos(c.chi_half, phi / 2.0) +
           shifted_cos(c.theta, phi);
}

// Taylor coefficients n! * c_n from a least-squares polynomial fit around phi = 0.
std::vector<double> fitted_derivatives(const cc::CircuitParams& c, int order) {
    const int deg = 12, pts = 61;
    const double span = 0.6;
    Eigen::MatrixXd A(pts, deg + 1);
    Eigen::VectorXd y(pts);
    for (int i = 0; i < pts; ++i) {
        const double x = span * (2.0 * i / (pts - 1) - 1.0);
        for (int k = 0; k <= deg; ++k) A(i, k) = std::pow(x / span, k);
        y(i) = branch_sum(c, x);
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    std::vector<double> d;
    double fact = 1.0;
    for (int n = 1; n <= order; ++n) {
        fact *= n;
        d.push_back(coef(n) / std::pow(span, n) * fact);
    }
    return d;
}

cc::CircuitParams quoted_branch() {
    cc::CircuitParams c;
    c.psi_third = cc::AnglePair::from_sine(0.85, true);
    c.chi_half = cc::AnglePair::from_sine(-0.88, true);
    c.theta = cc::AnglePair::from_sine(0.33);
    return c;
}

} // namespace

TEST(Circuit, BCoefficientsAreTaylorCoefficients) {
    for (const auto& c : {cc::CircuitParams{}, quoted_branch()}) {
        const auto d = fitted_derivatives(c, 6);
        for (int n = 1; n <= 6; ++n) EXPECT_NEAR(cc::b_coefficient(n, c), d[n - 1], 1e-6) << "n=" << n;
    }
}

TEST(Circuit, BCoefficientPeriodicity) {
    // a single junction branch: derivatives of cos(theta + phi) repeat with period 4
    cc::CircuitParams c = quoted_branch();
    c.alpha2 = 0.0;
    c.alpha3 = 0.0;
    for (int n = 1; n <= 5; ++n) EXPECT_NEAR(cc::b_coefficient(n + 4, c), cc::b_coefficient(n, c), 1e-15);
    EXPECT_NEAR(cc::b_coefficient(2, c), -c.theta.cos, 1e-15);
    EXPECT_NEAR(cc::b_coefficient(3, c), c.theta.sin, 1e-15);
}

TEST(Circuit, QuotedBranchCancelsLowOrders) {
    const auto r = cc::cancellation_residuals(quoted_branch());
    EXPECT_NEAR(r[0], 2.1 * 0.85 - 2.4 * 0.88 + 0.33, 1e-12);
    EXPECT_NEAR(r[2], 2.1 / 9 * 0.85 - 2.4 / 4 * 0.88 + 0.33, 1e-12);
    const auto b = quoted_branch();
    EXPECT_NEAR(cc::b_coefficient(1, b), -r[0], 1e-12);
    EXPECT_NEAR(cc::b_coefficient(2, b), -r[1], 1e-12);
    EXPECT_NEAR(cc::b_coefficient(3, b), r[2], 1e-12);
    EXPECT_NEAR(cc::b_coefficient(4, b), 0.7605, 1e-3);
}

TEST(Circuit, SignSearchFindsTheCancellingBranch) {
    const auto res = cc::sign_search(cc::CircuitParams{});
    EXPECT_NEAR(res.max_residual, cc::max_abs_residual(quoted_branch()), 1e-12);
    EXPECT_LT(res.max_residual, 6e-3);
    EXPECT_GE(res.assignment, 0);
    EXPECT_LT(res.assignment, 64);
    // the all-positive branch is no better
    EXPECT_LE(res.max_residual, cc::max_abs_residual(cc::CircuitParams{}));
}

TEST(Circuit, TableOneRates) {
    const cc::CircuitParams c;
    const double ratio = 160.0 / 4100.0;
    EXPECT_NEAR(cc::coupling_g(c), 2.0 * 50e9 * 0.33 / 15.0 * 0.25 * ratio * ratio, 1e-6);
    EXPECT_NEAR(cc::coupling_g(c), 837.6e3, 0.1e3);
    EXPECT_NEAR(cc::hopping_gamma(cc::coupling_g(c), 30e6), 93.5e3, 0.1e3);
    EXPECT_NEAR(cc::kerr_scale(c, 0.75), 28.55e6, 0.01e6);
    EXPECT_EQ(cc::kerr_scale(c, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(cc::modulation_frequency(c, 1), -300e6 + 3.6e9 + 10.7e9);
}

TEST(Circuit, HierarchyWithReferenceKerr) {
    const auto h = cc::hierarchy_check(cc::CircuitParams{}, 0.75, 1.0, 10.0, 200e6);
    EXPECT_NEAR(h.left, 28.55e6, 0.01e6);
    EXPECT_TRUE(h.kerr_below_width);
    EXPECT_TRUE(h.width_below_detuning);
    EXPECT_TRUE(h.satisfied());
    const auto tight = cc::hierarchy_check(cc::CircuitParams{}, 0.75, 1.0, 10.0, 80e6);
    EXPECT_FALSE(tight.width_below_detuning);
}

TEST(Circuit, DesignReportUsesSearchedBranch) {
    const auto rep = cc::design_report(cc::CircuitParams{});
    EXPECT_NEAR(std::abs(rep.b[3]), 0.75, 0.02);
    EXPECT_NEAR(rep.kerr_computed, cc::kerr_scale(rep.signs.best, rep.b[3]), 1e-6);
    cc::CircuitParams bad;
    bad.theta = {0.5, 0.5};
    EXPECT_THROW(cc::design_report(bad), Error);
}
