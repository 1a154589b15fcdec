// circuit.hpp - SNAIL-type coupler design formulas
//
// All frequencies are ordinary frequencies (Hz), matching how circuit
// parameters are usually tabulated; divide angular quantities by 2 pi before
// passing them in.

#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "avalanche/errors.hpp"

namespace avalanche::circuit {

inline constexpr double reference_impedance = 4100.0; // hbar / e^2 in Ohm

/// An angle stored by its sine and cosine so that the quadrant is explicit.
struct AnglePair {
    double sin = 0.0;
    double cos = 1.0;

    static AnglePair from_sine(double s, bool negative_cosine = false) {
        const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
        return {s, negative_cosine ? -c : c};
    }
    static AnglePair from_angle(double radians) { return {std::sin(radians), std::cos(radians)}; }
};

struct CircuitParams {
    double josephson_energy = 50e9; // E_J / h
    double alpha2 = 2.4;
    double alpha3 = 2.1;
    AnglePair psi_third = AnglePair::from_sine(0.85);  // psi / 3
    AnglePair chi_half = AnglePair::from_sine(0.88);   // chi / 2
    AnglePair theta = AnglePair::from_sine(0.33);
    double impedance = 160.0;
    double impedance_ref = reference_impedance;
    double flux_modulation = 0.25;
    double waste_loss = 30e6; // kappa_b
    int ladder_size = 5;
    double ladder_top = 4.7e9;     // omega_1
    double ladder_spacing = 300e6; // omega_p = omega_1 - (p-1) * spacing
    double cavity_frequency = 3.6e9;
    double waste_frequency = 10.7e9;
    double cavity_loss = 1e6;
    double intrinsic_loss = 20e3;

    void validate() const {
        for (const AnglePair* a : {&psi_third, &chi_half, &theta})
            require(std::abs(a->sin * a->sin + a->cos * a->cos - 1.0) <= 1e-6, "angle pair must satisfy sin^2 + cos^2 = 1");
        require(josephson_energy > 0 && impedance > 0 && impedance_ref > 0, "E_J and impedances must be positive");
        require(waste_loss > 0 && cavity_loss > 0 && intrinsic_loss > 0, "all rates must be positive");
        require(flux_modulation >= 0, "flux modulation must be non-negative");
        require(ladder_size >= 1, "ladder_size must be >= 1");
    }

    double impedance_ratio_sq() const { return (impedance / impedance_ref) * (impedance / impedance_ref); }
};

/// Expansion coefficient B_n, n >= 1: the n-th derivative at phi = 0 of
/// 3 a3 cos((psi + phi)/3) + 2 a2 cos((chi + phi)/2) + cos(theta + phi).
inline double b_coefficient(int n, const CircuitParams& c) {
    require(n >= 1, "expansion order must be >= 1");
    const bool odd = (n % 2) == 1;
    const int p = odd ? (n - 1) / 2 : (n - 2) / 2;
    const double sign = (p % 2 == 0) ? -1.0 : 1.0;
    const double f3 = std::pow(3.0, -(n - 1.0));
    const double f2 = std::pow(2.0, -(n - 1.0));
    if (odd) return sign * (c.alpha3 * f3 * c.psi_third.sin + c.alpha2 * f2 * c.chi_half.sin + c.theta.sin);
    return sign * (c.alpha3 * f3 * c.psi_third.cos + c.alpha2 * f2 * c.chi_half.cos + c.theta.cos);
}

/// The three conditions that remove the first, second and third order terms.
inline std::array<double, 3> cancellation_residuals(const CircuitParams& c) {
    return {
        c.alpha3 * c.psi_third.sin + c.alpha2 * c.chi_half.sin + c.theta.sin,
        c.alpha3 / 3.0 * c.psi_third.cos + c.alpha2 / 2.0 * c.chi_half.cos + c.theta.cos,
        c.alpha3 / 9.0 * c.psi_third.sin + c.alpha2 / 4.0 * c.chi_half.sin + c.theta.sin,
    };
}

inline double max_abs_residual(const CircuitParams& c) {
    const auto r = cancellation_residuals(c);
    return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
}

struct SignSearchResult {
    CircuitParams best;
    double max_residual = std::numeric_limits<double>::infinity();
    int assignment = -1; // bit k set: component k negated (sin psi, sin chi, sin theta, cos psi, cos chi, cos theta)
};

/// Tries all 2^3 x 2^3 sign choices for the (sin, cos) components keeping the
/// magnitudes of `c`, and returns the one with the smallest max |r_i|.
/// Ties resolve to the lowest assignment index.
inline SignSearchResult sign_search(const CircuitParams& c) {
    SignSearchResult out;
    for (int mask = 0; mask < 64; ++mask) {
        CircuitParams t = c;
        auto apply = [mask](int bit, double v) { return ((mask >> bit) & 1) ? -std::abs(v) : std::abs(v); };
        t.psi_third = {apply(0, c.psi_third.sin), apply(3, c.psi_third.cos)};
        t.chi_half = {apply(1, c.chi_half.sin), apply(4, c.chi_half.cos)};
        t.theta = {apply(2, c.theta.sin), apply(5, c.theta.cos)};
        const double m = max_abs_residual(t);
        if (m < out.max_residual) {
            out.max_residual = m;
            out.best = t;
            out.assignment = mask;
        }
    }
    return out;
}

/// Three-mode coupling strength g (same units as E_J / h).
inline double coupling_g(const CircuitParams& c) {
    require(c.ladder_size >= 1, "ladder_size must be >= 1");
    return 2.0 * c.josephson_energy * std::abs(c.theta.sin) / (3.0 * c.ladder_size) * c.flux_modulation *
           c.impedance_ratio_sq();
}

/// Effective hopping rate after eliminating the waste mode.
inline double hopping_gamma(double g, double waste_loss) {
    require(waste_loss > 0, "waste-mode loss must be positive");
    return 4.0 * g * g / waste_loss;
}

inline double kerr_scale(const CircuitParams& c, double b4) { return b4 * c.josephson_energy * c.impedance_ratio_sq() / 2.0; }

/// Frequency of the flux drive that makes hop p -> p+1 resonant (p is 1-based).
inline double modulation_frequency(const CircuitParams& c, int p) {
    require(p >= 1 && p < c.ladder_size, "hop index out of range");
    const double wp = c.ladder_top - (p - 1) * c.ladder_spacing;
    const double wp1 = c.ladder_top - p * c.ladder_spacing;
    return wp1 - wp + c.cavity_frequency + c.waste_frequency;
}

struct HierarchyReport {
    double left = 0.0;
    double waste_loss = 0.0;
    double min_detuning = 0.0;
    double much_less_factor = 3.0;
    bool kerr_below_width = false;
    bool width_below_detuning = false;
    bool satisfied() const { return kerr_below_width && width_below_detuning; }
};

inline HierarchyReport hierarchy_check(const CircuitParams& c, double b4, double ladder_occupation,
                                       double cavity_occupation, double min_detuning, double much_less_factor = 3.0) {
    HierarchyReport r;
    const double n2 = static_cast<double>(c.ladder_size) * c.ladder_size;
    r.left = std::abs(kerr_scale(c, b4)) * std::max(ladder_occupation, cavity_occupation / n2);
    r.waste_loss = c.waste_loss;
    r.min_detuning = min_detuning;
    r.much_less_factor = much_less_factor;
    r.kerr_below_width = r.left <= c.waste_loss;
    r.width_below_detuning = c.waste_loss * much_less_factor <= min_detuning;
    return r;
}

struct DesignReport {
    CircuitParams params;
    SignSearchResult signs;
    std::array<double, 3> residuals{};
    std::array<double, 6> b{}; // B_1..B_6 for the sign-searched branch
    double g = 0.0;
    double hop_rate = 0.0;
    double kerr_computed = 0.0;
    double kerr_reference = 0.0;
    double reference_b4 = 0.75;
    HierarchyReport hierarchy;
};

struct DesignInputs {
    double ladder_occupation = 1.0;
    double cavity_occupation = 10.0;
    double min_detuning = 200e6;
    double much_less_factor = 3.0;
    double reference_b4 = 0.75;
    bool search_signs = true;
};

/// Full design evaluation. The hierarchy is checked with the reference B_4;
/// the B_4 implied by the chosen branch is reported next to it.
inline DesignReport design_report(const CircuitParams& c, const DesignInputs& in = {}) {
    c.validate();
    DesignReport r;
    r.params = c;
    r.signs = in.search_signs ? sign_search(c) : SignSearchResult{c, max_abs_residual(c), -1};
    const CircuitParams& b = r.signs.best;
    r.residuals = cancellation_residuals(b);
    for (int n = 1; n <= 6; ++n) r.b[n - 1] = b_coefficient(n, b);
    r.g = coupling_g(b);
    r.hop_rate = hopping_gamma(r.g, c.waste_loss);
    r.reference_b4 = in.reference_b4;
    r.kerr_computed = kerr_scale(b, r.b[3]);
    r.kerr_reference = kerr_scale(b, in.reference_b4);
    r.hierarchy = hierarchy_check(b, in.reference_b4, in.ladder_occupation, in.cavity_occupation, in.min_detuning,
                                  in.much_less_factor);
    return r;
}

} // namespace avalanche::circuit
