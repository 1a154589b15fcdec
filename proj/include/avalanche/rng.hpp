// rng.hpp - reproducible random streams
//
// Each trajectory owns a std::mt19937_64 (its output sequence is fixed by the
// standard) seeded with splitmix64(master, index). Floating-point conversion is
// done here rather than through <random> distributions, whose algorithms are
// implementation-defined.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace avalanche {

inline constexpr const char* rng_description = "mt19937_64; seed_i = splitmix64(master ^ splitmix64(i + 1)); u = (x>>11 + 0.5) * 2^-53";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Exponential waiting time with the given total rate (> 0).
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace avalanche
