// Deterministic random sampling. The engine is std::mt19937_64 (fully
// specified by the standard); all distributions are hand-rolled on top of it
// so that a given seed produces the same stream on every platform. The
// std::*_distribution classes are deliberately not used here because their
// outputs are implementation-defined.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace infoscape {

class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform in [0, n); n must be positive. Modulo bias is below 2^-53 for
    // any n this project draws, which is far under test resolution.
    uint64_t bounded(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::bounded: n must be positive");
        return next() % n;
    }

    // inclusive integer range
    int64_t uniform_int(int64_t lo, int64_t hi) {
        if (hi < lo) throw std::invalid_argument("Rng::uniform_int: empty range");
        return lo + static_cast<int64_t>(bounded(static_cast<uint64_t>(hi - lo) + 1));
    }

    // Box-Muller; uses two engine draws per sample, no cached spare.
    double normal() {
        double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // exp(N(0, sigma^2)); all moments finite
    double lognormal(double sigma) { return std::exp(sigma * normal()); }

private:
    std::mt19937_64 eng_;
};

}  // namespace infoscape
