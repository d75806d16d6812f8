#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "bosegas/errors.hpp"

namespace bosegas {

// All randomness in this library flows through RandomStream.  The engine is
// std::mt19937_64, whose output sequence is pinned bit-for-bit by the C++
// standard; the variate mappings below are hand-rolled because the standard
// library distributions are implementation-defined and would break the
// "same seed, same bytes" reproducibility contract.

/// One step of the splitmix64 sequence (public-domain constants).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Collision-resistant mix of (master seed, size tag, trial index) into a
/// per-trial engine seed.  Every trial of every ensemble gets an
/// independent, scheduling-invariant stream.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t size_tag,
                                std::uint64_t trial_index) {
    std::uint64_t s = master_seed;
    std::uint64_t h = splitmix64_next(s);
    s ^= 0x9e3779b97f4a7c15ULL * (size_tag + 1);
    h ^= splitmix64_next(s);
    s ^= 0xc2b2ae3d27d4eb4fULL * (trial_index + 1);
    h ^= splitmix64_next(s);
    return h;
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53 significant bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate) {
        if (!(rate > 0.0))
            throw InvalidParameter("exponential: rate must be positive");
        // u < 1 strictly, so log1p(-u) is finite.
        return -std::log1p(-uniform01()) / rate;
    }

    /// Poisson count by inversion of the cumulative distribution.  Large
    /// means are split into chunks with mean <= 16 (a sum of independent
    /// Poisson variables is Poisson), which keeps e^-lambda well inside
    /// double range for any input.
    long poisson(double mean) {
        if (!(mean >= 0.0))
            throw InvalidParameter("poisson: mean must be nonnegative");
        long total = 0;
        double remaining = mean;
        while (remaining > 0.0) {
            const double lambda = remaining > 16.0 ? 16.0 : remaining;
            remaining -= lambda;
            const double u = uniform01();
            double p = std::exp(-lambda);
            double cumulative = p;
            long k = 0;
            while (u > cumulative && p > 0.0) {
                ++k;
                p *= lambda / static_cast<double>(k);
                cumulative += p;
            }
            total += k;
        }
        return total;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace bosegas
