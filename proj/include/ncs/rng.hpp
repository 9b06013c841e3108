#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace ncs {

/// Root seed of an experiment. Every random consumer derives its own labeled
/// stream from it, so sequences never alias across consumers or runs.
struct RngSeed {
    std::uint64_t value = 0;
};

/// Generator name recorded in report metadata.
inline constexpr const char* kPrngName = "splitmix64-derived mt19937_64";

/// splitmix64 finalizer; the mixing step behind all stream derivation.
std::uint64_t mix64(std::uint64_t z);

/// Sub-seed for a labeled consumer ("run-index", "schedule", ...).
RngSeed derive_seed(RngSeed root, std::string_view label, std::uint64_t index = 0);

/// One labeled random stream. Identical (seed, label, a, b) yield identical
/// sequences on any platform: derivation and all sampling below are fixed
/// algorithms rather than stdlib distributions.
class RngStream {
public:
    RngStream(RngSeed seed, std::string_view label, std::uint64_t a = 0, std::uint64_t b = 0);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [-half_width, half_width].
    double next_symmetric(double half_width) {
        return half_width * (2.0 * next_unit() - 1.0);
    }

    /// Unbiased uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n);

    /// Bernoulli draw with success probability p.
    bool next_bernoulli(double p) { return next_unit() < p; }

    /// Index drawn from a categorical distribution (weights sum to ~1).
    int next_category(std::span<const double> probabilities);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::uint64_t i = values.size(); i > 1; --i)
            std::swap(values[i - 1], values[next_below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ncs
