#include "ncs/rng.hpp"

namespace ncs {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

RngSeed derive_seed(RngSeed root, std::string_view label, std::uint64_t index) {
    std::uint64_t s = mix64(root.value ^ fnv1a(label));
    s = mix64(s ^ index);
    return RngSeed{s};
}

RngStream::RngStream(RngSeed seed, std::string_view label, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = mix64(seed.value ^ fnv1a(label));
    s = mix64(s ^ a);
    s = mix64(s ^ b);
    engine_.seed(s);
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
    if (n == 0) return 0;
    // Rejection below 2^64 % n keeps the draw unbiased.
    const std::uint64_t threshold = (0ull - n) % n;
    std::uint64_t x = next_u64();
    while (x < threshold) x = next_u64();
    return x % n;
}

int RngStream::next_category(std::span<const double> probabilities) {
    const double u = next_unit();
    double cumulative = 0.0;
    for (size_t j = 0; j < probabilities.size(); ++j) {
        cumulative += probabilities[j];
        if (u < cumulative) return static_cast<int>(j);
    }
    return static_cast<int>(probabilities.size()) - 1;
}

}  // namespace ncs
