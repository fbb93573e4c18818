#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace specmarl {

// Values in (-kHoldsBand, kHoldsBand] count as not-holding so boundary
// states do not flip on floating-point noise.
inline constexpr double kHoldsBand = 1e-9;

// Finite floor used to initialize progress registers; register vectors stay
// finite, the -inf sentinel is reserved for rewards.
inline constexpr double kRegisterFloor = -1e9;

// Reward sentinel for rollouts that never reach a final monitor state.
inline constexpr double kNegInfReward = -std::numeric_limits<double>::infinity();

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Stable stream derivation so results do not depend on thread scheduling.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t x = a * 0x9e3779b97f4a7c15ULL + b;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x += c * 0x94d049bb133111ebULL + d;
    x ^= x >> 27;
    x *= 0x2545f4914f6cdd1dULL;
    x ^= x >> 31;
    return x;
}

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace specmarl
