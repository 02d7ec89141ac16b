#include "bulkjl/rng.hpp"

#include <cmath>

namespace bulkjl::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

// (x + 1/2) * 2^-53 maps a 53-bit integer into (0,1), never hitting 0 or 1.
inline double to_unit(std::uint64_t bits53) noexcept {
    return (static_cast<double>(bits53) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::uint64_t counter) const noexcept {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, key);
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::array<double, 2> Philox::uniform_pair(std::uint64_t counter) const noexcept {
    const auto b = block(counter);
    const std::uint64_t w0 = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    const std::uint64_t w1 = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
    return {to_unit(w0 >> 11), to_unit(w1 >> 11)};
}

std::array<double, 2> Philox::gaussian_pair(std::uint64_t counter) const noexcept {
    const auto u = uniform_pair(counter);
    const double radius = std::sqrt(-2.0 * std::log(u[0]));
    return {radius * std::cos(kTwoPi * u[1]), radius * std::sin(kTwoPi * u[1])};
}

double Philox::uniform_at(std::uint64_t i) const noexcept {
    return uniform_pair(i / 2)[i % 2];
}

double Philox::gaussian_at(std::uint64_t i) const noexcept {
    return gaussian_pair(i / 2)[i % 2];
}

double Philox::rademacher_at(std::uint64_t i) const noexcept {
    // u is symmetric about 1/2, so both signs have probability exactly 1/2.
    return uniform_at(i) < 0.5 ? -1.0 : 1.0;
}

double Philox::uniform_sqrt3_at(std::uint64_t i) const noexcept {
    constexpr double kSqrt3 = 1.7320508075688772935274463415059;
    return (2.0 * uniform_at(i) - 1.0) * kSqrt3;
}

double Philox::cauchy_at(std::uint64_t i) const noexcept {
    constexpr double kPi = 3.1415926535897932384626433832795;
    return std::tan(kPi * (uniform_at(i) - 0.5));
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace bulkjl::rng
