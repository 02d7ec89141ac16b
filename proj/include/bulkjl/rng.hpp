#pragma once

#include <array>
#include <cstdint>

// Counter-based pseudorandomness (Philox4x32-10). Every scalar drawn by the
// library is a pure function of (seed, stream, counter), so matrices and
// datasets are reproducible no matter how generation is split across
// threads. One 128-bit Philox block yields two doubles; variate i of a
// stream lives in block i/2, slot i%2. Gaussians come from Box-Muller with
// the pairing fixed to the two slots of one block, so bit-exact
// reproducibility holds within a single floating-point environment
// (libm differences across platforms change the transcendental steps).

namespace bulkjl::rng {

class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    /// The raw 4x32-bit block at a counter value.
    std::array<std::uint32_t, 4> block(std::uint64_t counter) const noexcept;

    /// Two uniforms in (0,1), 53-bit mantissas, from block `counter`.
    std::array<double, 2> uniform_pair(std::uint64_t counter) const noexcept;

    /// Two standard Gaussians (Box-Muller on uniform_pair).
    std::array<double, 2> gaussian_pair(std::uint64_t counter) const noexcept;

    /// Variate i of this stream under the given distribution transform.
    double uniform_at(std::uint64_t i) const noexcept;
    double gaussian_at(std::uint64_t i) const noexcept;
    double rademacher_at(std::uint64_t i) const noexcept;      // +-1, mean 0, var 1
    double uniform_sqrt3_at(std::uint64_t i) const noexcept;   // U[-sqrt3, sqrt3], var 1
    double cauchy_at(std::uint64_t i) const noexcept;          // standard Cauchy

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
};

/// SplitMix64 finalizer; used to derive per-trial and per-purpose seeds from
/// a master seed: seed_t = mix64(master_seed, t).
std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace bulkjl::rng
