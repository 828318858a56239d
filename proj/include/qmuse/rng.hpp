#pragma once

#include <cstdint>
#include <random>

namespace qmuse {

/// SplitMix64 finalizer. Used to spread user seeds before they reach the
/// engine and to derive independent sub-seeds (per roll, per walk step).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Sub-seed number `stream` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

/// Seedable generator shared by every stochastic module.
///
/// Engine: std::mt19937_64 seeded with splitmix64(seed). Uniform doubles take
/// the top 53 bits of one engine output, so draws are identical across
/// standard libraries (std::uniform_real_distribution is not). Seed 0 is valid.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace qmuse
