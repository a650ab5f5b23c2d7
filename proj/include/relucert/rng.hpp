#pragma once

#include <cstdint>
#include <optional>

namespace relucert {

/// Identifier stored with every sample sequence so certificates can name the
/// exact stream they were produced with.
inline constexpr const char* kGeneratorId = "splitmix64-counter/1";

/// Counter-based 64-bit generator: output i is the SplitMix64 finalizer
/// applied to seed + (i+1) * golden gamma. Stateless apart from the counter,
/// so any position of the stream can be computed directly and sub-streams can
/// be split off deterministically (one per sample point or work chunk).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 significant bits.
    double next_double();

    /// Standard normal via Box-Muller; draws come in pairs, the second one
    /// is cached so consumption stays deterministic per object.
    double next_gaussian();

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    std::optional<double> cached_gaussian_;
};

/// Deterministic sub-seed for stream `stream` of `seed`.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace relucert
