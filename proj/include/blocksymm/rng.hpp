#pragma once

#include <cstdint>
#include <random>

namespace blocksymm::rng {

using Engine = std::mt19937_64;

/// Stream tags keep panel, copy, multiplier and Gaussian draws of the same
/// replication on disjoint substreams.
enum class Stream : std::uint64_t {
    Panel = 0x11,
    Copy = 0x22,
    Multiplier = 0x33,
    Gaussian = 0x44,
    Quantity = 0x55,
    Calibration = 0x66,
};

/// splitmix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based split: the seed of replication `index` on stream `tag`
/// depends only on (master, tag, index), never on scheduling.
[[nodiscard]] constexpr std::uint64_t substream(std::uint64_t master, Stream tag,
                                                std::uint64_t index) noexcept {
    return mix64(mix64(master ^ (static_cast<std::uint64_t>(tag) << 56)) + mix64(index));
}

[[nodiscard]] inline Engine make_engine(std::uint64_t seed) { return Engine(mix64(seed)); }

}  // namespace blocksymm::rng
