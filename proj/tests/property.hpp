#pragma once

// Minimal seeded case generators for property tests.
#include <cstddef>
#include <cstdint>
#include <cmath>
#include <random>

namespace blocksymm::prop {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double log_uniform(double lo, double hi);
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    std::uint64_t seed() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

inline double Gen::log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

/// Runs body(gen, case_index) for `cases` generated cases.
template <class Body>
void for_all(std::size_t cases, std::uint64_t seed, Body body) {
    Gen gen(seed);
    for (std::size_t k = 0; k < cases; ++k) body(gen, k);
}

}  // namespace blocksymm::prop
