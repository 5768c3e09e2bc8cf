#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blocksymm/processes.hpp"

namespace blocksymm {

/// Contiguous blocks B_l = {(l-1)b + 1, ..., l b}, l = 1..count, with count * b = n.
class BlockScheme {
public:
    struct Range {
        std::size_t first;  // 0-based, inclusive
        std::size_t last;   // 0-based, exclusive
    };

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t block_length() const noexcept { return b_; }
    [[nodiscard]] std::size_t count() const noexcept { return n_ / b_; }
    [[nodiscard]] Range block(std::size_t l) const noexcept { return {l * b_, (l + 1) * b_}; }
    [[nodiscard]] std::vector<Range> blocks() const;

    friend BlockScheme make_blocks(std::size_t n, std::size_t b);

private:
    BlockScheme(std::size_t n, std::size_t b) : n_(n), b_(b) {}
    std::size_t n_;
    std::size_t b_;
};

/// Throws ValidationError("scheme.b", ...) unless 1 <= b <= n and b divides n.
[[nodiscard]] BlockScheme make_blocks(std::size_t n, std::size_t b);

std::ostream& operator<<(std::ostream& out, const BlockScheme& scheme);

/// Rademacher and UniformSym have mean 0 and variance 1. Unit is the
/// degenerate epsilon = 1 law; it exists for estimator identity checks only
/// and is rejected by the verification routines.
enum class MultiplierKind { Rademacher, UniformSym, Unit };

struct MultiplierSpec {
    MultiplierKind kind = MultiplierKind::Rademacher;

    /// Almost-sure bound c on |epsilon|.
    [[nodiscard]] double bound() const noexcept;
    [[nodiscard]] bool centered_unit_variance() const noexcept {
        return kind != MultiplierKind::Unit;
    }
    [[nodiscard]] std::string name() const;
};

/// (count x p) block sums S_{n,l}(i), summed in time order inside each block.
[[nodiscard]] Matrix block_sums(const PanelSample& sample, const BlockScheme& scheme);

[[nodiscard]] std::vector<double> draw_multipliers(const MultiplierSpec& spec, std::size_t count,
                                                   std::uint64_t seed);

/// eta_t = epsilon_l for t in B_l.
[[nodiscard]] std::vector<double> expand_multipliers(std::span<const double> eps,
                                                     const BlockScheme& scheme);

/// max_i |xbar_{i,n}|.
[[nodiscard]] double max_abs_mean(const PanelSample& sample);

/// max_i |(1/n) sum_l eps_l S_{n,l}(i)|. Multiply by sqrt(n) for max_i |X*_n(i)|.
[[nodiscard]] double multiplier_max_abs_mean(const PanelSample& sample, const BlockScheme& scheme,
                                             std::span<const double> eps);

/// max_i ((1/n) sum_l S_{n,l}(i)^2)^{q/2}; the quadratic block term of the
/// Hoeffding step.
[[nodiscard]] double block_quadratic_max(const PanelSample& sample, const BlockScheme& scheme,
                                         double q);

}  // namespace blocksymm
