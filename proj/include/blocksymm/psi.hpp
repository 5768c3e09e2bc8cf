#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>

#include "blocksymm/processes.hpp"

namespace blocksymm {

/// psi(x) = x^q, q >= 1.
struct PowerPsi {
    double q = 1.0;
};

/// psi(x) = exp(a x^b) - 1, a > 0, b >= 1.
struct ExponentialPsi {
    double a = 1.0;
    double b = 1.0;
};

/// User-supplied triple. `inverse` may be empty; bisection is used then.
struct CustomPsi {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    std::function<double(double)> inverse;
};

/// A non-decreasing convex psi on [0, inf) with psi(0) = 0.
class PsiSpec {
public:
    using Kind = std::variant<PowerPsi, ExponentialPsi, CustomPsi>;

    PsiSpec() : kind_(PowerPsi{1.0}) {}

    [[nodiscard]] static PsiSpec power(double q);
    [[nodiscard]] static PsiSpec exponential(double a, double b);
    /// Validated by psi(0) = 0 and the convexity grid check on [0, 10].
    [[nodiscard]] static PsiSpec custom(CustomPsi triple);

    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
    [[nodiscard]] std::string name() const;

    /// Exponent q when psi is a power map.
    [[nodiscard]] const PowerPsi* as_power() const noexcept { return std::get_if<PowerPsi>(&kind_); }

private:
    explicit PsiSpec(Kind kind) : kind_(std::move(kind)) {}
    Kind kind_;
};

[[nodiscard]] double psi_eval(const PsiSpec& psi, double x);

/// Power: q u^{q-1}; Exponential: a b u^{b-1} exp(a u^b). Uses 0^0 = 1, so the
/// derivative at 0 is q for q = 1 (a for b = 1) and 0 for q, b > 1.
[[nodiscard]] double psi_deriv(const PsiSpec& psi, double u);

[[nodiscard]] double psi_inverse(const PsiSpec& psi, double y);

/// Secant slopes over consecutive triples of a uniform grid on [0, upper] are
/// non-decreasing (to 1e-9) and values are non-decreasing.
[[nodiscard]] bool convexity_grid_check(const PsiSpec& psi, double upper, std::size_t points = 401);

struct MomentNorm {
    double value = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
};

/// Monte Carlo max_t || psi(2 max_i |x_{i,t}|) ||_r. Every shipped law is
/// stationary, so a single period (the first row of a fresh one-row panel)
/// stands in for the max over t. The standard error uses the delta method.
[[nodiscard]] MomentNorm psi_moment_norm(const PsiSpec& psi, const DgpSpec& law, double r,
                                         std::size_t reps, std::uint64_t seed);

}  // namespace blocksymm
