#pragma once

#include <cstddef>
#include <functional>

namespace blocksymm {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // Kronrod error estimate
    double l1 = 0.0;     // integral of |f|
};

/// Adaptive Gauss-Kronrod (G15/K31) integral of f over [lo, hi], falling back
/// to tanh-sinh when the Kronrod estimate does not converge.
/// Throws NumericalError when the error estimate exceeds rel_tol * l1 after
/// the maximum bisection depth, or when f returns a non-finite value.
[[nodiscard]] QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                                         double hi, double rel_tol = 1e-10);

}  // namespace blocksymm
