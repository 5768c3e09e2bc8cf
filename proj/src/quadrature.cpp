#include "blocksymm/quadrature.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "blocksymm/errors.hpp"

namespace blocksymm {

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol) {
    if (!(hi >= lo)) throw DomainError("integrate: need lo <= hi");
    if (hi == lo) return {};

    // Depth is kept moderate: each level can double the work.
    constexpr unsigned max_depth = 15;
    // Boost's error estimate has an absolute floor that swamps short
    // intervals, so integrate over [0, 1] and rescale.
    const double width = hi - lo;
    const auto g = [&](double t) { return f(lo + width * t); };
    QuadratureResult out;
    // Boost stops refining at tol relative to L1; ask for a little more than
    // the caller so the returned estimate clears rel_tol with margin.
    out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        g, 0.0, 1.0, max_depth, rel_tol * 1e-2, &out.error, &out.l1);

    // Algebraic endpoint singularities (u^{q-1} for non-integer q) defeat the
    // Kronrod error estimate; the double-exponential rule handles them.
    if (std::isfinite(out.value) && out.error > rel_tol * out.l1) {
        // Not const: Boost 1.74 declares integrate() without const.
        thread_local boost::math::quadrature::tanh_sinh<double> ts;
        QuadratureResult alt;
        alt.value = ts.integrate(g, 0.0, 1.0, rel_tol * 1e-2, &alt.error, &alt.l1);
        if (std::isfinite(alt.value) && alt.error < out.error) out = alt;
    }

    out.value *= width;
    out.error *= width;
    out.l1 *= width;

    if (!std::isfinite(out.value) || !std::isfinite(out.error)) {
        std::ostringstream msg;
        msg << "integrate: non-finite integrand on [" << lo << ", " << hi << "]";
        throw NumericalError(msg.str());
    }
    const double floor = std::numeric_limits<double>::min();
    if (out.error > rel_tol * out.l1 + floor) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "integrate: no convergence on [" << lo << ", " << hi << "], value=" << out.value
            << " error=" << out.error << " l1=" << out.l1 << " rel_tol=" << rel_tol;
        throw NumericalError(msg.str());
    }
    return out;
}

}  // namespace blocksymm
