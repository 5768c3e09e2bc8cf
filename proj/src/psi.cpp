#include "blocksymm/psi.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "blocksymm/errors.hpp"
#include "blocksymm/parallel.hpp"
#include "blocksymm/rng.hpp"

namespace blocksymm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonneg(double x, const char* what) {
    if (!(x >= 0.0)) {
        std::ostringstream msg;
        msg << what << ": argument must be >= 0, got " << x;
        throw DomainError(msg.str());
    }
}

// u^e with 0^0 = 1.
double pow0(double u, double e) { return e == 0.0 ? 1.0 : std::pow(u, e); }

double bisect_inverse(const std::function<double(double)>& eval, double y) {
    if (y == 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (eval(hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericalError("psi_inverse: bracket diverged");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eval(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

PsiSpec PsiSpec::power(double q) {
    if (!std::isfinite(q) || q < 1.0) throw ValidationError("psi.q", "power exponent must be >= 1");
    return PsiSpec(PowerPsi{q});
}

PsiSpec PsiSpec::exponential(double a, double b) {
    if (!std::isfinite(a) || a <= 0.0) throw ValidationError("psi.a", "scale must be > 0");
    // exp(a x^b) - 1 is concave near 0 when b < 1.
    if (!std::isfinite(b) || b < 1.0)
        throw ValidationError("psi.b", "power must be >= 1 for convexity on [0, inf)");
    return PsiSpec(ExponentialPsi{a, b});
}

PsiSpec PsiSpec::custom(CustomPsi triple) {
    if (!triple.eval || !triple.deriv)
        throw ValidationError("psi.custom", "eval and deriv are required");
    if (triple.eval(0.0) != 0.0) throw ValidationError("psi.custom", "psi(0) must be 0");
    PsiSpec spec{Kind{std::move(triple)}};
    if (!convexity_grid_check(spec, 10.0))
        throw ValidationError("psi.custom", "failed the convexity grid check on [0, 10]");
    return spec;
}

std::string PsiSpec::name() const {
    return std::visit(overloaded{
                          [](const PowerPsi&) { return std::string("power"); },
                          [](const ExponentialPsi&) { return std::string("exponential"); },
                          [](const CustomPsi& c) { return "custom:" + c.name; },
                      },
                      kind_);
}

double psi_eval(const PsiSpec& psi, double x) {
    require_nonneg(x, "psi_eval");
    if (x == 0.0) return 0.0;
    return std::visit(overloaded{
                          [x](const PowerPsi& k) { return k.q == 1.0 ? x : std::pow(x, k.q); },
                          [x](const ExponentialPsi& k) {
                              return std::expm1(k.a * std::pow(x, k.b));
                          },
                          [x](const CustomPsi& k) { return k.eval(x); },
                      },
                      psi.kind());
}

double psi_deriv(const PsiSpec& psi, double u) {
    require_nonneg(u, "psi_deriv");
    return std::visit(overloaded{
                          [u](const PowerPsi& k) { return k.q * pow0(u, k.q - 1.0); },
                          [u](const ExponentialPsi& k) {
                              return k.a * k.b * pow0(u, k.b - 1.0) *
                                     std::exp(k.a * std::pow(u, k.b));
                          },
                          [u](const CustomPsi& k) { return k.deriv(u); },
                      },
                      psi.kind());
}

double psi_inverse(const PsiSpec& psi, double y) {
    require_nonneg(y, "psi_inverse");
    if (y == 0.0) return 0.0;
    return std::visit(overloaded{
                          [y](const PowerPsi& k) { return k.q == 1.0 ? y : std::pow(y, 1.0 / k.q); },
                          [y](const ExponentialPsi& k) {
                              return std::pow(std::log1p(y) / k.a, 1.0 / k.b);
                          },
                          [y](const CustomPsi& k) {
                              return k.inverse ? k.inverse(y) : bisect_inverse(k.eval, y);
                          },
                      },
                      psi.kind());
}

bool convexity_grid_check(const PsiSpec& psi, double upper, std::size_t points) {
    if (points < 3 || !(upper > 0.0)) return false;
    const double h = upper / static_cast<double>(points - 1);
    std::vector<double> values(points);
    for (std::size_t k = 0; k < points; ++k) {
        values[k] = psi_eval(psi, h * static_cast<double>(k));
        if (!std::isfinite(values[k])) return false;
    }
    for (std::size_t k = 0; k + 2 < points; ++k) {
        const double left = (values[k + 1] - values[k]) / h;
        const double right = (values[k + 2] - values[k + 1]) / h;
        if (left < -1e-9) return false;
        // relative slack keeps rounding in large slopes from tripping the check
        if (right < left - 1e-9 * (1.0 + std::abs(left))) return false;
    }
    return true;
}

MomentNorm psi_moment_norm(const PsiSpec& psi, const DgpSpec& law, double r, std::size_t reps,
                           std::uint64_t seed) {
    if (!(r > 1.0)) throw ValidationError("r", "Hoelder exponent must be > 1");
    if (reps < 1000) throw ValidationError("reps", "psi_moment_norm needs at least 1000 draws");
    law.validate();

    DgpSpec one_row = law;
    one_row.n = 1;
    std::vector<double> powered(reps);
    parallel_for(reps, [&](std::size_t k) {
        const PanelSample x = generate(one_row, rng::substream(seed, rng::Stream::Panel, k));
        const double m = x.data.cwiseAbs().maxCoeff();
        powered[k] = std::pow(psi_eval(psi, 2.0 * m), r);
    });

    double sum = 0.0;
    for (double v : powered) sum += v;
    const double mean = sum / static_cast<double>(reps);
    double ss = 0.0;
    for (double v : powered) ss += (v - mean) * (v - mean);
    if (!std::isfinite(mean) || !std::isfinite(ss)) {
        std::ostringstream msg;
        msg << "psi_moment_norm: E[psi(2 max|x|)^r] is not finite for law " << law.kind_name()
            << " with psi " << psi.name() << " and r = " << r;
        throw NumericalError(msg.str());
    }

    MomentNorm out;
    out.reps = reps;
    out.value = std::pow(mean, 1.0 / r);
    if (mean > 0.0 && reps > 1) {
        const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
        out.se = out.value / (r * mean) * sd / std::sqrt(static_cast<double>(reps));
    }
    return out;
}

}  // namespace blocksymm
