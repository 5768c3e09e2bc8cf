#include "blocksymm/remainders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blocksymm/errors.hpp"
#include "blocksymm/quadrature.hpp"

namespace blocksymm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_blocking_inputs(double U, double rho_sum) {
    if (!std::isfinite(U) || U <= 0.0) throw ValidationError("U", "truncation level must be > 0");
    if (!std::isfinite(rho_sum) || rho_sum < 0.0)
        throw ValidationError("rho_sum", "Kolmogorov distance sum must be >= 0");
}

// (1/sqrt n) int_0^{sqrt(n) U} psi'(scale v / sqrt n) dv
double scaled_derivative_integral(const PsiSpec& psi, std::size_t n, double U, double scale) {
    if (n < 1) throw ValidationError("n", "sample size must be >= 1");
    const double root_n = std::sqrt(static_cast<double>(n));
    const auto integrand = [&](double v) { return psi_deriv(psi, scale * v / root_n); };
    return integrate(integrand, 0.0, root_n * U, 1e-10).value / root_n;
}

double check_probability(double x, const char* field) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
        throw ValidationError(field, "probability must lie in [0, 1]");
    return x;
}

// 2 ln(p) / ln(ln(p) / pbar) for any pbar > 0.
double log_exp_bound(double p, double pbar) {
    if (!std::isfinite(p) || p <= 1.0) throw DomainError("concentration: need p > 1");
    if (pbar == 0.0) return 0.0;
    const double log_p = std::log(p);
    const double lambda = std::log(log_p / pbar);
    if (!(lambda > 0.0))
        throw VacuousBoundError("concentration: pbar^{-1} ln(p) <= 1, the bound is vacuous");
    return std::min(1.0, 2.0 * log_p / lambda);
}

void check_truncation_args(double q, double r, double phi, double rho_sum, double p,
                           std::size_t n, double M_n) {
    if (!(q >= 1.0)) throw ValidationError("q", "must be >= 1");
    if (!(r > 1.0)) throw ValidationError("r", "must be > 1");
    if (!(phi > 0.0)) throw ValidationError("phi", "must be > 0");
    if (!(p > std::numbers::e)) throw DomainError("optimal truncation needs p > e");
    if (n < 1) throw ValidationError("n", "must be >= 1");
    if (!(M_n > 0.0)) throw ValidationError("M_n", "must be > 0");
    if (!(rho_sum >= 0.0)) throw ValidationError("rho_sum", "must be >= 0");
    if (rho_sum == 0.0)
        throw ValidationError("rho_sum", "no blocking penalty; truncation unbounded");
}

double log_ratio_power(double r, double phi, double p, std::size_t n) {
    const double ratio = std::log(p) / (std::pow(static_cast<double>(n), phi) *
                                        std::log(std::log(p)));
    return std::pow(ratio, (r - 1.0) / r);
}

}  // namespace

double remainder_Rn(const PsiSpec& psi, std::size_t n, double U, double rho_sum) {
    check_blocking_inputs(U, rho_sum);
    if (rho_sum == 0.0) return 0.0;
    return rho_sum * scaled_derivative_integral(psi, n, U, 1.0);
}

double remainder_R1(const PsiSpec& psi, std::size_t n, double U, double rho_sum) {
    check_blocking_inputs(U, rho_sum);
    if (rho_sum == 0.0) return 0.0;
    return 0.5 * rho_sum * scaled_derivative_integral(psi, n, U, 2.0);
}

double remainder_Rn_power_closed(double q, double U, double rho_sum) {
    return rho_sum * std::pow(U, q);
}

double remainder_R1_power_closed(double q, double U, double rho_sum) {
    return std::pow(2.0, q - 2.0) * rho_sum * std::pow(U, q);
}

double remainder_Rn_printed(double q, std::size_t n, double U, double rho_sum) {
    return std::pow(U, q) * std::pow(static_cast<double>(n), -q / 2.0) * rho_sum;
}

double remainder_R1_printed(double q, std::size_t n, double U, double rho_sum) {
    return std::pow(2.0, q) * remainder_Rn_printed(q, n, U, rho_sum);
}

double remainder_R2(double r, double tail_prob, double psi_norm) {
    if (!(r > 1.0)) throw ValidationError("r", "Hoelder exponent must be > 1");
    check_probability(tail_prob, "tail_prob");
    if (!std::isfinite(psi_norm) || psi_norm < 0.0)
        throw ValidationError("psi_norm", "must be finite and >= 0");
    return 0.5 * std::pow(tail_prob, (r - 1.0) / r) * psi_norm;
}

double concentration_general(double p, double pbar) {
    check_probability(pbar, "pbar");
    return log_exp_bound(p, pbar);
}

double concentration_lq(double p, double U, double q, double max_mean_moment) {
    if (!(U > 0.0)) throw ValidationError("U", "must be > 0");
    if (!(q >= 1.0)) throw ValidationError("q", "must be >= 1");
    if (!(max_mean_moment >= 0.0)) throw ValidationError("max_mean_moment", "must be >= 0");
    return log_exp_bound(p, max_mean_moment / std::pow(U, q));
}

void TailParams::validate() const {
    if (!(a > 0.0)) throw ValidationError("tail.a", "must be > 0");
    if (!(b > 0.0)) throw ValidationError("tail.b", "must be > 0");
    if (!(gamma > 0.0)) throw ValidationError("tail.gamma", "must be > 0");
    if (!(phi > 0.0 && phi < gamma)) throw ValidationError("tail.phi", "must lie in (0, gamma)");
}

SubexpBound concentration_subexp(double p, std::size_t n, double U, const TailParams& params) {
    params.validate();
    if (!(p > std::numbers::e)) throw DomainError("concentration_subexp: need p > e");
    if (!(U > 0.0)) throw ValidationError("U", "must be > 0");
    if (n < 1) throw ValidationError("n", "must be >= 1");

    const double nu = static_cast<double>(n) * U;
    const double loglog = std::log(std::log(p));
    const double lambda = std::pow(nu, params.phi) * loglog;

    SubexpBound out;
    out.dominant = std::log(p) / lambda;
    const double log_second =
        std::log(params.a) + lambda - params.b * std::pow(nu, params.gamma) - std::log(lambda);
    out.second = std::exp(log_second);
    out.bound = std::min(1.0, out.dominant);
    out.full = std::min(1.0, out.dominant + out.second);
    out.warning = out.second > 0.01 * out.dominant;
    return out;
}

double optimal_truncation(double q, double r, double phi, double rho_sum, double p, std::size_t n,
                          double M_n) {
    check_truncation_args(q, r, phi, rho_sum, p, n, M_n);
    const double k = phi * (r - 1.0) / r;
    const double base = (phi / q) * ((r - 1.0) / r) * (1.0 / rho_sum) *
                        log_ratio_power(r, phi, p, n) * std::pow(M_n, q);
    return std::pow(base, 1.0 / (q + k));
}

double optimal_truncation_example_form(double q, double r, double phi, double rho_sum, double p,
                                       std::size_t n, double M_n) {
    check_truncation_args(q, r, phi, rho_sum, p, n, M_n);
    const double base =
        phi * (r - 1.0) / (q * r * rho_sum) * log_ratio_power(r, phi, p, n) * std::pow(M_n, q);
    return std::pow(base, 1.0 / (q + phi * (r - 1.0) / r));
}

double subexp_upper_bound(double q, double r, double phi, double rho_sum, double p, std::size_t n,
                          double M_n, double U) {
    if (!(U > 0.0)) throw ValidationError("U", "must be > 0");
    const double k = phi * (r - 1.0) / r;
    const double lead = std::pow(2.0, q - 1.0);
    return lead * rho_sum * std::pow(U, q) +
           lead * std::pow(U, -k) * log_ratio_power(r, phi, p, n) * std::pow(M_n, q);
}

std::string tail_mode_name(const TailMode& mode) {
    return std::visit(overloaded{
                          [](const GeneralTail&) { return std::string("general"); },
                          [](const LqTail&) { return std::string("lq"); },
                          [](const SubexpTail&) { return std::string("subexp"); },
                          [](const EmpiricalTail&) { return std::string("empirical"); },
                      },
                      mode);
}

double tail_probability(const TailMode& mode, double p, std::size_t n, double U) {
    return std::visit(
        overloaded{
            [&](const GeneralTail& m) {
                try {
                    return concentration_general(p, m.pbar);
                } catch (const VacuousBoundError&) {
                    return 1.0;
                }
            },
            [&](const LqTail& m) {
                try {
                    return concentration_lq(p, U, m.q, m.max_mean_moment);
                } catch (const VacuousBoundError&) {
                    return 1.0;
                }
            },
            [&](const SubexpTail& m) { return concentration_subexp(p, n, U, m.params).bound; },
            [&](const EmpiricalTail& m) { return check_probability(m.tail_prob, "tail_prob"); },
        },
        mode);
}

CombinedRemainder combined_remainder(const PsiSpec& psi, std::size_t n, double U, double rho_sum,
                                     double r, double p, const TailMode& mode, double psi_norm) {
    CombinedRemainder out;
    out.r1 = remainder_R1(psi, n, U, rho_sum);
    out.tail_prob = tail_probability(mode, p, n, U);
    out.r2 = remainder_R2(r, out.tail_prob, psi_norm);
    out.total = out.r1 + out.r2;
    return out;
}

}  // namespace blocksymm
