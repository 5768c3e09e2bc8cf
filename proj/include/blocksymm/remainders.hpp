#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "blocksymm/psi.hpp"

namespace blocksymm {

// Blocking remainders. Every integral of psi' is evaluated by adaptive
// quadrature in the variable v of its definition; the power-map closed forms
// below are cross-checks.

/// R_n = (1/sqrt n) rho_sum int_0^{sqrt(n) U} psi'(v / sqrt n) dv.
[[nodiscard]] double remainder_Rn(const PsiSpec& psi, std::size_t n, double U, double rho_sum);

/// R'_{n,1} = (1/2) rho_sum (1/sqrt n) int_0^{sqrt(n) U} psi'(2 v / sqrt n) dv.
[[nodiscard]] double remainder_R1(const PsiSpec& psi, std::size_t n, double U, double rho_sum);

/// Substitution u = v / sqrt(n) for psi = x^q: R_n = rho_sum U^q.
[[nodiscard]] double remainder_Rn_power_closed(double q, double U, double rho_sum);

/// Substitution for psi = x^q: R'_{n,1} = 2^{q-2} rho_sum U^q.
[[nodiscard]] double remainder_R1_power_closed(double q, double U, double rho_sum);

/// Printed power-map value U^q n^{-q/2} rho_sum, which carries an n^{-q/2}
/// factor that the integral definition does not produce. Reported, never used
/// as ground truth.
[[nodiscard]] double remainder_Rn_printed(double q, std::size_t n, double U, double rho_sum);

/// Printed maximal-moment value 2^q U^q n^{-q/2} rho_sum of R'_{n,1}.
[[nodiscard]] double remainder_R1_printed(double q, std::size_t n, double U, double rho_sum);

/// R'_{n,2} = (1/2) tail_prob^{(r-1)/r} psi_norm.
[[nodiscard]] double remainder_R2(double r, double tail_prob, double psi_norm);

// Concentration bounds for P(max_i |xbar_{i,n}| >= U). Each comes from the
// log-exp inequality P <= ln(p)/lambda + exp(lambda) pbar / lambda with the
// stated lambda, and is clamped at 1.

/// 2 ln(p) / ln(pbar^{-1} ln p). pbar = 0 gives 0. Throws VacuousBoundError
/// when pbar^{-1} ln(p) <= 1.
[[nodiscard]] double concentration_general(double p, double pbar);

/// concentration_general with the Markov substitution pbar = moment / U^q.
[[nodiscard]] double concentration_lq(double p, double U, double q, double max_mean_moment);

/// Sub-exponential envelope P(|xbar_{i,n}| >= c) <= a exp(-b n^gamma c^gamma)
/// and a tuning exponent phi in (0, gamma).
struct TailParams {
    double a = 1.0;
    double b = 1.0;
    double gamma = 1.0;
    double phi = 0.5;

    void validate() const;
};

struct SubexpBound {
    double bound = 1.0;     // min(1, dominant)
    double dominant = 0.0;  // ln(p) / (n^phi U^phi ln ln p)
    double second = 0.0;    // a (ln p)^{n^phi U^phi} / (n^phi U^phi exp(b n^gamma U^gamma) ln ln p)
    double full = 1.0;      // min(1, dominant + second), a bound at every finite n
    bool warning = false;   // second > 1% of dominant
};

/// Throws DomainError for p <= e.
[[nodiscard]] SubexpBound concentration_subexp(double p, std::size_t n, double U,
                                               const TailParams& params);

/// Minimiser of the power-map sub-exponential upper bound, as printed after the
/// unbounded symmetrization result:
///   {(phi/q)((r-1)/r)(1/rho_sum)(ln p/(n^phi ln ln p))^{(r-1)/r} M^q}^{1/(q + phi(r-1)/r)}.
/// Throws ValidationError when rho_sum = 0 (no blocking penalty, U* = inf).
[[nodiscard]] double optimal_truncation(double q, double r, double phi, double rho_sum, double p,
                                        std::size_t n, double M_n);

/// Same minimiser in the worked sub-exponential example's arrangement
/// {phi (r-1) / (q r rho_sum) (...)^{(r-1)/r} M^q}^{1/(q + phi(r-1)/r)}.
[[nodiscard]] double optimal_truncation_example_form(double q, double r, double phi,
                                                     double rho_sum, double p, std::size_t n,
                                                     double M_n);

/// The upper bound that optimal_truncation minimises:
///   2^{q-1} rho_sum U^q + 2^{q-1} U^{-phi(r-1)/r} (ln p/(n^phi ln ln p))^{(r-1)/r} M^q.
[[nodiscard]] double subexp_upper_bound(double q, double r, double phi, double rho_sum, double p,
                                        std::size_t n, double M_n, double U);

struct GeneralTail {
    double pbar = 0.0;
};
struct LqTail {
    double q = 2.0;
    double max_mean_moment = 0.0;
};
struct SubexpTail {
    TailParams params;
};
struct EmpiricalTail {
    double tail_prob = 0.0;
};
using TailMode = std::variant<GeneralTail, LqTail, SubexpTail, EmpiricalTail>;

[[nodiscard]] std::string tail_mode_name(const TailMode& mode);

/// Tail probability used in R'_{n,2} for the given mode; vacuous Lemma-1
/// bounds count as 1.
[[nodiscard]] double tail_probability(const TailMode& mode, double p, std::size_t n, double U);

struct CombinedRemainder {
    double r1 = 0.0;
    double r2 = 0.0;
    double total = 0.0;
    double tail_prob = 0.0;
};

[[nodiscard]] CombinedRemainder combined_remainder(const PsiSpec& psi, std::size_t n, double U,
                                                   double rho_sum, double r, double p,
                                                   const TailMode& mode, double psi_norm);

}  // namespace blocksymm
