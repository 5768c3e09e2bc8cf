#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "blocksymm/blocking.hpp"
#include "blocksymm/gaussian_compare.hpp"
#include "blocksymm/processes.hpp"
#include "blocksymm/psi.hpp"
#include "blocksymm/remainders.hpp"

namespace blocksymm {

enum class EstimateMode { MonteCarlo, ExactEnumeration };

struct ExpectationEstimate {
    double mean = 0.0;
    double se = 0.0;  // sample sd / sqrt(reps); 0 for exact enumeration
    std::size_t reps = 0;
    EstimateMode mode = EstimateMode::MonteCarlo;

    [[nodiscard]] ExpectationEstimate scaled(double factor) const {
        return {mean * factor, se * std::abs(factor), reps, mode};
    }
};

/// Per-replication statistic fed to psi.
enum class Statistic {
    Plain,                // max_i |xbar_i|
    Multiplier,           // max_i |(1/n) sum_l eps_l S_l(i)|
    PlainIndepCopy,       // max_i |(1/n) sum_t (x_{i,t} - x~_{i,t})|
    MultiplierIndepCopy,  // max_i |(1/n) sum_t eta_t (x_{i,t} - x~_{i,t})|
    TruncatedIndicator,   // max_i |xbar_i|, with psi(.) replaced by psi(.) 1{max > U}
    BlockQuadratic,       // sqrt(max_i (1/n) sum_l S_l(i)^2)
};

[[nodiscard]] std::string statistic_name(Statistic s);

struct StatisticRequest {
    Statistic statistic = Statistic::Plain;
    DgpSpec dgp;
    BlockScheme scheme = make_blocks(1, 1);
    MultiplierSpec multiplier;
    std::size_t reps = 1000;
    std::uint64_t seed = 0;
};

/// Raw statistic values, one per replication. Replication k draws its panel,
/// copy and multipliers from substreams k of `seed`, so a request with the
/// same seed reuses the same panels whatever the statistic.
[[nodiscard]] std::vector<double> sample_statistic(const StatisticRequest& request);

/// Mean of psi(scale * statistic) over fresh replications. `truncation` is the
/// level U used by Statistic::TruncatedIndicator. Throws NumericalError naming
/// the replication whose psi value overflows.
[[nodiscard]] ExpectationEstimate mc_expect_psi_max(const StatisticRequest& request,
                                                    const PsiSpec& psi, double scale,
                                                    double truncation = 0.0);

/// Mean and standard error of arbitrary replication values.
[[nodiscard]] ExpectationEstimate summarize(std::span<const double> values);

/// E psi(max) = int_0^inf psi'(v) P(max > v) dv evaluated with the empirical
/// survival function of `samples` on a uniform grid and the trapezoid rule.
[[nodiscard]] double expect_psi_via_tail_integral(std::span<const double> samples,
                                                  const PsiSpec& psi, std::size_t grid_points);

struct ExactExpectations {
    double lhs = 0.0;  // E psi(max |xbar|)
    double mid = 0.0;  // E psi(scale * max |(1/n) sum eps_l S_l|)
    double rhs = 0.0;  // E psi(scale * max |xbar|)
    std::optional<double> copy_plain;       // E psi(scale * max |(1/n) sum (x - x~)|)
    std::optional<double> copy_multiplier;  // E psi(scale * max |(1/n) sum eta (x - x~)|)
    std::size_t outcomes = 0;
};

/// Brute-force expectations for a BoundedRademacher panel with Rademacher
/// multipliers. Outcomes 2^{np} 2^N (2^{2np} 2^N with the copy) must not
/// exceed 2^24.
[[nodiscard]] ExactExpectations exact_enumeration(const DgpSpec& spec, const BlockScheme& scheme,
                                                  const MultiplierSpec& mult, const PsiSpec& psi,
                                                  double scale, bool with_copy = false);

enum class Verdict { Holds, HoldsWithinNoise, Violated };

[[nodiscard]] std::string verdict_name(Verdict v);

/// Decision rule: margin <= 0 holds; 0 < margin <= 3 se holds within noise;
/// anything larger is a violation.
[[nodiscard]] Verdict decide(double margin, double se);

/// One inequality lhs <= rhs + remainder with margin = lhs - rhs - remainder.
struct InequalityCheck {
    std::string name;
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    double rhs_se = 0.0;
    double remainder = 0.0;
    double margin = 0.0;
    double margin_se = 0.0;
    Verdict verdict = Verdict::Holds;
};

[[nodiscard]] InequalityCheck make_check(std::string name, const ExpectationEstimate& lhs,
                                         const ExpectationEstimate& rhs, double remainder);

struct ReportContext {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t b = 0;
    std::optional<double> q;
    std::optional<double> r;
    std::optional<double> U;
    std::uint64_t seed = 0;
    std::string dgp;
    std::string psi;
    std::string multiplier;
};

struct CdfSeries {
    std::string name;
    std::vector<double> z;  // sorted support points
    std::vector<double> F;  // empirical CDF at z
};

struct VerificationReport {
    std::string check;
    ReportContext context;
    ExpectationEstimate lhs;
    ExpectationEstimate mid;
    ExpectationEstimate rhs;
    std::map<std::string, double> remainders;
    RhoEstimate rho;
    std::vector<InequalityCheck> inequalities;
    std::map<std::string, double> diagnostics;
    std::vector<std::string> warnings;
    std::vector<CdfSeries> cdfs;

    [[nodiscard]] bool violated() const;
};

/// Empirical CDF of `values` summarised at the 0, 1/(points-1), ..., 1 quantiles.
[[nodiscard]] CdfSeries summarize_cdf(std::string name, std::span<const double> values,
                                      std::size_t points = 101);

/// Quantities shared by the verification routines.
struct AuditSettings {
    std::size_t reps = 10000;
    std::uint64_t seed = 0;
    /// Testing hook: sets every remainder to 0 so a dependent panel exposes
    /// the raw inequality.
    bool force_zero_remainder = false;
};

/// Bounded dependence: E psi(max|xbar|) <= E psi(max|(1/n) sum eps S|) + R_n
/// <= E psi(max|xbar|) + 2 R_n, with R_n from the estimated rho's.
[[nodiscard]] VerificationReport verify_prop1(const DgpSpec& spec, const BlockScheme& scheme,
                                              const MultiplierSpec& mult, const PsiSpec& psi,
                                              double U, const RhoEstimate& rho,
                                              const AuditSettings& settings);

/// Unbounded dependence with truncation at U and Hoelder exponent r:
/// E psi(max|xbar|) <= (1/2) E psi(2 max|mult|) + R'_1 + R'_2
/// <= (1/2) E psi(2 max|xbar|) + 2 (R'_1 + R'_2).
[[nodiscard]] VerificationReport verify_prop2(const DgpSpec& spec, const BlockScheme& scheme,
                                              const MultiplierSpec& mult, const PsiSpec& psi,
                                              double U, double r, const RhoEstimate& rho,
                                              const AuditSettings& settings);

/// b = 1, Rademacher, independent-copy form: both sides must agree within noise.
[[nodiscard]] VerificationReport verify_independence_reduction(const DgpSpec& spec,
                                                               const PsiSpec& psi,
                                                               const AuditSettings& settings);

struct LqTheoremTail {};
struct SubexpTheoremTail {
    TailParams params;
};
using TheoremTail = std::variant<LqTheoremTail, SubexpTheoremTail>;

/// 2^{q/2} c^q (ln(2p)/n)^{q/2}.
[[nodiscard]] double hoeffding_factor(double q, double c, std::size_t p, std::size_t n);

/// Maximal moment bound for psi = x^q:
/// E max|xbar|^q <= hoeffding_factor E(max_i (1/n) sum_l S_l^2)^{q/2} + (1/2)(R'_1 + R'_2),
/// R'_1 taken as the larger of the printed and the quadrature value. Also audits
/// the conditional Hoeffding step on `hoeffding_panels` panels with
/// `hoeffding_inner` multiplier draws each.
struct TheoremSettings {
    std::size_t hoeffding_panels = 2000;
    std::size_t hoeffding_inner = 200;
};

[[nodiscard]] VerificationReport theorem1_bound(const DgpSpec& spec, const BlockScheme& scheme,
                                                const MultiplierSpec& mult, double q, double r,
                                                double U, const RhoEstimate& rho,
                                                const TheoremTail& tail,
                                                const AuditSettings& settings,
                                                const TheoremSettings& theorem = {});

/// Clopper-Pearson upper confidence limit for a binomial proportion.
[[nodiscard]] double clopper_pearson_upper(std::size_t successes, std::size_t trials,
                                           double confidence = 0.975);

}  // namespace blocksymm
