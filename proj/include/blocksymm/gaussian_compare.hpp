#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "blocksymm/blocking.hpp"
#include "blocksymm/processes.hpp"

namespace blocksymm {

enum class CovarianceSource { Analytic, MonteCarlo, User };

/// Covariance of the Gaussian comparison vector (X_n(1), ..., X_n(p)).
/// The full matrix E X_n(i) X_n(j) is used, not only its diagonal.
struct GaussianModel {
    Matrix cov;
    CovarianceSource source = CovarianceSource::User;
    std::size_t reps = 0;  // Monte Carlo replications behind `cov`, 0 otherwise

    [[nodiscard]] std::string source_name() const;
};

struct AnalyticCovariance {};
struct MonteCarloCovariance {
    std::size_t reps = 10000;
    std::uint64_t seed = 0;
};
using CovarianceMethod = std::variant<AnalyticCovariance, MonteCarloCovariance>;

/// Analytic: theoretical_longrun_cov(spec). Monte Carlo: average of the outer
/// products of sqrt(n) xbar_n over fresh panels (the mean is known to be 0).
[[nodiscard]] GaussianModel estimate_gaussian_model(const DgpSpec& spec,
                                                    const CovarianceMethod& method);

/// Analytic when the kind has a closed form, Monte Carlo otherwise.
[[nodiscard]] GaussianModel default_gaussian_model(const DgpSpec& spec, std::size_t mc_reps,
                                                   std::uint64_t seed);

/// Symmetric square root of a model covariance after clipping eigenvalues
/// that are negative within 1e-8 of the largest. Throws NumericalError if the
/// matrix is asymmetric beyond 1e-10 or clearly indefinite.
[[nodiscard]] Matrix covariance_root(const Matrix& cov);

/// iid draws of max_i |Z_i|, Z ~ N(0, cov); draw k uses its own substream.
[[nodiscard]] std::vector<double> sample_gaussian_max(const GaussianModel& model,
                                                      std::size_t draws, std::uint64_t seed);

/// sup_z |F_a(z) - F_b(z)| for the two empirical CDFs, computed exactly.
[[nodiscard]] double kolmogorov_distance(std::span<const double> a, std::span<const double> b);

/// c_alpha * sqrt((m + k) / (m k)); c_alpha = 1.36 is the 5% level, 1.63 the 1% level.
[[nodiscard]] double ks_two_sample_critical(std::size_t m, std::size_t k, double c_alpha = 1.36);

struct RhoEstimate {
    double rho = 0.0;
    double rho_star = 0.0;
    double rho_direct = 0.0;
    std::size_t reps = 0;
    double se = 0.0;  // 2 sqrt(ln(2 / 0.05) / (2 reps))

    [[nodiscard]] double sum() const noexcept { return rho + rho_star; }
};

[[nodiscard]] double rho_uncertainty(std::size_t reps);

/// The three simulated laws behind a RhoEstimate, each of length reps.
struct RhoSamples {
    std::vector<double> plain;       // max_i |X_n(i)|
    std::vector<double> multiplier;  // max_i |X*_n(i)|
    std::vector<double> gaussian;    // max_i |bold X_n(i)|
};

struct RhoRun {
    RhoEstimate estimate;
    RhoSamples samples;
};

/// Unconditional Kolmogorov distances: every replication uses a fresh panel
/// and, for X*_n, fresh multipliers.
[[nodiscard]] RhoRun estimate_rhos_with_samples(const DgpSpec& spec, const BlockScheme& scheme,
                                                const MultiplierSpec& mult,
                                                const GaussianModel& model, std::size_t reps,
                                                std::uint64_t seed);

[[nodiscard]] RhoEstimate estimate_rhos(const DgpSpec& spec, const BlockScheme& scheme,
                                        const MultiplierSpec& mult, const GaussianModel& model,
                                        std::size_t reps, std::uint64_t seed);

}  // namespace blocksymm
