#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace blocksymm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// An n x p panel; row t holds x_t, column i holds coordinate i over time.
struct PanelSample {
    Matrix data;
    bool centered = true;

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(data.rows()); }
    [[nodiscard]] std::size_t p() const noexcept { return static_cast<std::size_t>(data.cols()); }
};

enum class InnovationLaw { Gaussian, Rademacher };

struct IidGaussian {};

/// Diagonal VAR(1): x_t = phi x_{t-1} + e_t, started from the stationary law.
struct Var1 {
    double phi = 0.0;
};

/// Causal filter x_t = sum_{j=0}^{J} a_j e_{t-j}, run with J + 100 burn-in steps.
struct LinearProcess {
    std::vector<double> coefficients{1.0};
    InnovationLaw innovation = InnovationLaw::Gaussian;
};

/// Coordinate-wise iid signs times `scale`; supported on {-scale, +scale}.
struct BoundedRademacher {
    double scale = 1.0;
};

/// Var1 output hard-clipped at +-level.
struct TruncatedVar1 {
    double phi = 0.0;
    double level = 1.0;
};

using DgpKind = std::variant<IidGaussian, Var1, LinearProcess, BoundedRademacher, TruncatedVar1>;

/// Innovation covariance sigma^2 [(1 - c) I + c 1 1'], c = equicorrelation.
struct CrossSection {
    double sigma = 1.0;
    double equicorrelation = 0.0;
};

struct DgpSpec {
    DgpKind kind = IidGaussian{};
    std::size_t n = 1;
    std::size_t p = 1;
    CrossSection cross{};

    /// Throws ValidationError naming the offending field (prefixed "dgp.").
    void validate() const;

    /// Declared support half-width for bounded kinds.
    [[nodiscard]] std::optional<double> support_bound() const;

    /// True when x_t is independent over t.
    [[nodiscard]] bool is_iid() const;

    [[nodiscard]] std::string kind_name() const;
};

/// Deterministic in (spec, seed). Mean-zero by construction.
[[nodiscard]] PanelSample generate(const DgpSpec& spec, std::uint64_t seed);

/// Same law as generate(spec, .) on a seed stream disjoint from sample seeds.
[[nodiscard]] PanelSample independent_copy(const DgpSpec& spec, std::uint64_t seed);

/// E X_n(i) X_n(j) = (1/n) sum_{s,t} E x_{i,s} x_{j,t} in closed form.
/// Throws ValidationError for TruncatedVar1, which has no closed form.
[[nodiscard]] Matrix theoretical_longrun_cov(const DgpSpec& spec);

/// Scalar factor w_n with theoretical_longrun_cov = w_n * innovation covariance.
[[nodiscard]] double longrun_weight(const DgpSpec& spec);

/// Innovation covariance implied by spec.cross (scale^2 I for BoundedRademacher).
[[nodiscard]] Matrix innovation_cov(const DgpSpec& spec);

/// Long-run Monte Carlo mean of a single coordinate of a TruncatedVar1 panel,
/// used to audit that clipping keeps the law centred.
[[nodiscard]] double truncated_mean_calibration(const DgpSpec& spec, std::size_t draws,
                                                std::uint64_t seed);

/// CSV with header "t,i,value", 1-based indices, t-major order.
void write_panel_csv(std::ostream& out, const PanelSample& panel);

}  // namespace blocksymm
