#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "blocksymm/blocking.hpp"
#include "blocksymm/processes.hpp"
#include "blocksymm/psi.hpp"
#include "blocksymm/remainders.hpp"

namespace blocksymm {

struct ConfigIssue {
    std::string field;
    std::string message;
};

/// Every problem found in a config, not just the first.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    [[nodiscard]] const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct FixedTruncation {
    double U = 1.0;
};
/// U* from optimal_truncation with the given tuning exponent.
struct OptimalTruncation {
    double phi = 0.5;
};
using TruncationSpec = std::variant<FixedTruncation, OptimalTruncation>;

/// Theorem-1 sub-exponential envelope: explicit parameters, or "fitted" to a
/// Gaussian tail of the mean (a = 2, gamma = 2, b = 1 / (2 n^2 s^2)).
struct EnvelopeSpec {
    bool fitted = true;
    TailParams params{2.0, 1.0, 2.0, 0.5};
};

struct Theorem1Options {
    std::vector<double> q{1.0, 2.0};
    std::string tail_mode = "lq";  // lq | subexp
    EnvelopeSpec envelope;
};

struct ExperimentConfig {
    DgpSpec dgp;
    std::size_t b = 1;
    MultiplierSpec multiplier;
    PsiSpec psi;
    nlohmann::json psi_json;  // normalised psi section, echoed into reports
    std::optional<TruncationSpec> truncation;
    double r = 2.0;
    std::size_t reps = 10000;
    std::size_t rho_reps = 10000;
    std::uint64_t seed = 0;
    std::vector<std::string> checks;
    Theorem1Options theorem1;
    std::filesystem::path output_dir = "out";
    std::string prefix = "run";
    bool force_zero_remainder = false;
};

/// Check names accepted in `checks`.
[[nodiscard]] const std::vector<std::string>& known_checks();

/// Reads a .json, .yaml or .yml file into JSON.
[[nodiscard]] nlohmann::json load_config_document(const std::filesystem::path& path);

/// Throws ConfigError listing every invalid or unknown field.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& doc);

[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

[[nodiscard]] PsiSpec psi_from_json(const nlohmann::json& j);

}  // namespace blocksymm
