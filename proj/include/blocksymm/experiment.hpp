#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "blocksymm/bounds_mc.hpp"
#include "blocksymm/config.hpp"
#include "blocksymm/gaussian_compare.hpp"

namespace blocksymm {

struct ExperimentResult {
    std::vector<std::string> names;  // file stem per report, e.g. "theorem1_q2"
    std::vector<VerificationReport> reports;
    std::vector<nlohmann::json> documents;  // serialized reports incl. psi and tail model
    RhoEstimate rho;
    std::string covariance_source;
    std::optional<std::string> error;  // set when a check aborted; later checks were skipped

    [[nodiscard]] bool violated() const;
    /// 0 all checks hold (within noise), 1 some inequality violated, 2 aborted.
    [[nodiscard]] int exit_code() const;
};

/// Estimates the Gaussian model and the rho's once, then runs the requested
/// checks in config order. Runtime errors are captured in `error`.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct WrittenFiles {
    std::vector<std::filesystem::path> reports;
    std::filesystem::path summary;
    std::filesystem::path metadata;
};

/// <dir>/<prefix>_<name>.json per report, <prefix>_summary.csv and
/// <prefix>_metadata.json (timestamp, worker count, partial flag).
WrittenFiles write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result);

enum class PlotKind { CdfOverlay, RemainderVsU, BoundVsP };

[[nodiscard]] PlotKind parse_plot_kind(const std::string& name);

struct PlotRow {
    std::string series;
    double x = 0.0;
    double y = 0.0;
};

/// Long-format plot data from serialized reports.
[[nodiscard]] std::vector<PlotRow> plot_data(PlotKind kind,
                                             const std::vector<nlohmann::json>& reports,
                                             std::size_t grid_points = 50);

void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows);

[[nodiscard]] nlohmann::json read_report(const std::filesystem::path& path);

}  // namespace blocksymm
