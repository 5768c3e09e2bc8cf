// Batch driver: run, validate and plot.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "blocksymm/config.hpp"
#include "blocksymm/experiment.hpp"

namespace {

int report_config_error(const blocksymm::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block multiplier symmetrization audits"};
    app.require_subcommand(1);

    std::string config_path;
    std::size_t workers = 0;

    auto* run = app.add_subcommand("run", "run the checks listed in a config");
    run->add_option("config", config_path, "JSON or YAML config")->required();
    run->add_option("--workers", workers, "worker threads (overrides BLOCKSYMM_WORKERS)");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "JSON or YAML config")->required();

    std::string kind;
    std::vector<std::string> report_paths;
    std::string plot_out;
    std::size_t grid = 50;
    auto* plot = app.add_subcommand("plot", "long-format CSV (series,x,y) from reports");
    plot->add_option("kind", kind, "cdf-overlay | remainder-vs-U | bound-vs-p")->required();
    plot->add_option("reports", report_paths, "report JSON files")->required();
    plot->add_option("-o,--output", plot_out, "CSV path (default stdout)");
    plot->add_option("--grid", grid, "U grid size for remainder-vs-U");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const auto cfg = blocksymm::load_config(config_path);
            std::cout << "ok: " << cfg.checks.size() << " check(s), n=" << cfg.dgp.n
                      << " p=" << cfg.dgp.p << " b=" << cfg.b << '\n';
            return 0;
        }
        if (*run) {
            if (workers > 0) setenv("BLOCKSYMM_WORKERS", std::to_string(workers).c_str(), 1);
            const auto cfg = blocksymm::load_config(config_path);
            const auto result = blocksymm::run_experiment(cfg);
            const auto files = blocksymm::write_experiment(cfg, result);
            for (const auto& p : files.reports) std::cout << p.string() << '\n';
            std::cout << files.summary.string() << '\n';
            if (result.error) std::cerr << "aborted (partial report): " << *result.error << '\n';
            else if (result.violated()) std::cerr << "at least one inequality is violated\n";
            return result.exit_code();
        }
        if (*plot) {
            const auto plot_kind = blocksymm::parse_plot_kind(kind);
            std::vector<nlohmann::json> docs;
            for (const auto& p : report_paths) docs.push_back(blocksymm::read_report(p));
            const auto rows = blocksymm::plot_data(plot_kind, docs, grid);
            if (plot_out.empty()) {
                blocksymm::write_plot_csv(std::cout, rows);
            } else {
                std::ofstream f(plot_out);
                if (!f) throw std::runtime_error("cannot write " + plot_out);
                blocksymm::write_plot_csv(f, rows);
            }
            return 0;
        }
    } catch (const blocksymm::ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
