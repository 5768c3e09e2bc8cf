#include "blocksymm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "blocksymm/errors.hpp"
#include "blocksymm/parallel.hpp"
#include "blocksymm/report_io.hpp"
#include "blocksymm/rng.hpp"

namespace blocksymm {

using nlohmann::json;

namespace {

// Fixed per-check stream indices, so adding a check never reseeds another.
std::uint64_t check_seed(std::uint64_t master, std::uint64_t index) {
    return rng::substream(master, rng::Stream::Quantity, index);
}

std::string format_q(double q) {
    std::ostringstream out;
    out << q;
    std::string s = out.str();
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

struct Shared {
    BlockScheme scheme = make_blocks(1, 1);
    GaussianModel model;
    RhoRun rho;
    std::vector<CdfSeries> cdfs;
};

// U for a check: fixed, optimal for the power exponent q, or the support bound.
double truncation_for(const ExperimentConfig& cfg, const Shared& shared, double q,
                      std::uint64_t seed, std::map<std::string, double>& notes) {
    if (!cfg.truncation) {
        const auto bound = cfg.dgp.support_bound();
        if (!bound || !(*bound > 0.0))
            throw ValidationError("truncation", "no truncation level and no positive support bound");
        notes["U_source_support"] = 1.0;
        return *bound;
    }
    if (const auto* f = std::get_if<FixedTruncation>(&*cfg.truncation)) return f->U;

    const double phi = std::get<OptimalTruncation>(*cfg.truncation).phi;
    const MomentNorm norm = psi_moment_norm(PsiSpec::power(q), cfg.dgp, cfg.r, cfg.reps, seed);
    const double M_n = std::pow(norm.value, 1.0 / q) / 2.0;
    const double U = optimal_truncation(q, cfg.r, phi, shared.rho.estimate.sum(),
                                        static_cast<double>(cfg.dgp.p), cfg.dgp.n, M_n);
    notes["U_optimal_phi"] = phi;
    notes["U_optimal_M_n"] = M_n;
    return U;
}

TailParams fitted_envelope(const ExperimentConfig& cfg, const Shared& shared) {
    // Var(xbar_i) = cov_ii / n for the sqrt(n)-scaled model covariance.
    const double n = static_cast<double>(cfg.dgp.n);
    const double s2 = shared.model.cov.diagonal().maxCoeff() / n;
    TailParams params;
    params.a = 2.0;
    params.gamma = 2.0;
    params.b = s2 > 0.0 ? 1.0 / (2.0 * n * n * s2) : 1e300;
    params.phi = cfg.truncation && std::holds_alternative<OptimalTruncation>(*cfg.truncation)
                     ? std::get<OptimalTruncation>(*cfg.truncation).phi
                     : cfg.theorem1.envelope.params.phi;
    return params;
}

void finish(ExperimentResult& out, const ExperimentConfig& cfg, const Shared& shared,
            std::string name, VerificationReport rep, const std::map<std::string, double>& notes) {
    rep.context.seed = cfg.seed;
    rep.rho = shared.rho.estimate;
    rep.cdfs = shared.cdfs;
    for (const auto& [k, v] : notes) rep.diagnostics[k] = v;
    json doc = to_json(rep);
    doc["context"]["psi_spec"] = rep.check == "theorem1" && rep.context.q
                                     ? json{{"kind", "power"}, {"q", *rep.context.q}}
                                     : cfg.psi_json;
    doc["context"]["covariance_source"] = shared.model.source_name();
    out.names.push_back(std::move(name));
    out.reports.push_back(std::move(rep));
    out.documents.push_back(std::move(doc));
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

}  // namespace

bool ExperimentResult::violated() const {
    return std::any_of(reports.begin(), reports.end(),
                       [](const VerificationReport& r) { return r.violated(); });
}

int ExperimentResult::exit_code() const {
    if (error) return 2;
    return violated() ? 1 : 0;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult out;
    try {
        Shared shared;
        shared.scheme = make_blocks(cfg.dgp.n, cfg.b);
        shared.model = default_gaussian_model(
            cfg.dgp, cfg.rho_reps, rng::substream(cfg.seed, rng::Stream::Calibration, 1));
        shared.rho = estimate_rhos_with_samples(cfg.dgp, shared.scheme, cfg.multiplier,
                                                shared.model, cfg.rho_reps,
                                                check_seed(cfg.seed, 100));
        shared.cdfs = {summarize_cdf("plain", shared.rho.samples.plain),
                       summarize_cdf("multiplier", shared.rho.samples.multiplier),
                       summarize_cdf("gaussian", shared.rho.samples.gaussian)};
        out.rho = shared.rho.estimate;
        out.covariance_source = shared.model.source_name();

        const double psi_q = cfg.psi.as_power() ? cfg.psi.as_power()->q : 1.0;
        for (const auto& check : cfg.checks) {
            std::map<std::string, double> notes;
            if (check == "rho-only") {
                VerificationReport rep;
                rep.check = "rho-only";
                rep.context.n = cfg.dgp.n;
                rep.context.p = cfg.dgp.p;
                rep.context.b = cfg.b;
                rep.context.dgp = cfg.dgp.kind_name();
                rep.context.psi = cfg.psi.name();
                rep.context.multiplier = cfg.multiplier.name();
                const double crit = ks_two_sample_critical(cfg.rho_reps, cfg.rho_reps, 1.36);
                notes["ks_critical_5pct"] = crit;
                finish(out, cfg, shared, "rho_only", std::move(rep), notes);
            } else if (check == "prop1") {
                const double U = truncation_for(cfg, shared, psi_q, check_seed(cfg.seed, 401), notes);
                AuditSettings s{cfg.reps, check_seed(cfg.seed, 201), cfg.force_zero_remainder};
                finish(out, cfg, shared, "prop1",
                       verify_prop1(cfg.dgp, shared.scheme, cfg.multiplier, cfg.psi, U,
                                    shared.rho.estimate, s),
                       notes);
            } else if (check == "prop2") {
                const double U = truncation_for(cfg, shared, psi_q, check_seed(cfg.seed, 402), notes);
                AuditSettings s{cfg.reps, check_seed(cfg.seed, 202), cfg.force_zero_remainder};
                finish(out, cfg, shared, "prop2",
                       verify_prop2(cfg.dgp, shared.scheme, cfg.multiplier, cfg.psi, U, cfg.r,
                                    shared.rho.estimate, s),
                       notes);
            } else if (check == "independence-reduction") {
                AuditSettings s{cfg.reps, check_seed(cfg.seed, 203), cfg.force_zero_remainder};
                finish(out, cfg, shared, "independence_reduction",
                       verify_independence_reduction(cfg.dgp, cfg.psi, s), notes);
            } else if (check == "theorem1") {
                for (std::size_t k = 0; k < cfg.theorem1.q.size(); ++k) {
                    const double q = cfg.theorem1.q[k];
                    std::map<std::string, double> qnotes;
                    const double U =
                        truncation_for(cfg, shared, q, check_seed(cfg.seed, 410 + k), qnotes);
                    TheoremTail tail = LqTheoremTail{};
                    if (cfg.theorem1.tail_mode == "subexp") {
                        tail = SubexpTheoremTail{cfg.theorem1.envelope.fitted
                                                     ? fitted_envelope(cfg, shared)
                                                     : cfg.theorem1.envelope.params};
                    }
                    AuditSettings s{cfg.reps, check_seed(cfg.seed, 300 + k),
                                    cfg.force_zero_remainder};
                    finish(out, cfg, shared, "theorem1_q" + format_q(q),
                           theorem1_bound(cfg.dgp, shared.scheme, cfg.multiplier, q, cfg.r, U,
                                          shared.rho.estimate, tail, s),
                           qnotes);
                }
            }
        }
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

WrittenFiles write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    WrittenFiles files;
    const auto open = [](const fs::path& path) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        return f;
    };

    for (std::size_t k = 0; k < result.documents.size(); ++k) {
        const fs::path path = cfg.output_dir / (cfg.prefix + "_" + result.names[k] + ".json");
        auto f = open(path);
        f << dump_report(result.documents[k]);
        files.reports.push_back(path);
    }

    files.summary = cfg.output_dir / (cfg.prefix + "_summary.csv");
    {
        auto f = open(files.summary);
        write_summary_header(f);
        for (const auto& r : result.reports) write_summary_rows(f, r);
    }

    files.metadata = cfg.output_dir / (cfg.prefix + "_metadata.json");
    json meta{{"schema_version", kReportSchemaVersion},
              {"created_utc", utc_timestamp()},
              {"workers", worker_count()},
              {"partial", result.error.has_value()},
              {"error", result.error ? json(*result.error) : json(nullptr)},
              {"exit_code", result.exit_code()},
              {"reports", json::array()}};
    for (const auto& p : files.reports) meta["reports"].push_back(p.filename().string());
    auto f = open(files.metadata);
    f << dump_report(meta);
    return files;
}

PlotKind parse_plot_kind(const std::string& name) {
    if (name == "cdf-overlay") return PlotKind::CdfOverlay;
    if (name == "remainder-vs-U") return PlotKind::RemainderVsU;
    if (name == "bound-vs-p") return PlotKind::BoundVsP;
    throw ValidationError("kind", "unknown plot kind '" + name +
                                      "' (cdf-overlay, remainder-vs-U, bound-vs-p)");
}

json read_report(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("missing report: " + path.string());
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw std::runtime_error("cannot parse report " + path.string() + ": " + e.what());
    }
}

namespace {

double diag(const json& doc, const char* key) {
    const auto& d = doc.at("diagnostics");
    if (!d.contains(key) || !d.at(key).is_number())
        throw ValidationError(std::string("diagnostics.") + key, "missing from report");
    return d.at(key).get<double>();
}

std::string label(const json& doc, std::size_t index) {
    return doc.at("check").get<std::string>() + "#" + std::to_string(index);
}

void remainder_curves(const json& doc, std::size_t index, std::size_t points,
                      std::vector<PlotRow>& rows) {
    const auto& ctx = doc.at("context");
    if (!ctx.at("U").is_number()) return;
    const double U0 = ctx.at("U").get<double>();
    const auto n = ctx.at("n").get<std::size_t>();
    const double p = ctx.at("p").get<double>();
    const PsiSpec psi = psi_from_json(ctx.at("psi_spec"));
    const double rho_sum = doc.at("rho").at("sum").get<double>();
    const std::string tag = label(doc, index);
    const bool has_r2 = doc.at("remainders").contains("R2");

    const double lo = U0 / 10.0;
    const double hi = 3.0 * U0;
    for (std::size_t j = 0; j < points; ++j) {
        const double U = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
        if (!has_r2) {
            rows.push_back({tag + ":R_n", U, remainder_Rn(psi, n, U, rho_sum)});
            continue;
        }
        double r1 = remainder_R1(psi, n, U, rho_sum);
        if (doc.at("check") == "theorem1" && ctx.at("q").is_number())
            r1 = std::max(r1, remainder_R1_printed(ctx.at("q").get<double>(), n, U, rho_sum));
        const double r = ctx.at("r").get<double>();
        const double tail =
            tail_probability(LqTail{diag(doc, "moment_order"), diag(doc, "max_mean_moment")}, p, n, U);
        rows.push_back({tag + ":R1", U, r1});
        rows.push_back({tag + ":R2", U, remainder_R2(r, tail, diag(doc, "psi_norm"))});
    }
}

void bound_curves(const json& doc, std::size_t index, std::vector<PlotRow>& rows) {
    const auto& ctx = doc.at("context");
    if (!ctx.at("U").is_number()) return;
    const double U = ctx.at("U").get<double>();
    const auto n = ctx.at("n").get<std::size_t>();
    const std::string tag = label(doc, index);
    const auto& d = doc.at("diagnostics");

    TailParams params;
    bool have_envelope = false;
    if (d.contains("envelope_a")) {
        params = {diag(doc, "envelope_a"), diag(doc, "envelope_b"), diag(doc, "envelope_gamma"),
                  diag(doc, "envelope_phi")};
        have_envelope = true;
    }
    const bool have_moment = d.contains("max_mean_moment") && d.contains("moment_order");
    for (int e = 1; e <= 6; ++e) {
        const double p = std::pow(10.0, e);
        if (have_envelope)
            rows.push_back({tag + ":lemma1c", p, concentration_subexp(p, n, U, params).bound});
        if (have_moment)
            rows.push_back({tag + ":lemma1b", p,
                            tail_probability(LqTail{diag(doc, "moment_order"),
                                                    diag(doc, "max_mean_moment")},
                                             p, n, U)});
    }
}

}  // namespace

std::vector<PlotRow> plot_data(PlotKind kind, const std::vector<json>& reports,
                               std::size_t grid_points) {
    if (grid_points < 2) throw ValidationError("grid_points", "need at least 2 points");
    std::vector<PlotRow> rows;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const json& doc = reports[k];
        switch (kind) {
            case PlotKind::CdfOverlay:
                for (const auto& s : doc.at("cdfs")) {
                    const auto z = s.at("z").get<std::vector<double>>();
                    const auto F = s.at("F").get<std::vector<double>>();
                    const std::string tag = label(doc, k) + ":" + s.at("name").get<std::string>();
                    for (std::size_t j = 0; j < z.size(); ++j) rows.push_back({tag, z[j], F[j]});
                }
                break;
            case PlotKind::RemainderVsU:
                remainder_curves(doc, k, grid_points, rows);
                break;
            case PlotKind::BoundVsP:
                bound_curves(doc, k, rows);
                break;
        }
    }
    return rows;
}

void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows) {
    out << "series,x,y\n";
    out << std::setprecision(12);
    for (const auto& r : rows) out << r.series << ',' << r.x << ',' << r.y << '\n';
}

}  // namespace blocksymm
