#include "blocksymm/report_io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace blocksymm {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

// JSON has no inf/nan; report them as strings rather than dropping them.
json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

std::string csv_number(double v) {
    std::ostringstream out;
    out << std::setprecision(10) << v;
    return out.str();
}

std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : ""; }

}  // namespace

json to_json(const ExpectationEstimate& e) {
    return json{{"mean", number(e.mean)},
                {"se", number(e.se)},
                {"reps", e.reps},
                {"mode", e.mode == EstimateMode::MonteCarlo ? "mc" : "exact-enumeration"}};
}

json to_json(const RhoEstimate& r) {
    return json{{"rho", r.rho},   {"rho_star", r.rho_star}, {"rho_direct", r.rho_direct},
                {"reps", r.reps}, {"se", r.se},             {"sum", r.sum()}};
}

json to_json(const VerificationReport& report) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["check"] = report.check;
    const auto& c = report.context;
    j["context"] = json{{"n", c.n},
                        {"p", c.p},
                        {"b", c.b},
                        {"q", optional_number(c.q)},
                        {"r", optional_number(c.r)},
                        {"U", optional_number(c.U)},
                        {"seed", c.seed},
                        {"dgp", c.dgp},
                        {"psi", c.psi},
                        {"multiplier", c.multiplier}};
    j["lhs"] = to_json(report.lhs);
    j["mid"] = to_json(report.mid);
    j["rhs"] = to_json(report.rhs);
    j["remainders"] = json::object();
    for (const auto& [k, v] : report.remainders) j["remainders"][k] = number(v);
    j["rho"] = to_json(report.rho);
    j["inequalities"] = json::array();
    for (const auto& q : report.inequalities) {
        j["inequalities"].push_back(json{{"name", q.name},
                                         {"lhs", number(q.lhs)},
                                         {"lhs_se", number(q.lhs_se)},
                                         {"rhs", number(q.rhs)},
                                         {"rhs_se", number(q.rhs_se)},
                                         {"remainder", number(q.remainder)},
                                         {"margin", number(q.margin)},
                                         {"margin_se", number(q.margin_se)},
                                         {"verdict", verdict_name(q.verdict)}});
    }
    j["diagnostics"] = json::object();
    for (const auto& [k, v] : report.diagnostics) j["diagnostics"][k] = number(v);
    j["warnings"] = report.warnings;
    j["cdfs"] = json::array();
    for (const auto& s : report.cdfs) j["cdfs"].push_back(json{{"name", s.name}, {"z", s.z}, {"F", s.F}});
    j["violated"] = report.violated();
    return j;
}

const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> cols{"check", "lhs",  "lhs_se", "rhs", "rhs_se",
                                               "remainder", "margin", "verdict", "seed", "n",
                                               "p", "b", "q", "r", "U"};
    return cols;
}

void write_summary_header(std::ostream& out) {
    const auto& cols = summary_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
}

void write_summary_rows(std::ostream& out, const VerificationReport& report) {
    const auto& c = report.context;
    for (const auto& q : report.inequalities) {
        out << report.check << ':' << q.name << ',' << csv_number(q.lhs) << ','
            << csv_number(q.lhs_se) << ',' << csv_number(q.rhs) << ',' << csv_number(q.rhs_se)
            << ',' << csv_number(q.remainder) << ',' << csv_number(q.margin) << ','
            << verdict_name(q.verdict) << ',' << c.seed << ',' << c.n << ',' << c.p << ',' << c.b
            << ',' << csv_optional(c.q) << ',' << csv_optional(c.r) << ',' << csv_optional(c.U)
            << '\n';
    }
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace blocksymm
