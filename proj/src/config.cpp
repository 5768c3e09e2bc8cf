#include "blocksymm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "blocksymm/errors.hpp"

namespace blocksymm {

namespace {

using nlohmann::json;

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::ostringstream out;
    out << "invalid config (" << issues.size() << " issue" << (issues.size() == 1 ? "" : "s") << ")";
    for (const auto& i : issues) out << "\n  " << i.field << ": " << i.message;
    return out.str();
}

json yaml_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return nullptr;
        case YAML::NodeType::Sequence: {
            json out = json::array();
            for (const auto& item : node) out.push_back(yaml_to_json(item));
            return out;
        }
        case YAML::NodeType::Map: {
            json out = json::object();
            for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
            return out;
        }
        case YAML::NodeType::Scalar:
            break;
    }
    const std::string text = node.Scalar();
    if (node.Tag() == "!") return text;  // quoted
    if (text == "true" || text == "True") return true;
    if (text == "false" || text == "False") return false;
    if (text == "null" || text == "~") return nullptr;
    try {
        std::size_t used = 0;
        const long long i = std::stoll(text, &used);
        if (used == text.size()) return i;
    } catch (const std::exception&) {
    }
    try {
        std::size_t used = 0;
        const double d = std::stod(text, &used);
        if (used == text.size()) return d;
    } catch (const std::exception&) {
    }
    return text;
}

// Collects issues while reading one document.
class Reader {
public:
    std::vector<ConfigIssue> issues;

    void fail(const std::string& field, const std::string& message) {
        issues.push_back({field, message});
    }

    void unknown_keys(const json& obj, const std::string& prefix,
                      std::initializer_list<const char*> allowed) {
        if (!obj.is_object()) return;
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : obj.items())
            if (ok.count(key) == 0) fail(path(prefix, key), "unknown key");
    }

    const json* section(const json& root, const std::string& key, bool required) {
        if (!root.contains(key)) {
            if (required) fail(key, "missing section");
            return nullptr;
        }
        const json& s = root.at(key);
        if (!s.is_object()) {
            fail(key, "must be a mapping");
            return nullptr;
        }
        return &s;
    }

    std::optional<double> number(const json& obj, const std::string& prefix, const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(path(prefix, key), "must be a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::uint64_t> count(const json& obj, const std::string& prefix, const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            const auto i = v.get<std::int64_t>();
            if (i >= 0) return static_cast<std::uint64_t>(i);
            fail(path(prefix, key), "must be >= 0");
            return std::nullopt;
        }
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0.0 && std::floor(d) == d && d < 1.8e19) return static_cast<std::uint64_t>(d);
        }
        fail(path(prefix, key), "must be a non-negative integer");
        return std::nullopt;
    }

    std::optional<std::string> text(const json& obj, const std::string& prefix, const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (!v.is_string()) {
            fail(path(prefix, key), "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    static std::string path(const std::string& prefix, const std::string& key) {
        return prefix.empty() ? key : prefix + "." + key;
    }
};

DgpSpec read_dgp(Reader& in, const json& d) {
    in.unknown_keys(d, "dgp",
                    {"kind", "n", "p", "phi", "sigma", "equicorrelation", "scale", "level",
                     "coefficients", "innovation"});
    DgpSpec spec;
    if (auto v = in.count(d, "dgp", "n")) spec.n = *v;
    else if (!d.contains("n")) in.fail("dgp.n", "missing");
    if (auto v = in.count(d, "dgp", "p")) spec.p = *v;
    else if (!d.contains("p")) in.fail("dgp.p", "missing");
    if (auto v = in.number(d, "dgp", "sigma")) spec.cross.sigma = *v;
    if (auto v = in.number(d, "dgp", "equicorrelation")) spec.cross.equicorrelation = *v;

    const auto kind = in.text(d, "dgp", "kind");
    if (!kind) {
        if (!d.contains("kind")) in.fail("dgp.kind", "missing");
        return spec;
    }
    const double phi = in.number(d, "dgp", "phi").value_or(0.0);
    if (*kind == "iid_gaussian") {
        spec.kind = IidGaussian{};
    } else if (*kind == "var1") {
        if (!d.contains("phi")) in.fail("dgp.phi", "required for var1");
        spec.kind = Var1{phi};
    } else if (*kind == "truncated_var1") {
        if (!d.contains("phi")) in.fail("dgp.phi", "required for truncated_var1");
        if (!d.contains("level")) in.fail("dgp.level", "required for truncated_var1");
        spec.kind = TruncatedVar1{phi, in.number(d, "dgp", "level").value_or(1.0)};
    } else if (*kind == "bounded_rademacher") {
        spec.kind = BoundedRademacher{in.number(d, "dgp", "scale").value_or(1.0)};
    } else if (*kind == "linear_process") {
        LinearProcess lp;
        if (d.contains("coefficients")) {
            const json& c = d.at("coefficients");
            if (!c.is_array() || c.empty() ||
                !std::all_of(c.begin(), c.end(), [](const json& x) { return x.is_number(); }))
                in.fail("dgp.coefficients", "must be a non-empty list of numbers");
            else
                lp.coefficients = c.get<std::vector<double>>();
        }
        if (auto inn = in.text(d, "dgp", "innovation")) {
            if (*inn == "gaussian") lp.innovation = InnovationLaw::Gaussian;
            else if (*inn == "rademacher") lp.innovation = InnovationLaw::Rademacher;
            else in.fail("dgp.innovation", "must be gaussian or rademacher");
        }
        spec.kind = lp;
    } else {
        in.fail("dgp.kind",
                "unknown kind '" + *kind +
                    "' (iid_gaussian, var1, linear_process, bounded_rademacher, truncated_var1)");
        return spec;
    }
    try {
        spec.validate();
    } catch (const ValidationError& e) {
        in.fail(e.field(), e.message());
    }
    return spec;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::invalid_argument(join_issues(issues)), issues_(std::move(issues)) {}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{"prop1", "prop2", "theorem1",
                                                "independence-reduction", "rho-only"};
    return names;
}

json load_config_document(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError(std::vector<ConfigIssue>{{"config", "cannot open " + path.string()}});
    const auto ext = path.extension().string();
    try {
        if (ext == ".yaml" || ext == ".yml") return yaml_to_json(YAML::LoadFile(path.string()));
        return json::parse(file);
    } catch (const json::exception& e) {
        throw ConfigError(std::vector<ConfigIssue>{{"config", std::string("parse error: ") + e.what()}});
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::vector<ConfigIssue>{{"config", std::string("parse error: ") + e.what()}});
    }
}

PsiSpec psi_from_json(const json& j) {
    const std::string kind = j.value("kind", std::string("power"));
    if (kind == "power") return PsiSpec::power(j.value("q", 1.0));
    if (kind == "exponential") return PsiSpec::exponential(j.value("a", 1.0), j.value("b", 1.0));
    throw ValidationError("psi.kind", "unknown kind '" + kind + "' (power, exponential)");
}

ExperimentConfig parse_config(const json& doc) {
    Reader in;
    ExperimentConfig cfg;
    if (!doc.is_object()) throw ConfigError(std::vector<ConfigIssue>{{"config", "top level must be a mapping"}});
    in.unknown_keys(doc, "",
                    {"dgp", "scheme", "multiplier", "psi", "truncation", "r", "reps", "rho_reps",
                     "seed", "checks", "theorem1", "output", "debug"});

    if (const json* d = in.section(doc, "dgp", true)) cfg.dgp = read_dgp(in, *d);

    if (const json* s = in.section(doc, "scheme", true)) {
        in.unknown_keys(*s, "scheme", {"n", "b"});
        if (auto v = in.count(*s, "scheme", "n"); v && *v != cfg.dgp.n)
            in.fail("scheme.n", "must equal dgp.n");
        if (auto v = in.count(*s, "scheme", "b")) cfg.b = *v;
        else if (!s->contains("b")) in.fail("scheme.b", "missing");
        if (cfg.dgp.n >= 1) {
            try {
                (void)make_blocks(cfg.dgp.n, cfg.b);
            } catch (const ValidationError& e) {
                in.fail("scheme.b", e.message());
            }
        }
    }

    if (const json* m = in.section(doc, "multiplier", false)) {
        in.unknown_keys(*m, "multiplier", {"kind"});
        if (auto k = in.text(*m, "multiplier", "kind")) {
            if (*k == "rademacher") cfg.multiplier.kind = MultiplierKind::Rademacher;
            else if (*k == "uniform" || *k == "uniform_sym") cfg.multiplier.kind = MultiplierKind::UniformSym;
            else in.fail("multiplier.kind", "must be rademacher or uniform_sym");
        }
    }

    cfg.psi_json = json{{"kind", "power"}, {"q", 1.0}};
    if (const json* p = in.section(doc, "psi", false)) {
        in.unknown_keys(*p, "psi", {"kind", "q", "a", "b"});
        const std::string kind = in.text(*p, "psi", "kind").value_or("power");
        try {
            if (kind == "power") {
                const double q = in.number(*p, "psi", "q").value_or(1.0);
                cfg.psi = PsiSpec::power(q);
                cfg.psi_json = json{{"kind", "power"}, {"q", q}};
            } else if (kind == "exponential") {
                const double a = in.number(*p, "psi", "a").value_or(1.0);
                const double b = in.number(*p, "psi", "b").value_or(1.0);
                cfg.psi = PsiSpec::exponential(a, b);
                cfg.psi_json = json{{"kind", "exponential"}, {"a", a}, {"b", b}};
            } else {
                in.fail("psi.kind", "must be power or exponential");
            }
        } catch (const ValidationError& e) {
            in.fail(e.field(), e.message());
        }
    }

    if (const json* t = in.section(doc, "truncation", false)) {
        in.unknown_keys(*t, "truncation", {"mode", "U", "phi"});
        const std::string mode = in.text(*t, "truncation", "mode").value_or("fixed");
        if (mode == "fixed") {
            const auto U = in.number(*t, "truncation", "U");
            if (!U) {
                if (!t->contains("U")) in.fail("truncation.U", "required for fixed truncation");
            } else if (!(*U > 0.0)) {
                in.fail("truncation.U", "must be > 0");
            } else {
                cfg.truncation = FixedTruncation{*U};
            }
        } else if (mode == "optimal") {
            const double phi = in.number(*t, "truncation", "phi").value_or(0.5);
            if (!(phi > 0.0)) in.fail("truncation.phi", "must be > 0");
            cfg.truncation = OptimalTruncation{phi};
        } else {
            in.fail("truncation.mode", "must be fixed or optimal");
        }
    }

    if (auto v = in.number(doc, "", "r")) {
        cfg.r = *v;
        if (!(cfg.r > 1.0)) in.fail("r", "Hoelder exponent must be > 1");
    }
    if (auto v = in.count(doc, "", "reps")) cfg.reps = *v;
    if (cfg.reps < 1000) in.fail("reps", "must be >= 1000");
    if (auto v = in.count(doc, "", "rho_reps")) cfg.rho_reps = *v;
    if (cfg.rho_reps < 1000) in.fail("rho_reps", "must be >= 1000");
    if (auto v = in.count(doc, "", "seed")) cfg.seed = *v;

    if (!doc.contains("checks")) {
        in.fail("checks", "missing");
    } else if (!doc.at("checks").is_array() || doc.at("checks").empty()) {
        in.fail("checks", "must be a non-empty list");
    } else {
        for (std::size_t k = 0; k < doc.at("checks").size(); ++k) {
            const json& c = doc.at("checks")[k];
            const auto& names = known_checks();
            if (!c.is_string() || std::find(names.begin(), names.end(), c.get<std::string>()) == names.end())
                in.fail("checks[" + std::to_string(k) + "]",
                        "unknown check (prop1, prop2, theorem1, independence-reduction, rho-only)");
            else if (std::find(cfg.checks.begin(), cfg.checks.end(), c.get<std::string>()) == cfg.checks.end())
                cfg.checks.push_back(c.get<std::string>());
        }
    }

    if (const json* t = in.section(doc, "theorem1", false)) {
        in.unknown_keys(*t, "theorem1", {"q", "tail_mode", "envelope"});
        if (t->contains("q")) {
            const json& q = t->at("q");
            if (!q.is_array() || q.empty() ||
                !std::all_of(q.begin(), q.end(), [](const json& x) { return x.is_number() && x.get<double>() >= 1.0; }))
                in.fail("theorem1.q", "must be a non-empty list of numbers >= 1");
            else
                cfg.theorem1.q = q.get<std::vector<double>>();
        }
        if (auto m = in.text(*t, "theorem1", "tail_mode")) {
            if (*m != "lq" && *m != "subexp") in.fail("theorem1.tail_mode", "must be lq or subexp");
            else cfg.theorem1.tail_mode = *m;
        }
        if (t->contains("envelope")) {
            const json& e = t->at("envelope");
            if (e.is_string() && e.get<std::string>() == "fitted") {
                cfg.theorem1.envelope.fitted = true;
            } else if (e.is_object()) {
                in.unknown_keys(e, "theorem1.envelope", {"a", "b", "gamma", "phi"});
                cfg.theorem1.envelope.fitted = false;
                auto& prm = cfg.theorem1.envelope.params;
                prm.a = in.number(e, "theorem1.envelope", "a").value_or(prm.a);
                prm.b = in.number(e, "theorem1.envelope", "b").value_or(prm.b);
                prm.gamma = in.number(e, "theorem1.envelope", "gamma").value_or(prm.gamma);
                prm.phi = in.number(e, "theorem1.envelope", "phi").value_or(prm.phi);
                try {
                    prm.validate();
                } catch (const ValidationError& err) {
                    in.fail("theorem1.envelope." + err.field().substr(err.field().find('.') + 1),
                            err.message());
                }
            } else {
                in.fail("theorem1.envelope", "must be \"fitted\" or a mapping {a, b, gamma, phi}");
            }
        }
    }

    if (const json* o = in.section(doc, "output", false)) {
        in.unknown_keys(*o, "output", {"dir", "prefix"});
        if (auto d = in.text(*o, "output", "dir")) cfg.output_dir = *d;
        if (auto p = in.text(*o, "output", "prefix")) cfg.prefix = *p;
    }
    if (const json* dbg = in.section(doc, "debug", false)) {
        in.unknown_keys(*dbg, "debug", {"force_zero_remainder"});
        if (dbg->contains("force_zero_remainder")) {
            if (!dbg->at("force_zero_remainder").is_boolean())
                in.fail("debug.force_zero_remainder", "must be true or false");
            else
                cfg.force_zero_remainder = dbg->at("force_zero_remainder").get<bool>();
        }
    }

    // Cross-field consistency.
    const auto wants = [&](const char* name) {
        return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
    };
    if (wants("prop1")) {
        const auto bound = cfg.dgp.support_bound();
        if (!bound) {
            in.fail("dgp.kind", "prop1 needs a bounded law (bounded_rademacher, truncated_var1)");
        } else if (cfg.truncation) {
            if (const auto* f = std::get_if<FixedTruncation>(&*cfg.truncation); f && *bound > f->U)
                in.fail("truncation.U", "prop1 needs the law supported on [-U, U]");
            if (std::holds_alternative<OptimalTruncation>(*cfg.truncation))
                in.fail("truncation.mode", "prop1 uses the support bound; optimal truncation is not defined");
        }
    }
    if ((wants("prop2") || wants("theorem1")) && !cfg.truncation && !cfg.dgp.support_bound())
        in.fail("truncation", "prop2 and theorem1 need a truncation level for an unbounded law");
    if (wants("independence-reduction") && !cfg.dgp.is_iid())
        in.fail("dgp.kind", "independence-reduction needs a law independent over time");
    const bool optimal = cfg.truncation && std::holds_alternative<OptimalTruncation>(*cfg.truncation);
    const bool subexp = wants("theorem1") && cfg.theorem1.tail_mode == "subexp";
    if ((optimal || subexp) && !(static_cast<double>(cfg.dgp.p) > std::numbers::e))
        in.fail("dgp.p", "sub-exponential bounds and optimal truncation need p > e");
    if (optimal && wants("prop2") && !cfg.psi.as_power())
        in.fail("truncation.mode", "optimal truncation needs a power psi");

    if (!in.issues.empty()) throw ConfigError(std::move(in.issues));
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(load_config_document(path));
}

}  // namespace blocksymm
