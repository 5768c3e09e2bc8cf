#include "blocksymm/bounds_mc.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "blocksymm/errors.hpp"
#include "blocksymm/parallel.hpp"
#include "blocksymm/rng.hpp"

namespace blocksymm {

namespace {

constexpr std::size_t kMinReps = 1000;
constexpr std::size_t kEnumerationBits = 24;

// Independent streams for the quantities of one audit.
enum Quantity : std::uint64_t {
    kLhs = 11,
    kMid = 12,
    kRhs = 13,
    kPsiNorm = 14,
    kHoeffding = 15,
    kQuadratic = 16,
};

std::uint64_t quantity_seed(std::uint64_t master, Quantity q) {
    return rng::substream(master, rng::Stream::Quantity, q);
}

void check_request(const StatisticRequest& req) {
    req.dgp.validate();
    if (req.scheme.n() != req.dgp.n) throw ValidationError("scheme.n", "scheme and dgp disagree on n");
    if (req.reps < 1) throw ValidationError("reps", "need at least one replication");
}

double replicate(const StatisticRequest& req, std::size_t k) {
    const std::uint64_t panel_seed = rng::substream(req.seed, rng::Stream::Panel, k);
    PanelSample x = generate(req.dgp, panel_seed);
    const auto multipliers = [&] {
        return draw_multipliers(req.multiplier, req.scheme.count(),
                                rng::substream(req.seed, rng::Stream::Multiplier, k));
    };
    switch (req.statistic) {
        case Statistic::Plain:
        case Statistic::TruncatedIndicator:
            return max_abs_mean(x);
        case Statistic::Multiplier:
            return multiplier_max_abs_mean(x, req.scheme, multipliers());
        case Statistic::PlainIndepCopy:
            x.data -= independent_copy(req.dgp, panel_seed).data;
            return max_abs_mean(x);
        case Statistic::MultiplierIndepCopy:
            x.data -= independent_copy(req.dgp, panel_seed).data;
            return multiplier_max_abs_mean(x, req.scheme, multipliers());
        case Statistic::BlockQuadratic:
            return block_quadratic_max(x, req.scheme, 1.0);
    }
    return 0.0;
}

std::vector<double> psi_values(std::span<const double> stats, const PsiSpec& psi, double scale,
                               std::optional<double> truncation) {
    std::vector<double> out(stats.size());
    for (std::size_t k = 0; k < stats.size(); ++k) {
        if (truncation && !(stats[k] > *truncation)) {
            out[k] = 0.0;
            continue;
        }
        out[k] = psi_eval(psi, scale * stats[k]);
        if (!std::isfinite(out[k])) {
            std::ostringstream msg;
            msg << psi.name() << " overflowed at replication " << k << " (statistic "
                << stats[k] << ", scale " << scale << ")";
            throw NumericalError(msg.str());
        }
    }
    return out;
}

void require_multiplier(const MultiplierSpec& mult) {
    if (!mult.centered_unit_variance())
        throw ValidationError("multiplier.kind", "multipliers must be centered with unit variance");
}

std::vector<double> column_means(const Matrix& data) {
    std::vector<double> out(static_cast<std::size_t>(data.cols()));
    for (Eigen::Index i = 0; i < data.cols(); ++i) out[static_cast<std::size_t>(i)] = data.col(i).mean();
    return out;
}

// max_i mean_k |xbar_i^{(k)}|^q
double max_coordinate_moment(const std::vector<std::vector<double>>& coords, double q) {
    if (coords.empty()) return 0.0;
    double out = 0.0;
    for (std::size_t i = 0; i < coords.front().size(); ++i) {
        double acc = 0.0;
        for (const auto& row : coords) acc += std::pow(std::abs(row[i]), q);
        out = std::max(out, acc / static_cast<double>(coords.size()));
    }
    return out;
}

ReportContext base_context(const DgpSpec& spec, const BlockScheme& scheme,
                           const MultiplierSpec& mult, const PsiSpec& psi, std::uint64_t seed) {
    ReportContext ctx;
    ctx.n = spec.n;
    ctx.p = spec.p;
    ctx.b = scheme.block_length();
    if (const auto* pw = psi.as_power()) ctx.q = pw->q;
    ctx.seed = seed;
    ctx.dgp = spec.kind_name();
    ctx.psi = psi.name();
    ctx.multiplier = mult.name();
    return ctx;
}

}  // namespace

std::string statistic_name(Statistic s) {
    switch (s) {
        case Statistic::Plain: return "plain";
        case Statistic::Multiplier: return "multiplier";
        case Statistic::PlainIndepCopy: return "plain-indep-copy";
        case Statistic::MultiplierIndepCopy: return "multiplier-indep-copy";
        case Statistic::TruncatedIndicator: return "truncated-indicator";
        case Statistic::BlockQuadratic: return "block-quadratic";
    }
    return "plain";
}

std::vector<double> sample_statistic(const StatisticRequest& request) {
    check_request(request);
    std::vector<double> out(request.reps);
    parallel_for(request.reps, [&](std::size_t k) { out[k] = replicate(request, k); });
    return out;
}

ExpectationEstimate summarize(std::span<const double> values) {
    ExpectationEstimate est;
    est.reps = values.size();
    if (values.empty()) return est;
    const double n = static_cast<double>(values.size());
    est.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.mean) * (v - est.mean);
        est.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return est;
}

ExpectationEstimate mc_expect_psi_max(const StatisticRequest& request, const PsiSpec& psi,
                                      double scale, double truncation) {
    if (request.reps < kMinReps) throw ValidationError("reps", "need at least 1000 replications");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("scale", "must be > 0");
    const auto stats = sample_statistic(request);
    std::optional<double> cut;
    if (request.statistic == Statistic::TruncatedIndicator) cut = truncation;
    const auto values = psi_values(stats, psi, scale, cut);
    return summarize(values);
}

double expect_psi_via_tail_integral(std::span<const double> samples, const PsiSpec& psi,
                                    std::size_t grid_points) {
    if (samples.empty()) throw ValidationError("samples", "empty sample");
    if (grid_points < 2) throw ValidationError("grid_points", "need at least 2 points");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double top = sorted.back();
    if (!(top > 0.0)) return 0.0;

    const double n = static_cast<double>(sorted.size());
    const double h = top / static_cast<double>(grid_points - 1);
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < grid_points; ++j) {
        const double v = h * static_cast<double>(j);
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), v);
        const double f = psi_deriv(psi, v) * static_cast<double>(above) / n;
        if (j > 0) total += 0.5 * h * (prev + f);
        prev = f;
    }
    return total;
}

ExactExpectations exact_enumeration(const DgpSpec& spec, const BlockScheme& scheme,
                                    const MultiplierSpec& mult, const PsiSpec& psi, double scale,
                                    bool with_copy) {
    spec.validate();
    const auto* law = std::get_if<BoundedRademacher>(&spec.kind);
    if (law == nullptr)
        throw ValidationError("dgp.kind", "exact enumeration needs a bounded_rademacher panel");
    if (mult.kind != MultiplierKind::Rademacher)
        throw ValidationError("multiplier.kind", "exact enumeration needs Rademacher multipliers");
    if (scheme.n() != spec.n) throw ValidationError("scheme.n", "scheme and dgp disagree on n");
    if (!(scale > 0.0)) throw ValidationError("scale", "must be > 0");

    const std::size_t cells = spec.n * spec.p;
    const std::size_t blocks = scheme.count();
    const std::size_t panel_bits = with_copy ? 2 * cells : cells;
    if (panel_bits + blocks > kEnumerationBits)
        throw ValidationError("enumeration", "outcome count exceeds the 2^24 budget");

    const std::size_t panels = std::size_t{1} << panel_bits;
    const std::size_t signs = std::size_t{1} << blocks;
    const double s = law->scale;
    const double dn = static_cast<double>(spec.n);

    long double lhs = 0.0L;
    long double mid = 0.0L;
    long double rhs = 0.0L;
    long double copy_plain = 0.0L;
    long double copy_mult = 0.0L;

    PanelSample x;
    x.data.resize(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(spec.p));
    for (std::size_t mask = 0; mask < panels; ++mask) {
        for (std::size_t c = 0; c < cells; ++c) {
            const auto t = static_cast<Eigen::Index>(c / spec.p);
            const auto i = static_cast<Eigen::Index>(c % spec.p);
            double v = ((mask >> c) & 1U) != 0 ? s : -s;
            if (with_copy) v -= ((mask >> (cells + c)) & 1U) != 0 ? s : -s;
            x.data(t, i) = v;
        }
        const Matrix sums = block_sums(x, scheme);
        double mult_sum = 0.0;
        for (std::size_t e = 0; e < signs; ++e) {
            double m = 0.0;
            for (Eigen::Index i = 0; i < sums.cols(); ++i) {
                double acc = 0.0;
                for (std::size_t l = 0; l < blocks; ++l)
                    acc += (((e >> l) & 1U) != 0 ? 1.0 : -1.0) * sums(static_cast<Eigen::Index>(l), i);
                m = std::max(m, std::abs(acc) / dn);
            }
            mult_sum += psi_eval(psi, scale * m);
        }
        const double mean_max = max_abs_mean(x);
        if (with_copy) {
            copy_plain += psi_eval(psi, scale * mean_max);
            copy_mult += mult_sum / static_cast<double>(signs);
        } else {
            lhs += psi_eval(psi, mean_max);
            rhs += psi_eval(psi, scale * mean_max);
            mid += mult_sum / static_cast<double>(signs);
        }
    }

    ExactExpectations out;
    const auto dp = static_cast<long double>(panels);
    out.outcomes = panels * signs;
    if (with_copy) {
        out.copy_plain = static_cast<double>(copy_plain / dp);
        out.copy_multiplier = static_cast<double>(copy_mult / dp);
        // The single-panel quantities follow from a second, copy-free pass.
        const auto plain = exact_enumeration(spec, scheme, mult, psi, scale, false);
        out.lhs = plain.lhs;
        out.mid = plain.mid;
        out.rhs = plain.rhs;
        out.outcomes += plain.outcomes;
    } else {
        out.lhs = static_cast<double>(lhs / dp);
        out.mid = static_cast<double>(mid / dp);
        out.rhs = static_cast<double>(rhs / dp);
    }
    return out;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::HoldsWithinNoise: return "holds-within-noise";
        case Verdict::Violated: return "violated";
    }
    return "violated";
}

Verdict decide(double margin, double se) {
    if (std::isnan(margin)) return Verdict::Violated;
    if (margin <= 0.0) return Verdict::Holds;
    if (margin <= 3.0 * se) return Verdict::HoldsWithinNoise;
    return Verdict::Violated;
}

InequalityCheck make_check(std::string name, const ExpectationEstimate& lhs,
                           const ExpectationEstimate& rhs, double remainder) {
    InequalityCheck c;
    c.name = std::move(name);
    c.lhs = lhs.mean;
    c.lhs_se = lhs.se;
    c.rhs = rhs.mean;
    c.rhs_se = rhs.se;
    c.remainder = remainder;
    c.margin = lhs.mean - rhs.mean - remainder;
    c.margin_se = std::hypot(lhs.se, rhs.se);
    c.verdict = decide(c.margin, c.margin_se);
    return c;
}

bool VerificationReport::violated() const {
    return std::any_of(inequalities.begin(), inequalities.end(),
                       [](const InequalityCheck& c) { return c.verdict == Verdict::Violated; });
}

CdfSeries summarize_cdf(std::string name, std::span<const double> values, std::size_t points) {
    if (values.empty()) throw ValidationError("values", "empty sample");
    if (points < 2) throw ValidationError("points", "need at least 2 points");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    CdfSeries out;
    out.name = std::move(name);
    const double last = static_cast<double>(sorted.size() - 1);
    for (std::size_t j = 0; j < points; ++j) {
        const double prob = static_cast<double>(j) / static_cast<double>(points - 1);
        const auto idx = static_cast<std::size_t>(std::llround(prob * last));
        const double z = sorted[idx];
        const auto below = std::upper_bound(sorted.begin(), sorted.end(), z) - sorted.begin();
        out.z.push_back(z);
        out.F.push_back(static_cast<double>(below) / static_cast<double>(sorted.size()));
    }
    return out;
}

double clopper_pearson_upper(std::size_t successes, std::size_t trials, double confidence) {
    if (trials < 1) throw ValidationError("trials", "need at least one trial");
    if (successes > trials) throw ValidationError("successes", "cannot exceed trials");
    if (successes == trials) return 1.0;
    const boost::math::beta_distribution<double> law(static_cast<double>(successes) + 1.0,
                                                     static_cast<double>(trials - successes));
    return boost::math::quantile(law, confidence);
}

VerificationReport verify_prop1(const DgpSpec& spec, const BlockScheme& scheme,
                                const MultiplierSpec& mult, const PsiSpec& psi, double U,
                                const RhoEstimate& rho, const AuditSettings& settings) {
    spec.validate();
    const auto bound = spec.support_bound();
    if (!bound)
        throw ValidationError("dgp.kind", spec.kind_name() + " is unbounded; use prop2");
    if (!(U > 0.0)) throw ValidationError("U", "truncation level must be > 0");
    if (*bound > U * (1.0 + 1e-12))
        throw ValidationError("U", "panel support exceeds [-U, U]");
    require_multiplier(mult);

    StatisticRequest req{Statistic::Plain, spec, scheme, mult, settings.reps,
                         quantity_seed(settings.seed, kLhs)};
    VerificationReport rep;
    rep.check = "prop1";
    rep.context = base_context(spec, scheme, mult, psi, settings.seed);
    rep.context.U = U;
    rep.rho = rho;

    rep.lhs = mc_expect_psi_max(req, psi, 1.0);
    req.statistic = Statistic::Multiplier;
    req.seed = quantity_seed(settings.seed, kMid);
    rep.mid = mc_expect_psi_max(req, psi, 1.0);
    rep.rhs = rep.lhs;

    const double R = settings.force_zero_remainder ? 0.0 : remainder_Rn(psi, spec.n, U, rho.sum());
    rep.remainders["R_n"] = R;
    if (const auto* pw = psi.as_power()) {
        rep.diagnostics["R_n_power_closed"] = remainder_Rn_power_closed(pw->q, U, rho.sum());
        rep.diagnostics["R_n_printed"] = remainder_Rn_printed(pw->q, spec.n, U, rho.sum());
    }
    rep.diagnostics["rho_sum"] = rho.sum();

    // lhs <= mid + R and mid + R <= rhs + 2R.
    rep.inequalities.push_back(make_check("symmetrization", rep.lhs, rep.mid, R));
    rep.inequalities.push_back(make_check("desymmetrization", rep.mid, rep.rhs, R));
    return rep;
}

VerificationReport verify_prop2(const DgpSpec& spec, const BlockScheme& scheme,
                                const MultiplierSpec& mult, const PsiSpec& psi, double U,
                                double r, const RhoEstimate& rho, const AuditSettings& settings) {
    spec.validate();
    if (!(U > 0.0)) throw ValidationError("U", "truncation level must be > 0");
    if (!(r > 1.0)) throw ValidationError("r", "Hoelder exponent must be > 1");
    if (scheme.n() != spec.n) throw ValidationError("scheme.n", "scheme and dgp disagree on n");
    if (settings.reps < kMinReps) throw ValidationError("reps", "need at least 1000 replications");
    require_multiplier(mult);

    MomentNorm norm;
    try {
        norm = psi_moment_norm(psi, spec, r, settings.reps, quantity_seed(settings.seed, kPsiNorm));
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("moment condition E max_i |x_{i,t}|^{qr} < inf fails: ") +
                             e.what());
    }

    VerificationReport rep;
    rep.check = "prop2";
    rep.context = base_context(spec, scheme, mult, psi, settings.seed);
    rep.context.U = U;
    rep.context.r = r;
    rep.rho = rho;

    // Left side plus the E_{n,1} / E_{n,2} split, from one set of panels.
    const std::uint64_t lhs_seed = quantity_seed(settings.seed, kLhs);
    const std::size_t reps = settings.reps;
    std::vector<double> top(reps), below(reps), above(reps);
    std::vector<std::vector<double>> coords(reps);
    parallel_for(reps, [&](std::size_t k) {
        const PanelSample x = generate(spec, rng::substream(lhs_seed, rng::Stream::Panel, k));
        coords[k] = column_means(x.data);
        double m = 0.0, lo = 0.0, hi = 0.0;
        for (double v : coords[k]) {
            const double a = std::abs(v);
            m = std::max(m, a);
            if (a <= U)
                lo = std::max(lo, a);
            else
                hi = std::max(hi, a);
        }
        top[k] = m;
        below[k] = lo;
        above[k] = hi;
    });
    rep.lhs = summarize(psi_values(top, psi, 1.0, std::nullopt));
    const auto e1 = summarize(psi_values(below, psi, 2.0, std::nullopt)).scaled(0.5);
    const auto e2 = summarize(psi_values(above, psi, 2.0, std::nullopt)).scaled(0.5);
    const auto e2_bound = summarize(psi_values(top, psi, 2.0, U)).scaled(0.5);
    const auto exceed = static_cast<std::size_t>(
        std::count_if(top.begin(), top.end(), [U](double v) { return v >= U; }));

    StatisticRequest req{Statistic::Multiplier, spec, scheme, mult, reps,
                         quantity_seed(settings.seed, kMid)};
    rep.mid = mc_expect_psi_max(req, psi, 2.0).scaled(0.5);
    req.statistic = Statistic::Plain;
    req.seed = quantity_seed(settings.seed, kRhs);
    rep.rhs = mc_expect_psi_max(req, psi, 2.0).scaled(0.5);

    const double tail_raw = static_cast<double>(exceed) / static_cast<double>(reps);
    const double tail_cp = clopper_pearson_upper(exceed, reps, 0.975);
    double r1 = remainder_R1(psi, spec.n, U, rho.sum());
    double r2 = remainder_R2(r, tail_cp, norm.value);
    if (settings.force_zero_remainder) r1 = r2 = 0.0;
    rep.remainders["R1"] = r1;
    rep.remainders["R2"] = r2;
    const double total = r1 + r2;

    rep.diagnostics["max_mean_moment"] = max_coordinate_moment(coords, 2.0);
    rep.diagnostics["moment_order"] = 2.0;
    rep.diagnostics["E_n1"] = e1.mean;
    rep.diagnostics["E_n1_se"] = e1.se;
    rep.diagnostics["E_n2"] = e2.mean;
    rep.diagnostics["E_n2_se"] = e2.se;
    rep.diagnostics["E_n2_indicator_bound"] = e2_bound.mean;
    rep.diagnostics["tail_prob_raw"] = tail_raw;
    rep.diagnostics["tail_prob_upper"] = tail_cp;
    rep.diagnostics["psi_norm"] = norm.value;
    rep.diagnostics["psi_norm_se"] = norm.se;
    rep.diagnostics["rho_sum"] = rho.sum();
    if (const auto* pw = psi.as_power()) {
        rep.diagnostics["R1_power_closed"] = remainder_R1_power_closed(pw->q, U, rho.sum());
        rep.diagnostics["R1_printed"] = remainder_R1_printed(pw->q, spec.n, U, rho.sum());
    }

    rep.inequalities.push_back(make_check("symmetrization", rep.lhs, rep.mid, total));
    rep.inequalities.push_back(make_check("desymmetrization", rep.mid, rep.rhs, total));
    return rep;
}

VerificationReport verify_independence_reduction(const DgpSpec& spec, const PsiSpec& psi,
                                                 const AuditSettings& settings) {
    spec.validate();
    if (!spec.is_iid())
        throw ValidationError("dgp.kind", spec.kind_name() + " is not independent over time");
    const BlockScheme scheme = make_blocks(spec.n, 1);
    const MultiplierSpec mult{MultiplierKind::Rademacher};

    VerificationReport rep;
    rep.check = "independence-reduction";
    rep.context = base_context(spec, scheme, mult, psi, settings.seed);

    StatisticRequest req{Statistic::PlainIndepCopy, spec, scheme, mult, settings.reps,
                         quantity_seed(settings.seed, kLhs)};
    rep.lhs = mc_expect_psi_max(req, psi, 1.0);
    req.statistic = Statistic::MultiplierIndepCopy;
    req.seed = quantity_seed(settings.seed, kMid);
    rep.mid = mc_expect_psi_max(req, psi, 1.0);
    rep.rhs = rep.lhs;
    rep.remainders["R_n"] = 0.0;
    rep.diagnostics["difference"] = rep.mid.mean - rep.lhs.mean;
    rep.diagnostics["difference_se"] = std::hypot(rep.mid.se, rep.lhs.se);

    rep.inequalities.push_back(make_check("symmetrization", rep.lhs, rep.mid, 0.0));
    rep.inequalities.push_back(make_check("desymmetrization", rep.mid, rep.rhs, 0.0));
    return rep;
}

double hoeffding_factor(double q, double c, std::size_t p, std::size_t n) {
    if (!(q > 0.0)) throw ValidationError("q", "must be > 0");
    if (!(c > 0.0)) throw ValidationError("c", "must be > 0");
    if (p < 1 || n < 1) throw ValidationError("p", "p and n must be >= 1");
    const double log_term = std::log(2.0 * static_cast<double>(p)) / static_cast<double>(n);
    return std::pow(2.0, q / 2.0) * std::pow(c, q) * std::pow(log_term, q / 2.0);
}

VerificationReport theorem1_bound(const DgpSpec& spec, const BlockScheme& scheme,
                                  const MultiplierSpec& mult, double q, double r, double U,
                                  const RhoEstimate& rho, const TheoremTail& tail,
                                  const AuditSettings& settings, const TheoremSettings& theorem) {
    spec.validate();
    if (!(r > 1.0)) throw ValidationError("r", "Hoelder exponent must be > 1");
    if (!(U > 0.0)) throw ValidationError("U", "truncation level must be > 0");
    if (scheme.n() != spec.n) throw ValidationError("scheme.n", "scheme and dgp disagree on n");
    if (settings.reps < kMinReps) throw ValidationError("reps", "need at least 1000 replications");
    require_multiplier(mult);
    const PsiSpec psi = PsiSpec::power(q);
    const double c = mult.bound();

    VerificationReport rep;
    rep.check = "theorem1";
    rep.context = base_context(spec, scheme, mult, psi, settings.seed);
    rep.context.r = r;
    rep.context.U = U;
    rep.rho = rho;

    // LHS from one set of panels, which also gives the coordinate moments.
    const std::uint64_t lhs_seed = quantity_seed(settings.seed, kLhs);
    const std::size_t reps = settings.reps;
    std::vector<double> top(reps);
    std::vector<std::vector<double>> coords(reps);
    parallel_for(reps, [&](std::size_t k) {
        const PanelSample x = generate(spec, rng::substream(lhs_seed, rng::Stream::Panel, k));
        coords[k] = column_means(x.data);
        double m = 0.0;
        for (double v : coords[k]) m = std::max(m, std::abs(v));
        top[k] = m;
    });
    rep.lhs = summarize(psi_values(top, psi, 1.0, std::nullopt));
    const double max_moment = max_coordinate_moment(coords, q);

    StatisticRequest req{Statistic::BlockQuadratic, spec, scheme, mult, reps,
                         quantity_seed(settings.seed, kQuadratic)};
    const ExpectationEstimate quadratic = mc_expect_psi_max(req, psi, 1.0);
    const double factor = hoeffding_factor(q, c, spec.p, spec.n);
    rep.rhs = quadratic.scaled(factor);
    rep.mid = rep.rhs;

    // ||psi(2 max_i |x_{i,t}|)||_r = 2^q M_n^q.
    const MomentNorm norm =
        psi_moment_norm(psi, spec, r, reps, quantity_seed(settings.seed, kPsiNorm));
    const double M_n = std::pow(norm.value, 1.0 / q) / 2.0;
    const double p = static_cast<double>(spec.p);

    const double r1_printed = remainder_R1_printed(q, spec.n, U, rho.sum());
    const double r1_quad = remainder_R1(psi, spec.n, U, rho.sum());
    double r1 = std::max(r1_printed, r1_quad);

    double tail_prob = 1.0;
    if (std::holds_alternative<LqTheoremTail>(tail)) {
        tail_prob = tail_probability(LqTail{q, max_moment}, p, spec.n, U);
    } else {
        const auto& params = std::get<SubexpTheoremTail>(tail).params;
        const SubexpBound sb = concentration_subexp(p, spec.n, U, params);
        // The dominant term alone is the asymptotic bound; the two-term form
        // holds at every n, so it feeds the remainder.
        tail_prob = sb.full;
        rep.diagnostics["subexp_dominant"] = sb.dominant;
        rep.diagnostics["subexp_second"] = sb.second;
        rep.diagnostics["envelope_a"] = params.a;
        rep.diagnostics["envelope_b"] = params.b;
        rep.diagnostics["envelope_gamma"] = params.gamma;
        rep.diagnostics["envelope_phi"] = params.phi;
        if (sb.warning) rep.warnings.push_back("subexp second term exceeds 1% of the dominant term");
    }
    double r2 = remainder_R2(r, tail_prob, norm.value);
    if (settings.force_zero_remainder) r1 = r2 = 0.0;
    rep.remainders["R1"] = r1;
    rep.remainders["R2"] = r2;

    rep.diagnostics["hoeffding_factor"] = factor;
    rep.diagnostics["block_quadratic"] = quadratic.mean;
    rep.diagnostics["block_quadratic_se"] = quadratic.se;
    rep.diagnostics["R1_printed"] = r1_printed;
    rep.diagnostics["R1_quadrature"] = r1_quad;
    rep.diagnostics["M_n"] = M_n;
    rep.diagnostics["psi_norm"] = norm.value;
    rep.diagnostics["psi_norm_se"] = norm.se;
    rep.diagnostics["tail_prob"] = tail_prob;
    rep.diagnostics["max_mean_moment"] = max_moment;
    rep.diagnostics["moment_order"] = q;
    rep.diagnostics["rho_sum"] = rho.sum();
    rep.diagnostics["c"] = c;

    rep.inequalities.push_back(make_check("theorem1", rep.lhs, rep.rhs, 0.5 * (r1 + r2)));

    // Conditional Hoeffding step: E_eps max|(1/n) sum eps S|^q <= factor (block term).
    const std::size_t panels = std::max<std::size_t>(1, theorem.hoeffding_panels);
    const std::size_t inner = std::max<std::size_t>(1, theorem.hoeffding_inner);
    const std::uint64_t h_seed = quantity_seed(settings.seed, kHoeffding);
    std::vector<double> cond(panels), bound(panels);
    parallel_for(panels, [&](std::size_t j) {
        const PanelSample x = generate(spec, rng::substream(h_seed, rng::Stream::Panel, j));
        bound[j] = factor * block_quadratic_max(x, scheme, q);
        const std::uint64_t eps_seed = rng::substream(h_seed, rng::Stream::Multiplier, j);
        double acc = 0.0;
        for (std::size_t m = 0; m < inner; ++m) {
            const auto eps = draw_multipliers(mult, scheme.count(),
                                              rng::substream(eps_seed, rng::Stream::Multiplier, m));
            acc += std::pow(multiplier_max_abs_mean(x, scheme, eps), q);
        }
        cond[j] = acc / static_cast<double>(inner);
    });
    std::size_t exceed = 0;
    for (std::size_t j = 0; j < panels; ++j) exceed += cond[j] > bound[j] ? 1 : 0;
    rep.diagnostics["hoeffding_panel_exceed_fraction"] =
        static_cast<double>(exceed) / static_cast<double>(panels);
    rep.inequalities.push_back(
        make_check("hoeffding-step", summarize(cond), summarize(bound), 0.0));
    return rep;
}

}  // namespace blocksymm
