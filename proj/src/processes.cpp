#include "blocksymm/processes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "blocksymm/errors.hpp"
#include "blocksymm/rng.hpp"

namespace blocksymm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_phi(double phi, const char* field) {
    if (!std::isfinite(phi) || std::abs(phi) >= 1.0)
        throw ValidationError(field, "autoregressive coefficient must satisfy |phi| < 1");
}

/// Draws one p-vector of innovations with the equicorrelated covariance.
class InnovationSource {
public:
    InnovationSource(const CrossSection& cross, InnovationLaw law, std::uint64_t seed)
        : engine_(rng::make_engine(seed)),
          law_(law),
          idio_(cross.sigma * std::sqrt(1.0 - cross.equicorrelation)),
          common_(cross.sigma * std::sqrt(cross.equicorrelation)) {}

    void draw(Eigen::Ref<Vector> out) {
        const double shared = common_ > 0.0 ? common_ * unit() : 0.0;
        for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = idio_ * unit() + shared;
    }

private:
    double unit() {
        if (law_ == InnovationLaw::Gaussian) return normal_(engine_);
        return (engine_() >> 63) != 0 ? 1.0 : -1.0;
    }

    rng::Engine engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    InnovationLaw law_;
    double idio_;
    double common_;
};

Matrix simulate_var1(const DgpSpec& spec, double phi, std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto p = static_cast<Eigen::Index>(spec.p);
    InnovationSource source(spec.cross, InnovationLaw::Gaussian, seed);
    Matrix x(n, p);
    Vector e(p);
    source.draw(e);
    x.row(0) = e.transpose() / std::sqrt(1.0 - phi * phi);
    for (Eigen::Index t = 1; t < n; ++t) {
        source.draw(e);
        x.row(t) = phi * x.row(t - 1) + e.transpose();
    }
    return x;
}

}  // namespace

void DgpSpec::validate() const {
    if (n < 1) throw ValidationError("dgp.n", "sample size must be >= 1");
    if (p < 1) throw ValidationError("dgp.p", "dimension must be >= 1");
    if (!std::isfinite(cross.sigma) || cross.sigma < 0.0)
        throw ValidationError("dgp.sigma", "innovation scale must be finite and >= 0");
    if (!std::isfinite(cross.equicorrelation) || cross.equicorrelation < 0.0 ||
        cross.equicorrelation >= 1.0)
        throw ValidationError("dgp.equicorrelation", "must lie in [0, 1)");

    std::visit(overloaded{
                   [](const IidGaussian&) {},
                   [](const Var1& k) { check_phi(k.phi, "dgp.phi"); },
                   [](const LinearProcess& k) {
                       if (k.coefficients.empty())
                           throw ValidationError("dgp.coefficients",
                                                 "need at least a_0 (J >= 0)");
                       for (double a : k.coefficients)
                           if (!std::isfinite(a))
                               throw ValidationError("dgp.coefficients",
                                                     "coefficients must be finite");
                   },
                   [this](const BoundedRademacher& k) {
                       if (!std::isfinite(k.scale) || k.scale < 0.0)
                           throw ValidationError("dgp.scale", "scale must be finite and >= 0");
                       if (cross.equicorrelation != 0.0)
                           throw ValidationError("dgp.equicorrelation",
                                                 "bounded_rademacher coordinates are independent");
                   },
                   [](const TruncatedVar1& k) {
                       check_phi(k.phi, "dgp.phi");
                       if (!std::isfinite(k.level) || k.level <= 0.0)
                           throw ValidationError("dgp.level", "truncation level must be > 0");
                   },
               },
               kind);
}

std::optional<double> DgpSpec::support_bound() const {
    if (const auto* k = std::get_if<BoundedRademacher>(&kind)) return k->scale;
    if (const auto* k = std::get_if<TruncatedVar1>(&kind)) return k->level;
    // A degenerate Gaussian law sits at the origin.
    if (cross.sigma == 0.0) return 0.0;
    return std::nullopt;
}

bool DgpSpec::is_iid() const {
    return std::visit(overloaded{
                          [](const IidGaussian&) { return true; },
                          [](const Var1& k) { return k.phi == 0.0; },
                          [](const LinearProcess& k) {
                              return std::count_if(k.coefficients.begin(), k.coefficients.end(),
                                                   [](double a) { return a != 0.0; }) <= 1;
                          },
                          [](const BoundedRademacher&) { return true; },
                          [](const TruncatedVar1& k) { return k.phi == 0.0; },
                      },
                      kind);
}

std::string DgpSpec::kind_name() const {
    return std::visit(overloaded{
                          [](const IidGaussian&) { return std::string("iid_gaussian"); },
                          [](const Var1&) { return std::string("var1"); },
                          [](const LinearProcess&) { return std::string("linear_process"); },
                          [](const BoundedRademacher&) {
                              return std::string("bounded_rademacher");
                          },
                          [](const TruncatedVar1&) { return std::string("truncated_var1"); },
                      },
                      kind);
}

PanelSample generate(const DgpSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto p = static_cast<Eigen::Index>(spec.p);

    Matrix data = std::visit(
        overloaded{
            [&](const IidGaussian&) {
                InnovationSource source(spec.cross, InnovationLaw::Gaussian, seed);
                Matrix x(n, p);
                Vector e(p);
                for (Eigen::Index t = 0; t < n; ++t) {
                    source.draw(e);
                    x.row(t) = e.transpose();
                }
                return x;
            },
            [&](const Var1& k) { return simulate_var1(spec, k.phi, seed); },
            [&](const LinearProcess& k) {
                const auto taps = static_cast<Eigen::Index>(k.coefficients.size());
                const Eigen::Index burn = (taps - 1) + 100;
                InnovationSource source(spec.cross, k.innovation, seed);
                Matrix e(burn + n, p);
                Vector row(p);
                for (Eigen::Index s = 0; s < e.rows(); ++s) {
                    source.draw(row);
                    e.row(s) = row.transpose();
                }
                Matrix x = Matrix::Zero(n, p);
                for (Eigen::Index t = 0; t < n; ++t)
                    for (Eigen::Index j = 0; j < taps; ++j)
                        x.row(t) += k.coefficients[static_cast<std::size_t>(j)] *
                                    e.row(burn + t - j);
                return x;
            },
            [&](const BoundedRademacher& k) {
                auto engine = rng::make_engine(seed);
                Matrix x(n, p);
                for (Eigen::Index t = 0; t < n; ++t)
                    for (Eigen::Index i = 0; i < p; ++i)
                        x(t, i) = (engine() >> 63) != 0 ? k.scale : -k.scale;
                return x;
            },
            [&](const TruncatedVar1& k) {
                Matrix x = simulate_var1(spec, k.phi, seed);
                return Matrix(x.cwiseMax(-k.level).cwiseMin(k.level));
            },
        },
        spec.kind);

    return PanelSample{std::move(data), true};
}

PanelSample independent_copy(const DgpSpec& spec, std::uint64_t seed) {
    return generate(spec, rng::substream(seed, rng::Stream::Copy, 0));
}

Matrix innovation_cov(const DgpSpec& spec) {
    const auto p = static_cast<Eigen::Index>(spec.p);
    if (const auto* k = std::get_if<BoundedRademacher>(&spec.kind))
        return Matrix::Identity(p, p) * (k->scale * k->scale);
    const double s2 = spec.cross.sigma * spec.cross.sigma;
    const double c = spec.cross.equicorrelation;
    Matrix cov = Matrix::Constant(p, p, s2 * c);
    cov.diagonal().setConstant(s2);
    return cov;
}

double longrun_weight(const DgpSpec& spec) {
    spec.validate();
    const auto n = static_cast<double>(spec.n);
    return std::visit(
        overloaded{
            [](const IidGaussian&) { return 1.0; },
            [](const BoundedRademacher&) { return 1.0; },
            [n](const Var1& k) {
                // (1/n) sum_{s,t} phi^{|s-t|} / (1 - phi^2), with
                // sum_{h=1}^{n-1} (n - h) phi^h = phi((n-1) - n phi + phi^n) / (1 - phi)^2.
                const double phi = k.phi;
                const double tail =
                    phi * ((n - 1.0) - n * phi + std::pow(phi, n)) / ((1.0 - phi) * (1.0 - phi));
                return (n + 2.0 * tail) / (n * (1.0 - phi * phi));
            },
            [&spec](const LinearProcess& k) {
                const auto& a = k.coefficients;
                const std::size_t taps = a.size();
                const std::size_t lags = std::min(taps, spec.n);
                double total = 0.0;
                for (std::size_t h = 0; h < lags; ++h) {
                    double gamma = 0.0;
                    for (std::size_t j = 0; j + h < taps; ++j) gamma += a[j] * a[j + h];
                    const double mult = h == 0 ? 1.0 : 2.0;
                    total += mult * (static_cast<double>(spec.n - h)) * gamma;
                }
                return total / static_cast<double>(spec.n);
            },
            [](const TruncatedVar1&) -> double {
                throw ValidationError("dgp.kind",
                                      "truncated_var1 has no closed form; use MC covariance "
                                      "estimation");
            },
        },
        spec.kind);
}

Matrix theoretical_longrun_cov(const DgpSpec& spec) {
    return longrun_weight(spec) * innovation_cov(spec);
}

double truncated_mean_calibration(const DgpSpec& spec, std::size_t draws, std::uint64_t seed) {
    const auto* k = std::get_if<TruncatedVar1>(&spec.kind);
    if (k == nullptr)
        throw ValidationError("dgp.kind", "calibration applies to truncated_var1 only");
    DgpSpec single = spec;
    single.p = 1;
    single.n = draws;
    const PanelSample panel = generate(single, rng::substream(seed, rng::Stream::Calibration, 0));
    return panel.data.mean();
}

void write_panel_csv(std::ostream& out, const PanelSample& panel) {
    out << "t,i,value\n";
    const auto old_precision = out.precision(17);
    for (Eigen::Index t = 0; t < panel.data.rows(); ++t)
        for (Eigen::Index i = 0; i < panel.data.cols(); ++i)
            out << (t + 1) << ',' << (i + 1) << ',' << panel.data(t, i) << '\n';
    out.precision(old_precision);
}

}  // namespace blocksymm
