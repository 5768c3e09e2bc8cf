#include "blocksymm/gaussian_compare.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "blocksymm/errors.hpp"
#include "blocksymm/parallel.hpp"
#include "blocksymm/rng.hpp"

namespace blocksymm {

std::string GaussianModel::source_name() const {
    switch (source) {
        case CovarianceSource::Analytic: return "analytic";
        case CovarianceSource::MonteCarlo: return "mc";
        case CovarianceSource::User: return "user";
    }
    return "user";
}

GaussianModel estimate_gaussian_model(const DgpSpec& spec, const CovarianceMethod& method) {
    spec.validate();
    if (std::holds_alternative<AnalyticCovariance>(method))
        return GaussianModel{theoretical_longrun_cov(spec), CovarianceSource::Analytic, 0};

    const auto& mc = std::get<MonteCarloCovariance>(method);
    if (mc.reps < 1000)
        throw ValidationError("rho_reps", "Monte Carlo covariance needs at least 1000 panels");

    const auto p = static_cast<Eigen::Index>(spec.p);
    const double root_n = std::sqrt(static_cast<double>(spec.n));
    std::vector<Vector> scaled(mc.reps);
    parallel_for(mc.reps, [&](std::size_t k) {
        const PanelSample x = generate(spec, rng::substream(mc.seed, rng::Stream::Panel, k));
        scaled[k] = x.data.colwise().mean().transpose() * root_n;
    });
    Matrix cov = Matrix::Zero(p, p);
    for (const auto& v : scaled) cov.noalias() += v * v.transpose();
    cov /= static_cast<double>(mc.reps);
    return GaussianModel{cov, CovarianceSource::MonteCarlo, mc.reps};
}

GaussianModel default_gaussian_model(const DgpSpec& spec, std::size_t mc_reps,
                                     std::uint64_t seed) {
    if (std::holds_alternative<TruncatedVar1>(spec.kind))
        return estimate_gaussian_model(spec, MonteCarloCovariance{mc_reps, seed});
    return estimate_gaussian_model(spec, AnalyticCovariance{});
}

Matrix covariance_root(const Matrix& cov) {
    if (cov.rows() != cov.cols()) throw NumericalError("covariance is not square");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalError("covariance is not symmetric within 1e-10");
    if (cov.isZero(0.0)) return Matrix::Zero(cov.rows(), cov.cols());

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (cov + cov.transpose()));
    if (eig.info() != Eigen::Success) throw NumericalError("eigen-decomposition failed");
    Vector values = eig.eigenvalues();
    const double top = values.maxCoeff();
    if (values.minCoeff() < -1e-8 * top) {
        std::ostringstream msg;
        msg << "covariance is not positive semi-definite: smallest eigenvalue "
            << values.minCoeff() << ", largest " << top;
        throw NumericalError(msg.str());
    }
    values = values.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

std::vector<double> sample_gaussian_max(const GaussianModel& model, std::size_t draws,
                                        std::uint64_t seed) {
    if (draws < 1) throw ValidationError("draws", "need at least one draw");
    const Matrix root = covariance_root(model.cov);
    const auto p = root.rows();
    std::vector<double> out(draws);
    parallel_for(draws, [&](std::size_t k) {
        auto engine = rng::make_engine(rng::substream(seed, rng::Stream::Gaussian, k));
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector z(p);
        for (Eigen::Index i = 0; i < p; ++i) z(i) = normal(engine);
        out[k] = (root * z).cwiseAbs().maxCoeff();
    });
    return out;
}

double kolmogorov_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ValidationError("kolmogorov_distance", "empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const auto na = static_cast<double>(sa.size());
    const auto nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double sup = 0.0;
    // Both CDFs are constant between pooled points, so evaluating after each
    // tie group is absorbed covers every value the difference takes.
    while (i < sa.size() || j < sb.size()) {
        double z;
        if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j]))
            z = sa[i];
        else
            z = sb[j];
        while (i < sa.size() && sa[i] == z) ++i;
        while (j < sb.size() && sb[j] == z) ++j;
        sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return sup;
}

double ks_two_sample_critical(std::size_t m, std::size_t k, double c_alpha) {
    const auto dm = static_cast<double>(m);
    const auto dk = static_cast<double>(k);
    return c_alpha * std::sqrt((dm + dk) / (dm * dk));
}

double rho_uncertainty(std::size_t reps) {
    return 2.0 * std::sqrt(std::log(2.0 / 0.05) / (2.0 * static_cast<double>(reps)));
}

RhoRun estimate_rhos_with_samples(const DgpSpec& spec, const BlockScheme& scheme,
                                  const MultiplierSpec& mult, const GaussianModel& model,
                                  std::size_t reps, std::uint64_t seed) {
    spec.validate();
    if (scheme.n() != spec.n) throw ValidationError("scheme.n", "scheme and dgp disagree on n");
    if (reps < 1) throw ValidationError("rho_reps", "need at least one replication");
    if (static_cast<std::size_t>(model.cov.rows()) != spec.p)
        throw ValidationError("model", "Gaussian model dimension differs from dgp.p");

    const std::uint64_t plain_seed = rng::substream(seed, rng::Stream::Quantity, 1);
    const std::uint64_t mult_seed = rng::substream(seed, rng::Stream::Quantity, 2);
    const std::uint64_t gauss_seed = rng::substream(seed, rng::Stream::Quantity, 3);
    const double root_n = std::sqrt(static_cast<double>(spec.n));

    RhoRun run;
    run.samples.plain.resize(reps);
    run.samples.multiplier.resize(reps);
    parallel_for(reps, [&](std::size_t k) {
        const PanelSample x = generate(spec, rng::substream(plain_seed, rng::Stream::Panel, k));
        run.samples.plain[k] = root_n * max_abs_mean(x);

        const PanelSample y = generate(spec, rng::substream(mult_seed, rng::Stream::Panel, k));
        const auto eps = draw_multipliers(
            mult, scheme.count(), rng::substream(mult_seed, rng::Stream::Multiplier, k));
        run.samples.multiplier[k] = root_n * multiplier_max_abs_mean(y, scheme, eps);
    });
    run.samples.gaussian = sample_gaussian_max(model, reps, gauss_seed);

    auto& est = run.estimate;
    est.rho = kolmogorov_distance(run.samples.plain, run.samples.gaussian);
    est.rho_star = kolmogorov_distance(run.samples.multiplier, run.samples.gaussian);
    est.rho_direct = kolmogorov_distance(run.samples.plain, run.samples.multiplier);
    est.reps = reps;
    est.se = rho_uncertainty(reps);
    return run;
}

RhoEstimate estimate_rhos(const DgpSpec& spec, const BlockScheme& scheme,
                          const MultiplierSpec& mult, const GaussianModel& model,
                          std::size_t reps, std::uint64_t seed) {
    return estimate_rhos_with_samples(spec, scheme, mult, model, reps, seed).estimate;
}

}  // namespace blocksymm
