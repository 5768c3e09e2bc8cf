#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blocksymm/errors.hpp"
#include "blocksymm/gaussian_compare.hpp"
#include "property.hpp"

using namespace blocksymm;

namespace {

DgpSpec make(DgpKind kind, std::size_t n, std::size_t p) {
    DgpSpec s;
    s.kind = std::move(kind);
    s.n = n;
    s.p = p;
    return s;
}

std::vector<double> normals(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 e(seed);
    std::normal_distribution<double> z;
    std::vector<double> out(m);
    for (auto& v : out) v = std::abs(z(e));
    return out;
}

}  // namespace

TEST(GaussianCompare, AnalyticModelForIid) {
    const auto m = estimate_gaussian_model(make(IidGaussian{}, 8, 3), AnalyticCovariance{});
    EXPECT_TRUE(m.cov.isApprox(Matrix::Identity(3, 3)));
    EXPECT_EQ(m.source_name(), "analytic");
    EXPECT_THROW((void)estimate_gaussian_model(make(TruncatedVar1{0.5, 3.0}, 8, 2), AnalyticCovariance{}),
                 ValidationError);
}

TEST(GaussianCompare, MonteCarloModelNeedsEnoughReps) {
    try {
        (void)estimate_gaussian_model(make(IidGaussian{}, 4, 2), MonteCarloCovariance{999, 1});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "rho_reps");
    }
}

TEST(GaussianCompare, MonteCarloModelMatchesIdentity) {
    const std::size_t reps = 100000;
    const auto m = estimate_gaussian_model(make(IidGaussian{}, 4, 2), MonteCarloCovariance{reps, 3});
    EXPECT_EQ(m.source_name(), "mc");
    // se of an average of Z_i Z_j: sqrt(2 / reps) on the diagonal, sqrt(1 / reps) off it.
    EXPECT_LT(std::abs(m.cov(0, 0) - 1.0), 4.0 * std::sqrt(2.0 / reps));
    EXPECT_LT(std::abs(m.cov(1, 1) - 1.0), 4.0 * std::sqrt(2.0 / reps));
    EXPECT_LT(std::abs(m.cov(0, 1)), 4.0 * std::sqrt(1.0 / reps));
}

TEST(GaussianCompare, Var1AnalyticMatchesMonteCarlo) {
    const auto spec = make(Var1{0.5}, 16, 1);
    const std::size_t reps = 100000;
    const double a = estimate_gaussian_model(spec, AnalyticCovariance{}).cov(0, 0);
    const double m = estimate_gaussian_model(spec, MonteCarloCovariance{reps, 4}).cov(0, 0);
    // sqrt(n) xbar is Gaussian, so the sample second moment has se a sqrt(2 / reps).
    EXPECT_LT(std::abs(a - m), 4.0 * a * std::sqrt(2.0 / reps));
}

TEST(GaussianCompare, HalfNormalMean) {
    GaussianModel model{Matrix::Identity(1, 1), CovarianceSource::User, 0};
    const std::size_t draws = 100000;
    const auto z = sample_gaussian_max(model, draws, 12);
    double m = 0.0, ss = 0.0;
    for (double v : z) m += v;
    m /= draws;
    for (double v : z) ss += (v - m) * (v - m);
    const double se = std::sqrt(ss / (draws - 1) / draws);
    EXPECT_LT(std::abs(m - std::sqrt(2.0 / std::numbers::pi)), 4.0 * se);
}

TEST(GaussianCompare, ZeroCovarianceGivesZeroDraws) {
    GaussianModel model{Matrix::Zero(3, 3), CovarianceSource::User, 0};
    for (double v : sample_gaussian_max(model, 100, 1)) EXPECT_EQ(v, 0.0);
}

TEST(GaussianCompare, PerfectCorrelationCollapsesToOneCoordinate) {
    const std::size_t m = 10000;
    GaussianModel two{Matrix::Ones(2, 2), CovarianceSource::User, 0};
    GaussianModel one{Matrix::Identity(1, 1), CovarianceSource::User, 0};
    const double d = kolmogorov_distance(sample_gaussian_max(two, m, 5), sample_gaussian_max(one, m, 6));
    EXPECT_LT(d, ks_two_sample_critical(m, m, 1.36));
}

TEST(GaussianCompare, CovarianceRootRejectsBadMatrices) {
    EXPECT_THROW((void)covariance_root(Matrix{{1.0, 0.5}, {0.4, 1.0}}), NumericalError);
    EXPECT_THROW((void)covariance_root(Matrix{{1.0, 2.0}, {2.0, 1.0}}), NumericalError);
    const Matrix nearly{{1.0, 1.0}, {1.0, 1.0 - 1e-12}};
    const Matrix root = covariance_root(nearly);
    EXPECT_TRUE((root * root).isApprox(nearly, 1e-6));
}

TEST(GaussianCompare, KolmogorovExamples) {
    const std::vector<double> a{1.0, 2.0}, b{1.0, 3.0};
    EXPECT_DOUBLE_EQ(kolmogorov_distance(a, b), 0.5);
    EXPECT_DOUBLE_EQ(kolmogorov_distance(std::vector<double>{1.0}, std::vector<double>{2.0}), 1.0);
    const std::vector<double> c{3.0, 1.0, 2.0, 2.0};
    const std::vector<double> d{2.0, 1.0, 3.0, 2.0};
    EXPECT_EQ(kolmogorov_distance(c, d), 0.0);
    EXPECT_THROW((void)kolmogorov_distance(std::vector<double>{}, a), ValidationError);
}

TEST(GaussianCompare, KolmogorovSymmetryAndMonotoneInvariance) {
    prop::for_all(100, 13, [](prop::Gen& g, std::size_t) {
        std::vector<double> a(g.index(1, 40)), b(g.index(1, 40));
        for (auto& v : a) v = std::round(g.uniform(0.0, 5.0) * 4.0) / 4.0;  // ties on purpose
        for (auto& v : b) v = std::round(g.uniform(0.0, 5.0) * 4.0) / 4.0;
        const double d = kolmogorov_distance(a, b);
        EXPECT_EQ(d, kolmogorov_distance(b, a));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
        auto ta = a, tb = b;
        for (auto& v : ta) v = std::exp(2.0 * v) + 1.0;
        for (auto& v : tb) v = std::exp(2.0 * v) + 1.0;
        EXPECT_DOUBLE_EQ(kolmogorov_distance(ta, tb), d);
    });
}

TEST(GaussianCompare, KolmogorovNullCalibration) {
    const std::size_t trials = 200, m = 500;
    std::size_t exceed = 0;
    for (std::size_t k = 0; k < trials; ++k) {
        const double d = kolmogorov_distance(normals(m, 2 * k + 1), normals(m, 2 * k + 2));
        exceed += d > ks_two_sample_critical(m, m, 1.63) ? 1 : 0;
    }
    // About 1% expected; P(Binomial(200, 0.01) > 6) < 0.5%.
    EXPECT_LE(exceed, 6u);
}

TEST(GaussianCompare, RhoUncertainty) {
    EXPECT_NEAR(rho_uncertainty(10000), 2.0 * std::sqrt(std::log(40.0) / 20000.0), 1e-15);
}

TEST(GaussianCompare, RhosOnGaussianPanelAreSmall) {
    const auto spec = make(IidGaussian{}, 16, 4);
    const auto scheme = make_blocks(16, 1);
    const std::size_t reps = 10000;
    const auto model = estimate_gaussian_model(spec, AnalyticCovariance{});
    const auto r = estimate_rhos(spec, scheme, {MultiplierKind::Rademacher}, model, reps, 99);
    const double crit = 1.36 * std::sqrt(2.0 / reps);
    EXPECT_LT(r.rho, crit);
    EXPECT_LT(r.rho_star, crit);
    EXPECT_LE(r.rho_direct, r.rho + r.rho_star + 2.0 * r.se);
    EXPECT_EQ(r.reps, reps);
}

TEST(GaussianCompare, RhosAreDeterministicAndBounded) {
    const auto spec = make(Var1{0.5}, 32, 3);
    const auto scheme = make_blocks(32, 4);
    const auto model = estimate_gaussian_model(spec, AnalyticCovariance{});
    const auto a = estimate_rhos(spec, scheme, {MultiplierKind::UniformSym}, model, 2000, 5);
    const auto b = estimate_rhos(spec, scheme, {MultiplierKind::UniformSym}, model, 2000, 5);
    EXPECT_EQ(a.rho, b.rho);
    EXPECT_EQ(a.rho_star, b.rho_star);
    EXPECT_EQ(a.rho_direct, b.rho_direct);
    for (double v : {a.rho, a.rho_star, a.rho_direct}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_LE(a.rho_direct, a.rho + a.rho_star + 2.0 * a.se);
}

TEST(GaussianCompare, RhoInputsAreChecked) {
    const auto spec = make(IidGaussian{}, 16, 2);
    const auto model = estimate_gaussian_model(spec, AnalyticCovariance{});
    EXPECT_THROW((void)estimate_rhos(spec, make_blocks(8, 1), {}, model, 100, 1), ValidationError);
    GaussianModel wrong{Matrix::Identity(3, 3), CovarianceSource::User, 0};
    EXPECT_THROW((void)estimate_rhos(spec, make_blocks(16, 1), {}, wrong, 100, 1), ValidationError);
}
