#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "blocksymm/errors.hpp"
#include "blocksymm/psi.hpp"
#include "blocksymm/quadrature.hpp"
#include "property.hpp"

using namespace blocksymm;

namespace {

std::vector<PsiSpec> shipped() {
    return {PsiSpec::power(1.0), PsiSpec::power(1.5), PsiSpec::power(2.0), PsiSpec::power(4.0),
            PsiSpec::exponential(1.0, 1.0), PsiSpec::exponential(0.05, 2.0)};
}

DgpSpec law(DgpKind kind, std::size_t p) {
    DgpSpec s;
    s.kind = std::move(kind);
    s.n = 1;
    s.p = p;
    return s;
}

}  // namespace

TEST(Psi, Evaluate) {
    EXPECT_DOUBLE_EQ(psi_eval(PsiSpec::power(2.0), 3.0), 9.0);
    EXPECT_DOUBLE_EQ(psi_eval(PsiSpec::power(1.0), 5.0), 5.0);
    EXPECT_EQ(psi_eval(PsiSpec::exponential(1.0, 1.0), 0.0), 0.0);
    for (const auto& psi : shipped()) EXPECT_EQ(psi_eval(psi, 0.0), 0.0) << psi.name();
    EXPECT_THROW((void)psi_eval(PsiSpec::power(2.0), -1.0), DomainError);
}

TEST(Psi, Derivative) {
    EXPECT_DOUBLE_EQ(psi_deriv(PsiSpec::power(2.0), 3.0), 6.0);
    EXPECT_DOUBLE_EQ(psi_deriv(PsiSpec::power(1.0), 0.0), 1.0);
    EXPECT_EQ(psi_deriv(PsiSpec::power(2.5), 0.0), 0.0);
    EXPECT_EQ(psi_deriv(PsiSpec::exponential(1.0, 2.0), 0.0), 0.0);
    EXPECT_DOUBLE_EQ(psi_deriv(PsiSpec::exponential(0.5, 1.0), 0.0), 0.5);
    EXPECT_THROW((void)psi_deriv(PsiSpec::power(2.0), -0.1), DomainError);
}

TEST(Psi, DerivativeMatchesCentralDifference) {
    prop::for_all(400, 3, [](prop::Gen& g, std::size_t k) {
        const auto specs = shipped();
        const auto& psi = specs[k % specs.size()];
        const double u = g.uniform(0.01, 8.0);
        const double h = 1e-6 * std::max(1.0, u);
        const double fd = (psi_eval(psi, u + h) - psi_eval(psi, u - h)) / (2.0 * h);
        const double d = psi_deriv(psi, u);
        EXPECT_NEAR(fd, d, 1e-6 * std::max(1.0, std::abs(d))) << psi.name() << " u=" << u;
    });
}

TEST(Psi, Inverse) {
    EXPECT_NEAR(psi_inverse(PsiSpec::power(2.0), 9.0), 3.0, 1e-12);
    EXPECT_NEAR(psi_inverse(PsiSpec::exponential(1.0, 1.0), std::numbers::e - 1.0), 1.0, 1e-12);
    EXPECT_THROW((void)psi_inverse(PsiSpec::power(2.0), -1.0), DomainError);
}

TEST(Psi, InverseRoundTripOnLogGrid) {
    for (const auto& psi : {PsiSpec::power(1.0), PsiSpec::power(1.5), PsiSpec::power(2.0),
                            PsiSpec::power(4.0), PsiSpec::exponential(1.0, 1.0),
                            PsiSpec::exponential(0.01, 1.5)}) {
        for (int k = 0; k <= 60; ++k) {
            const double x = std::pow(10.0, -3.0 + 6.0 * k / 60.0);
            const double y = psi_eval(psi, x);
            if (!std::isfinite(y)) continue;
            EXPECT_NEAR(psi_inverse(psi, y), x, 1e-10 * std::max(1.0, x)) << psi.name() << " x=" << x;
        }
    }
}

TEST(Psi, CustomTripleUsesBisectionInverse) {
    const auto psi = PsiSpec::custom({"cosh-1", [](double x) { return std::cosh(x) - 1.0; },
                                      [](double x) { return std::sinh(x); }, nullptr});
    EXPECT_NEAR(psi_inverse(psi, std::cosh(2.0) - 1.0), 2.0, 1e-10);
    EXPECT_THROW((void)PsiSpec::custom({"concave", [](double x) { return std::sqrt(x); },
                                        [](double x) { return 0.5 / std::sqrt(x); }, nullptr}),
                 ValidationError);
    EXPECT_THROW((void)PsiSpec::custom({"shifted", [](double x) { return x + 1.0; },
                                        [](double) { return 1.0; }, nullptr}),
                 ValidationError);
}

TEST(Psi, FactoryValidation) {
    EXPECT_THROW((void)PsiSpec::power(0.5), ValidationError);
    EXPECT_THROW((void)PsiSpec::exponential(0.0, 1.0), ValidationError);
    EXPECT_THROW((void)PsiSpec::exponential(1.0, 0.5), ValidationError);
}

TEST(Psi, ConvexityGridCheckOnShippedKinds) {
    for (const auto& psi : {PsiSpec::power(1.0), PsiSpec::power(1.5), PsiSpec::power(2.0),
                            PsiSpec::power(4.0), PsiSpec::exponential(0.05, 1.0),
                            PsiSpec::exponential(0.001, 1.5)})
        EXPECT_TRUE(convexity_grid_check(psi, 100.0)) << psi.name();
}

TEST(Psi, MonotoneOnSortedGrid) {
    for (const auto& psi : shipped()) {
        double prev = 0.0;
        for (int k = 0; k <= 200; ++k) {
            const double v = psi_eval(psi, 0.05 * k);
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(Psi, DerivativeIntegratesToPsi) {
    for (const auto& psi : shipped()) {
        for (double T : {0.1, 1.0, 10.0}) {
            const double target = psi_eval(psi, T);
            const auto res = integrate([&](double v) { return psi_deriv(psi, v); }, 0.0, T);
            EXPECT_NEAR(res.value, target, 1e-8 * target) << psi.name() << " T=" << T;
        }
    }
}

TEST(Psi, MomentNormDegenerateLawIsZero) {
    auto zero = law(IidGaussian{}, 3);
    zero.cross.sigma = 0.0;
    EXPECT_EQ(psi_moment_norm(PsiSpec::power(2.0), zero, 2.0, 1000, 1).value, 0.0);
}

TEST(Psi, MomentNormGaussianFourthMoment) {
    const auto m = psi_moment_norm(PsiSpec::power(2.0), law(IidGaussian{}, 1), 2.0, 200000, 9);
    EXPECT_LT(std::abs(m.value - std::sqrt(48.0)), 3.0 * m.se);
    EXPECT_GT(m.se, 0.0);
}

TEST(Psi, MomentNormBoundedRademacherIsExact) {
    const auto m = psi_moment_norm(PsiSpec::power(1.0), law(BoundedRademacher{1.0}, 1), 2.0, 1000, 1);
    EXPECT_DOUBLE_EQ(m.value, 2.0);
    EXPECT_EQ(m.se, 0.0);
}

TEST(Psi, MomentNormPreconditions) {
    EXPECT_THROW((void)psi_moment_norm(PsiSpec::power(1.0), law(IidGaussian{}, 1), 1.0, 1000, 1),
                 ValidationError);
    EXPECT_THROW((void)psi_moment_norm(PsiSpec::power(1.0), law(IidGaussian{}, 1), 2.0, 999, 1),
                 ValidationError);
}

TEST(Psi, MomentNormOverflowNamesKind) {
    // exp(50 (2|x|)^2)^2 overflows for moderate Gaussian draws.
    try {
        (void)psi_moment_norm(PsiSpec::exponential(50.0, 2.0), law(IidGaussian{}, 2), 2.0, 1000, 4);
        FAIL() << "expected a numerical error";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("iid_gaussian"), std::string::npos) << e.what();
    }
}
