#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "blocksymm/errors.hpp"
#include "blocksymm/remainders.hpp"
#include "property.hpp"

using namespace blocksymm;

namespace {

const double kE = std::numbers::e;

}  // namespace

TEST(Remainders, RnExamples) {
    for (std::size_t n : {1, 16, 1000}) {
        EXPECT_NEAR(remainder_Rn(PsiSpec::power(1.0), n, 2.0, 0.1), 0.2, 1e-12);
        EXPECT_NEAR(remainder_Rn(PsiSpec::power(2.0), n, 2.0, 0.1), 0.4, 1e-12);
    }
    EXPECT_EQ(remainder_Rn(PsiSpec::power(2.0), 16, 2.0, 0.0), 0.0);
    EXPECT_THROW((void)remainder_Rn(PsiSpec::power(2.0), 16, 0.0, 0.1), ValidationError);
    EXPECT_THROW((void)remainder_Rn(PsiSpec::power(2.0), 16, 1.0, -0.1), ValidationError);
}

TEST(Remainders, R1Examples) {
    EXPECT_NEAR(remainder_R1(PsiSpec::power(1.0), 64, 2.0, 0.1), 0.1, 1e-12);
    EXPECT_NEAR(remainder_R1(PsiSpec::power(2.0), 64, 2.0, 0.1), 0.4, 1e-12);
    EXPECT_LT(remainder_R1(PsiSpec::power(2.0), 64, 1e-9, 0.1), 1e-15);
}

TEST(Remainders, QuadratureMatchesClosedForms) {
    for (double q : {1.0, 1.5, 2.0, 4.0}) {
        for (double U : {0.1, 1.0, 10.0}) {
            for (std::size_t n : {16, 256}) {
                const auto psi = PsiSpec::power(q);
                const double rn = remainder_Rn_power_closed(q, U, 0.3);
                const double r1 = remainder_R1_power_closed(q, U, 0.3);
                EXPECT_NEAR(remainder_Rn(psi, n, U, 0.3), rn, 1e-9 * rn);
                EXPECT_NEAR(remainder_R1(psi, n, U, 0.3), r1, 1e-9 * r1);
                // The printed constants carry the extra n^{-q/2} factor.
                EXPECT_NEAR(remainder_Rn_printed(q, n, U, 0.3) / rn, std::pow(n, -q / 2.0), 1e-12);
            }
        }
    }
}

TEST(Remainders, ExponentialPsiQuadrature) {
    // psi = exp(x) - 1: R_n = rho_sum (e^U - 1), R'_1 = rho_sum (e^{2U} - 1) / 4.
    const auto psi = PsiSpec::exponential(1.0, 1.0);
    EXPECT_NEAR(remainder_Rn(psi, 50, 1.5, 0.2), 0.2 * std::expm1(1.5), 1e-10);
    EXPECT_NEAR(remainder_R1(psi, 50, 1.5, 0.2), 0.2 * std::expm1(3.0) / 4.0, 1e-10);
}

TEST(Remainders, R2Examples) {
    EXPECT_EQ(remainder_R2(2.0, 0.0, 5.0), 0.0);
    EXPECT_DOUBLE_EQ(remainder_R2(2.0, 1.0, 6.0), 3.0);
    EXPECT_NEAR(remainder_R2(2.0, 0.04, 5.0), 0.5, 1e-15);
    EXPECT_THROW((void)remainder_R2(1.0, 0.5, 1.0), ValidationError);
    EXPECT_THROW((void)remainder_R2(2.0, 1.5, 1.0), ValidationError);
}

TEST(Remainders, ConcentrationGeneral) {
    const double p = std::exp(2.0);
    const double pbar = 2.0 * std::exp(-10.0);
    EXPECT_NEAR(concentration_general(p, pbar), 0.4, 1e-12);
    EXPECT_EQ(concentration_general(p, 0.0), 0.0);
    EXPECT_LT(concentration_general(p, 1e-300), 0.01);
    // pbar = 1, p = e^e: 2e / ln(e) clamps to 1.
    EXPECT_EQ(concentration_general(std::exp(kE), 1.0), 1.0);
    EXPECT_THROW((void)concentration_general(2.0, 1.0), VacuousBoundError);
    EXPECT_THROW((void)concentration_general(1.0, 0.1), DomainError);
}

TEST(Remainders, ConcentrationLqIsMarkovSubstitution) {
    prop::for_all(200, 17, [](prop::Gen& g, std::size_t) {
        const double p = g.log_uniform(3.0, 1e6);
        const double U = g.uniform(0.5, 5.0);
        const double q = g.uniform(1.0, 4.0);
        const double moment = g.log_uniform(1e-8, 1e-2);
        const double pbar = moment / std::pow(U, q);
        EXPECT_NEAR(concentration_lq(p, U, q, moment), concentration_general(p, pbar), 1e-14);
    });
    const double p = std::exp(2.0);
    // U^q / moment = e^10 / 2 so (U^q / moment) ln p = e^10.
    EXPECT_NEAR(concentration_lq(p, 1.0, 2.0, 2.0 * std::exp(-10.0)), 0.4, 1e-12);
    EXPECT_LT(concentration_lq(1000.0, 2.0, 2.0, 1e-8), concentration_lq(1000.0, 1.0, 2.0, 1e-8));
}

TEST(Remainders, ConcentrationSubexp) {
    const double p = std::exp(kE);
    TailParams params{1.0, 1.0, 1.0, 0.5};
    // n^phi U^phi = e with n = e^2, U = 1.
    const auto small = concentration_subexp(p, 7, std::exp(2.0) / 7.0, params);
    EXPECT_NEAR(small.dominant, 1.0, 1e-12);
    EXPECT_EQ(small.bound, 1.0);

    const auto big = concentration_subexp(p, 10000, 1.0, params);
    EXPECT_NEAR(big.dominant, kE / 100.0, 1e-14);
    EXPECT_LT(big.second, 1e-300);
    EXPECT_FALSE(big.warning);
    EXPECT_NEAR(big.full, big.dominant, 1e-15);

    double prev = 2.0;
    for (std::size_t n = 10; n <= 100000; n *= 10) {
        const double b = concentration_subexp(p, n, 1.0, params).bound;
        EXPECT_LE(b, prev);
        prev = b;
    }
    EXPECT_THROW((void)concentration_subexp(kE, 100, 1.0, params), DomainError);
    EXPECT_THROW((void)concentration_subexp(100.0, 100, 1.0, TailParams{1.0, 1.0, 1.0, 1.0}),
                 ValidationError);
}

TEST(Remainders, SubexpWarningFlagsLargeSecondTerm) {
    // b tiny: exp(lambda - b (nU)^gamma) is not negligible.
    const auto s = concentration_subexp(1000.0, 10, 1.0, TailParams{1.0, 1e-6, 1.0, 0.5});
    EXPECT_TRUE(s.warning);
    EXPECT_GT(s.full, s.bound - 1e-15);
}

TEST(Remainders, OptimalTruncationFormsAgree) {
    prop::for_all(100, 23, [](prop::Gen& g, std::size_t) {
        const double q = g.uniform(1.0, 4.0);
        const double r = g.uniform(1.1, 5.0);
        const double phi = g.uniform(0.05, 2.0);
        const double rho = g.uniform(0.001, 2.0);
        const double p = g.log_uniform(3.0, 1e6);
        const auto n = g.index(10, 100000);
        const double M = g.uniform(0.1, 10.0);
        const double a = optimal_truncation(q, r, phi, rho, p, n, M);
        const double b = optimal_truncation_example_form(q, r, phi, rho, p, n, M);
        EXPECT_NEAR(a, b, 1e-12 * a);
    });
}

TEST(Remainders, OptimalTruncationMinimisesPrintedBound) {
    prop::for_all(100, 29, [](prop::Gen& g, std::size_t) {
        const double q = g.uniform(1.0, 3.0);
        const double r = g.uniform(1.2, 4.0);
        const double phi = g.uniform(0.1, 1.0);
        const double rho = g.uniform(0.01, 1.0);
        const double p = g.log_uniform(20.0, 1e5);
        const auto n = g.index(16, 10000);
        const double M = g.uniform(0.5, 4.0);
        const double U = optimal_truncation(q, r, phi, rho, p, n, M);
        const auto f = [&](double u) { return subexp_upper_bound(q, r, phi, rho, p, n, M, u); };
        for (double s : {0.5, 0.9, 1.1, 2.0}) EXPECT_LE(f(U), f(s * U) * (1.0 + 1e-12));
    });
}

TEST(Remainders, OptimalTruncationRegression) {
    const double U = optimal_truncation(1.0, 2.0, 0.5, 0.1, std::exp(kE), 10000, 1.0);
    // k = 1/4, C = (e / 100)^{1/2}; U* = (k C / (q rho))^{1/(q + k)}.
    const double expected = std::pow(0.25 * std::sqrt(kE / 100.0) / 0.1, 1.0 / 1.25);
    EXPECT_NEAR(U, expected, 1e-14);
    EXPECT_LT(U, optimal_truncation(1.0, 2.0, 0.5, 0.05, std::exp(kE), 10000, 1.0));
    try {
        (void)optimal_truncation(1.0, 2.0, 0.5, 0.0, 100.0, 100, 1.0);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("no blocking penalty; truncation unbounded"),
                  std::string::npos);
    }
}

TEST(Remainders, CombinedTotalIsMinimisedAtScaledOptimum) {
    // With the 1/2 of R'_1 kept, the Power/subexp total is 2^{q-2} rho U^q + 2^{q-1} U^{-k} C,
    // whose minimiser is 2^{1/(q+k)} U*.
    const double q = 2.0, r = 2.0, phi = 0.5, rho = 0.05;
    const double p = 500.0;
    const std::size_t n = 128;
    const double M = 1.5;
    const double k = phi * (r - 1.0) / r;
    const double U = optimal_truncation(q, r, phi, rho, p, n, M);
    const double C = std::pow(std::log(p) / (std::pow(n, phi) * std::log(std::log(p))), (r - 1.0) / r) *
                     std::pow(M, q);
    const auto total = [&](double u) {
        return remainder_R1(PsiSpec::power(q), n, u, rho) + std::pow(2.0, q - 1.0) * std::pow(u, -k) * C;
    };
    const double u2 = std::pow(2.0, 1.0 / (q + k)) * U;
    for (double s : {0.5, 0.9, 1.1, 2.0}) EXPECT_LE(total(u2), total(s * u2));
}

TEST(Remainders, CombinedRemainder) {
    const auto zero = combined_remainder(PsiSpec::power(2.0), 64, 1.0, 0.0, 2.0, 10.0,
                                         EmpiricalTail{0.0}, 5.0);
    EXPECT_EQ(zero.r1, 0.0);
    EXPECT_EQ(zero.r2, 0.0);
    EXPECT_EQ(zero.total, 0.0);

    const auto psi = PsiSpec::power(2.0);
    const TailMode sub = SubexpTail{TailParams{2.0, 0.05, 1.0, 0.5}};
    double prev_r1 = -1.0, prev_r2 = 1e300;
    for (int j = 1; j <= 40; ++j) {
        const double U = 0.05 * j;
        const auto c = combined_remainder(psi, 64, U, 0.1, 2.0, 50.0, sub, 3.0);
        EXPECT_GE(c.r1, prev_r1);
        EXPECT_LE(c.r2, prev_r2);
        EXPECT_NEAR(c.total, c.r1 + c.r2, 1e-15);
        prev_r1 = c.r1;
        prev_r2 = c.r2;
    }
    EXPECT_EQ(tail_mode_name(sub), "subexp");
    EXPECT_EQ(tail_probability(LqTail{2.0, 10.0}, 5.0, 64, 1.0), 1.0);  // vacuous
}

TEST(Remainders, OutputsAreNonNegative) {
    prop::for_all(200, 31, [](prop::Gen& g, std::size_t) {
        const auto psi = PsiSpec::power(g.uniform(1.0, 3.0));
        const double U = g.uniform(0.01, 5.0);
        const double rho = g.uniform(0.0, 2.0);
        EXPECT_GE(remainder_Rn(psi, g.index(1, 500), U, rho), 0.0);
        EXPECT_GE(remainder_R1(psi, g.index(1, 500), U, rho), 0.0);
        const double b = concentration_subexp(g.log_uniform(3.0, 1e6), g.index(1, 1000), U,
                                              TailParams{1.0, 1.0, 1.0, 0.5}).bound;
        EXPECT_GE(b, 0.0);
        EXPECT_LE(b, 1.0);
    });
}
