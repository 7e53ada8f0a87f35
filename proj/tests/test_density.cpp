#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ratio_convexity/density.hpp"

using namespace ratio_convexity;

namespace {

double quartic_mass_oracle() {
    static const double mass = oracle::adaptive_simpson([](double x) { return std::exp(-x * x * x * x); }, -10.0, 10.0,
                                                        1e-15);
    return mass;
}

GaussianParams random_gaussian(oracle::Uniform& u, std::size_t n) {
    // Sigma = O^T D O with O from the eigenvectors of a random symmetric matrix.
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) r(i, j) = r(j, i) = u(-1, 1);
    const Matrix o = eigen_symmetric(r).vectors;
    Vector d(n);
    for (double& v : d) v = u(0.1, 10.0);
    Vector mu(n);
    for (double& v : mu) v = u(-5, 5);
    return {mu, o.transposed() * Matrix::diagonal(d) * o};
}

}  // namespace

TEST(LogDensity, StandardNormalMode) {
    const auto model = DensityModel::gaussian(GaussianParams::standard(1));
    EXPECT_NEAR(log_density(model, {0.0}), -0.5 * std::log(2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(log_density(model, {0.0}), -0.9189385332046727, 1e-15);
}

TEST(LogDensity, LaplaceAtMinusTwo) {
    EXPECT_DOUBLE_EQ(log_density(DensityModel::laplace(), {-2.0}), -2.0 - std::log(2.0));
}

TEST(LogDensity, QuarticAtOne) {
    const double c = 1.0 / quartic_mass_oracle();
    EXPECT_NEAR(log_density(DensityModel::quartic(), {1.0}), std::log(c) - 1.0, 1e-12);
}

TEST(QuarticNormConstant, MatchesSimpsonOracle) {
    const double c = quartic_norm_constant();
    EXPECT_NEAR(c, 1.0 / quartic_mass_oracle(), 1e-12 * c);
    EXPECT_NEAR(c, 0.5516, 5e-5);
    EXPECT_GT(c, 0.5);
    EXPECT_LT(c, 1.0);
}

TEST(QuarticNormConstant, MatchesGammaIdentity) {
    EXPECT_NEAR(quartic_norm_constant(), 2.0 / std::tgamma(0.25), 1e-12);
}

TEST(QuarticNormConstant, NormalizesTheDensity) {
    EXPECT_NEAR(quartic_norm_constant() * quartic_mass_oracle(), 1.0, 1e-10);
}

TEST(LogDensity, RejectsBadPoints) {
    const auto g2 = DensityModel::gaussian(GaussianParams::standard(2));
    EXPECT_THROW(log_density(g2, {1.0}), UsageError);
    EXPECT_THROW(log_density(DensityModel::laplace(), {1.0, 2.0}), UsageError);
    EXPECT_THROW(log_density(DensityModel::laplace(), {NAN}), UsageError);
    EXPECT_THROW(log_density(g2, {0.0, INFINITY}), UsageError);
}

TEST(LogDensity, CustomContractViolation) {
    const auto bad = DensityModel::custom(1, [](std::span<const double> x) { return x[0] > 0 ? NAN : 0.0; });
    EXPECT_EQ(log_density(bad, {-1.0}), 0.0);
    EXPECT_THROW(log_density(bad, {1.0}), ModelContractError);
    const auto inf = DensityModel::custom(1, [](std::span<const double>) { return -INFINITY; });
    EXPECT_THROW(log_density(inf, {0.0}), ModelContractError);
}

TEST(DensityModel, NamesAndDimensions) {
    EXPECT_EQ(DensityModel::laplace().dimension(), 1u);
    EXPECT_EQ(DensityModel::quartic().dimension(), 1u);
    EXPECT_EQ(DensityModel::gaussian(GaussianParams::standard(3)).dimension(), 3u);
    EXPECT_EQ(DensityModel::laplace().name(), "laplace");
    EXPECT_EQ(DensityModel::quartic().name(), "quartic");
    EXPECT_EQ(DensityModel::gaussian(GaussianParams::standard(1)).name(), "gaussian");
    EXPECT_EQ(DensityModel::laplace().kind(), ModelKind::Laplace);
}

TEST(GaussianParams, ValidatesCovariance) {
    EXPECT_THROW(GaussianParams({0.0, 0.0}, Matrix{{1, 0}, {0, 0}}), UsageError);
    EXPECT_THROW(GaussianParams({0.0, 0.0}, Matrix{{1, 2}, {2, 1}}), UsageError);
    EXPECT_THROW(GaussianParams({0.0}, Matrix{{1, 0}, {0, 1}}), UsageError);
    EXPECT_THROW(GaussianParams({NAN}, Matrix{{1}}), UsageError);
    const GaussianParams g({0.0, 0.0}, Matrix{{2, 1.5}, {0.5, 2}});
    EXPECT_EQ(g.covariance()(0, 1), 1.0);
    EXPECT_EQ(g.covariance()(1, 0), 1.0);
}

TEST(GaussianParams, BivariateByHand) {
    // Sigma = [[2, 1], [1, 2]], det 3, Sigma^{-1} = [[2, -1], [-1, 2]] / 3.
    const GaussianParams g({1.0, -1.0}, Matrix{{2, 1}, {1, 2}});
    const double x0 = 2.0, x1 = 0.5;
    const double d0 = x0 - 1.0, d1 = x1 + 1.0;
    const double q = (2 * d0 * d0 - 2 * d0 * d1 + 2 * d1 * d1) / 3.0;
    const double expected = -0.5 * q - 0.5 * (2 * std::log(2 * std::numbers::pi) + std::log(3.0));
    EXPECT_NEAR(g.log_density(std::vector<double>{x0, x1}), expected, 1e-14);
}

TEST(LogQuadraticForm, SymmetrizesAndNegates) {
    const LogQuadraticForm q(Matrix{{2, 3}, {1, 4}}, {1.0, -1.0}, 0.5);
    EXPECT_EQ(q.A(0, 1), 2.0);
    EXPECT_EQ(q.A(1, 0), 2.0);
    const std::vector<double> x{1.0, 2.0};
    // 1/2 (2 + 2*2*1*2 + 4*4) + (1 - 2) + 0.5 = 13 - 1 + 0.5
    EXPECT_DOUBLE_EQ(q.log_reciprocal(x), 12.5);
    EXPECT_DOUBLE_EQ(q.log_density(x), -12.5);
    EXPECT_THROW(LogQuadraticForm(Matrix{{1}}, {1.0, 2.0}, 0.0), UsageError);
}

TEST(LogDensityProperty, GaussianSecondDifferenceIsConstant) {
    oracle::Uniform u(21);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + u.index(3);
        const GaussianParams g = random_gaussian(u, n);
        Vector x(n), d(n);
        for (double& v : x) v = u(-6, 6);
        for (double& v : d) v = u(-1, 1);
        const double norm = norm2(d);
        for (double& v : d) v /= norm;
        const double t = u(0.05, 2.0);
        const auto model = DensityModel::gaussian(g);
        const double d2 = log_density(model, add(x, scaled(d, t))) - 2.0 * log_density(model, x) +
                          log_density(model, subtract(x, scaled(d, t)));
        const double expected = -t * t * quadratic_form(g.precision(), d);
        ASSERT_NEAR(d2, expected, 1e-10 * std::max(1.0, std::abs(log_density(model, x))));
    }
}

TEST(LogDensityProperty, FiniteOnGrid) {
    const std::vector<DensityModel> models{DensityModel::laplace(), DensityModel::quartic(),
                                           DensityModel::gaussian(GaussianParams::univariate(1.0, 2.0))};
    for (const auto& m : models)
        for (int i = -100; i <= 100; ++i) ASSERT_TRUE(std::isfinite(log_density(m, {i * 0.05})));
}

TEST(LogDensityProperty, IntegratesToOne) {
    auto mass = [](const DensityModel& m, double a, double b, double split) {
        auto f = [&](double x) { return std::exp(log_density(m, {x})); };
        return oracle::adaptive_simpson(f, a, split, 1e-12) + oracle::adaptive_simpson(f, split, b, 1e-12);
    };
    // Laplace tails beyond 12 carry e^{-12}; the full mass needs a wider window.
    EXPECT_NEAR(mass(DensityModel::laplace(), -12, 12, 0.0), 1.0 - std::exp(-12.0), 1e-8);
    EXPECT_NEAR(mass(DensityModel::laplace(), -25, 25, 0.0), 1.0, 1e-8);
    EXPECT_NEAR(mass(DensityModel::quartic(), -12, 12, 0.0), 1.0, 1e-8);
    const double mu = 1.0, sd = std::sqrt(2.0);
    EXPECT_NEAR(mass(DensityModel::gaussian(GaussianParams::univariate(mu, 2.0)), mu - 12 * sd, mu + 12 * sd, mu),
                1.0, 1e-8);
}
