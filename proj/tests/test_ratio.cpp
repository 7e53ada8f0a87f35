#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "ratio_convexity/ratio.hpp"

using namespace ratio_convexity;

namespace {

std::vector<DensityModel> builtin_models() {
    return {DensityModel::laplace(), DensityModel::quartic(),
            DensityModel::gaussian(GaussianParams::standard(1)),
            DensityModel::gaussian(GaussianParams({1.0, -2.0}, Matrix{{2, 0.5}, {0.5, 1}}))};
}

}  // namespace

TEST(LogRatio, Examples) {
    const auto g = DensityModel::gaussian(GaussianParams::standard(1));
    EXPECT_NEAR(log_ratio(g, {0.0}, {1.0}), -0.5, 1e-15);
    EXPECT_EQ(log_ratio(DensityModel::laplace(), {-2.0}, {1.0}), 1.0);
    for (const auto& m : builtin_models()) {
        const Vector x(m.dimension(), 0.7), zero(m.dimension(), 0.0);
        EXPECT_EQ(log_ratio(m, x, zero), 0.0) << m.name();
    }
}

TEST(LogRatio, RejectsMismatchedShift) {
    EXPECT_THROW(log_ratio(DensityModel::laplace(), {0.0}, {1.0, 1.0}), UsageError);
    EXPECT_THROW(log_ratio(DensityModel::laplace(), {0.0}, {NAN}), UsageError);
}

TEST(GaussianAffine, StandardNormal) {
    const auto f = gaussian_log_ratio_affine(GaussianParams::standard(1), std::vector<double>{1.0});
    EXPECT_NEAR(f.slope[0], -1.0, 1e-15);
    EXPECT_NEAR(f.intercept, -0.5, 1e-15);
}

TEST(GaussianAffine, ZeroShift) {
    const GaussianParams p({1.0, 2.0}, Matrix{{3, 1}, {1, 2}});
    const auto f = gaussian_log_ratio_affine(p, std::vector<double>{0.0, 0.0});
    EXPECT_EQ(f.slope[0], 0.0);
    EXPECT_EQ(f.slope[1], 0.0);
    EXPECT_EQ(f.intercept, 0.0);
}

TEST(GaussianAffine, ShiftedScaledByHand) {
    const GaussianParams p = GaussianParams::univariate(1.0, 2.0);
    const auto f = gaussian_log_ratio_affine(p, std::vector<double>{2.0});
    EXPECT_NEAR(f.slope[0], -1.0, 1e-15);
    EXPECT_NEAR(f.intercept, 0.0, 1e-15);
    const auto model = DensityModel::gaussian(p);
    for (double x : {-1.0, 0.0, 3.0}) EXPECT_NEAR(log_ratio(model, {x}, {2.0}), f.slope[0] * x + f.intercept, 1e-12);
}

TEST(GaussianAffine, RandomAgreement) {
    oracle::Uniform u(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + u.index(3);
        Matrix r(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) = u(-1, 1);
        Matrix cov = r * r.transposed();
        for (std::size_t i = 0; i < n; ++i) cov(i, i) += 0.2;
        Vector mu(n), x(n), y(n);
        for (double& v : mu) v = u(-3, 3);
        for (double& v : x) v = u(-5, 5);
        for (double& v : y) v = u(-3, 3);
        const GaussianParams p(mu, cov);
        const auto f = gaussian_log_ratio_affine(p, y);
        ASSERT_NEAR(log_ratio(DensityModel::gaussian(p), x, y), dot(f.slope, x) + f.intercept, 1e-10);
    }
}

TEST(LaplaceLogRatio, BranchExamples) {
    EXPECT_EQ(laplace_log_ratio(-0.5, 1.0), 0.0);
    EXPECT_EQ(laplace_branch(-0.5, 1.0), 1);
    EXPECT_EQ(laplace_log_ratio(2.0, 1.0), -1.0);
    EXPECT_EQ(laplace_branch(2.0, 1.0), 3);
    EXPECT_EQ(laplace_log_ratio(0.5, -1.0), 0.0);
    EXPECT_EQ(laplace_branch(0.5, -1.0), 2);
    EXPECT_EQ(laplace_log_ratio(-2.0, 1.0), 1.0);
    EXPECT_EQ(laplace_branch(-2.0, 1.0), 0);
}

TEST(LaplaceLogRatio, BranchesAgreeAtSharedEndpoints) {
    // Evaluate every non-empty branch whose closure holds the boundary point.
    for (double y : {-2.0, -1.0, -0.25, 0.25, 1.0, 2.0}) {
        const double yp = std::max(y, 0.0), ym = -std::min(y, 0.0);
        const std::array<double, 4> lo{-INFINITY, -yp, 0.0, ym};
        const std::array<double, 4> hi{-yp, 0.0, ym, INFINITY};
        auto branch = [y](int k, double x) {
            switch (k) {
                case 0: return y;
                case 1: return -y - 2.0 * x;
                case 2: return y + 2.0 * x;
                default: return -y;
            }
        };
        for (double x : {-yp, 0.0, ym}) {
            const double expected = std::abs(x) - std::abs(x + y);
            EXPECT_EQ(laplace_log_ratio(x, y), expected);
            for (int k = 0; k < 4; ++k)
                if (lo[k] < hi[k] && lo[k] <= x && x <= hi[k]) EXPECT_EQ(branch(k, x), expected) << k << " " << y;
        }
    }
}

TEST(LaplaceLogRatio, MatchesDensityDifferenceExactly) {
    oracle::Uniform u(32);
    const auto model = DensityModel::laplace();
    for (int i = 0; i < 10000; ++i) {
        const double x = u(-6, 6), y = u(-6, 6);
        ASSERT_NEAR(laplace_log_ratio(x, y), log_ratio(model, {x}, {y}), 1e-14);
        ASSERT_NEAR(laplace_log_ratio(x, y), log_density(model, {x + y}) - log_density(model, {x}), 1e-14);
    }
}

TEST(QuarticHxx, ExampleNearOne) {
    const auto q = quartic_hxx(1.0, 0.1);
    auto h = [](long double x) { return std::exp(x * x * x * x - std::pow(x + 0.1L, 4)); };
    const double fd = oracle::richardson_second_derivative(h, 1.0, 1e-3, 1e-4);
    EXPECT_NEAR(q.hxx, fd, 1e-5 * std::abs(fd));
    EXPECT_NEAR(q.hxx, -0.482, 5e-4);
    EXPECT_LT(q.bracket, 0.0);
}

TEST(QuarticHxx, BoundaryShift) {
    const auto q = quartic_hxx(0.0, std::sqrt(6.0));
    EXPECT_NEAR(q.bracket, 3384.0, 1e-9);
    EXPECT_NEAR(q.hxx, std::exp(-36.0) * 3384.0, 1e-12 * std::exp(-36.0) * 3384.0);
    EXPECT_FALSE(q.underflow);
}

TEST(QuarticHxx, ZeroShift) {
    for (double x : {-3.0, 0.0, 0.7, 5.0}) {
        EXPECT_EQ(quartic_hxx(x, 0.0).hxx, 0.0);
        EXPECT_EQ(quartic_hxx(x, 0.0).bracket, 0.0);
    }
}

TEST(QuarticHxx, UnderflowIsFlagged) {
    const auto q = quartic_hxx(0.0, 40.0);
    EXPECT_EQ(q.hxx, 0.0);
    EXPECT_TRUE(q.underflow);
    EXPECT_GT(q.bracket, 0.0);
    EXPECT_THROW(quartic_hxx(NAN, 1.0), UsageError);
}

TEST(QuarticHxx, MatchesFiniteDifferencesOnGrid) {
    for (int i = 0; i <= 60; ++i)
        for (int j = 0; j <= 60; ++j) {
            const double x = -3.0 + 0.1 * i;
            const double y = -3.0 + 0.1 * j;
            if (std::abs(y) < 1e-2) continue;
            auto h = [y](long double s) { return std::exp(s * s * s * s - std::pow(s + static_cast<long double>(y), 4)); };
            const double fd = oracle::richardson_second_derivative(h, x, 1e-3, 1e-4);
            const double hxx = quartic_hxx(x, y).hxx;
            ASSERT_NEAR(hxx, fd, 1e-5 * std::max(std::abs(fd), 1e-300)) << "x=" << x << " y=" << y;
        }
}

TEST(QuarticHxx, SmallShiftLimit) {
    // h_xx / y + 24x at y = 1e-3, from 40-digit evaluation of the closed form.
    const std::array<std::pair<double, double>, 6> at_1e3{{{-2.0, 3.923746677964957},
                                                           {-1.0, 0.22828712695472245},
                                                           {-0.5, 0.0029460614137972003},
                                                           {0.5, 0.0030540613358594156},
                                                           {1.0, 0.22771112905071914},
                                                           {2.0, 3.734796247254378}}};
    for (auto [x, gap] : at_1e3) EXPECT_NEAR(quartic_hxx(x, 1e-3).hxx / 1e-3 + 24 * x, gap, 1e-9) << x;
    // The gap is first order in y, so it shrinks tenfold per decade.
    for (auto [x, gap] : at_1e3) {
        const double g4 = quartic_hxx(x, 1e-4).hxx / 1e-4 + 24 * x;
        const double g5 = quartic_hxx(x, 1e-5).hxx / 1e-5 + 24 * x;
        EXPECT_NEAR(g4 / gap, 0.1, 0.005) << x;
        EXPECT_NEAR(g5 / g4, 0.1, 0.005) << x;
        EXPECT_LE(std::abs(g5), 0.1) << x;
    }
}

TEST(RatioProperty, ReflectionIdentity) {
    oracle::Uniform u(33);
    for (const auto& m : builtin_models())
        for (int i = 0; i < 2500; ++i) {
            Vector x(m.dimension()), y(m.dimension());
            for (double& v : x) v = u(-4, 4);
            for (double& v : y) v = u(-4, 4);
            const double fwd = log_ratio(m, x, y);
            const double back = log_ratio(m, add(x, y), scaled(y, -1.0));
            ASSERT_NEAR(fwd + back, 0.0, 1e-12 * std::max(1.0, std::abs(fwd))) << m.name();
        }
}

TEST(RatioProperty, IntegrationIdentity) {
    const std::vector<DensityModel> models{DensityModel::laplace(), DensityModel::quartic(),
                                           DensityModel::gaussian(GaussianParams::univariate(0.5, 1.5))};
    for (const auto& m : models)
        for (double x : {-1.0, 0.0, 2.0}) {
            auto h = [&](double y) { return std::exp(log_ratio(m, {x}, {y})); };
            const double expected = std::exp(-log_density(m, {x}));
            // split at the Laplace kink y = -x
            const double tol = 1e-10 * expected;
            const double total = oracle::adaptive_simpson(h, -40.0, -x, tol) + oracle::adaptive_simpson(h, -x, 40.0, tol);
            EXPECT_NEAR(total, expected, 1e-6 * expected) << m.name() << " x=" << x;
        }
}
