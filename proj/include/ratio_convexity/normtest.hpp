#pragma once

// A normality test built on the translation-ratio characterization.
//
// Under a Gaussian, x -> log f(x+y) - log f(x) is affine for every y, so its
// second differences vanish. The statistic is the worst normalized second
// difference of that log-ratio for a kernel density estimate of the sample.
// Nothing is known about its distribution, so it is calibrated by a
// parametric bootstrap under the fitted Gaussian. KDE smoothing biases the
// statistic upward even under the null; replicates use the same bandwidth
// rule and grid, so the calibration absorbs that bias.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/kde.hpp"
#include "ratio_convexity/linalg.hpp"
#include "ratio_convexity/parallel.hpp"
#include "ratio_convexity/probe.hpp"
#include "ratio_convexity/random.hpp"
#include "ratio_convexity/spectral.hpp"

namespace ratio_convexity {

struct Decision {
    double alpha = 0.05;
    bool reject = false;
};

struct TestReport {
    double statistic = 0.0;  ///< T >= 0
    double p_value = 1.0;    ///< (1 + #{T*_r >= T}) / (reps + 1)
    std::size_t exceedances = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::size_t sample_size = 0;
    std::size_t dimension = 0;
    Vector bandwidth;  ///< per coordinate, for the observed sample
    std::vector<Decision> decisions;
};

inline constexpr std::size_t kMinimumReps = 99;
inline constexpr std::size_t kMaxTestDimension = 3;

/// Grid for the test statistic, in standardized units: x in [-3, 3],
/// y in {+-0.5, +-1, +-2} along each axis, t in {0.2, 0.4}, axis directions.
/// One dimension uses 61 points (spacing 0.1); higher dimensions use 7 per axis.
inline ProbeGrid default_test_grid(std::size_t n) {
    if (n == 0) throw UsageError("default_test_grid: dimension must be at least 1");
    static constexpr std::array<double, 6> kMagnitudes = {0.5, -0.5, 1.0, -1.0, 2.0, -2.0};
    ProbeGrid g;
    g.axes.assign(n, AxisRange{-3.0, 3.0, n == 1 ? std::size_t{61} : std::size_t{7}});
    for (double v : kMagnitudes)
        for (std::size_t k = 0; k < n; ++k) {
            Vector y(n, 0.0);
            y[k] = v;
            g.shifts.push_back(std::move(y));
        }
    g.directions = default_directions(n, 0);
    g.steps = {0.2, 0.4};
    return g;
}

/// T = max over the grid of |second difference of log h(., y)| / t^2.
/// Both signs count, so log-convex and log-concave failures both raise it.
inline double violation_statistic(const DensityModel& model, const ProbeGrid& grid) {
    return log_ratio_curvature(model, grid).max_normalized;
}

/// (1 + exceedances) / (reps + 1)
constexpr double monte_carlo_p(std::size_t exceedances, std::size_t reps) {
    return static_cast<double>(1 + exceedances) / static_cast<double>(reps + 1);
}

/// Affine-invariant standardization.
///
/// Subtracts the sample mean and whitens by Sigma^{-1/2} (symmetric root, from
/// the Jacobi decomposition of the unbiased covariance). Whitening determines
/// the data only up to an orthogonal map, which an axis-aligned product kernel
/// and grid would notice, so the result is then rotated onto the eigenvectors
/// of the fourth-moment scatter (1/m) sum |z|^2 z z^T, and each axis is flipped
/// so that its third moment is non-negative. For x -> Sx + v with invertible S
/// the output is unchanged up to rounding, provided the scatter eigenvalues
/// are distinct.
inline Sample standardize(const Sample& sample) {
    const std::size_t n = sample.dimension();
    const std::size_t m = sample.size();
    const Vector mu = sample.mean();
    const SpectralDecomposition s = eigen_symmetric(sample.covariance());
    if (!(s.max_eigenvalue() > 0.0) || s.min_eigenvalue() <= 1e-12 * s.max_eigenvalue())
        throw DegenerateSampleError("sample covariance is singular; cannot standardize");
    const Matrix whitening = s.apply([](double l) { return 1.0 / std::sqrt(l); });

    std::vector<Point> z;
    z.reserve(m);
    for (std::size_t i = 0; i < m; ++i) z.push_back(whitening * subtract(sample.observation(i), mu));

    Matrix scatter(n, n);
    for (const auto& p : z) {
        const double r2 = dot(p, p);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) scatter(a, b) += r2 * p[a] * p[b];
    }
    const Matrix frame = eigen_symmetric(scatter).vectors;
    const Matrix rotation = frame.transposed();
    for (auto& p : z) p = rotation * p;

    for (std::size_t k = 0; k < n; ++k) {
        double skew = 0.0;
        for (const auto& p : z) skew += p[k] * p[k] * p[k];
        if (skew < 0.0)
            for (auto& p : z) p[k] = -p[k];
    }
    return Sample(std::move(z), 1);
}

/// Bandwidth rule, KDE and statistic, in that order.
inline std::pair<double, Vector> sample_statistic(const Sample& sample, const ProbeGrid& grid) {
    Vector h = bandwidth_silverman(sample);
    const DensityModel kde = kde_log_density(sample, h);
    return {violation_statistic(kde, grid), std::move(h)};
}

namespace detail {

/// Counts replicate statistics at or above `observed`. Replicate r draws from
/// its own substream of `seed`, so the count does not depend on scheduling.
template <class Draw>
std::size_t count_exceedances(double observed, std::size_t reps, std::uint64_t seed, const ProbeGrid& grid,
                              Draw&& draw) {
    std::vector<char> exceeds(reps, 0);
    parallel_for(reps, [&](std::size_t r) {
        NormalSource normal(substream_seed(seed, r + 1));
        const Sample replicate = draw(normal);
        exceeds[r] = sample_statistic(replicate, grid).first >= observed ? 1 : 0;
    });
    std::size_t total = 0;
    for (char e : exceeds) total += static_cast<std::size_t>(e);
    return total;
}

inline void check_test_inputs(const Sample& sample, std::size_t reps) {
    if (reps < kMinimumReps)
        throw UsageError("reps must be at least " + std::to_string(kMinimumReps) + ", got " + std::to_string(reps));
    if (sample.size() < Sample::kMinimumCount)
        throw UsageError("normality test needs at least " + std::to_string(Sample::kMinimumCount) +
                         " observations, got " + std::to_string(sample.size()));
    if (sample.dimension() > kMaxTestDimension)
        throw UsageError("normality test supports dimension at most " + std::to_string(kMaxTestDimension) +
                         ", got " + std::to_string(sample.dimension()));
}

}  // namespace detail

/// Parametric bootstrap p-value on the sample as given (no standardization):
/// replicates are drawn from N(mean, unbiased covariance) of the sample.
inline TestReport monte_carlo_pvalue(const Sample& sample, const ProbeGrid& grid, std::size_t reps,
                                     std::uint64_t seed) {
    detail::check_test_inputs(sample, reps);
    grid.validate(sample.dimension());
    const std::size_t m = sample.size();
    const std::size_t n = sample.dimension();
    const Vector mu = sample.mean();
    const SpectralDecomposition s = eigen_symmetric(sample.covariance());
    if (!(s.max_eigenvalue() > 0.0) || s.min_eigenvalue() <= 1e-12 * s.max_eigenvalue())
        throw DegenerateSampleError("sample covariance is singular");
    const Matrix root = s.apply([](double l) { return std::sqrt(l); });

    TestReport report;
    std::tie(report.statistic, report.bandwidth) = sample_statistic(sample, grid);
    report.exceedances = detail::count_exceedances(report.statistic, reps, seed, grid, [&](NormalSource& normal) {
        std::vector<Point> obs(m, Point(n));
        Vector z(n);
        for (auto& x : obs) {
            for (double& v : z) v = normal();
            x = add(mu, root * z);
        }
        return Sample(std::move(obs), 1);
    });
    report.p_value = monte_carlo_p(report.exceedances, reps);
    report.reps = reps;
    report.seed = seed;
    report.sample_size = m;
    report.dimension = n;
    return report;
}

struct TestConfig {
    std::optional<ProbeGrid> grid;  ///< default_test_grid(n) when empty
    std::size_t reps = 199;
    std::uint64_t seed = 42;
    std::vector<double> alphas = {0.01, 0.05, 0.10};
};

/// Full test: standardize, then bandwidth, KDE, statistic and calibration.
///
/// The observed sample is put through `standardize`, and so is every
/// replicate. That removes location, scale and orientation, so replicates
/// are drawn from N(0, I); that is the fitted Gaussian expressed in
/// standardized coordinates. The replicate stream therefore depends only on
/// (seed, m, n, grid), and T is invariant under x -> Sx + v up to rounding.
inline TestReport test_normality(const Sample& sample, const TestConfig& config = {}) {
    detail::check_test_inputs(sample, config.reps);
    for (double a : config.alphas)
        if (!(a > 0.0 && a < 1.0)) throw UsageError("alpha values must lie in (0, 1)");
    const std::size_t m = sample.size();
    const std::size_t n = sample.dimension();
    const ProbeGrid grid = config.grid.value_or(default_test_grid(n));
    grid.validate(n);

    TestReport report;
    std::tie(report.statistic, report.bandwidth) = sample_statistic(standardize(sample), grid);
    report.exceedances =
        detail::count_exceedances(report.statistic, config.reps, config.seed, grid, [&](NormalSource& normal) {
            std::vector<Point> obs(m, Point(n));
            for (auto& x : obs)
                for (double& v : x) v = normal();
            return standardize(Sample(std::move(obs), 1));
        });
    report.p_value = monte_carlo_p(report.exceedances, config.reps);
    report.reps = config.reps;
    report.seed = config.seed;
    report.sample_size = m;
    report.dimension = n;
    for (double a : config.alphas) report.decisions.push_back({a, report.p_value <= a});
    return report;
}

}  // namespace ratio_convexity
