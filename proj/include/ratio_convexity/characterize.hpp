#pragma once

// Recovering the exponent of a log-quadratic density from evaluations, and
// deciding whether it is a Gaussian.
//
// A density whose log is -(1/2 x^T A x + b^T x + c) integrates to one only
// when every eigenvalue of A is strictly positive; then the covariance is
// A^{-1} and the mean is -A^{-1} b.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratio_convexity/density.hpp"
#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/linalg.hpp"
#include "ratio_convexity/spectral.hpp"

namespace ratio_convexity {

using LogDensityFn = std::function<double(std::span<const double>)>;

struct FitReport {
    LogQuadraticForm form;  ///< log f(x) ~ -(1/2 x^T A x + b^T x + c)
    double residual_max = 0.0;
    double residual_rms = 0.0;
    std::size_t sample_count = 0;
    SpectralDecomposition spectral;  ///< of form.A
    std::optional<GaussianParams> gaussian;
    std::optional<std::string> failure_reason;
};

inline constexpr double kDefaultFitTolerance = 1e-6;
inline constexpr const char* kNotLogQuadratic = "not log-quadratic";
inline constexpr const char* kNotIntegrable = "log-quadratic but not integrable (lambda_min <= 0)";

namespace detail {

/// Monomials in design-column order: x_i x_j (i <= j), then x_i, then 1.
inline std::vector<std::string> monomial_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            names.push_back(i == j ? "x" + std::to_string(i + 1) + "^2"
                                   : "x" + std::to_string(i + 1) + "*x" + std::to_string(j + 1));
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    names.emplace_back("1");
    return names;
}

inline void monomial_row(std::span<const double> x, std::span<double> row) {
    const std::size_t n = x.size();
    std::size_t col = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) row[col++] = x[i] * x[j];
    for (std::size_t i = 0; i < n; ++i) row[col++] = x[i];
    row[col] = 1.0;
}

/// Least squares min ||X beta - rhs|| by Householder QR on column-scaled X.
/// Throws UsageError naming the first column found dependent on earlier ones.
inline Vector least_squares(Matrix X, Vector rhs, const std::vector<std::string>& names) {
    const std::size_t rows = X.rows();
    const std::size_t cols = X.cols();
    Vector scale(cols, 1.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += X(i, j) * X(i, j);
        s = std::sqrt(s);
        if (s == 0.0)
            throw UsageError("rank-deficient design: monomial " + names[j] + " vanishes at every sample point");
        scale[j] = s;
        for (std::size_t i = 0; i < rows; ++i) X(i, j) /= s;
    }

    Vector diag(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < rows; ++i) norm += X(i, k) * X(i, k);
        norm = std::sqrt(norm);
        // Columns have unit norm, so this is a relative test.
        if (norm <= 1e-10)
            throw UsageError("rank-deficient design: monomial " + names[k] +
                             " is a linear combination of earlier monomials over the sample points");
        const double alpha = X(k, k) > 0.0 ? -norm : norm;
        Vector v(rows - k);
        for (std::size_t i = k; i < rows; ++i) v[i - k] = X(i, k);
        v[0] -= alpha;
        const double vnorm2 = dot(v, v);
        for (std::size_t j = k; j < cols; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < rows; ++i) s += v[i - k] * X(i, j);
            s = 2.0 * s / vnorm2;
            for (std::size_t i = k; i < rows; ++i) X(i, j) -= s * v[i - k];
        }
        double s = 0.0;
        for (std::size_t i = k; i < rows; ++i) s += v[i - k] * rhs[i];
        s = 2.0 * s / vnorm2;
        for (std::size_t i = k; i < rows; ++i) rhs[i] -= s * v[i - k];
        diag[k] = X(k, k);
    }

    Vector beta(cols);
    for (std::size_t k = cols; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t j = k + 1; j < cols; ++j) s -= X(k, j) * beta[j];
        beta[k] = s / diag[k];
    }
    for (std::size_t j = 0; j < cols; ++j) beta[j] /= scale[j];
    return beta;
}

}  // namespace detail

/// Tensor lattice of `per_axis` points per coordinate on [-half_width, half_width],
/// scaled per axis by `scale` and shifted by `center` (either may be empty).
inline std::vector<Point> fit_lattice(std::size_t n, std::span<const double> center = {},
                                      std::span<const double> scale = {}, std::size_t per_axis = 7,
                                      double half_width = 4.0) {
    if (per_axis < 3) throw UsageError("fit lattice needs at least 3 points per axis");
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= per_axis;
    std::vector<Point> pts;
    pts.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Point p(n);
        std::size_t rest = flat;
        for (std::size_t k = n; k-- > 0;) {
            const double u = -half_width + 2.0 * half_width * static_cast<double>(rest % per_axis) /
                                               static_cast<double>(per_axis - 1);
            rest /= per_axis;
            p[k] = u * (scale.empty() ? 1.0 : scale[k]) + (center.empty() ? 0.0 : center[k]);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

/// Least-squares fit of log f against {x_i x_j (i <= j), x_i, 1}. Leaves the
/// Gaussian classification empty; see classify_gaussian.
inline FitReport fit_log_quadratic(const LogDensityFn& logf, std::size_t n, std::span<const Point> points) {
    if (n == 0) throw UsageError("fit_log_quadratic: dimension must be at least 1");
    const std::size_t monomials = (n + 1) * (n + 2) / 2;
    if (points.size() < monomials)
        throw UsageError("fit_log_quadratic: need at least " + std::to_string(monomials) + " points for dimension " +
                         std::to_string(n) + ", got " + std::to_string(points.size()));

    Matrix X(points.size(), monomials);
    Vector rhs(points.size());
    Vector row(monomials);
    for (std::size_t r = 0; r < points.size(); ++r) {
        if (points[r].size() != n || !all_finite(points[r]))
            throw UsageError("fit_log_quadratic: sample point " + std::to_string(r) + " is malformed");
        detail::monomial_row(points[r], row);
        for (std::size_t j = 0; j < monomials; ++j) X(r, j) = row[j];
        rhs[r] = logf(points[r]);
        if (!std::isfinite(rhs[r]))
            throw ModelContractError("fit_log_quadratic: log-density is not finite at sample point " +
                                     std::to_string(r));
    }
    const Vector beta = detail::least_squares(X, rhs, detail::monomial_names(n));

    // log f = sum beta_ij x_i x_j + sum beta_i x_i + beta_0 = -(1/2 x^T A x + b^T x + c)
    Matrix A(n, n);
    std::size_t col = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j, ++col) {
            if (i == j) {
                A(i, i) = -2.0 * beta[col];
            } else {
                A(i, j) = -beta[col];
                A(j, i) = -beta[col];
            }
        }
    Vector b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = -beta[col++];
    const double c = -beta[col];

    FitReport report;
    report.form = LogQuadraticForm(A, std::move(b), c);
    report.sample_count = points.size();
    double sum_sq = 0.0;
    for (std::size_t r = 0; r < points.size(); ++r) {
        const double resid = std::abs(rhs[r] - report.form.log_density(points[r]));
        report.residual_max = std::max(report.residual_max, resid);
        sum_sq += resid * resid;
    }
    report.residual_rms = std::sqrt(sum_sq / static_cast<double>(points.size()));
    report.spectral = eigen_symmetric(report.form.A);
    return report;
}

inline FitReport fit_log_quadratic(const DensityModel& model, std::span<const Point> points) {
    return fit_log_quadratic([&](std::span<const double> x) { return log_density(model, x); }, model.dimension(),
                             points);
}

/// Default positive-definiteness threshold: 1e-10 * max(1, lambda_max).
inline double default_pd_tolerance(const SpectralDecomposition& s) {
    return 1e-10 * std::max(1.0, s.max_eigenvalue());
}

/// Decides whether a fitted form is a Gaussian. Fails with "not log-quadratic"
/// when residual_max > fit_tol, and as non-integrable when lambda_min <= pd_tol;
/// otherwise sets gaussian = (mu = -A^{-1} b, Sigma = A^{-1}) with A^{-1}
/// taken through the spectral decomposition.
inline FitReport classify_gaussian(FitReport fit, double fit_tol = kDefaultFitTolerance,
                                   std::optional<double> pd_tol = std::nullopt) {
    fit.gaussian.reset();
    fit.failure_reason.reset();
    const double pd = pd_tol.value_or(default_pd_tolerance(fit.spectral));
    if (!(fit.residual_max <= fit_tol)) {
        fit.failure_reason = kNotLogQuadratic;
    } else if (fit.spectral.min_eigenvalue() <= pd) {
        fit.failure_reason = kNotIntegrable;
    } else {
        Matrix sigma = fit.spectral.apply([](double l) { return 1.0 / l; });
        Vector mu = scaled(sigma * fit.form.b, -1.0);
        fit.gaussian.emplace(std::move(mu), std::move(sigma));
    }
    return fit;
}

}  // namespace ratio_convexity
