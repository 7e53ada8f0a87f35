#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ratio_convexity/density.hpp"
#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/linalg.hpp"

namespace ratio_convexity {

/// Observations of common dimension n, stored row-major. Refuses fewer than
/// `min_count` rows (20 unless a caller lowers it).
class Sample {
  public:
    static constexpr std::size_t kMinimumCount = 20;

    Sample(std::vector<Point> observations, std::size_t min_count = kMinimumCount) {
        if (observations.size() < min_count)
            throw UsageError("sample has " + std::to_string(observations.size()) + " observations; at least " +
                             std::to_string(min_count) + " are required");
        if (observations.empty()) throw UsageError("sample is empty");
        n_ = observations.front().size();
        if (n_ == 0) throw UsageError("sample observations have no coordinates");
        values_.reserve(observations.size() * n_);
        for (std::size_t i = 0; i < observations.size(); ++i) {
            if (observations[i].size() != n_)
                throw UsageError("observation " + std::to_string(i + 1) + " has " +
                                 std::to_string(observations[i].size()) + " coordinates, expected " +
                                 std::to_string(n_));
            if (!all_finite(observations[i]))
                throw UsageError("observation " + std::to_string(i + 1) + " has a non-finite coordinate");
            values_.insert(values_.end(), observations[i].begin(), observations[i].end());
        }
    }

    /// One-dimensional sample from plain values.
    static Sample univariate(std::span<const double> values, std::size_t min_count = kMinimumCount) {
        std::vector<Point> obs;
        obs.reserve(values.size());
        for (double v : values) obs.push_back(Point{v});
        return Sample(std::move(obs), min_count);
    }

    std::size_t dimension() const noexcept { return n_; }
    std::size_t size() const noexcept { return values_.size() / n_; }
    std::span<const double> observation(std::size_t i) const { return {values_.data() + i * n_, n_}; }
    const std::vector<double>& row_major() const noexcept { return values_; }

    Vector column(std::size_t k) const {
        Vector c(size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = values_[i * n_ + k];
        return c;
    }

    Vector mean() const {
        Vector mu(n_, 0.0);
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t k = 0; k < n_; ++k) mu[k] += values_[i * n_ + k];
        for (double& v : mu) v /= static_cast<double>(size());
        return mu;
    }

    /// Unbiased (m - 1 denominator) covariance.
    Matrix covariance() const {
        const Vector mu = mean();
        Matrix cov(n_, n_);
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t a = 0; a < n_; ++a) {
                const double da = values_[i * n_ + a] - mu[a];
                for (std::size_t b = a; b < n_; ++b) cov(a, b) += da * (values_[i * n_ + b] - mu[b]);
            }
        const double denom = static_cast<double>(size() - 1);
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = a; b < n_; ++b) {
                cov(a, b) /= denom;
                cov(b, a) = cov(a, b);
            }
        return cov;
    }

  private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

/// Sample quantile with linear interpolation between order statistics
/// (position (m - 1) p in the sorted data).
inline double quantile_linear(std::vector<double> values, double p) {
    if (values.empty()) throw UsageError("quantile of an empty set");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Silverman's rule of thumb: 0.9 * min(sd, IQR / 1.34) * m^(-1/5). A zero
/// IQR with positive sd falls back to sd alone.
inline double bandwidth_silverman(std::span<const double> values) {
    const std::size_t m = values.size();
    if (m < 2) throw DegenerateSampleError("bandwidth needs at least two observations");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    std::vector<double> copy(values.begin(), values.end());
    const double iqr = quantile_linear(copy, 0.75) - quantile_linear(copy, 0.25);
    if (!(sd > 0.0)) throw DegenerateSampleError("bandwidth undefined: all observations are equal");
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(m), -0.2);
}

/// Per-coordinate Silverman bandwidths for the product kernel.
inline Vector bandwidth_silverman(const Sample& sample) {
    Vector h(sample.dimension());
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = bandwidth_silverman(sample.column(k));
    return h;
}

/// Product Gaussian-kernel density estimate as a Custom model:
/// log((1/m) sum_r prod_k K_{h_k}(x_k - X_rk)), reduced with a running
/// log-sum-exp so raw kernel values are never summed.
inline DensityModel kde_log_density(const Sample& sample, const Vector& bandwidth) {
    const std::size_t n = sample.dimension();
    if (bandwidth.size() != n)
        throw UsageError("kde: need one bandwidth per coordinate (" + std::to_string(n) + ")");
    for (double h : bandwidth)
        if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("kde: bandwidth must be positive and finite");

    auto data = std::make_shared<const std::vector<double>>(sample.row_major());
    Vector inverse(n);
    double log_norm = -std::log(static_cast<double>(sample.size())) - 0.5 * static_cast<double>(n) * kLogTwoPi;
    for (std::size_t k = 0; k < n; ++k) {
        inverse[k] = 1.0 / bandwidth[k];
        log_norm -= std::log(bandwidth[k]);
    }
    auto eval = [data, inverse, log_norm, n](std::span<const double> x) {
        const std::vector<double>& d = *data;
        const std::size_t m = d.size() / n;
        double top = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            double e = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double u = (x[k] - d[r * n + k]) * inverse[k];
                e -= 0.5 * u * u;
            }
            if (e > top) {
                sum = sum * std::exp(top - e) + 1.0;
                top = e;
            } else {
                sum += std::exp(e - top);
            }
        }
        return top + std::log(sum) + log_norm;
    };
    return DensityModel::custom(n, std::move(eval), "kde");
}

inline DensityModel kde_log_density(const Sample& sample, double bandwidth) {
    return kde_log_density(sample, Vector(sample.dimension(), bandwidth));
}

}  // namespace ratio_convexity
