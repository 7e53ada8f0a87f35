#pragma once

// Density models and log-space evaluation. Nothing here materializes f(x);
// callers exponentiate explicitly when they need raw density values.

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/linalg.hpp"
#include "ratio_convexity/quadrature.hpp"
#include "ratio_convexity/spectral.hpp"

namespace ratio_convexity {

using Point = Vector;

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // log(2*pi)

/// Mean and positive definite covariance. The precision matrix and log det
/// are cached from the eigendecomposition that validates positive definiteness.
class GaussianParams {
  public:
    GaussianParams(Vector mean, Matrix covariance) : mean_(std::move(mean)) {
        const std::size_t n = mean_.size();
        if (n == 0) throw UsageError("GaussianParams: mean must have at least one coordinate");
        if (covariance.rows() != n || covariance.cols() != n)
            throw UsageError("GaussianParams: covariance is " + std::to_string(covariance.rows()) + "x" +
                             std::to_string(covariance.cols()) + " but mean has " + std::to_string(n) +
                             " coordinates");
        if (!all_finite(mean_) || !covariance.all_finite())
            throw UsageError("GaussianParams: non-finite mean or covariance entry");
        covariance_ = covariance.symmetrized();
        spectral_ = eigen_symmetric(covariance_);
        if (!(spectral_.min_eigenvalue() > 0.0))
            throw UsageError("GaussianParams: covariance is not positive definite (min eigenvalue " +
                             std::to_string(spectral_.min_eigenvalue()) + ")");
        precision_ = spectral_.apply([](double l) { return 1.0 / l; });
        log_det_ = 0.0;
        for (double l : spectral_.eigenvalues) log_det_ += std::log(l);
        log_normalizer_ = -0.5 * (static_cast<double>(n) * kLogTwoPi + log_det_);
    }

    static GaussianParams standard(std::size_t n) { return {Vector(n, 0.0), Matrix::identity(n)}; }

    /// One-dimensional N(mean, variance).
    static GaussianParams univariate(double mean, double variance) {
        return {Vector{mean}, Matrix{{variance}}};
    }

    std::size_t dimension() const noexcept { return mean_.size(); }
    const Vector& mean() const noexcept { return mean_; }
    const Matrix& covariance() const noexcept { return covariance_; }
    /// Sigma^{-1}
    const Matrix& precision() const noexcept { return precision_; }
    double log_det_covariance() const noexcept { return log_det_; }
    const SpectralDecomposition& spectral() const noexcept { return spectral_; }

    /// -1/2 (x-mu)^T Sigma^{-1} (x-mu) - 1/2 log((2 pi)^n det Sigma)
    double log_density(std::span<const double> x) const {
        const std::size_t n = mean_.size();
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double di = x[i] - mean_[i];
            double r = 0.0;
            for (std::size_t j = 0; j < n; ++j) r += precision_(i, j) * (x[j] - mean_[j]);
            q += di * r;
        }
        return -0.5 * q + log_normalizer_;
    }

  private:
    Vector mean_;
    Matrix covariance_;
    Matrix precision_;
    SpectralDecomposition spectral_;
    double log_det_ = 0.0;
    double log_normalizer_ = 0.0;
};

/// Exponent triple (A, b, c) with A stored symmetric.
///
/// The density convention is log f(x) = -(1/2 x^T A x + b^T x + c). The
/// reciprocal g = 1/f is exp(1/2 x^T A x + b^T x + c), so both readings share
/// one triple and differ only by sign.
struct LogQuadraticForm {
    Matrix A;
    Vector b;
    double c = 0.0;

    LogQuadraticForm() = default;
    LogQuadraticForm(const Matrix& a, Vector b_, double c_) : A(a.symmetrized()), b(std::move(b_)), c(c_) {
        if (!A.square() || A.rows() != b.size())
            throw UsageError("LogQuadraticForm: A and b dimensions disagree");
        if (!A.all_finite() || !all_finite(b) || !std::isfinite(c))
            throw UsageError("LogQuadraticForm: non-finite coefficient");
    }

    std::size_t dimension() const noexcept { return b.size(); }

    /// 1/2 x^T A x + b^T x + c, i.e. log g(x).
    double log_reciprocal(std::span<const double> x) const { return 0.5 * quadratic_form(A, x) + dot(b, x) + c; }

    /// log f(x) = -log g(x).
    double log_density(std::span<const double> x) const { return -log_reciprocal(x); }
};

struct Laplace1D {};  ///< f(x) = e^{-|x|} / 2
struct Quartic1D {};  ///< f(x) = c e^{-x^4}

/// User-supplied log-density. The dimension is explicit.
struct CustomDensity {
    std::size_t dimension = 1;
    std::function<double(std::span<const double>)> log_density;
    std::string name = "custom";
};

/// 1 / integral of e^{-x^4} over the real line (= 2 / Gamma(1/4)), computed
/// once by adaptive quadrature and cached.
inline double quartic_norm_constant() {
    static const double c = [] {
        // e^{-x^4} < 1e-500 beyond |x| = 6, far below double resolution.
        const double mass = integrate([](double x) { return std::exp(-x * x * x * x); }, -6.0, 6.0, 1e-15);
        return 1.0 / mass;
    }();
    return c;
}

enum class ModelKind { Gaussian, Laplace, Quartic, Custom };

class DensityModel {
  public:
    using Variant = std::variant<GaussianParams, Laplace1D, Quartic1D, CustomDensity>;

    static DensityModel gaussian(GaussianParams params) { return DensityModel(std::move(params)); }
    static DensityModel laplace() { return DensityModel(Laplace1D{}); }
    static DensityModel quartic() { return DensityModel(Quartic1D{}); }
    static DensityModel custom(std::size_t dimension, std::function<double(std::span<const double>)> log_density,
                               std::string name = "custom") {
        if (dimension == 0) throw UsageError("custom model: dimension must be at least 1");
        if (!log_density) throw UsageError("custom model: empty log-density evaluator");
        return DensityModel(CustomDensity{dimension, std::move(log_density), std::move(name)});
    }

    std::size_t dimension() const {
        return std::visit(
            [](const auto& m) -> std::size_t {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, GaussianParams>) return m.dimension();
                else if constexpr (std::is_same_v<T, CustomDensity>) return m.dimension;
                else return 1;
            },
            model_);
    }

    ModelKind kind() const noexcept { return static_cast<ModelKind>(model_.index()); }
    bool is_custom() const noexcept { return kind() == ModelKind::Custom; }

    std::string name() const {
        switch (kind()) {
            case ModelKind::Gaussian: return "gaussian";
            case ModelKind::Laplace: return "laplace";
            case ModelKind::Quartic: return "quartic";
            case ModelKind::Custom: return std::get<CustomDensity>(model_).name;
        }
        return "unknown";
    }

    const Variant& variant() const noexcept { return model_; }
    const GaussianParams* gaussian_params() const noexcept { return std::get_if<GaussianParams>(&model_); }

  private:
    explicit DensityModel(Variant m) : model_(std::move(m)) {}
    Variant model_;
};

namespace detail {

inline void check_point(const DensityModel& model, std::span<const double> x) {
    if (x.size() != model.dimension())
        throw UsageError("point has " + std::to_string(x.size()) + " coordinates but model '" + model.name() +
                         "' has dimension " + std::to_string(model.dimension()));
    if (!all_finite(x)) throw UsageError("point has a non-finite coordinate");
}

/// Evaluation without argument checks, for inner loops whose points were
/// already validated.
inline double log_density_unchecked(const DensityModel& model, std::span<const double> x) {
    switch (model.kind()) {
        case ModelKind::Gaussian: return std::get<GaussianParams>(model.variant()).log_density(x);
        case ModelKind::Laplace: return -std::abs(x[0]) - std::numbers::ln2;
        case ModelKind::Quartic: {
            const double x2 = x[0] * x[0];
            return std::log(quartic_norm_constant()) - x2 * x2;
        }
        case ModelKind::Custom: {
            const double v = std::get<CustomDensity>(model.variant()).log_density(x);
            if (!std::isfinite(v))
                throw ModelContractError("custom model '" + model.name() +
                                         "' returned a non-finite log-density");
            return v;
        }
    }
    return 0.0;
}

}  // namespace detail

/// log f(x). Throws UsageError on a dimension mismatch or non-finite point,
/// ModelContractError when a Custom evaluator returns NaN or an infinity.
inline double log_density(const DensityModel& model, std::span<const double> x) {
    detail::check_point(model, x);
    return detail::log_density_unchecked(model, x);
}

inline double log_density(const DensityModel& model, std::initializer_list<double> x) {
    return log_density(model, std::span<const double>(x.begin(), x.size()));
}

}  // namespace ratio_convexity
