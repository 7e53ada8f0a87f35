#pragma once

// The translation ratio h(x, y) = f(x + y) / f(x), evaluated as log h.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "ratio_convexity/density.hpp"

namespace ratio_convexity {

/// x -> slope^T x + intercept
struct AffineForm {
    Vector slope;
    double intercept = 0.0;

    double operator()(std::span<const double> x) const { return dot(slope, x) + intercept; }
};

namespace detail {

/// log f(x + y) - log f(x) without argument checks. The Laplace and quartic
/// normalizing constants cancel analytically and are never added.
inline double log_ratio_unchecked(const DensityModel& model, std::span<const double> x, std::span<const double> y) {
    switch (model.kind()) {
        case ModelKind::Laplace: return std::abs(x[0]) - std::abs(x[0] + y[0]);
        case ModelKind::Quartic: {
            const double s = x[0] + y[0];
            const double x2 = x[0] * x[0];
            const double s2 = s * s;
            return x2 * x2 - s2 * s2;
        }
        default: break;
    }
    constexpr std::size_t kInline = 16;
    if (x.size() <= kInline) {
        std::array<double, kInline> buffer;
        for (std::size_t i = 0; i < x.size(); ++i) buffer[i] = x[i] + y[i];
        return log_density_unchecked(model, std::span<const double>(buffer.data(), x.size())) -
               log_density_unchecked(model, x);
    }
    Vector shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + y[i];
    return log_density_unchecked(model, shifted) - log_density_unchecked(model, x);
}

}  // namespace detail

/// log h(x, y) = log f(x + y) - log f(x).
inline double log_ratio(const DensityModel& model, std::span<const double> x, std::span<const double> y) {
    detail::check_point(model, x);
    detail::check_point(model, y);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i] + y[i])) throw UsageError("log_ratio: x + y overflows");
    return detail::log_ratio_unchecked(model, x, y);
}

inline double log_ratio(const DensityModel& model, std::initializer_list<double> x, std::initializer_list<double> y) {
    return log_ratio(model, std::span<const double>(x.begin(), x.size()), std::span<const double>(y.begin(), y.size()));
}

/// For a Gaussian, log h(., y) is affine:
/// log h(x, y) = -(Sigma^{-1} y)^T x + y^T Sigma^{-1} mu - 1/2 y^T Sigma^{-1} y.
inline AffineForm gaussian_log_ratio_affine(const GaussianParams& params, std::span<const double> y) {
    if (y.size() != params.dimension()) throw UsageError("gaussian_log_ratio_affine: dimension mismatch");
    if (!all_finite(y)) throw UsageError("gaussian_log_ratio_affine: non-finite shift");
    const Vector py = params.precision() * y;
    AffineForm form{scaled(py, -1.0), dot(py, params.mean()) - 0.5 * dot(py, y)};
    return form;
}

/// Four-branch closed form of log h for f(x) = e^{-|x|}/2, with
/// y+ = max(y, 0) and y- = -min(y, 0):
///   y         on (-inf, -y+]
///   -y - 2x   on (-y+, 0]
///   y + 2x    on (0, y-]
///   -y        on [y-, inf)
/// Adjacent branches agree at shared endpoints, and the whole thing equals
/// |x| - |x + y|.
inline double laplace_log_ratio(double x, double y) {
    const double y_plus = std::max(y, 0.0);
    const double y_minus = -std::min(y, 0.0);
    if (x <= -y_plus) return y;
    if (x <= 0.0) return -y - 2.0 * x;
    if (x <= y_minus) return y + 2.0 * x;
    return -y;
}

/// Which of the four Laplace branches laplace_log_ratio selects (0..3).
inline int laplace_branch(double x, double y) {
    const double y_plus = std::max(y, 0.0);
    const double y_minus = -std::min(y, 0.0);
    if (x <= -y_plus) return 0;
    if (x <= 0.0) return 1;
    if (x <= y_minus) return 2;
    return 3;
}

struct QuarticCurvature {
    double hxx = 0.0;       ///< d^2/dx^2 h(x, y)
    double bracket = 0.0;   ///< -12(2x+y)y + y^2 (3(2x+y)^2 + y^2)^2, carries the sign of hxx
    double log_h = 0.0;     ///< x^4 - (x+y)^4
    bool underflow = false; ///< h rounded to 0 while the bracket is non-zero
    bool overflow = false;  ///< h or the product is not representable
};

/// Second x-derivative of h(x, y) = e^{x^4 - (x+y)^4} for f = c e^{-x^4}:
/// h_xx = h * (-12(2x+y)y + y^2 (3(2x+y)^2 + y^2)^2).
inline QuarticCurvature quartic_hxx(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw UsageError("quartic_hxx: non-finite argument");
    QuarticCurvature out;
    const double u = 2.0 * x + y;
    const double inner = 3.0 * u * u + y * y;
    out.bracket = -12.0 * u * y + y * y * inner * inner;
    const double s = x + y;
    out.log_h = x * x * x * x - s * s * s * s;
    const double h = std::exp(out.log_h);
    out.hxx = h * out.bracket;
    out.underflow = h == 0.0 && out.bracket != 0.0;
    out.overflow = !std::isfinite(out.hxx);
    return out;
}

}  // namespace ratio_convexity
