#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "ratio_convexity/errors.hpp"

namespace ratio_convexity {

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct RuleResult {
    double kronrod;
    double error;
};

template <class F>
RuleResult gauss_kronrod_15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
double adaptive_gk(F& f, double a, double b, RuleResult whole, double tol, int depth) {
    if (whole.error <= tol || depth <= 0) return whole.kronrod;
    const double mid = 0.5 * (a + b);
    const RuleResult left = gauss_kronrod_15(f, a, mid);
    const RuleResult right = gauss_kronrod_15(f, mid, b);
    return adaptive_gk(f, a, mid, left, 0.5 * tol, depth - 1) +
           adaptive_gk(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b]. The target
/// error is max(abs_tol, rel_tol * |estimate|) where the estimate comes from a
/// single panel over the whole interval.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0) {
    if (!(std::isfinite(a) && std::isfinite(b))) throw UsageError("integrate: bounds must be finite");
    if (a == b) return 0.0;
    const detail::RuleResult whole = detail::gauss_kronrod_15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole.kronrod));
    return detail::adaptive_gk(f, a, b, whole, tol, 40);
}

}  // namespace ratio_convexity
