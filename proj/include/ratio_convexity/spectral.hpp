#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ratio_convexity/errors.hpp"
#include "ratio_convexity/linalg.hpp"

namespace ratio_convexity {

/// A = O diag(eigenvalues) O^T with O orthogonal and eigenvalues descending.
/// Column k of `vectors` is the eigenvector for eigenvalues[k].
struct SpectralDecomposition {
    Matrix vectors;
    Vector eigenvalues;

    std::size_t dimension() const noexcept { return eigenvalues.size(); }
    double min_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
    double max_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }

    /// O diag(fn(lambda)) O^T, e.g. fn = 1/x for the inverse, 1/sqrt(x) for whitening.
    template <class Fn>
    Matrix apply(Fn&& fn) const {
        const std::size_t n = dimension();
        Matrix out(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            const double f = fn(eigenvalues[k]);
            for (std::size_t i = 0; i < n; ++i) {
                const double oik = vectors(i, k) * f;
                for (std::size_t j = 0; j < n; ++j) out(i, j) += oik * vectors(j, k);
            }
        }
        return out;
    }

    Matrix reconstruct() const {
        return apply([](double l) { return l; });
    }
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. The input is symmetrized
/// on entry. Sweeps until the largest off-diagonal entry is at most
/// 1e-13 * max|A_ij|.
inline SpectralDecomposition eigen_symmetric(const Matrix& input) {
    if (!input.square()) throw UsageError("eigen_symmetric: matrix must be square");
    if (!input.all_finite()) throw UsageError("eigen_symmetric: matrix has non-finite entries");

    const std::size_t n = input.rows();
    Matrix a = input.symmetrized();
    Matrix v = Matrix::identity(n);
    const double threshold = 1e-13 * a.max_abs();

    auto max_off_diagonal = [&] {
        double m = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) m = std::max(m, std::abs(a(p, q)));
        return m;
    };

    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps && max_off_diagonal() > threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == kMaxSweeps && max_off_diagonal() > threshold)
        throw NumericError("eigen_symmetric: Jacobi sweeps did not converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SpectralDecomposition out{Matrix(n, n), Vector(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

}  // namespace ratio_convexity
