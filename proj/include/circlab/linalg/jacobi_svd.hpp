#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "circlab/core/error.hpp"
#include "circlab/core/matrix.hpp"

namespace circlab::linalg::detail {

/// Singular values by one-sided (Hestenes) Jacobi rotations on the columns of
/// the taller orientation of `a`. Values come back sorted descending.
///
/// The rotations are exactly orthogonal, so the column norms track the
/// singular values to high relative accuracy, including the small ones.
template <Scalar T>
std::vector<double> jacobi_singular_values(const Matrix<T>& a, std::size_t max_sweeps = 80)
{
    // Work on columns of length `len`: columns of A if rows >= cols, else of A^*.
    const bool tall = a.rows() >= a.cols();
    const std::size_t k = tall ? a.cols() : a.rows();
    const std::size_t len = tall ? a.rows() : a.cols();
    std::vector<std::vector<T>> col(k, std::vector<T>(len));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (tall) col[j][i] = a(i, j);
            else col[i][j] = conj_of(a(i, j));
        }

    std::vector<double> norm2(k);
    auto refresh = [&](std::size_t p) {
        double s = 0.0;
        for (const T& x : col[p]) s += abs2(x);
        norm2[p] = s;
    };
    for (std::size_t p = 0; p < k; ++p) refresh(p);

    const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(len);
    // Columns at rounding level relative to |A|_F are left alone; rotating
    // them against each other never settles for rank-deficient input.
    double frob2 = 0.0;
    for (double v : norm2) frob2 += v;
    const double negligible = tol * tol * frob2;
    bool converged = k < 2;
    for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double alpha = norm2[p], beta = norm2[q];
                if (alpha <= negligible || beta <= negligible) continue;
                T gamma{};
                const T* cp = col[p].data();
                const T* cq = col[q].data();
                for (std::size_t i = 0; i < len; ++i) gamma += conj_of(cp[i]) * cq[i];
                const double g = std::abs(gamma);
                if (g <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
                converged = false;

                const T u = gamma / g; // unit phase
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const T uc = conj_of(u);
                T* xp = col[p].data();
                T* xq = col[q].data();
                for (std::size_t i = 0; i < len; ++i) {
                    const T x = xp[i];
                    const T y = uc * xq[i];
                    xp[i] = c * x - s * y;
                    xq[i] = s * x + c * y;
                }
                refresh(p);
                refresh(q);
            }
        }
    }
    if (!converged) throw NumericalFailure("jacobi_singular_values: no convergence within sweep budget");

    std::vector<double> sigma(k);
    for (std::size_t p = 0; p < k; ++p) sigma[p] = std::sqrt(norm2[p]);
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return sigma;
}

} // namespace circlab::linalg::detail
