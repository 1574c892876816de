#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "circlab/core/matrix.hpp"

namespace circlab::linalg::detail {

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable (Parlett-Reinsch). Eigenvalues are unchanged exactly.
template <Scalar T>
void balance(Matrix<T>& a)
{
    constexpr double radix = std::numeric_limits<double>::radix;
    constexpr double sqrdx = radix * radix;
    const std::size_t n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += abs1(a(j, i));
                r += abs1(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double inv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place. Entries below
/// the first subdiagonal are set to zero.
template <Scalar T>
void reduce_to_hessenberg(Matrix<T>& a)
{
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<T> v(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm2 += abs2(a(i, k));
        const double tail = norm2 - abs2(a(k + 1, k));
        if (tail == 0.0) continue;

        const double norm = std::sqrt(norm2);
        const T x0 = a(k + 1, k);
        T phase{1};
        if (std::abs(x0) != 0.0) phase = x0 / std::abs(x0);
        const T alpha = -phase * norm;

        // v = x - alpha e1, normalized; H = I - 2 v v^*.
        v[k + 1] = x0 - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
        double vnorm2 = abs2(v[k + 1]) + tail;
        const double vinv = 1.0 / std::sqrt(vnorm2);
        for (std::size_t i = k + 1; i < n; ++i) v[i] *= vinv;

        // Left: A[k+1:, k:] -= 2 v (v^* A[k+1:, k:]).
        std::fill(w.begin() + static_cast<std::ptrdiff_t>(k), w.end(), T{});
        for (std::size_t i = k + 1; i < n; ++i) {
            const T vi = conj_of(v[i]);
            auto ri = a.row(i);
            for (std::size_t j = k; j < n; ++j) w[j] += vi * ri[j];
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const T s = T{2} * v[i];
            auto ri = a.row(i);
            for (std::size_t j = k; j < n; ++j) ri[j] -= s * w[j];
        }
        // Right: A[:, k+1:] -= 2 (A[:, k+1:] v) v^*.
        for (std::size_t i = 0; i < n; ++i) {
            auto ri = a.row(i);
            T s{};
            for (std::size_t j = k + 1; j < n; ++j) s += ri[j] * v[j];
            s *= T{2};
            for (std::size_t j = k + 1; j < n; ++j) ri[j] -= s * conj_of(v[j]);
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = T{};
    }
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form. Returns the diagonal in `d` and the subdiagonal magnitudes in `e`
/// (e[i] couples i and i+1; e[n-1] = 0). Destroys `a`.
template <Scalar T>
void tridiagonalize_hermitian(Matrix<T>& a, std::vector<double>& d, std::vector<double>& e)
{
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    std::vector<T> v(n), p(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm2 += abs2(a(i, k));
        const double tail = norm2 - abs2(a(k + 1, k));
        if (tail == 0.0) continue;

        const double norm = std::sqrt(norm2);
        const T x0 = a(k + 1, k);
        T phase{1};
        if (std::abs(x0) != 0.0) phase = x0 / std::abs(x0);
        const T alpha = -phase * norm;
        v[k + 1] = x0 - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
        const double vinv = 1.0 / std::sqrt(abs2(v[k + 1]) + tail);
        for (std::size_t i = k + 1; i < n; ++i) v[i] *= vinv;

        // Trailing block B = A[k+1:, k+1:]; p = B v; K = v^* p (real);
        // w = p - K v; B -= 2 (v w^* + w v^*).
        for (std::size_t i = k + 1; i < n; ++i) {
            auto ri = a.row(i);
            T s{};
            for (std::size_t j = k + 1; j < n; ++j) s += ri[j] * v[j];
            p[i] = s;
        }
        T kk{};
        for (std::size_t i = k + 1; i < n; ++i) kk += conj_of(v[i]) * p[i];
        for (std::size_t i = k + 1; i < n; ++i) p[i] -= kk * v[i];
        for (std::size_t i = k + 1; i < n; ++i) {
            auto ri = a.row(i);
            const T vi = T{2} * v[i];
            const T pi = T{2} * p[i];
            for (std::size_t j = k + 1; j < n; ++j) ri[j] -= vi * conj_of(p[j]) + pi * conj_of(v[j]);
        }
        a(k + 1, k) = alpha;
        a(k, k + 1) = conj_of(alpha);
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = T{};
    }
    for (std::size_t i = 0; i < n; ++i) {
        if constexpr (is_complex_v<T>) d[i] = a(i, i).real();
        else d[i] = a(i, i);
        if (i + 1 < n) e[i] = std::abs(a(i + 1, i));
    }
}

} // namespace circlab::linalg::detail
