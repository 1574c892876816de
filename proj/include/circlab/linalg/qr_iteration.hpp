#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "circlab/core/error.hpp"
#include "circlab/core/matrix.hpp"

namespace circlab::linalg::detail {

/// Deflation and iteration controls shared by the QR drivers.
struct QrControls {
    double deflation_eps = 1e-12;  // |h(k,k-1)| <= eps (|h(k-1,k-1)| + |h(k,k)|)
    std::size_t budget_per_n = 50; // total sweeps <= budget_per_n * n
    std::size_t exceptional_every = 10;
};

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

inline NumericalFailure no_convergence(const char* solver, std::size_t n, std::size_t remaining)
{
    return NumericalFailure(std::string(solver) + ": no convergence within iteration budget (n = " +
                            std::to_string(n) + ", " + std::to_string(remaining) + " eigenvalues unresolved)");
}

/// Eigenvalues of a real upper Hessenberg matrix by Francis double-shift QR.
/// `h` is overwritten.
inline std::vector<complex> francis_qr(RealMatrix& h, const QrControls& ctl = {})
{
    const long n = static_cast<long>(h.rows());
    std::vector<complex> w(static_cast<std::size_t>(n));
    if (n == 0) return w;
    const double eps = std::numeric_limits<double>::epsilon();

    double anorm = 0.0;
    for (long i = 0; i < n; ++i)
        for (long j = std::max(i - 1, 0L); j < n; ++j) anorm += std::abs(h(i, j));

    const std::size_t budget = ctl.budget_per_n * static_cast<std::size_t>(n);
    std::size_t total = 0;
    long nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        std::size_t its = 0;
        long l;
        do {
            for (l = nn; l > 0; --l) {
                double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(h(l, l - 1)) <= ctl.deflation_eps * s) {
                    h(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = h(nn, nn);
            if (l == nn) {
                w[static_cast<std::size_t>(nn--)] = x + t;
            } else {
                double y = h(nn - 1, nn - 1);
                double ww = h(nn, nn - 1) * h(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + ww;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    const auto i1 = static_cast<std::size_t>(nn - 1), i2 = static_cast<std::size_t>(nn);
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        w[i1] = w[i2] = x + z;
                        if (z != 0.0) w[i2] = x - ww / z;
                    } else {
                        w[i2] = {x + p, -z};
                        w[i1] = std::conj(w[i2]);
                    }
                    nn -= 2;
                } else {
                    if (total++ >= budget) throw no_convergence("francis_qr", static_cast<std::size_t>(n), static_cast<std::size_t>(nn + 1));
                    if (its > 0 && its % ctl.exceptional_every == 0) {
                        t += x;
                        for (long i = 0; i <= nn; ++i) h(i, i) -= x;
                        const double s = std::abs(h(nn, nn - 1)) + std::abs(h(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        ww = -0.4375 * s * s;
                    }
                    ++its;
                    long m;
                    double p = 0, q = 0, r = 0, z;
                    for (m = nn - 2; m >= l; --m) {
                        z = h(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - ww) / h(m + 1, m) + h(m, m + 1);
                        q = h(m + 1, m + 1) - z - r - s;
                        r = h(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (long i = m; i < nn - 1; ++i) {
                        h(i + 2, i) = 0.0;
                        if (i != m) h(i + 2, i - 1) = 0.0;
                    }
                    for (long k = m; k < nn; ++k) {
                        if (k != m) {
                            p = h(k, k - 1);
                            q = h(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = h(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) h(k, k - 1) = -h(k, k - 1);
                        } else {
                            h(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        // Rows k..k+2, columns k..nn.
                        double* rk = &h(k, 0);
                        double* rk1 = &h(k + 1, 0);
                        if (k + 1 != nn) {
                            double* rk2 = &h(k + 2, 0);
                            for (long j = k; j <= nn; ++j) {
                                p = rk[j] + q * rk1[j] + r * rk2[j];
                                rk2[j] -= p * z;
                                rk1[j] -= p * y;
                                rk[j] -= p * x;
                            }
                        } else {
                            for (long j = k; j <= nn; ++j) {
                                p = rk[j] + q * rk1[j];
                                rk1[j] -= p * y;
                                rk[j] -= p * x;
                            }
                        }
                        // Columns k..k+2, rows l..min(nn, k+3).
                        const long mmin = nn < k + 3 ? nn : k + 3;
                        for (long i = l; i <= mmin; ++i) {
                            double* ri = &h(i, 0);
                            p = x * ri[k] + y * ri[k + 1];
                            if (k + 1 != nn) {
                                p += z * ri[k + 2];
                                ri[k + 2] -= p * r;
                            }
                            ri[k + 1] -= p * q;
                            ri[k] -= p;
                        }
                    }
                }
            }
        } while (l + 1 < nn);
    }
    return w;
}

/// Eigenvalues of a complex upper Hessenberg matrix by single-shift QR with
/// Wilkinson shifts and Givens rotations. `h` is overwritten.
inline std::vector<complex> complex_qr(DenseMatrix& h, const QrControls& ctl = {})
{
    const std::size_t n = h.rows();
    std::vector<complex> w(n);
    if (n == 0) return w;

    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i > 0 ? i - 1 : 0; j < n; ++j) anorm += abs1(h(i, j));

    const std::size_t budget = ctl.budget_per_n * n;
    std::size_t total = 0;
    std::vector<double> cs(n);
    std::vector<complex> sn(n);

    std::size_t hi = n - 1;
    std::size_t its = 0;
    while (true) {
        // Find the start l of the unreduced block ending at hi.
        std::size_t l = hi;
        while (l > 0) {
            double s = abs1(h(l - 1, l - 1)) + abs1(h(l, l));
            if (s == 0.0) s = anorm;
            if (abs1(h(l, l - 1)) <= ctl.deflation_eps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            w[hi] = h(hi, hi);
            its = 0;
            if (hi == 0) break;
            --hi;
            continue;
        }
        if (total++ >= budget) throw no_convergence("complex_qr", n, hi + 1);

        complex mu;
        if (its > 0 && its % ctl.exceptional_every == 0) {
            mu = std::abs(h(hi, hi - 1).real()) + (hi >= 2 ? std::abs(h(hi - 1, hi - 2).real()) : 0.0) + h(hi, hi);
        } else {
            // Eigenvalue of the trailing 2x2 block closest to h(hi, hi).
            const complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const complex half = 0.5 * (a - d);
            const complex disc = std::sqrt(half * half + b * c);
            const complex r1 = d + half + disc, r2 = d + half - disc;
            mu = std::abs(r1 - d) < std::abs(r2 - d) ? r1 : r2;
        }
        ++its;

        for (std::size_t i = l; i <= hi; ++i) h(i, i) -= mu;
        // QR of the active block by Givens rotations on rows.
        for (std::size_t k = l; k < hi; ++k) {
            const complex a = h(k, k), b = h(k + 1, k);
            const double r = std::hypot(std::abs(a), std::abs(b));
            double c;
            complex s;
            if (r == 0.0) {
                c = 1.0;
                s = 0.0;
            } else if (std::abs(a) == 0.0) {
                c = 0.0;
                s = std::conj(b) / std::abs(b);
            } else {
                c = std::abs(a) / r;
                s = (a / std::abs(a)) * std::conj(b) / r;
            }
            cs[k] = c;
            sn[k] = s;
            complex* rk = &h(k, 0);
            complex* rk1 = &h(k + 1, 0);
            for (std::size_t j = k; j <= hi; ++j) {
                const complex x = rk[j], y = rk1[j];
                rk[j] = c * x + s * y;
                rk1[j] = -std::conj(s) * x + c * y;
            }
        }
        // R Q: apply the adjoint rotations on columns.
        for (std::size_t k = l; k < hi; ++k) {
            const double c = cs[k];
            const complex s = sn[k];
            const std::size_t last = std::min(k + 1, hi);
            for (std::size_t i = l; i <= last; ++i) {
                complex* ri = &h(i, 0);
                const complex x = ri[k], y = ri[k + 1];
                ri[k] = c * x + std::conj(s) * y;
                ri[k + 1] = -s * x + c * y;
            }
        }
        for (std::size_t i = l; i <= hi; ++i) h(i, i) += mu;
    }
    return w;
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. d: diagonal, e: subdiagonal with e[i] coupling i, i+1.
inline std::vector<double> tridiagonal_ql(std::vector<double> d, std::vector<double> e, const QrControls& ctl = {})
{
    const std::size_t n = d.size();
    if (n == 0) return d;
    e.resize(n);
    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    const std::size_t budget = ctl.budget_per_n * n;
    std::size_t total = 0;
    for (std::size_t l = 0; l < n; ++l) {
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (total++ >= budget) throw no_convergence("tridiagonal_ql", n, n - l);
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    e[i + 1] = (r = std::hypot(f, g));
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    return d;
}

} // namespace circlab::linalg::detail
