#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "circlab/core/error.hpp"
#include "circlab/core/matrix.hpp"
#include "circlab/linalg/hessenberg.hpp"
#include "circlab/linalg/jacobi_svd.hpp"
#include "circlab/linalg/qr_iteration.hpp"

namespace circlab::linalg {

using detail::QrControls;

/// Largest dimension the dense eigensolver accepts.
inline constexpr std::size_t eigen_size_cap = 8192;

struct SpectrumResult {
    std::vector<complex> eigenvalues;
    /// Residual proxy: max of |sum(l) - tr A| / |A|_F and |sum(l^2) - tr A^2| / |A|_F^2.
    double max_residual = 0.0;
};

struct SingularValues {
    std::vector<double> values; // descending
};

template <Scalar T>
double frobenius_norm(const Matrix<T>& a)
{
    // Scaled sum of squares; overflow-safe for huge entries.
    double scale = 0.0, ssq = 1.0;
    for (const T& x : a.entries()) {
        for (double c : {std::real(x), std::imag(x)}) {
            if (c == 0.0) continue;
            const double ac = std::abs(c);
            if (scale < ac) {
                ssq = 1.0 + ssq * (scale / ac) * (scale / ac);
                scale = ac;
            } else {
                ssq += (ac / scale) * (ac / scale);
            }
        }
    }
    return scale * std::sqrt(ssq);
}

namespace detail {

inline double spectrum_residual(const DenseMatrix& a, const std::vector<complex>& lambda)
{
    const double fro = frobenius_norm(a);
    if (fro == 0.0) {
        double worst = 0.0;
        for (const auto& l : lambda) worst = std::max(worst, std::abs(l));
        return worst;
    }
    const std::size_t n = a.rows();
    // Row-blocked sums keep the proxy's own rounding well below the tolerance.
    complex tr{}, tr2{};
    for (std::size_t i = 0; i < n; ++i) {
        tr += a(i, i);
        complex row = a(i, i) * a(i, i);
        for (std::size_t j = i + 1; j < n; ++j) row += 2.0 * a(i, j) * a(j, i);
        tr2 += row;
    }
    complex s1{}, s2{};
    for (const auto& l : lambda) {
        s1 += l;
        s2 += l * l;
    }
    return std::max(std::abs(s1 - tr) / fro, std::abs(s2 - tr2) / (fro * fro));
}

} // namespace detail

/// All n eigenvalues of a square matrix, multiplicity counted.
///
/// Hermitian input goes through tridiagonalization and QL, real input through
/// balancing, Hessenberg reduction and Francis double-shift QR, everything else
/// through complex single-shift QR. The result is certified by trace and
/// trace-of-square consistency; max_residual > tol * n is a NumericalFailure.
inline SpectrumResult eigenvalues(const DenseMatrix& a, double tol = 1e-10, const QrControls& ctl = {})
{
    circlab::detail::require(a.square(), "eigenvalues: matrix is " + std::to_string(a.rows()) + "x" +
                                             std::to_string(a.cols()) + ", not square");
    circlab::detail::require(a.rows() >= 1, "eigenvalues: empty matrix");
    circlab::detail::require(a.rows() <= eigen_size_cap,
                             "eigenvalues: n = " + std::to_string(a.rows()) + " exceeds cap " +
                                 std::to_string(eigen_size_cap));
    circlab::detail::require(a.all_finite(), "eigenvalues: non-finite entry");
    circlab::detail::require(tol > 0.0, "eigenvalues: tol must be positive");

    SpectrumResult out;
    if (is_hermitian(a)) {
        std::vector<double> d, e;
        if (is_real(a)) {
            RealMatrix w = real_part(a);
            detail::tridiagonalize_hermitian(w, d, e);
        } else {
            DenseMatrix w = a;
            detail::tridiagonalize_hermitian(w, d, e);
        }
        const auto vals = detail::tridiagonal_ql(std::move(d), std::move(e), ctl);
        out.eigenvalues.assign(vals.begin(), vals.end());
    } else if (is_real(a)) {
        RealMatrix h = real_part(a);
        detail::balance(h);
        detail::reduce_to_hessenberg(h);
        out.eigenvalues = detail::francis_qr(h, ctl);
    } else {
        DenseMatrix h = a;
        detail::balance(h);
        detail::reduce_to_hessenberg(h);
        out.eigenvalues = detail::complex_qr(h, ctl);
    }
    out.max_residual = detail::spectrum_residual(a, out.eigenvalues);
    if (!(out.max_residual <= tol * static_cast<double>(a.rows())))
        throw NumericalFailure("eigenvalues: certification residual " + std::to_string(out.max_residual) +
                               " exceeds tol*n");
    return out;
}

template <Scalar T>
SingularValues singular_values(const Matrix<T>& a)
{
    circlab::detail::require(a.rows() >= 1 && a.cols() >= 1, "singular_values: empty matrix");
    circlab::detail::require(a.all_finite(), "singular_values: non-finite entry");
    if constexpr (is_complex_v<T>) {
        if (is_real(a)) return {detail::jacobi_singular_values(real_part(a))};
    }
    return {detail::jacobi_singular_values(a)};
}

/// sigma_max / sigma_min; +infinity when sigma_min is zero or below the
/// smallest normal double.
template <Scalar T>
double condition_number(const Matrix<T>& a)
{
    circlab::detail::require(a.square(), "condition_number: matrix is not square");
    const auto s = singular_values(a).values;
    const double smin = s.back();
    if (smin < std::numeric_limits<double>::min()) return std::numeric_limits<double>::infinity();
    return s.front() / smin;
}

template <Scalar T>
Matrix<T> truncate_rows(const Matrix<T>& a, std::size_t k)
{
    circlab::detail::require(k < a.rows(), "truncate_rows: k = " + std::to_string(k) + " must be below rows = " +
                                               std::to_string(a.rows()));
    const std::size_t m = a.rows() - k;
    std::vector<T> e(a.entries().begin(), a.entries().begin() + static_cast<std::ptrdiff_t>(m * a.cols()));
    return Matrix<T>(m, a.cols(), std::move(e));
}

/// Relative threshold below which a row counts as dependent on the others.
inline constexpr double dependence_threshold = 1e-12;

/// Orthonormal basis of the span of a set of vectors by modified Gram-Schmidt
/// with one reorthogonalization pass. Dependent vectors are dropped.
template <Scalar T>
class OrthonormalBasis {
public:
    explicit OrthonormalBasis(std::size_t dim) : dim_(dim) {}

    /// Returns false when `x` is dependent on the current basis.
    bool add(std::span<const T> x)
    {
        const double xnorm = norm(x);
        std::vector<T> v(x.begin(), x.end());
        project_out(v);
        project_out(v);
        const double r = norm(v);
        if (xnorm == 0.0 || r <= dependence_threshold * xnorm) return false;
        for (auto& c : v) c /= r;
        basis_.push_back(std::move(v));
        return true;
    }

    /// Euclidean distance from x to the span.
    double distance(std::span<const T> x) const
    {
        std::vector<T> v(x.begin(), x.end());
        project_out(v);
        project_out(v);
        return norm(v);
    }

    [[nodiscard]] std::size_t rank() const noexcept { return basis_.size(); }

private:
    static double norm(std::span<const T> x)
    {
        double s = 0.0;
        for (const T& c : x) s += abs2(c);
        return std::sqrt(s);
    }

    void project_out(std::vector<T>& v) const
    {
        for (const auto& q : basis_) {
            T dot{};
            for (std::size_t i = 0; i < dim_; ++i) dot += conj_of(q[i]) * v[i];
            for (std::size_t i = 0; i < dim_; ++i) v[i] -= dot * q[i];
        }
    }

    std::size_t dim_;
    std::vector<std::vector<T>> basis_;
};

/// d_i = distance from row i to the span of the other rows; 0 for a row that
/// lies in that span up to the relative dependence threshold.
template <Scalar T>
std::vector<double> row_distances(const Matrix<T>& a)
{
    if constexpr (is_complex_v<T>) {
        if (is_real(a)) return row_distances(real_part(a));
    }
    const std::size_t m = a.rows();
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) {
        OrthonormalBasis<T> basis(a.cols());
        for (std::size_t r = 0; r < m; ++r)
            if (r != i) basis.add(a.row(r));
        double rn = 0.0;
        for (const T& x : a.row(i)) rn += abs2(x);
        rn = std::sqrt(rn);
        const double dist = basis.distance(a.row(i));
        d[i] = (rn == 0.0 || dist <= dependence_threshold * rn) ? 0.0 : dist;
    }
    return d;
}

struct NsmiResult {
    double lhs = 0.0; // sum d_i^-2
    double rhs = 0.0; // sum sigma_i^-2
    double rel_err = 0.0;
};

/// Both sides of sum d_i^-2 = sum sigma_i^-2 for a full-row-rank m x n, m <= n.
template <Scalar T>
NsmiResult nsmi_check(const Matrix<T>& a)
{
    circlab::detail::require(a.rows() <= a.cols(), "nsmi_check: needs rows <= cols");
    const auto d = row_distances(a);
    NsmiResult r;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0)
            throw InvalidArgument("nsmi_check: rank-deficient input (row " + std::to_string(i) +
                                  " lies in the span of the others)");
        r.lhs += 1.0 / (d[i] * d[i]);
    }
    for (double s : singular_values(a).values) {
        if (s == 0.0) throw InvalidArgument("nsmi_check: rank-deficient input (zero singular value)");
        r.rhs += 1.0 / (s * s);
    }
    r.rel_err = std::abs(r.lhs - r.rhs) / r.rhs;
    return r;
}

} // namespace circlab::linalg
