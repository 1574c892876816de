#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <type_traits>
#include <vector>

#include "circlab/core/error.hpp"

namespace circlab {

using complex = std::complex<double>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <typename T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, complex>;

inline double conj_of(double x) { return x; }
inline complex conj_of(const complex& z) { return std::conj(z); }
inline double abs2(double x) { return x * x; }
inline double abs2(const complex& z) { return z.real() * z.real() + z.imag() * z.imag(); }
inline double abs1(double x) { return std::abs(x); }
inline double abs1(const complex& z) { return std::abs(z.real()) + std::abs(z.imag()); }

/// Dense row-major matrix. Complex entries are the general carrier; the real
/// instantiation exists so the decompositions can run at real cost on real input.
template <Scalar T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries))
    {
        detail::require(data_.size() == rows_ * cols_, "matrix entry count does not match rows*cols");
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows)
        : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0)
    {
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            detail::require(r.size() == cols_, "ragged matrix initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::span<T> entries() noexcept { return data_; }
    std::span<const T> entries() const noexcept { return data_; }

    [[nodiscard]] bool all_finite() const noexcept
    {
        return std::all_of(data_.begin(), data_.end(), [](const T& x) {
            if constexpr (is_complex_v<T>) return std::isfinite(x.real()) && std::isfinite(x.imag());
            else return std::isfinite(x);
        });
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    static Matrix diagonal(std::span<const T> d)
    {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    Matrix& operator+=(const Matrix& o)
    {
        detail::require(rows_ == o.rows_ && cols_ == o.cols_, "matrix sum shape mismatch");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o)
    {
        detail::require(rows_ == o.rows_ && cols_ == o.cols_, "matrix difference shape mismatch");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(T c)
    {
        for (auto& x : data_) x *= c;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, T c) { return a *= c; }
    friend Matrix operator*(T c, Matrix a) { return a *= c; }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        detail::require(a.cols_ == b.rows_, "matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            T* ci = c.data_.data() + i * c.cols_;
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                if (aik == T{}) continue;
                const T* bk = b.data_.data() + k * b.cols_;
                for (std::size_t j = 0; j < b.cols_; ++j) ci[j] += aik * bk[j];
            }
        }
        return c;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using DenseMatrix = Matrix<complex>;
using RealMatrix = Matrix<double>;

template <Scalar T>
Matrix<T> adjoint(const Matrix<T>& a)
{
    Matrix<T> r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = conj_of(a(i, j));
    return r;
}

template <Scalar T>
T trace(const Matrix<T>& a)
{
    detail::require(a.square(), "trace of a non-square matrix");
    T s{};
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
    return s;
}

inline bool is_real(const DenseMatrix& a) noexcept
{
    const auto e = a.entries();
    return std::all_of(e.begin(), e.end(), [](const complex& z) { return z.imag() == 0.0; });
}

template <Scalar T>
bool is_hermitian(const Matrix<T>& a) noexcept
{
    if (!a.square()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j)
            if (a(i, j) != conj_of(a(j, i))) return false;
    return true;
}

inline RealMatrix real_part(const DenseMatrix& a)
{
    RealMatrix r(a.rows(), a.cols());
    auto src = a.entries();
    auto dst = r.entries();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k].real();
    return r;
}

inline DenseMatrix to_complex(const RealMatrix& a)
{
    DenseMatrix r(a.rows(), a.cols());
    auto src = a.entries();
    auto dst = r.entries();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k];
    return r;
}

inline DenseMatrix diag(std::initializer_list<complex> d)
{
    std::vector<complex> v(d);
    return DenseMatrix::diagonal(v);
}

} // namespace circlab
