#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

#include "circlab/core/error.hpp"

namespace circlab {

__extension__ typedef unsigned __int128 u128;
__extension__ typedef __int128 i128;

/// Reduced fraction with a positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1)
    {
        detail::require(den != 0, "rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num, den);
        num_ = num / g;
        den_ = den / g;
    }

    /// Parses "p/q" or "p".
    static Rational parse(const std::string& s)
    {
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(std::stoll(s));
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::logic_error&) {
            throw InvalidArgument("malformed rational '" + s + "'");
        }
    }

    [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }
    [[nodiscard]] double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    [[nodiscard]] std::string str() const
    {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b)
    {
        const std::int64_t l = std::lcm(a.den_, b.den_);
        return Rational(a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l);
    }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        return static_cast<i128>(a.num_) * b.den_ <=> static_cast<i128>(b.num_) * a.den_;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline std::string to_string(u128 x)
{
    if (x == 0) return "0";
    std::string s;
    while (x > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
        x /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

/// Probability of the form numerator / 2^exponent, kept with an odd numerator
/// (or zero). Laws of sums of n symmetric signs live here exactly for n <= 126.
class Dyadic {
public:
    constexpr Dyadic() = default;
    Dyadic(u128 numerator, int log2_denominator) : num_(numerator), exp_(log2_denominator)
    {
        detail::require(exp_ >= 0 && exp_ <= 126, "dyadic exponent out of range");
        normalize();
    }

    [[nodiscard]] u128 numerator() const noexcept { return num_; }
    [[nodiscard]] int log2_denominator() const noexcept { return exp_; }
    [[nodiscard]] double to_double() const noexcept
    {
        return std::ldexp(static_cast<double>(num_), -exp_);
    }
    [[nodiscard]] std::string str() const
    {
        return exp_ == 0 ? to_string(num_) : to_string(num_) + "/2^" + std::to_string(exp_);
    }

    friend bool operator==(const Dyadic&, const Dyadic&) = default;
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b)
    {
        const int e = std::max(a.exp_, b.exp_);
        // Values are probabilities, so num < 2^exp + 1 and the shift stays in range.
        return (a.num_ << (e - a.exp_)) <=> (b.num_ << (e - b.exp_));
    }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b)
    {
        const int e = std::max(a.exp_, b.exp_);
        return Dyadic((a.num_ << (e - a.exp_)) + (b.num_ << (e - b.exp_)), e);
    }

private:
    void normalize() noexcept
    {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        while (exp_ > 0 && (num_ & 1) == 0) {
            num_ >>= 1;
            --exp_;
        }
    }

    u128 num_ = 0;
    int exp_ = 0;
};

/// Exact binomial coefficient; n <= 120.
inline u128 binomial(unsigned n, unsigned k)
{
    if (k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace circlab
