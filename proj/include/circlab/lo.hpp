#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "circlab/core/error.hpp"
#include "circlab/core/format.hpp"
#include "circlab/core/matrix.hpp"
#include "circlab/core/rational.hpp"
#include "circlab/core/rng.hpp"

namespace circlab::lo {

// ---------------------------------------------------------------------------
// Signed sums
// ---------------------------------------------------------------------------

/// Coefficients v_1..v_n of S = sum xi_i v_i, stored as integers over a common
/// denominator (1 unless built from rationals).
class SignedVector {
public:
    explicit SignedVector(std::vector<std::int64_t> values, std::int64_t denominator = 1)
        : values_(std::move(values)), den_(denominator)
    {
        detail::require(!values_.empty(), "SignedVector: needs n >= 1");
        detail::require(den_ >= 1, "SignedVector: denominator must be positive");
        for (auto x : values_)
            detail::require(x != std::numeric_limits<std::int64_t>::min(), "SignedVector: value out of range");
    }

    /// Scales by the lcm of the denominators; concentration is scale-free.
    static SignedVector from_rationals(const std::vector<Rational>& xs)
    {
        std::int64_t l = 1;
        for (const auto& x : xs) {
            l = std::lcm(l, x.den());
            detail::require(l > 0 && l < (std::int64_t{1} << 40), "SignedVector: common denominator too large");
        }
        std::vector<std::int64_t> v;
        for (const auto& x : xs) v.push_back(x.num() * (l / x.den()));
        return SignedVector(std::move(v), l);
    }

    [[nodiscard]] const std::vector<std::int64_t>& values() const& noexcept { return values_; }
    [[nodiscard]] std::vector<std::int64_t> values() && noexcept { return std::move(values_); }
    [[nodiscard]] std::int64_t denominator() const noexcept { return den_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool has_zero() const
    {
        return std::find(values_.begin(), values_.end(), 0) != values_.end();
    }
    [[nodiscard]] std::int64_t max_abs() const
    {
        std::int64_t m = 0;
        for (auto x : values_) m = std::max(m, x < 0 ? -x : x);
        return m;
    }

private:
    std::vector<std::int64_t> values_;
    std::int64_t den_;
};

/// Exact law of S: support[k] / denominator carries probability probs[k].
struct SignedSumDistribution {
    std::vector<std::int64_t> support;
    std::vector<Dyadic> probs;
    std::int64_t denominator = 1;

    [[nodiscard]] Dyadic prob_at(std::int64_t value) const
    {
        const auto it = std::lower_bound(support.begin(), support.end(), value);
        if (it == support.end() || *it != value) return Dyadic();
        return probs[static_cast<std::size_t>(it - support.begin())];
    }

    [[nodiscard]] Dyadic max_prob() const { return *std::max_element(probs.begin(), probs.end()); }
};

/// Largest dense table the DP allocates; wider ranges go through a sparse merge.
inline constexpr std::size_t dense_range_cap = std::size_t{1} << 21;
/// Largest support the sparse DP may hold.
inline constexpr std::size_t sparse_support_cap = std::size_t{1} << 24;

namespace detail {

using Counts = std::vector<std::pair<std::int64_t, u128>>;

inline Counts dense_counts(const std::vector<std::int64_t>& v, std::int64_t total)
{
    const std::size_t width = static_cast<std::size_t>(2 * total + 1);
    std::vector<u128> cur(width, 0), next(width, 0);
    cur[static_cast<std::size_t>(total)] = 1;
    std::int64_t reach = 0;
    for (auto x : v) {
        const std::int64_t a = x < 0 ? -x : x;
        const std::int64_t lo = total - reach - a, hi = total + reach + a;
        std::fill(next.begin() + lo, next.begin() + hi + 1, u128{0});
        for (std::int64_t s = total - reach; s <= total + reach; ++s) {
            const u128 c = cur[static_cast<std::size_t>(s)];
            if (c == 0) continue;
            next[static_cast<std::size_t>(s - a)] += c;
            next[static_cast<std::size_t>(s + a)] += c;
        }
        std::swap(cur, next);
        reach += a;
    }
    Counts out;
    for (std::size_t k = 0; k < width; ++k)
        if (cur[k] != 0) out.emplace_back(static_cast<std::int64_t>(k) - total, cur[k]);
    return out;
}

inline Counts sparse_counts(const std::vector<std::int64_t>& v)
{
    Counts cur{{0, 1}};
    for (auto x : v) {
        const std::int64_t a = x < 0 ? -x : x;
        Counts next;
        next.reserve(2 * cur.size());
        // Merge the two shifted copies, both already sorted.
        std::size_t i = 0, j = 0;
        while (i < cur.size() || j < cur.size()) {
            const bool take_minus = j == cur.size() || (i < cur.size() && cur[i].first - a <= cur[j].first + a);
            const auto [val, cnt] = take_minus ? std::pair{cur[i].first - a, cur[i].second}
                                               : std::pair{cur[j].first + a, cur[j].second};
            take_minus ? ++i : ++j;
            if (!next.empty() && next.back().first == val)
                next.back().second += cnt;
            else
                next.emplace_back(val, cnt);
        }
        if (next.size() > sparse_support_cap)
            throw BudgetExceeded("exact_distribution: support needs " + std::to_string(next.size()) +
                                 " entries, cap is " + std::to_string(sparse_support_cap));
        cur = std::move(next);
    }
    return cur;
}

} // namespace detail

/// Exact law of S = sum xi_i v_i for independent symmetric signs.
///
/// Accepts n <= 64 with |v_i| <= 10^6, or n <= 26 for larger entries.
inline SignedSumDistribution exact_distribution(const SignedVector& v)
{
    const std::size_t n = v.size();
    const std::int64_t m = v.max_abs();
    if (!((n <= 64 && m <= 1'000'000) || n <= 26))
        throw BudgetExceeded("exact_distribution: n = " + std::to_string(n) + " with max |v_i| = " +
                             std::to_string(m) + " is outside the supported range");
    std::int64_t total = 0;
    for (auto x : v.values()) {
        const std::int64_t a = x < 0 ? -x : x;
        circlab::detail::require(total <= std::numeric_limits<std::int64_t>::max() / 4 - a,
                                 "exact_distribution: sum of |v_i| overflows");
        total += a;
    }

    const auto counts = static_cast<std::size_t>(2 * total + 1) <= dense_range_cap
                            ? detail::dense_counts(v.values(), total)
                            : detail::sparse_counts(v.values());
    SignedSumDistribution d;
    d.denominator = v.denominator();
    for (const auto& [val, cnt] : counts) {
        d.support.push_back(val);
        d.probs.emplace_back(cnt, static_cast<int>(n));
    }
    return d;
}

inline Dyadic concentration_prob(const SignedVector& v) { return exact_distribution(v).max_prob(); }

// ---------------------------------------------------------------------------
// Small-ball probability
// ---------------------------------------------------------------------------

struct ExactFiniteSupport {};
struct MonteCarlo {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

struct SmallBallResult {
    double estimate = 0.0;
    /// True only for the real exact mode; complex exact mode is a lower bound.
    bool exact = false;
    double std_error = 0.0;
};

inline constexpr std::size_t small_ball_real_cap = 26;
inline constexpr std::size_t small_ball_complex_cap = 22;

namespace detail {

inline bool all_real(const std::vector<complex>& v)
{
    return std::all_of(v.begin(), v.end(), [](complex z) { return z.imag() == 0.0; });
}

inline double window_slack(const std::vector<complex>& v)
{
    double s = 0.0;
    for (const auto& z : v) s += std::abs(z);
    return 1e-12 * s;
}

// Sorted sums with xi_1 = +1; the full law is this set together with its negation.
inline std::vector<double> half_real_sums(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    std::vector<double> out(std::size_t{1} << (n - 1));
    for (std::size_t mask = 0; mask < out.size(); ++mask) {
        double s = v[0];
        for (std::size_t i = 1; i < n; ++i) s += ((mask >> (i - 1)) & 1) ? v[i] : -v[i];
        out[mask] = s;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Largest number of points of the multiset A u (-A) inside a window of width w.
inline std::uint64_t max_window_symmetric(const std::vector<double>& a, double w)
{
    const std::size_t h = a.size();
    // Sorted order of the union: -a[h-1..0] then interleaved with a[0..h-1].
    // Window [L, L + w] with L running over the union; count in A directly and
    // count of -A as the number of a in [-L - w, -L].
    std::size_t ai = 0, bi = h; // next points of A and -A (in -A, index counts down)
    std::size_t a_lo = 0, a_hi = 0; // A window: [a_lo, a_hi)
    std::size_t b_lo = h, b_hi = h; // a-indices with -a in window: [b_lo, b_hi)
    std::uint64_t best = 0;
    while (ai < h || bi > 0) {
        const bool from_neg = ai == h || (bi > 0 && -a[bi - 1] <= a[ai]);
        const double L = from_neg ? -a[bi - 1] : a[ai];
        from_neg ? --bi : ++ai;
        while (a_lo < h && a[a_lo] < L) ++a_lo;
        a_hi = std::max(a_hi, a_lo);
        while (a_hi < h && a[a_hi] <= L + w) ++a_hi;
        // -a in [L, L + w]  <=>  a in [-L - w, -L]
        while (b_hi > 0 && a[b_hi - 1] > -L) --b_hi;
        b_lo = std::min(b_lo, b_hi);
        while (b_lo > 0 && a[b_lo - 1] >= -L - w) --b_lo;
        best = std::max<std::uint64_t>(best, (a_hi - a_lo) + (b_hi - b_lo));
    }
    return best;
}

inline std::uint64_t max_window_sorted(const std::vector<double>& s, double w)
{
    std::uint64_t best = 0;
    std::size_t hi = 0;
    for (std::size_t lo = 0; lo < s.size(); ++lo) {
        hi = std::max(hi, lo);
        while (hi < s.size() && s[hi] <= s[lo] + w) ++hi;
        best = std::max<std::uint64_t>(best, hi - lo);
    }
    return best;
}

// For each point as a center, count points within radius r; returns the max.
inline std::uint64_t max_disk_at_points(std::vector<complex> pts, double r)
{
    std::sort(pts.begin(), pts.end(), [](complex a, complex b) { return a.real() < b.real(); });
    std::uint64_t best = 0;
    std::size_t lo = 0;
    for (std::size_t c = 0; c < pts.size(); ++c) {
        while (pts[lo].real() < pts[c].real() - r) ++lo;
        std::uint64_t cnt = 0;
        for (std::size_t j = lo; j < pts.size() && pts[j].real() <= pts[c].real() + r; ++j)
            if (std::abs(pts[j] - pts[c]) <= r) ++cnt;
        best = std::max(best, cnt);
    }
    return best;
}

} // namespace detail

/// max over z of P(|S - z| <= beta).
///
/// ExactFiniteSupport enumerates all 2^n sums. For real v the maximum over
/// intervals of width 2 beta is exact; for complex v only centers at the sums
/// are searched and the result is flagged as a lower bound. MonteCarlo runs
/// the same search over sampled sums and reports a binomial standard error.
inline SmallBallResult small_ball_prob(const std::vector<complex>& v, double beta, ExactFiniteSupport)
{
    circlab::detail::require(!v.empty(), "small_ball_prob: empty vector");
    circlab::detail::require(beta >= 0.0 && std::isfinite(beta), "small_ball_prob: beta must be >= 0");
    const std::size_t n = v.size();
    const double slack = detail::window_slack(v);
    if (detail::all_real(v)) {
        if (n > small_ball_real_cap)
            throw BudgetExceeded("small_ball_prob: exact mode needs n <= 26, got " + std::to_string(n));
        std::vector<double> re;
        for (const auto& z : v) re.push_back(z.real());
        const auto best = detail::max_window_symmetric(detail::half_real_sums(re), 2.0 * beta + slack);
        return {std::ldexp(static_cast<double>(best), -static_cast<int>(n)), true, 0.0};
    }
    if (n > small_ball_complex_cap)
        throw BudgetExceeded("small_ball_prob: complex exact mode needs n <= 22, got " + std::to_string(n));
    std::vector<complex> sums(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < sums.size(); ++mask) {
        complex s{};
        for (std::size_t i = 0; i < n; ++i) s += ((mask >> i) & 1) ? v[i] : -v[i];
        sums[mask] = s;
    }
    const auto best = detail::max_disk_at_points(std::move(sums), beta + slack);
    return {std::ldexp(static_cast<double>(best), -static_cast<int>(n)), false, 0.0};
}

inline SmallBallResult small_ball_prob(const std::vector<complex>& v, double beta, MonteCarlo mc)
{
    circlab::detail::require(!v.empty(), "small_ball_prob: empty vector");
    circlab::detail::require(beta >= 0.0 && std::isfinite(beta), "small_ball_prob: beta must be >= 0");
    circlab::detail::require(mc.trials > 0, "small_ball_prob: trials must be positive");
    const double slack = detail::window_slack(v);
    std::vector<complex> sums(mc.trials);
    for (std::uint64_t t = 0; t < mc.trials; ++t) {
        StreamRng rng(mc.seed, t);
        complex s{};
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i % 64 == 0) bits = rng();
            s += ((bits >> (i % 64)) & 1) ? v[i] : -v[i];
        }
        sums[t] = s;
    }
    std::uint64_t best = 0;
    if (detail::all_real(v)) {
        std::vector<double> re;
        for (const auto& z : sums) re.push_back(z.real());
        std::sort(re.begin(), re.end());
        best = detail::max_window_sorted(re, 2.0 * beta + slack);
    } else {
        best = detail::max_disk_at_points(std::move(sums), beta + slack);
    }
    const double p = static_cast<double>(best) / static_cast<double>(mc.trials);
    return {p, false, std::sqrt(p * (1.0 - p) / static_cast<double>(mc.trials))};
}

// ---------------------------------------------------------------------------
// Halasz counts
// ---------------------------------------------------------------------------

inline constexpr double halasz_budget = 1e9;

/// Number of (eps, i) in {+-1}^{2k} x [n]^{2k}, ordered and with repetition,
/// with eps_1 v_{i_1} + ... + eps_{2k} v_{i_{2k}} = 0.
///
/// Counted as sum_s c(s) c(-s) where c is the k-fold self-convolution of the
/// signed multiset {+-v_i}.
inline std::uint64_t halasz_Rk(const SignedVector& v, unsigned k)
{
    circlab::detail::require(k >= 1, "halasz_Rk: k must be positive");
    const double n = static_cast<double>(v.size());
    const double work = std::pow(n, 2.0 * k) * std::pow(4.0, k);
    if (work > halasz_budget)
        throw BudgetExceeded("halasz_Rk: n^(2k) 4^k = " + fmt17(work) + " exceeds 1e9");

    std::vector<std::int64_t> base;
    for (auto x : v.values()) base.push_back(x), base.push_back(-x);
    std::sort(base.begin(), base.end());
    detail::Counts one;
    for (auto x : base) {
        if (!one.empty() && one.back().first == x)
            ++one.back().second;
        else
            one.emplace_back(x, 1);
    }
    detail::Counts c = one;
    for (unsigned step = 1; step < k; ++step) {
        std::vector<std::pair<std::int64_t, u128>> raw;
        for (const auto& [x, cx] : c)
            for (const auto& [y, cy] : one) raw.emplace_back(x + y, cx * cy);
        std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        c.clear();
        for (const auto& [x, cx] : raw) {
            if (!c.empty() && c.back().first == x)
                c.back().second += cx;
            else
                c.emplace_back(x, cx);
        }
    }
    u128 total = 0;
    for (const auto& [x, cx] : c) {
        const auto it = std::lower_bound(c.begin(), c.end(), -x, [](const auto& p, std::int64_t val) {
            return p.first < val;
        });
        if (it != c.end() && it->first == -x) total += cx * it->second;
    }
    return static_cast<std::uint64_t>(total);
}

/// p_v / (n^{-2k-1/2} R_k).
inline double halasz_ratio(const SignedVector& v, unsigned k)
{
    const auto r = halasz_Rk(v, k);
    if (r == 0) throw InvalidArgument("halasz_ratio: R_k = 0, ratio undefined");
    const double n = static_cast<double>(v.size());
    return concentration_prob(v).to_double() / (std::pow(n, -2.0 * k - 0.5) * static_cast<double>(r));
}

// ---------------------------------------------------------------------------
// Generalized arithmetic progressions
// ---------------------------------------------------------------------------

struct GAP {
    std::int64_t a0 = 0;
    std::vector<std::int64_t> generators;
    std::vector<std::int64_t> lower;
    std::vector<std::int64_t> upper;

    GAP() = default;
    GAP(std::int64_t base, std::vector<std::int64_t> gens, std::vector<std::int64_t> lo, std::vector<std::int64_t> hi)
        : a0(base), generators(std::move(gens)), lower(std::move(lo)), upper(std::move(hi))
    {
        validate();
    }

    void validate() const
    {
        circlab::detail::require(generators.size() == lower.size() && lower.size() == upper.size(),
                                 "GAP: generators, lower and upper must have equal length");
        for (std::size_t i = 0; i < lower.size(); ++i)
            circlab::detail::require(lower[i] <= upper[i], "GAP: lower[" + std::to_string(i) + "] > upper[" +
                                                               std::to_string(i) + "]");
    }

    [[nodiscard]] std::size_t rank() const noexcept { return generators.size(); }

    /// Box cardinality; saturates at the largest double rather than overflowing.
    [[nodiscard]] double volume() const
    {
        double v = 1.0;
        for (std::size_t i = 0; i < lower.size(); ++i)
            v *= static_cast<double>(upper[i]) - static_cast<double>(lower[i]) + 1.0;
        return v;
    }
};

inline constexpr double gap_volume_cap = 1e7;

struct GapElements {
    std::vector<std::int64_t> elements; // sorted, distinct
    bool proper = false;
};

inline GapElements gap_elements(const GAP& q)
{
    q.validate();
    const double vol = q.volume();
    if (vol > gap_volume_cap)
        throw BudgetExceeded("gap_elements: volume " + fmt17(vol) + " exceeds 1e7");
    const std::size_t d = q.rank();
    std::vector<std::int64_t> x(q.lower);
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(vol));
    while (true) {
        std::int64_t s = q.a0;
        for (std::size_t i = 0; i < d; ++i) s += x[i] * q.generators[i];
        out.push_back(s);
        std::size_t i = 0;
        while (i < d && x[i] == q.upper[i]) x[i] = q.lower[i], ++i;
        if (i == d) break;
        ++x[i];
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    const bool proper = static_cast<double>(out.size()) == vol;
    return {std::move(out), proper};
}

/// n elements drawn uniformly with replacement from the distinct elements of Q.
inline SignedVector gap_sample_vector(const GAP& q, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0)
{
    circlab::detail::require(n >= 1, "gap_sample_vector: n must be positive");
    const auto el = gap_elements(q).elements;
    StreamRng rng(seed, stream);
    std::vector<std::int64_t> v(n);
    for (auto& x : v) x = el[rng.below(el.size())];
    return SignedVector(std::move(v));
}

/// 1 / (n^{d/2} Vol(Q)); 1 for a rank-0 progression.
inline double pigeonhole_lower_bound(const GAP& q, std::size_t n)
{
    circlab::detail::require(n >= 1, "pigeonhole_lower_bound: n must be positive");
    if (q.rank() == 0) return 1.0;
    return 1.0 / (std::pow(static_cast<double>(n), static_cast<double>(q.rank()) / 2.0) * q.volume());
}

// ---------------------------------------------------------------------------
// Quadratic forms
// ---------------------------------------------------------------------------

inline constexpr std::size_t quadratic_cap = 24;

/// sup_z P(sum_{i,j} c_ij xi_i xi_j = z), exact, by Gray-code enumeration.
inline Dyadic quadratic_small_ball(const std::vector<std::vector<std::int64_t>>& c)
{
    const std::size_t n = c.size();
    circlab::detail::require(n >= 1, "quadratic_small_ball: empty matrix");
    for (const auto& row : c) circlab::detail::require(row.size() == n, "quadratic_small_ball: matrix not square");
    if (n > quadratic_cap)
        throw BudgetExceeded("quadratic_small_ball: n = " + std::to_string(n) + " exceeds 24");

    // Q(xi) = Q(-xi), so xi_{n-1} = +1 is fixed and the rest enumerated.
    std::vector<int> xi(n, 1);
    std::int64_t q = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q += c[i][j];
    // h[k] = sum_{j != k} (c_kj + c_jk) xi_j
    std::vector<std::int64_t> h(n, 0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            if (j != k) h[k] += c[k][j] + c[j][k];

    const std::size_t free = n - 1;
    std::vector<std::int64_t> values;
    values.reserve(std::size_t{1} << free);
    values.push_back(q);
    for (std::uint64_t step = 1; step < (std::uint64_t{1} << free); ++step) {
        const auto k = static_cast<std::size_t>(std::countr_zero(step));
        q -= 2 * xi[k] * h[k];
        for (std::size_t j = 0; j < n; ++j)
            if (j != k) h[j] -= 2 * xi[k] * (c[j][k] + c[k][j]);
        xi[k] = -xi[k];
        values.push_back(q);
    }
    std::sort(values.begin(), values.end());
    std::uint64_t best = 0, run = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        run = (i > 0 && values[i] == values[i - 1]) ? run + 1 : 1;
        best = std::max(best, run);
    }
    return Dyadic(best, static_cast<int>(free));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string value_text(std::int64_t num, std::int64_t den)
{
    if (den == 1) return std::to_string(num);
    const std::int64_t g = std::gcd(num, den);
    return den / g == 1 ? std::to_string(num / g) : std::to_string(num / g) + "/" + std::to_string(den / g);
}

inline std::string to_csv(const SignedSumDistribution& d)
{
    std::string out = "value,numerator,log2_denominator\n";
    for (std::size_t k = 0; k < d.support.size(); ++k)
        out += value_text(d.support[k], d.denominator) + "," + to_string(d.probs[k].numerator()) + "," +
               std::to_string(d.probs[k].log2_denominator()) + "\n";
    return out;
}

inline nlohmann::json to_json(const GAP& q)
{
    return {{"a0", q.a0}, {"generators", q.generators}, {"lower", q.lower}, {"upper", q.upper}};
}

inline GAP gap_from_json(const nlohmann::json& j)
{
    circlab::detail::require(j.is_object(), "gap json: expected an object");
    for (const auto& [key, _] : j.items())
        circlab::detail::require(key == "a0" || key == "generators" || key == "lower" || key == "upper",
                                 "gap json: unknown key '" + key + "'");
    try {
        return GAP(j.value("a0", std::int64_t{0}), j.at("generators").get<std::vector<std::int64_t>>(),
                   j.at("lower").get<std::vector<std::int64_t>>(), j.at("upper").get<std::vector<std::int64_t>>());
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("gap json: ") + e.what());
    }
}

} // namespace circlab::lo
