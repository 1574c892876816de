#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "circlab/core/error.hpp"
#include "circlab/core/format.hpp"
#include "circlab/core/matrix.hpp"
#include "circlab/core/parallel.hpp"
#include "circlab/linalg.hpp"
#include "circlab/matrices.hpp"

namespace circlab::smoothed {

using matrices::EntryDistribution;

struct TailReport {
    std::size_t n = 0;
    std::vector<double> x_grid;
    std::vector<double> survival;    // P(|(A+M)^-1| >= x)
    std::vector<double> bound_curve; // sqrt(n) / x
    std::size_t trials = 0;
    std::vector<double> inverse_norms;      // per trial; +inf when singular or failed
    std::vector<std::size_t> failed_trials; // decomposition did not converge
};

/// Empirical tail of |(A + M)^-1| = 1 / sigma_min(A + M) over seeded draws of M.
///
/// Singular draws and trials whose SVD fails count as exceeding every x; the
/// failed ones are also listed in the report.
inline TailReport condition_tail(const DenseMatrix& a, const EntryDistribution& dist, std::vector<double> x_grid,
                                 std::size_t trials, std::uint64_t seed, std::size_t threads = 1)
{
    detail::require(a.square() && a.rows() >= 1, "condition_tail: A must be square");
    detail::require(trials >= 1, "condition_tail: trials must be positive");
    detail::require(dist.variance() > 0.0, "condition_tail: distribution has zero variance");
    detail::require(!x_grid.empty(), "condition_tail: empty x_grid");
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        detail::require(x_grid[i] > 0.0 && std::isfinite(x_grid[i]), "condition_tail: x_grid must be positive");
        detail::require(i == 0 || x_grid[i - 1] < x_grid[i], "condition_tail: x_grid must be strictly increasing");
    }

    const std::size_t n = a.rows();
    TailReport r;
    r.n = n;
    r.trials = trials;
    r.inverse_norms.assign(trials, 0.0);
    std::vector<char> failed(trials, 0);
    parallel_for(trials, threads, [&](std::size_t t) {
        DenseMatrix w = a + matrices::sample_matrix(dist, n, seed, t);
        try {
            const double smin = linalg::singular_values(w).values.back();
            r.inverse_norms[t] = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
        } catch (const NumericalFailure&) {
            failed[t] = 1;
            r.inverse_norms[t] = std::numeric_limits<double>::infinity();
        }
    });
    for (std::size_t t = 0; t < trials; ++t)
        if (failed[t]) r.failed_trials.push_back(t);

    for (double x : x_grid) {
        std::size_t hits = 0;
        for (double v : r.inverse_norms) hits += v >= x;
        r.survival.push_back(static_cast<double>(hits) / static_cast<double>(trials));
        r.bound_curve.push_back(std::sqrt(static_cast<double>(n)) / x);
    }
    r.x_grid = std::move(x_grid);
    return r;
}

/// x_b = n^b for each exponent b, for tail experiments of the form
/// P(|(A+M)^-1| >= n^b).
inline std::vector<double> power_grid(std::size_t n, const std::vector<double>& exponents)
{
    std::vector<double> xs;
    for (double b : exponents) xs.push_back(std::pow(static_cast<double>(n), b));
    return xs;
}

/// |sum v_i (xi_i + a_i)|: distance from the row a + xi to the hyperplane
/// through the origin with unit normal v.
inline double hyperplane_distance(std::span<const double> a, std::span<const double> v_normal,
                                  std::span<const double> xi)
{
    detail::require(a.size() == v_normal.size() && xi.size() == v_normal.size(),
                    "hyperplane_distance: length mismatch");
    double nn = 0.0;
    for (double x : v_normal) nn += x * x;
    detail::require(std::abs(std::sqrt(nn) - 1.0) <= 1e-12, "hyperplane_distance: normal is not a unit vector");
    for (double s : xi) detail::require(s == 1.0 || s == -1.0, "hyperplane_distance: xi must be a sign vector");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += v_normal[i] * (xi[i] + a[i]);
    return std::abs(acc);
}

/// Distance from row 0 of `x` to the span of rows 1..n-k-1.
template <Scalar T>
double row_to_span_distance(const Matrix<T>& x, std::size_t k)
{
    const std::size_t n = x.rows();
    detail::require(k >= 1 && k < n, "row_to_span_distance: need 1 <= k < n");
    linalg::OrthonormalBasis<T> basis(x.cols());
    for (std::size_t r = 1; r + k < n; ++r) basis.add(x.row(r));
    return basis.distance(x.row(0));
}

struct DistanceReport {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t trials = 0;
    std::vector<double> distances;
    double threshold = 0.0; // sqrt(k / n) / 100
};

/// Smallest codimension the distance lemma is checked at: ceil(4 ln n).
inline std::size_t min_codimension(std::size_t n)
{
    return static_cast<std::size_t>(std::ceil(4.0 * std::log(static_cast<double>(n))));
}

/// Per trial: sample X / sqrt(n) and record the distance of its first row to
/// the span of n - k - 1 other rows. `relaxed` lifts the k >= ceil(4 ln n) floor.
inline DistanceReport distance_experiment(std::size_t n, std::size_t k, const EntryDistribution& dist,
                                          std::size_t trials, std::uint64_t seed, bool relaxed = false,
                                          std::size_t threads = 1)
{
    detail::require(n >= 2, "distance_experiment: n must be at least 2");
    detail::require(k >= 1 && k < n, "distance_experiment: need 1 <= k < n, got k = " + std::to_string(k));
    detail::require(relaxed || k >= min_codimension(n),
                    "distance_experiment: k = " + std::to_string(k) + " is below ceil(4 ln n) = " +
                        std::to_string(min_codimension(n)));
    detail::require(trials >= 1, "distance_experiment: trials must be positive");

    DistanceReport r;
    r.n = n;
    r.k = k;
    r.trials = trials;
    r.threshold = std::sqrt(static_cast<double>(k) / static_cast<double>(n)) / 100.0;
    r.distances.assign(trials, 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    parallel_for(trials, threads, [&](std::size_t t) {
        DenseMatrix x = matrices::sample_matrix(dist, n, seed, t);
        x *= complex(scale);
        r.distances[t] = dist.is_real() ? row_to_span_distance(real_part(x), k) : row_to_span_distance(x, k);
    });
    return r;
}

struct SigmaTailCheck {
    double lhs = 0.0;       // sigma_{n-k}(A)
    double rhs = 0.0;       // sigma_{m-k}(A'), A' = first m = n - k rows
    double reference = 0.0; // k / sqrt((n - k) n)
};

/// Singular values are indexed from the largest (sigma_1 >= sigma_2 >= ...).
template <Scalar T>
SigmaTailCheck sigma_tail_bound_check(const Matrix<T>& a, std::size_t k)
{
    detail::require(a.square(), "sigma_tail_bound_check: A must be square");
    const std::size_t n = a.rows();
    detail::require(k >= 1 && 2 * k < n, "sigma_tail_bound_check: need 1 <= k < n/2, got k = " + std::to_string(k));
    const std::size_t m = n - k;
    const auto s = linalg::singular_values(a).values;
    const auto sp = linalg::singular_values(linalg::truncate_rows(a, k)).values;
    SigmaTailCheck c;
    c.lhs = s[n - k - 1];
    c.rhs = sp[m - k - 1];
    c.reference = static_cast<double>(k) / std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    return c;
}

inline std::string to_csv(const TailReport& r)
{
    std::string out = "x,survival,bound\n";
    for (std::size_t i = 0; i < r.x_grid.size(); ++i)
        out += fmt17(r.x_grid[i]) + "," + fmt17(r.survival[i]) + "," + fmt17(r.bound_curve[i]) + "\n";
    return out;
}

inline std::string to_csv(const DistanceReport& r)
{
    std::string out = "trial,distance,threshold\n";
    for (std::size_t t = 0; t < r.distances.size(); ++t)
        out += std::to_string(t) + "," + fmt17(r.distances[t]) + "," + fmt17(r.threshold) + "\n";
    return out;
}

} // namespace circlab::smoothed
