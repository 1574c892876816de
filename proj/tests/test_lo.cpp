#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "circlab/core/rng.hpp"
#include "circlab/lo.hpp"
#include "oracles.hpp"

using namespace circlab;
using namespace circlab::lo;

namespace {

SignedVector ones(std::size_t n) { return SignedVector(std::vector<std::int64_t>(n, 1)); }

Dyadic erdos_bound(unsigned n) { return Dyadic(binomial(n, n / 2), static_cast<int>(n)); }

std::vector<std::int64_t> random_nonzero(std::size_t n, std::int64_t range, std::uint64_t seed)
{
    StreamRng rng(seed, 1);
    std::vector<std::int64_t> v(n);
    for (auto& x : v) {
        x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(range))) + 1;
        if (rng() & 1) x = -x;
    }
    return v;
}

std::vector<complex> as_complex(const std::vector<double>& v) { return {v.begin(), v.end()}; }

} // namespace

TEST(ExactDistribution, Examples)
{
    const auto one = exact_distribution(SignedVector({1}));
    EXPECT_EQ(one.support, (std::vector<std::int64_t>{-1, 1}));
    EXPECT_EQ(one.probs[0], Dyadic(1, 1));
    EXPECT_EQ(one.probs[1], Dyadic(1, 1));

    EXPECT_EQ(exact_distribution(SignedVector({1, 2, 3})).prob_at(0), Dyadic(1, 2));
    EXPECT_EQ(exact_distribution(ones(4)).prob_at(0), Dyadic(6, 4));
}

TEST(ExactDistribution, MatchesEnumerationOracle)
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t n = 1 + seed % 14;
        const auto v = random_nonzero(n, seed % 3 == 0 ? 5 : 3000, seed);
        const auto law = oracle::enumerate_signed_sums(v);
        const auto d = exact_distribution(SignedVector(v));
        ASSERT_EQ(d.support.size(), law.size());
        std::size_t k = 0;
        for (const auto& [val, cnt] : law) {
            EXPECT_EQ(d.support[k], val);
            EXPECT_EQ(d.probs[k], Dyadic(cnt, static_cast<int>(n)));
            ++k;
        }
    }
}

TEST(ExactDistribution, DenseAndSparsePathsAgree)
{
    // Entries near 10^6 force the sparse merge; scaling by 1/c must give the
    // same probabilities as the dense path on small entries.
    const std::vector<std::int64_t> small{1, 3, 4, 7, 7, 2, 9};
    std::vector<std::int64_t> big;
    for (auto x : small) big.push_back(x * 1'000'000 / 9);
    std::vector<std::int64_t> scaled;
    for (auto x : small) scaled.push_back(x * 111'111);
    const auto a = exact_distribution(SignedVector(small));
    const auto b = exact_distribution(SignedVector(scaled));
    EXPECT_EQ(a.probs, b.probs);
    for (std::size_t k = 0; k < a.support.size(); ++k) EXPECT_EQ(a.support[k] * 111'111, b.support[k]);
}

TEST(ExactDistribution, SymmetricAndUnitMass)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto v = random_nonzero(1 + seed % 30, 50, seed + 77);
        const auto d = exact_distribution(SignedVector(v));
        Dyadic total;
        for (std::size_t k = 0; k < d.support.size(); ++k) {
            EXPECT_EQ(d.probs[k], d.prob_at(-d.support[k]));
            total = total + d.probs[k];
        }
        EXPECT_EQ(total, Dyadic(1, 0));
    }
}

TEST(ExactDistribution, BudgetAndRange)
{
    std::vector<std::int64_t> wide(30, 5'000'000);
    EXPECT_THROW(exact_distribution(SignedVector(wide)), BudgetExceeded);
    EXPECT_NO_THROW(exact_distribution(ones(64)));
    EXPECT_EQ(exact_distribution(SignedVector(std::vector<std::int64_t>(64, 0))).probs,
              (std::vector<Dyadic>{Dyadic(1, 0)}));
    EXPECT_THROW(SignedVector({}), InvalidArgument);
}

TEST(ExactDistribution, RationalInputs)
{
    const auto v = SignedVector::from_rationals({Rational(1, 2), Rational(1, 3), Rational(5, 6)});
    EXPECT_EQ(v.denominator(), 6);
    EXPECT_EQ(v.values(), (std::vector<std::int64_t>{3, 2, 5}));
    // 1/2 + 1/3 - 5/6 = 0 and its negation.
    EXPECT_EQ(concentration_prob(v), Dyadic(1, 2));
    const std::string csv = to_csv(exact_distribution(v));
    EXPECT_NE(csv.find("-5/3,1,3\n"), std::string::npos) << csv;
    EXPECT_NE(csv.find("0,1,2\n"), std::string::npos) << csv;
}

TEST(ConcentrationProb, Examples)
{
    EXPECT_EQ(concentration_prob(ones(10)), Dyadic(252, 10));
    EXPECT_EQ(concentration_prob(SignedVector({1, 2, 3})), Dyadic(1, 2));
    EXPECT_EQ(concentration_prob(SignedVector({1, 2, 4, 8})), Dyadic(1, 4));
}

TEST(ConcentrationProb, ErdosBound)
{
    for (unsigned n = 1; n <= 24; ++n) EXPECT_EQ(concentration_prob(ones(n)), erdos_bound(n)) << "n=" << n;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::size_t n = 1 + seed % 24;
        const SignedVector v(random_nonzero(n, 1 + seed % 40, seed + 1000));
        ASSERT_FALSE(v.has_zero());
        EXPECT_LE(concentration_prob(v), erdos_bound(static_cast<unsigned>(n)));
    }
}

TEST(ConcentrationProb, DyadicVectorsHaveDistinctSums)
{
    for (unsigned n = 1; n <= 24; ++n) {
        std::vector<std::int64_t> v;
        for (unsigned i = 0; i < n; ++i) v.push_back(std::int64_t{1} << i);
        EXPECT_EQ(concentration_prob(SignedVector(v)), Dyadic(1, static_cast<int>(n)));
    }
}

TEST(ConcentrationProb, DistinctValuesScaling)
{
    std::vector<double> scaled;
    for (std::int64_t n = 8; n <= 40; ++n) {
        std::vector<std::int64_t> v;
        for (std::int64_t i = 1; i <= n; ++i) v.push_back(i);
        const double x = concentration_prob(SignedVector(v)).to_double() * std::pow(static_cast<double>(n), 1.5);
        EXPECT_GE(x, 0.5);
        EXPECT_LE(x, 3.0);
        if (n >= 24) scaled.push_back(x);
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    EXPECT_LT((*hi - *lo) / *lo, 0.25);
}

TEST(SmallBall, Examples)
{
    const auto a = small_ball_prob(as_complex({1.0, 1.0}), 0.0, ExactFiniteSupport{});
    EXPECT_EQ(a.estimate, 0.5);
    EXPECT_TRUE(a.exact);
    EXPECT_EQ(small_ball_prob(as_complex({1.0, 1.0}), 2.0, ExactFiniteSupport{}).estimate, 1.0);
    EXPECT_THROW(small_ball_prob(as_complex({1.0}), -0.1, ExactFiniteSupport{}), InvalidArgument);
    EXPECT_THROW(small_ball_prob(as_complex({1.0}), 0.1, MonteCarlo{0, 1}), InvalidArgument);
}

TEST(SmallBall, UnitVectorAgainstEnumeration)
{
    const std::size_t n = 16;
    const std::vector<double> v(n, 1.0 / std::sqrt(16.0));
    const auto r = small_ball_prob(as_complex(v), 0.1, ExactFiniteSupport{});
    // Oracle: count sums in [-0.1, 0.1] and maximize over all intervals of width 0.2.
    std::vector<double> sums;
    for (std::uint64_t mask = 0; mask < (1u << n); ++mask) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += ((mask >> i) & 1) ? v[i] : -v[i];
        sums.push_back(s);
    }
    std::sort(sums.begin(), sums.end());
    const double centered =
        static_cast<double>(std::count_if(sums.begin(), sums.end(), [](double s) { return std::abs(s) <= 0.1; })) /
        65536.0;
    EXPECT_GE(r.estimate, centered);
    std::size_t best = 0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        const auto end = std::upper_bound(sums.begin(), sums.end(), sums[i] + 0.2 + 1e-9);
        best = std::max(best, static_cast<std::size_t>(end - sums.begin()) - i);
    }
    EXPECT_EQ(r.estimate, static_cast<double>(best) / 65536.0);
}

TEST(SmallBall, RealExactMatchesBruteForce)
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        StreamRng rng(seed, 2);
        const std::size_t n = 1 + seed % 8;
        std::vector<double> v(n);
        for (auto& x : v) x = 4.0 * rng.uniform() - 2.0;
        const double beta = rng.uniform();
        std::vector<double> sums;
        for (std::uint64_t mask = 0; mask < (1u << n); ++mask) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += ((mask >> i) & 1) ? v[i] : -v[i];
            sums.push_back(s);
        }
        std::size_t best = 0;
        for (double c : sums)
            for (double d : sums) {
                const double z = 0.5 * (c + d);
                best = std::max<std::size_t>(best, static_cast<std::size_t>(std::count_if(
                                                       sums.begin(), sums.end(),
                                                       [&](double s) { return std::abs(s - z) <= beta + 1e-12; })));
                const double z2 = c + beta;
                best = std::max<std::size_t>(best, static_cast<std::size_t>(std::count_if(
                                                       sums.begin(), sums.end(),
                                                       [&](double s) { return std::abs(s - z2) <= beta + 1e-12; })));
            }
        EXPECT_EQ(small_ball_prob(as_complex(v), beta, ExactFiniteSupport{}).estimate,
                  std::ldexp(static_cast<double>(best), -static_cast<int>(n)))
            << "seed=" << seed;
    }
}

TEST(SmallBall, MonotoneInBetaAndConcentrationAtZero)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto iv = random_nonzero(2 + seed % 12, 6, seed + 5);
        std::vector<complex> v(iv.begin(), iv.end());
        EXPECT_EQ(small_ball_prob(v, 0.0, ExactFiniteSupport{}).estimate,
                  concentration_prob(SignedVector(iv)).to_double());
        double prev = 0.0;
        for (double beta : {0.0, 0.5, 1.0, 1.5, 2.0, 4.0, 8.0, 100.0}) {
            const double p = small_ball_prob(v, beta, ExactFiniteSupport{}).estimate;
            EXPECT_GE(p, prev);
            prev = p;
        }
        EXPECT_EQ(prev, 1.0);
    }
}

TEST(SmallBall, ComplexModeIsLowerBound)
{
    const std::vector<complex> v{{1, 0}, {0, 1}, {1, 1}, {0.5, -0.25}, {-1, 2}};
    const auto r = small_ball_prob(v, 0.6, ExactFiniteSupport{});
    EXPECT_FALSE(r.exact);
    // Centers at sums: at least the atom itself.
    EXPECT_GE(r.estimate, 1.0 / 32.0);
    EXPECT_LE(r.estimate, 1.0);
    EXPECT_EQ(small_ball_prob(v, 100.0, ExactFiniteSupport{}).estimate, 1.0);
}

TEST(SmallBall, MonteCarloNearExact)
{
    const std::vector<double> v(12, 1.0);
    const double exact = small_ball_prob(as_complex(v), 0.0, ExactFiniteSupport{}).estimate;
    const auto mc = small_ball_prob(as_complex(v), 0.0, MonteCarlo{20000, 3});
    EXPECT_FALSE(mc.exact);
    EXPECT_GT(mc.std_error, 0.0);
    EXPECT_NEAR(mc.estimate, exact, 5.0 * mc.std_error);
    const auto again = small_ball_prob(as_complex(v), 0.0, MonteCarlo{20000, 3});
    EXPECT_EQ(mc.estimate, again.estimate);
}

TEST(Halasz, Examples)
{
    EXPECT_EQ(halasz_Rk(SignedVector({1, 1}), 1), 8u);
    EXPECT_EQ(halasz_Rk(SignedVector({1, 2}), 1), 4u);
    EXPECT_EQ(halasz_Rk(SignedVector({1}), 1), 2u);
    EXPECT_DOUBLE_EQ(halasz_ratio(SignedVector({1}), 1), 0.25);
    const double r = halasz_ratio(SignedVector({1, 2, 4, 8}), 1);
    EXPECT_TRUE(std::isfinite(r));
    EXPECT_GT(r, 0.0);
}

TEST(Halasz, MatchesBruteForce)
{
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t n = 1 + seed % 5;
        const auto v = random_nonzero(n, 4, seed + 31);
        for (unsigned k : {1u, 2u}) EXPECT_EQ(halasz_Rk(SignedVector(v), k), oracle::halasz_brute_force(v, k));
    }
}

TEST(Halasz, BudgetAndBoundedness)
{
    EXPECT_THROW(halasz_Rk(ones(200), 2), BudgetExceeded);
    for (unsigned k : {1u, 2u}) {
        std::vector<double> r;
        for (std::size_t n : {4u, 8u, 12u, 16u}) r.push_back(halasz_ratio(ones(n), k));
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        EXPECT_LT(*hi / *lo, 2.0) << "k=" << k;
    }
}

TEST(Gap, ElementsExamples)
{
    const auto a = gap_elements(GAP(0, {1}, {0}, {5}));
    EXPECT_EQ(a.elements, (std::vector<std::int64_t>{0, 1, 2, 3, 4, 5}));
    EXPECT_TRUE(a.proper);
    const auto b = gap_elements(GAP(0, {1, 2}, {0, 0}, {1, 1}));
    EXPECT_EQ(b.elements, (std::vector<std::int64_t>{0, 1, 2, 3}));
    EXPECT_TRUE(b.proper);
    const auto c = gap_elements(GAP(0, {1, 1}, {0, 0}, {1, 1}));
    EXPECT_EQ(c.elements, (std::vector<std::int64_t>{0, 1, 2}));
    EXPECT_FALSE(c.proper);

    const auto point = gap_elements(GAP(7, {}, {}, {}));
    EXPECT_EQ(point.elements, (std::vector<std::int64_t>{7}));
    EXPECT_TRUE(point.proper);
    EXPECT_THROW(GAP(0, {1}, {3}, {2}), InvalidArgument);
    EXPECT_THROW(gap_elements(GAP(0, {1, 100000}, {0, 0}, {99999, 999})), BudgetExceeded);
}

TEST(Gap, SampleVector)
{
    for (auto x : gap_sample_vector(GAP(0, {1}, {0}, {5}), 3, 1).values()) {
        EXPECT_GE(x, 0);
        EXPECT_LE(x, 5);
    }
    EXPECT_EQ(gap_sample_vector(GAP(7, {}, {}, {}), 4, 9).values(), (std::vector<std::int64_t>(4, 7)));
    const GAP q(0, {1}, {-100}, {100});
    EXPECT_EQ(gap_sample_vector(q, 20, 5).values(), gap_sample_vector(q, 20, 5).values());
    const auto v = gap_sample_vector(q, 20, 5);
    EXPECT_GE(concentration_prob(v).to_double(), 0.001 / (std::sqrt(20.0) * 100.0));
}

TEST(Gap, PigeonholeBound)
{
    EXPECT_DOUBLE_EQ(pigeonhole_lower_bound(GAP(0, {1}, {-100}, {100}), 25), 1.0 / (5.0 * 201.0));
    EXPECT_DOUBLE_EQ(pigeonhole_lower_bound(GAP(0, {1, 50}, {0, 0}, {9, 9}), 16), 1.0 / (16.0 * 100.0));
    EXPECT_EQ(pigeonhole_lower_bound(GAP(3, {}, {}, {}), 11), 1.0);
}

TEST(Gap, PigeonholeHoldsForSampledVectors)
{
    const std::vector<GAP> gaps{GAP(0, {1}, {-100}, {100}), GAP(3, {7}, {0}, {999}), GAP(0, {1, 40}, {-10, -5}, {10, 5}),
                                GAP(1, {3, 100}, {0, 0}, {19, 24})};
    for (const auto& q : gaps) {
        ASSERT_TRUE(gap_elements(q).proper);
        int ok = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const std::size_t n = 4 + seed % 21;
            const auto v = gap_sample_vector(q, n, seed);
            ok += concentration_prob(v).to_double() >= 0.01 * pigeonhole_lower_bound(q, n);
        }
        EXPECT_GE(ok, 95);
    }
}

TEST(Gap, JsonRoundTrip)
{
    const GAP q(2, {1, 9}, {-3, 0}, {3, 4});
    const auto j = to_json(q);
    EXPECT_EQ(j.dump(), R"({"a0":2,"generators":[1,9],"lower":[-3,0],"upper":[3,4]})");
    const auto back = gap_from_json(j);
    EXPECT_EQ(back.generators, q.generators);
    EXPECT_EQ(back.upper, q.upper);
    EXPECT_THROW(gap_from_json(nlohmann::json::parse(R"({"generators":[1],"lower":[0],"upper":[1],"x":1})")),
                 InvalidArgument);
    EXPECT_THROW(gap_from_json(nlohmann::json::parse(R"({"generators":[1],"lower":[0]})")), InvalidArgument);
}

TEST(Quadratic, Examples)
{
    EXPECT_EQ(quadratic_small_ball({{1, 1}, {1, 1}}), Dyadic(1, 1));
    EXPECT_EQ(quadratic_small_ball({{0, 1}, {1, 0}}), Dyadic(1, 1));
    EXPECT_EQ(quadratic_small_ball({{5}}), Dyadic(1, 0));
    EXPECT_THROW(quadratic_small_ball(std::vector<std::vector<std::int64_t>>(25, std::vector<std::int64_t>(25, 1))),
                 BudgetExceeded);
}

TEST(Quadratic, MatchesEnumerationOracle)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 1 + seed % 12;
        StreamRng rng(seed, 4);
        std::vector<std::vector<std::int64_t>> c(n, std::vector<std::int64_t>(n));
        for (auto& row : c)
            for (auto& x : row) x = static_cast<std::int64_t>(rng.below(7)) - 3;
        std::map<std::int64_t, std::uint64_t> law;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            std::int64_t q = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    q += c[i][j] * (((mask >> i) & 1) ? 1 : -1) * (((mask >> j) & 1) ? 1 : -1);
            ++law[q];
        }
        std::uint64_t best = 0;
        for (const auto& [q, cnt] : law) best = std::max(best, cnt);
        EXPECT_EQ(quadratic_small_ball(c), Dyadic(best, static_cast<int>(n))) << "seed=" << seed;
    }
}

TEST(Quadratic, AllOnesIsLawOfSquaredSum)
{
    // For C = all ones, Q = (sum xi)^2, so its atoms merge S = s and S = -s.
    for (unsigned n = 2; n <= 20; n += 2) {
        std::vector<std::vector<std::int64_t>> c(n, std::vector<std::int64_t>(n, 1));
        const auto law = exact_distribution(ones(n));
        Dyadic best = law.prob_at(0);
        for (std::int64_t s = 2; s <= static_cast<std::int64_t>(n); s += 2)
            best = std::max(best, law.prob_at(s) + law.prob_at(-s));
        EXPECT_EQ(quadratic_small_ball(c), best) << "n=" << n;
    }
    std::vector<std::vector<std::int64_t>> c12(12, std::vector<std::int64_t>(12, 1));
    // P(Q = 4) = 2 C(12, 7) / 2^12 exceeds P(Q = 0) = C(12, 6) / 2^12.
    EXPECT_EQ(quadratic_small_ball(c12), Dyadic(2 * 792, 12));
}
