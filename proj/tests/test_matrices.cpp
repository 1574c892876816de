#include <gtest/gtest.h>

#include <cmath>

#include "circlab/core/rng.hpp"
#include "circlab/matrices.hpp"

using namespace circlab;
using namespace circlab::matrices;

TEST(Philox, KnownAnswerVectors)
{
    // Random123 philox4x32-10 reference vectors.
    EXPECT_EQ(Philox(0)(0, 0)[0], 0xe169c58d6627e8d5ull);
    EXPECT_EQ(Philox(0)(0, 0)[1], 0x9b00dbd8bc57ac4cull);
    const auto b = Philox(0x299f31d0a4093822ull)(0x0370734413198a2eull, 0x85a308d3243f6a88ull);
    EXPECT_EQ(b[0], 0x94fdccebd16cfe09ull);
    EXPECT_EQ(b[1], 0x24126ea15001e420ull);
}

TEST(SampleMatrix, BernoulliSupport)
{
    const auto x = sample_matrix(EntryDistribution::bernoulli(), 3, 17);
    for (const auto& e : x.entries()) EXPECT_TRUE(e == complex{1.0} || e == complex{-1.0});
}

TEST(SampleMatrix, BernoulliMomentsMatchDirectTally)
{
    const auto x = sample_matrix(EntryDistribution::bernoulli(), 200, 2024);
    // Direct tally of the 40000 entries.
    long plus = 0, minus = 0;
    for (const auto& e : x.entries()) (e.real() > 0 ? plus : minus) += 1;
    ASSERT_EQ(plus + minus, 40000);
    const double mean = static_cast<double>(plus - minus) / 40000.0;
    const double var = 1.0 - mean * mean;
    EXPECT_LT(std::abs(mean), 0.1);
    EXPECT_LT(std::abs(var - 1.0), 0.1);

    double s = 0.0, s2 = 0.0;
    for (const auto& e : x.entries()) {
        s += e.real();
        s2 += e.real() * e.real();
    }
    EXPECT_DOUBLE_EQ(s / 40000.0, mean);
    EXPECT_NEAR(s2 / 40000.0 - (s / 40000.0) * (s / 40000.0), var, 1e-12);
}

TEST(SampleMatrix, PointMass)
{
    const auto d = EntryDistribution::discrete({{complex{5.0}, Rational(1)}});
    const auto x = sample_matrix(d, 2, 99);
    for (const auto& e : x.entries()) EXPECT_EQ(e, complex{5.0});
}

TEST(SampleMatrix, GaussianNormalizations)
{
    const auto r = sample_matrix(EntryDistribution::real_gaussian(), 150, 5);
    const auto c = sample_matrix(EntryDistribution::complex_gaussian(), 150, 5);
    double rv = 0.0, cre = 0.0, cim = 0.0, rm = 0.0;
    for (const auto& e : r.entries()) {
        EXPECT_EQ(e.imag(), 0.0);
        rm += e.real();
        rv += e.real() * e.real();
    }
    for (const auto& e : c.entries()) {
        cre += e.real() * e.real();
        cim += e.imag() * e.imag();
    }
    const double n = 150.0 * 150.0;
    EXPECT_LT(std::abs(rm / n), 0.03);
    EXPECT_NEAR(rv / n, 1.0, 0.05);
    EXPECT_NEAR(cre / n, 0.5, 0.03);
    EXPECT_NEAR(cim / n, 0.5, 0.03);
}

TEST(SampleMatrix, DiscreteFrequencies)
{
    const auto d = EntryDistribution::discrete({{complex{1.0}, Rational(1, 4)}, {complex{-1.0}, Rational(3, 4)}});
    const auto x = sample_matrix(d, 200, 8);
    long ones = 0;
    for (const auto& e : x.entries()) ones += e.real() > 0;
    EXPECT_NEAR(static_cast<double>(ones) / 40000.0, 0.25, 0.01);
}

TEST(EntryDistribution, RejectsBadProbabilities)
{
    EXPECT_THROW(EntryDistribution::discrete({{complex{1.0}, Rational(1, 2)}}), InvalidArgument);
    EXPECT_THROW(EntryDistribution::discrete({{complex{1.0}, Rational(3, 2)}, {complex{0.0}, Rational(-1, 2)}}),
                 InvalidArgument);
    EXPECT_THROW(EntryDistribution::discrete({{complex{1.0}, Rational(0)}, {complex{0.0}, Rational(1)}}),
                 InvalidArgument);
    EXPECT_THROW(EntryDistribution::discrete({}), InvalidArgument);
}

TEST(EntryDistribution, ReportedMoments)
{
    for (const auto& d : {EntryDistribution::bernoulli(), EntryDistribution::real_gaussian(),
                          EntryDistribution::complex_gaussian()}) {
        EXPECT_EQ(d.mean(), complex{});
        EXPECT_EQ(d.variance(), 1.0);
    }
    const auto d = EntryDistribution::discrete({{complex{2.0}, Rational(1, 2)}, {complex{0.0, 2.0}, Rational(1, 2)}});
    EXPECT_NEAR(std::abs(d.mean() - complex{1.0, 1.0}), 0.0, 1e-15);
    EXPECT_NEAR(d.variance(), 2.0, 1e-15);
}

TEST(BuildShift, Examples)
{
    auto s = build_shift(ShiftSpec::two_block(4, 1.0, 2.5));
    EXPECT_EQ(s.a, diag({1.0, 1.0, 2.5, 2.5}));
    EXPECT_FALSE(s.b.has_value());

    s = build_shift(ShiftSpec::identity(3));
    EXPECT_EQ(s.a, DenseMatrix::identity(3));

    s = build_shift(ShiftSpec::sandwich(4, 1.0, 5.0, 1.0, 2.0));
    EXPECT_EQ(s.a, diag({1.0, 1.0, 5.0, 5.0}));
    ASSERT_TRUE(s.b.has_value());
    EXPECT_EQ(*s.b, diag({1.0, 1.0, 2.0, 2.0}));
}

TEST(BuildShift, OddDimensionRejectedForBlockKinds)
{
    EXPECT_THROW(build_shift(ShiftSpec::two_block(5, 1.0, 2.0)), InvalidArgument);
    EXPECT_THROW(build_shift(ShiftSpec::sandwich(3, 1, 1, 1, 1)), InvalidArgument);
    EXPECT_NO_THROW(build_shift(ShiftSpec::identity(5)));
}

namespace {

ExperimentConfig config(std::size_t n, EntryDistribution d, ShiftSpec s, std::uint64_t seed = 1)
{
    ExperimentConfig c;
    c.n = n;
    c.seed = seed;
    c.distribution = std::move(d);
    c.shift = s;
    return c;
}

} // namespace

TEST(AssembleEnsemble, Examples)
{
    const auto ones = EntryDistribution::discrete({{complex{1.0}, Rational(1)}});
    EXPECT_EQ(assemble_ensemble(config(2, ones, ShiftSpec::zero(2))), DenseMatrix(2, 2, complex{1.0}));

    const auto zero = EntryDistribution::discrete({{complex{0.0}, Rational(1)}});
    EXPECT_EQ(assemble_ensemble(config(2, zero, ShiftSpec::identity(2))), DenseMatrix::identity(2));

    const auto c = config(6, EntryDistribution::real_gaussian(), ShiftSpec::sandwich(6, 0, 0, 1, 1), 3);
    EXPECT_EQ(assemble_ensemble(c), sample_matrix(c.distribution, 6, 3));
}

TEST(AssembleEnsemble, ZeroShiftEqualsSampleAndIsDeterministic)
{
    const auto c = config(30, EntryDistribution::complex_gaussian(), ShiftSpec::zero(30), 42);
    EXPECT_EQ(assemble_ensemble(c), sample_matrix(c.distribution, 30, 42));
    EXPECT_EQ(assemble_ensemble(c, 5), assemble_ensemble(c, 5));
    EXPECT_NE(assemble_ensemble(c, 5), assemble_ensemble(c, 6));
}

TEST(AssembleEnsemble, SandwichFormula)
{
    const auto c = config(4, EntryDistribution::real_gaussian(), ShiftSpec::sandwich(4, 1, 5, 1, 2), 9);
    const auto x = sample_matrix(c.distribution, 4, 9);
    const auto s = build_shift(c.shift);
    EXPECT_EQ(assemble_ensemble(c), s.a + (*s.b) * x * (*s.b));
}

TEST(AssembleEnsemble, NormalizedScalesNoiseOnly)
{
    const auto c = config(16, EntryDistribution::bernoulli(), ShiftSpec::two_block(16, 1.0, 2.5), 4);
    const auto x = sample_matrix(c.distribution, 16, 4);
    const auto got = assemble_normalized(c);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) {
            const complex shift = i == j ? complex{i < 8 ? 1.0 : 2.5} : complex{};
            EXPECT_NEAR(std::abs(got(i, j) - (shift + x(i, j) / 4.0)), 0.0, 1e-15);
        }
}

TEST(AssembleEnsemble, RejectsMismatchedShift)
{
    auto c = config(4, EntryDistribution::bernoulli(), ShiftSpec::identity(3));
    EXPECT_THROW(assemble_ensemble(c), InvalidArgument);
}

TEST(SampleMatrix, IndependenceProxyAcrossTrials)
{
    // Correlation between two fixed entry positions over 1000 trials.
    const auto d = EntryDistribution::bernoulli();
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const auto x = sample_matrix(d, 200, 77, static_cast<std::uint64_t>(t));
        const double a = x(3, 5).real(), b = x(150, 20).real();
        sx += a;
        sy += b;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    const double n = trials;
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double corr = cov / std::sqrt((sxx / n - sx * sx / (n * n)) * (syy / n - sy * sy / (n * n)));
    EXPECT_LT(std::abs(corr), 0.15);
}

TEST(SampleHermitian, IsHermitian)
{
    const auto h = sample_hermitian(EntryDistribution::complex_gaussian(), 12, 1);
    EXPECT_TRUE(is_hermitian(h));
}

TEST(ConfigJson, RoundTripAndDefaults)
{
    const auto j = nlohmann::json::parse(R"({
        "seed": 7, "n": 4, "trials": 3,
        "distribution": {"kind": "DiscreteCustom", "atoms": [{"value": 1, "prob": "1/3"},
                                                             {"value": [0, -1], "prob": "2/3"}]},
        "shift": {"kind": "Sandwich", "d1": 1, "d2": 5, "b1": 1, "b2": 2},
        "extra": {"grid": 32, "x_grid": [10, 100]}
    })");
    const auto c = config_from_json(j);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.distribution.atoms()[1].value, (complex{0.0, -1.0}));
    EXPECT_EQ(c.shift, ShiftSpec::sandwich(4, 1, 5, 1, 2));
    EXPECT_EQ(c.get<int>("grid", 64), 32);
    EXPECT_EQ(c.get<int>("missing", 64), 64);
    const auto back = config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_EQ(back.distribution, c.distribution);

    const auto d = config_from_json(nlohmann::json::parse(R"({"n": 5, "distribution": "BernoulliSym", "shift": "Identity"})"));
    EXPECT_EQ(d.shift, ShiftSpec::identity(5));
    EXPECT_EQ(d.trials, 1u);
}

TEST(ConfigJson, ErrorsNameTheOffendingKey)
{
    auto message = [](const char* text) {
        try {
            config_from_json(nlohmann::json::parse(text));
        } catch (const InvalidArgument& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message(R"({"n": 0})").find("n:"), std::string::npos);
    EXPECT_NE(message(R"({"bogus": 1})").find("bogus"), std::string::npos);
    EXPECT_NE(message(R"({"shift": {"kind": "TwoBlockDiag", "v1": 1}})").find("shift.v2"), std::string::npos);
    EXPECT_NE(message(R"({"distribution": "Cauchy"})").find("distribution.kind"), std::string::npos);
    EXPECT_NE(message(R"({"extra": {"a": {"b": 1}}})").find("extra.a"), std::string::npos);
    EXPECT_NE(message(R"({"seed": -1})").find("seed"), std::string::npos);
}
