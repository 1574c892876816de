#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "circlab/core/error.hpp"
#include "circlab/core/matrix.hpp"
#include "circlab/core/rational.hpp"
#include "circlab/core/rng.hpp"

namespace circlab::matrices {

// ---------------------------------------------------------------------------
// Entry distributions
// ---------------------------------------------------------------------------

struct Atom {
    complex value;
    Rational prob;
};

/// Law of a single matrix entry.
///
/// ComplexGaussian draws real and imaginary parts independently with variance
/// 1/2 each, so E|x|^2 = 1 like the other built-in kinds.
class EntryDistribution {
public:
    enum class Kind { BernoulliSym, RealGaussian, ComplexGaussian, DiscreteCustom };

    static EntryDistribution bernoulli() { return EntryDistribution(Kind::BernoulliSym); }
    static EntryDistribution real_gaussian() { return EntryDistribution(Kind::RealGaussian); }
    static EntryDistribution complex_gaussian() { return EntryDistribution(Kind::ComplexGaussian); }

    /// Finite support; probabilities must be positive and sum to exactly 1.
    static EntryDistribution discrete(std::vector<Atom> atoms)
    {
        detail::require(!atoms.empty(), "DiscreteCustom needs at least one atom");
        Rational total(0);
        for (const auto& a : atoms) {
            detail::require(a.prob > Rational(0), "DiscreteCustom probability must be positive, got " + a.prob.str());
            detail::require(std::isfinite(a.value.real()) && std::isfinite(a.value.imag()),
                            "DiscreteCustom atom must be finite");
            total = total + a.prob;
        }
        detail::require(total == Rational(1), "DiscreteCustom probabilities sum to " + total.str() + ", not 1");

        EntryDistribution d(Kind::DiscreteCustom);
        d.atoms_ = std::move(atoms);
        // Cumulative thresholds on the 64-bit draw; the last one is open-ended.
        Rational cum(0);
        for (std::size_t k = 0; k + 1 < d.atoms_.size(); ++k) {
            cum = cum + d.atoms_[k].prob;
            const u128 scaled = (static_cast<u128>(cum.num()) << 64) / static_cast<u128>(cum.den());
            d.thresholds_.push_back(static_cast<std::uint64_t>(scaled));
        }
        return d;
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }

    [[nodiscard]] complex mean() const
    {
        if (kind_ != Kind::DiscreteCustom) return {0.0, 0.0};
        complex m{};
        for (const auto& a : atoms_) m += a.prob.to_double() * a.value;
        return m;
    }

    /// E|x - E x|^2.
    [[nodiscard]] double variance() const
    {
        if (kind_ != Kind::DiscreteCustom) return 1.0;
        const complex m = mean();
        double v = 0.0;
        for (const auto& a : atoms_) v += a.prob.to_double() * abs2(a.value - m);
        return v;
    }

    [[nodiscard]] bool is_real() const noexcept
    {
        if (kind_ == Kind::ComplexGaussian) return false;
        for (const auto& a : atoms_)
            if (a.value.imag() != 0.0) return false;
        return true;
    }

    /// One entry from one Philox block.
    [[nodiscard]] complex draw(const Philox::block& b) const noexcept
    {
        switch (kind_) {
        case Kind::BernoulliSym:
            return (b[0] >> 63) ? complex{1.0, 0.0} : complex{-1.0, 0.0};
        case Kind::RealGaussian:
            return {normal_pair(b).first, 0.0};
        case Kind::ComplexGaussian: {
            const auto [x, y] = normal_pair(b);
            return {x * std::numbers::sqrt2 / 2.0, y * std::numbers::sqrt2 / 2.0};
        }
        case Kind::DiscreteCustom:
            for (std::size_t k = 0; k < thresholds_.size(); ++k)
                if (b[0] < thresholds_[k]) return atoms_[k].value;
            return atoms_.back().value;
        }
        return {};
    }

    [[nodiscard]] std::string name() const
    {
        switch (kind_) {
        case Kind::BernoulliSym: return "BernoulliSym";
        case Kind::RealGaussian: return "RealGaussian";
        case Kind::ComplexGaussian: return "ComplexGaussian";
        case Kind::DiscreteCustom: return "DiscreteCustom";
        }
        return {};
    }

    friend bool operator==(const EntryDistribution& a, const EntryDistribution& b)
    {
        if (a.kind_ != b.kind_ || a.atoms_.size() != b.atoms_.size()) return false;
        for (std::size_t k = 0; k < a.atoms_.size(); ++k)
            if (a.atoms_[k].value != b.atoms_[k].value || a.atoms_[k].prob != b.atoms_[k].prob) return false;
        return true;
    }

private:
    explicit EntryDistribution(Kind k) : kind_(k) {}

    Kind kind_;
    std::vector<Atom> atoms_;
    std::vector<std::uint64_t> thresholds_;
};

// ---------------------------------------------------------------------------
// Deterministic shifts
// ---------------------------------------------------------------------------

struct ShiftSpec {
    enum class Kind { Zero, Identity, TwoBlockDiag, Sandwich };

    Kind kind = Kind::Zero;
    std::size_t n = 1;
    double v1 = 0.0, v2 = 0.0;                     // TwoBlockDiag
    double d1 = 0.0, d2 = 0.0, b1 = 0.0, b2 = 0.0; // Sandwich: A values, B values

    static ShiftSpec zero(std::size_t n) { return {Kind::Zero, n}; }
    static ShiftSpec identity(std::size_t n) { return {Kind::Identity, n}; }
    static ShiftSpec two_block(std::size_t n, double v1, double v2)
    {
        ShiftSpec s{Kind::TwoBlockDiag, n};
        s.v1 = v1;
        s.v2 = v2;
        return s;
    }
    static ShiftSpec sandwich(std::size_t n, double d1, double d2, double b1, double b2)
    {
        ShiftSpec s{Kind::Sandwich, n};
        s.d1 = d1;
        s.d2 = d2;
        s.b1 = b1;
        s.b2 = b2;
        return s;
    }

    [[nodiscard]] std::string name() const
    {
        switch (kind) {
        case Kind::Zero: return "Zero";
        case Kind::Identity: return "Identity";
        case Kind::TwoBlockDiag: return "TwoBlockDiag";
        case Kind::Sandwich: return "Sandwich";
        }
        return {};
    }

    friend bool operator==(const ShiftSpec&, const ShiftSpec&) = default;
};

/// Materialized shift. For the additive kinds `a` is M; for Sandwich the
/// ensemble is a + b X b.
struct Shift {
    DenseMatrix a;
    std::optional<DenseMatrix> b;
};

namespace detail {

inline std::vector<complex> two_block_values(std::size_t n, double first, double second)
{
    std::vector<complex> d(n, complex{second, 0.0});
    std::fill(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n / 2), complex{first, 0.0});
    return d;
}

} // namespace detail

inline Shift build_shift(const ShiftSpec& spec)
{
    circlab::detail::require(spec.n >= 1, "shift dimension must be positive");
    const bool block = spec.kind == ShiftSpec::Kind::TwoBlockDiag || spec.kind == ShiftSpec::Kind::Sandwich;
    circlab::detail::require(!block || spec.n % 2 == 0,
                             spec.name() + " shift needs even n, got " + std::to_string(spec.n));
    switch (spec.kind) {
    case ShiftSpec::Kind::Zero: return {DenseMatrix(spec.n, spec.n), std::nullopt};
    case ShiftSpec::Kind::Identity: return {DenseMatrix::identity(spec.n), std::nullopt};
    case ShiftSpec::Kind::TwoBlockDiag:
        return {DenseMatrix::diagonal(detail::two_block_values(spec.n, spec.v1, spec.v2)), std::nullopt};
    case ShiftSpec::Kind::Sandwich:
        return {DenseMatrix::diagonal(detail::two_block_values(spec.n, spec.d1, spec.d2)),
                DenseMatrix::diagonal(detail::two_block_values(spec.n, spec.b1, spec.b2))};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// n x n matrix with iid entries. Entry (i, j) of trial `stream` is a pure
/// function of (seed, stream, i*n + j).
inline DenseMatrix sample_matrix(const EntryDistribution& dist, std::size_t n, std::uint64_t seed,
                                 std::uint64_t stream = 0)
{
    circlab::detail::require(n >= 1, "sample_matrix needs n >= 1");
    const Philox gen(seed);
    DenseMatrix x(n, n);
    auto e = x.entries();
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = dist.draw(gen(stream, k));
    return x;
}

/// Hermitian matrix with iid upper triangle (diagonal included) mirrored below.
/// Diagonal entries keep only their real part.
inline DenseMatrix sample_hermitian(const EntryDistribution& dist, std::size_t n, std::uint64_t seed,
                                    std::uint64_t stream = 0)
{
    circlab::detail::require(n >= 1, "sample_hermitian needs n >= 1");
    const Philox gen(seed);
    DenseMatrix x(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, i) = dist.draw(gen(stream, i * n + i)).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            x(i, j) = dist.draw(gen(stream, i * n + j));
            x(j, i) = std::conj(x(i, j));
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::size_t n = 1;
    std::size_t trials = 1;
    EntryDistribution distribution = EntryDistribution::bernoulli();
    ShiftSpec shift = ShiftSpec::zero(1);
    nlohmann::json extra = nlohmann::json::object();

    [[nodiscard]] bool has(const std::string& key) const { return extra.contains(key); }

    template <typename T>
    [[nodiscard]] T get(const std::string& key, T fallback) const
    {
        if (!extra.contains(key)) return fallback;
        try {
            return extra.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw InvalidArgument("extra." + key + " has the wrong type");
        }
    }
};

namespace detail {

inline DenseMatrix apply_shift(const ExperimentConfig& cfg, DenseMatrix x)
{
    const std::size_t n = cfg.n;
    switch (cfg.shift.kind) {
    case ShiftSpec::Kind::Zero: return x;
    case ShiftSpec::Kind::Sandwich: {
        const Shift s = build_shift(cfg.shift);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) x(i, j) *= (*s.b)(i, i) * (*s.b)(j, j);
        for (std::size_t i = 0; i < n; ++i) x(i, i) += s.a(i, i);
        return x;
    }
    default: {
        const Shift s = build_shift(cfg.shift);
        for (std::size_t i = 0; i < n; ++i) x(i, i) += s.a(i, i);
        return x;
    }
    }
}

inline void check_shift_size(const ExperimentConfig& cfg)
{
    circlab::detail::require(cfg.shift.n == cfg.n, "shift dimension " + std::to_string(cfg.shift.n) +
                                                       " does not match n = " + std::to_string(cfg.n));
}

} // namespace detail

/// M + X for additive shifts, A + B X B for Sandwich, X for Zero.
inline DenseMatrix assemble_ensemble(const ExperimentConfig& cfg, std::uint64_t trial = 0)
{
    detail::check_shift_size(cfg);
    return detail::apply_shift(cfg, sample_matrix(cfg.distribution, cfg.n, cfg.seed, trial));
}

/// Same construction with the noise scaled to X / sqrt(n) while the shift is
/// kept at unit scale: M + X/sqrt(n), or A + B (X/sqrt(n)) B. This is the
/// matrix whose spectrum the scatter experiments look at (a disk of radius
/// about 1 around each shifted block).
inline DenseMatrix assemble_normalized(const ExperimentConfig& cfg, std::uint64_t trial = 0)
{
    detail::check_shift_size(cfg);
    DenseMatrix x = sample_matrix(cfg.distribution, cfg.n, cfg.seed, trial);
    x *= complex{1.0 / std::sqrt(static_cast<double>(cfg.n)), 0.0};
    return detail::apply_shift(cfg, std::move(x));
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const EntryDistribution& d)
{
    nlohmann::json j{{"kind", d.name()}};
    if (d.kind() == EntryDistribution::Kind::DiscreteCustom) {
        auto atoms = nlohmann::json::array();
        for (const auto& a : d.atoms())
            atoms.push_back({{"value", {a.value.real(), a.value.imag()}}, {"prob", a.prob.str()}});
        j["atoms"] = atoms;
    }
    return j;
}

inline EntryDistribution distribution_from_json(const nlohmann::json& j)
{
    const std::string kind = j.is_string() ? j.get<std::string>()
                             : j.is_object() && j.contains("kind") && j["kind"].is_string()
                                 ? j["kind"].get<std::string>()
                                 : throw InvalidArgument("distribution: expected a kind name or {\"kind\": ...}");
    if (kind == "BernoulliSym") return EntryDistribution::bernoulli();
    if (kind == "RealGaussian") return EntryDistribution::real_gaussian();
    if (kind == "ComplexGaussian") return EntryDistribution::complex_gaussian();
    if (kind != "DiscreteCustom") throw InvalidArgument("distribution.kind: unknown kind '" + kind + "'");

    if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
        throw InvalidArgument("distribution.atoms: DiscreteCustom needs an atoms array");
    std::vector<Atom> atoms;
    for (const auto& a : j["atoms"]) {
        if (!a.is_object() || !a.contains("value") || !a.contains("prob"))
            throw InvalidArgument("distribution.atoms: each atom needs value and prob");
        complex v;
        const auto& jv = a["value"];
        if (jv.is_number()) v = {jv.get<double>(), 0.0};
        else if (jv.is_array() && jv.size() == 2 && jv[0].is_number() && jv[1].is_number())
            v = {jv[0].get<double>(), jv[1].get<double>()};
        else throw InvalidArgument("distribution.atoms.value: expected a number or [re, im]");
        const auto& jp = a["prob"];
        Rational p;
        if (jp.is_string()) p = Rational::parse(jp.get<std::string>());
        else if (jp.is_number_integer()) p = Rational(jp.get<std::int64_t>());
        else throw InvalidArgument("distribution.atoms.prob: expected an exact rational string like \"1/2\"");
        atoms.push_back({v, p});
    }
    return EntryDistribution::discrete(std::move(atoms));
}

inline nlohmann::json to_json(const ShiftSpec& s)
{
    nlohmann::json j{{"kind", s.name()}};
    if (s.kind == ShiftSpec::Kind::TwoBlockDiag) {
        j["v1"] = s.v1;
        j["v2"] = s.v2;
    } else if (s.kind == ShiftSpec::Kind::Sandwich) {
        j["d1"] = s.d1;
        j["d2"] = s.d2;
        j["b1"] = s.b1;
        j["b2"] = s.b2;
    }
    return j;
}

inline ShiftSpec shift_from_json(const nlohmann::json& j, std::size_t n)
{
    const std::string kind = j.is_string() ? j.get<std::string>()
                             : j.is_object() && j.contains("kind") && j["kind"].is_string()
                                 ? j["kind"].get<std::string>()
                                 : throw InvalidArgument("shift: expected a kind name or {\"kind\": ...}");
    auto num = [&](const char* key) {
        if (!j.is_object() || !j.contains(key) || !j[key].is_number())
            throw InvalidArgument(std::string("shift.") + key + ": required number for " + kind);
        return j[key].get<double>();
    };
    if (kind == "Zero") return ShiftSpec::zero(n);
    if (kind == "Identity") return ShiftSpec::identity(n);
    if (kind == "TwoBlockDiag") return ShiftSpec::two_block(n, num("v1"), num("v2"));
    if (kind == "Sandwich") return ShiftSpec::sandwich(n, num("d1"), num("d2"), num("b1"), num("b2"));
    throw InvalidArgument("shift.kind: unknown kind '" + kind + "'");
}

inline nlohmann::json to_json(const ExperimentConfig& c)
{
    return {{"seed", c.seed},
            {"n", c.n},
            {"trials", c.trials},
            {"distribution", to_json(c.distribution)},
            {"shift", to_json(c.shift)},
            {"extra", c.extra}};
}

/// Parses a flat config object. Missing optional fields fall back to the
/// defaults of ExperimentConfig; unknown top-level keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
    static const char* known[] = {"seed", "n", "trials", "distribution", "shift", "extra"};
    for (const auto& [key, _] : j.items())
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
            std::end(known))
            throw InvalidArgument("config: unknown key '" + key + "'");

    ExperimentConfig c;
    auto positive = [&](const char* key, std::size_t fallback) -> std::size_t {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_number_integer() || j[key].get<std::int64_t>() < 1)
            throw InvalidArgument(std::string(key) + ": expected a positive integer");
        return j[key].get<std::size_t>();
    };
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw InvalidArgument("seed: expected an unsigned 64-bit integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.n = positive("n", c.n);
    c.trials = positive("trials", c.trials);
    if (j.contains("distribution")) c.distribution = distribution_from_json(j["distribution"]);
    c.shift = j.contains("shift") ? shift_from_json(j["shift"], c.n) : ShiftSpec::zero(c.n);
    if (j.contains("extra")) {
        if (!j["extra"].is_object()) throw InvalidArgument("extra: expected an object");
        for (const auto& [key, value] : j["extra"].items())
            if (value.is_object()) throw InvalidArgument("extra." + key + ": nested objects are not allowed");
        c.extra = j["extra"];
    }
    return c;
}

} // namespace circlab::matrices
