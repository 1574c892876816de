#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "circlab/core/error.hpp"
#include "circlab/core/format.hpp"
#include "circlab/core/parallel.hpp"
#include "circlab/linalg.hpp"
#include "circlab/lo.hpp"
#include "circlab/matrices.hpp"
#include "circlab/smoothed.hpp"
#include "circlab/spectral.hpp"

namespace circlab::cli {

enum ExitCode : int { ok = 0, config_error = 2, numerical_failure = 3 };

struct Command {
    std::string subcommand;
    std::string config;               // path, inline JSON, or empty
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;
    bool force = false;
    std::size_t threads = 1;
};

inline const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"esd", "universality", "lo", "gap", "condition", "distance", "verify"};
    return names;
}

inline constexpr const char* columns_help = R"(Output files (CSV floats use 17 significant digits):
  every run     config.echo.json   resolved config; pass it back via --config to reproduce
  esd           atoms.csv          re,im
                result.csv         radius,fraction_within,circular_law_mass
                distances.csv      reference,grid,distance
                scatter.svg        when extra.svg is true
  universality  atoms.csv          re,im (config distribution)
                atoms_reference.csv re,im (extra.reference distribution)
                result.csv         z_re,z_im,logdet,logdet_reference,abs_diff
                distances.csv      grid,distance
                scatter.svg        when extra.svg is true
  lo            result.csv         value,numerator,log2_denominator
                summary.csv        key,value
  gap           gap.json           {a0, generators, lower, upper}
                result.csv         trial,concentration_prob,benchmark,passes
  condition     result.csv         x,survival,bound
  distance      result.csv         trial,distance,threshold
  verify        (stdout only)      one PASS/FAIL line per identity check
)";

using Outputs = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline nlohmann::json load_config(const std::string& arg)
{
    std::string text = arg;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return nlohmann::json::object();
    if (text[first] != '{') {
        std::ifstream in(arg);
        if (!in) throw InvalidArgument("config: cannot read '" + arg + "'");
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("config: invalid JSON: ") + e.what());
    }
}

// Resolves extra.<key> against its default and records the default in the
// config so the echo is complete.
class Extras {
public:
    Extras(matrices::ExperimentConfig& cfg, std::vector<std::string> allowed) : cfg_(cfg), allowed_(std::move(allowed))
    {
        for (const auto& [key, _] : cfg_.extra.items())
            if (std::find(allowed_.begin(), allowed_.end(), key) == allowed_.end())
                throw InvalidArgument("extra." + key + ": not a parameter of this subcommand");
    }

    template <typename T>
    T get(const std::string& key, const T& fallback)
    {
        if (!cfg_.extra.contains(key)) cfg_.extra[key] = fallback;
        return read<T>(key);
    }

    template <typename T>
    T require(const std::string& key)
    {
        if (!cfg_.extra.contains(key)) throw InvalidArgument("extra." + key + ": required");
        return read<T>(key);
    }

    [[nodiscard]] bool has(const std::string& key) const { return cfg_.extra.contains(key); }
    const nlohmann::json& raw(const std::string& key) const { return cfg_.extra.at(key); }

private:
    template <typename T>
    T read(const std::string& key)
    {
        try {
            return cfg_.extra.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw InvalidArgument("extra." + key + ": wrong type");
        }
    }

    matrices::ExperimentConfig& cfg_;
    std::vector<std::string> allowed_;
};

inline complex parse_point(const nlohmann::json& j, const std::string& what)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw InvalidArgument(what + ": expected a number or [re, im]");
}

inline std::string csv_row(std::initializer_list<std::string> cells)
{
    std::string row;
    for (const auto& c : cells) row += (row.empty() ? "" : ",") + c;
    return row + "\n";
}

/// Minimal static scatter plot: one circle per atom, one color per series.
inline std::string scatter_svg(const std::vector<std::vector<complex>>& series)
{
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (const auto& z : s) {
            x0 = std::min(x0, z.real()), x1 = std::max(x1, z.real());
            y0 = std::min(y0, z.imag()), y1 = std::max(y1, z.imag());
        }
    const double span = std::max({x1 - x0, y1 - y0, 1e-9}) * 1.05;
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double size = 600.0;
    auto px = [&](double x) { return size * (0.5 + (x - cx) / span); };
    auto py = [&](double y) { return size * (0.5 - (y - cy) / span); };
    char buf[128];
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n"
                      "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<line x1=\"0\" y1=\"%.3f\" x2=\"600\" y2=\"%.3f\" stroke=\"#999\"/>\n", py(0.0),
                  py(0.0));
    out += buf;
    std::snprintf(buf, sizeof buf, "<line x1=\"%.3f\" y1=\"0\" x2=\"%.3f\" y2=\"600\" stroke=\"#999\"/>\n", px(0.0),
                  px(0.0));
    out += buf;
    for (std::size_t k = 0; k < series.size(); ++k)
        for (const auto& z : series[k]) {
            std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"1.5\" fill=\"%s\"/>\n", px(z.real()),
                          py(z.imag()), colors[k % 3]);
            out += buf;
        }
    return out + "</svg>\n";
}

// Eigenvalues of every trial matrix, concatenated in trial order.
inline std::vector<complex> pooled_spectrum(std::size_t trials, std::size_t threads, double tol,
                                            const std::function<DenseMatrix(std::uint64_t)>& make)
{
    std::vector<std::vector<complex>> per(trials);
    parallel_for(trials, threads, [&](std::size_t t) { per[t] = linalg::eigenvalues(make(t), tol).eigenvalues; });
    std::vector<complex> all;
    for (auto& p : per) all.insert(all.end(), p.begin(), p.end());
    return all;
}

inline std::string atoms_csv(const std::vector<complex>& atoms)
{
    return spectral::to_csv(spectral::EmpiricalMeasure(atoms));
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline Outputs run_esd(matrices::ExperimentConfig& cfg, std::size_t threads, std::ostream& log)
{
    Extras ex(cfg, {"normalize", "hermitian", "radii", "center", "svg", "grid", "tol"});
    const bool normalize = ex.get("normalize", true);
    const bool hermitian = ex.get("hermitian", false);
    const auto radii = ex.get("radii", std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.25});
    ex.get("center", nlohmann::json("mean"));
    const bool svg = ex.get("svg", false);
    const auto grid = ex.get("grid", std::size_t{64});
    const double tol = ex.get("tol", 1e-10);
    if (hermitian && cfg.shift.kind != matrices::ShiftSpec::Kind::Zero)
        throw InvalidArgument("extra.hermitian: only supported with the Zero shift");
    for (double r : radii) circlab::detail::require(r >= 0.0, "extra.radii: radii must be nonnegative");

    const double scale = normalize ? 1.0 / std::sqrt(static_cast<double>(cfg.n)) : 1.0;
    const auto atoms = pooled_spectrum(cfg.trials, threads, tol, [&](std::uint64_t t) {
        if (hermitian) {
            DenseMatrix h = matrices::sample_hermitian(cfg.distribution, cfg.n, cfg.seed, t);
            h *= complex(scale);
            return h;
        }
        return normalize ? matrices::assemble_normalized(cfg, t) : matrices::assemble_ensemble(cfg, t);
    });

    complex center{};
    const auto& jc = ex.raw("center");
    if (jc.is_string()) {
        if (jc.get<std::string>() != "mean") throw InvalidArgument("extra.center: expected \"mean\" or [re, im]");
        for (const auto& z : atoms) center += z;
        center /= static_cast<double>(atoms.size());
    } else {
        center = parse_point(jc, "extra.center");
    }

    std::vector<complex> centered;
    for (const auto& z : atoms) centered.push_back(z - center);
    std::string result = "radius,fraction_within,circular_law_mass\n";
    for (double r : radii) {
        const auto hits = std::count_if(centered.begin(), centered.end(), [&](complex z) { return std::abs(z) <= r; });
        const double frac = static_cast<double>(hits) / static_cast<double>(atoms.size());
        result += csv_row({fmt17(r), fmt17(frac), fmt17(spectral::law_mass(spectral::ReferenceLaw::CircularUnit,
                                                                           spectral::Disk{r}))});
    }
    const auto law = hermitian ? spectral::ReferenceLaw::Semicircle : spectral::ReferenceLaw::CircularUnit;
    const double dist = spectral::measure_distance(spectral::EmpiricalMeasure(centered), law, grid);
    const std::string distances = "reference,grid,distance\n" +
                                  csv_row({hermitian ? "Semicircle" : "CircularUnit", std::to_string(grid), fmt17(dist)});
    log << "esd: " << atoms.size() << " eigenvalues, center (" << fmt17(center.real()) << ", "
        << fmt17(center.imag()) << "), distance to " << (hermitian ? "Semicircle" : "CircularUnit") << " "
        << fmt17(dist) << "\n";

    Outputs out{{"atoms.csv", atoms_csv(atoms)}, {"result.csv", result}, {"distances.csv", distances}};
    if (svg) out.emplace_back("scatter.svg", scatter_svg({atoms}));
    return out;
}

inline Outputs run_universality(matrices::ExperimentConfig& cfg, std::size_t threads, std::ostream& log)
{
    Extras ex(cfg, {"reference", "z", "grid", "svg", "tol"});
    const auto ref_name = ex.get("reference", std::string("RealGaussian"));
    const auto zs_json = ex.get("z", nlohmann::json::array({nlohmann::json::array({0.5, 0.5}),
                                                            nlohmann::json::array({2.0, 0.0}),
                                                            nlohmann::json::array({0.0, 2.0})}));
    const auto grid = ex.get("grid", std::size_t{64});
    const bool svg = ex.get("svg", false);
    const double tol = ex.get("tol", 1e-10);
    if (!zs_json.is_array()) throw InvalidArgument("extra.z: expected an array of points");
    std::vector<complex> zs;
    for (const auto& z : zs_json) zs.push_back(parse_point(z, "extra.z"));

    matrices::ExperimentConfig other = cfg;
    other.distribution = matrices::distribution_from_json(ref_name);
    const auto a = pooled_spectrum(cfg.trials, threads, tol,
                                   [&](std::uint64_t t) { return matrices::assemble_normalized(cfg, t); });
    const auto b = pooled_spectrum(cfg.trials, threads, tol,
                                   [&](std::uint64_t t) { return matrices::assemble_normalized(other, t); });

    const auto logdet = [](const std::vector<complex>& atoms, complex z) {
        double acc = 0.0;
        for (const auto& l : atoms) {
            const double d = std::abs(l - z);
            if (d < spectral::pseudospectrum_guard)
                throw spectral::PseudospectrumProximity("universality: z = (" + fmt17(z.real()) + ", " +
                                                        fmt17(z.imag()) + ") lies on the spectrum");
            acc += std::log(d);
        }
        return acc / static_cast<double>(atoms.size());
    };
    std::string result = "z_re,z_im,logdet,logdet_reference,abs_diff\n";
    for (const auto& z : zs) {
        const double la = logdet(a, z), lb = logdet(b, z);
        result += csv_row({fmt17(z.real()), fmt17(z.imag()), fmt17(la), fmt17(lb), fmt17(std::abs(la - lb))});
    }
    const double dist = spectral::measure_distance(spectral::EmpiricalMeasure(a), spectral::EmpiricalMeasure(b), grid);
    log << "universality: " << cfg.distribution.name() << " vs " << ref_name << " distance " << fmt17(dist) << "\n";

    Outputs out{{"atoms.csv", atoms_csv(a)},
                {"atoms_reference.csv", atoms_csv(b)},
                {"result.csv", result},
                {"distances.csv", "grid,distance\n" + csv_row({std::to_string(grid), fmt17(dist)})}};
    if (svg) out.emplace_back("scatter.svg", scatter_svg({a, b}));
    return out;
}

inline lo::SignedVector parse_signed_vector(const nlohmann::json& j)
{
    if (!j.is_array() || j.empty()) throw InvalidArgument("extra.v: expected a non-empty array");
    std::vector<Rational> xs;
    for (const auto& x : j) {
        if (x.is_number_integer())
            xs.emplace_back(x.get<std::int64_t>());
        else if (x.is_string())
            xs.push_back(Rational::parse(x.get<std::string>()));
        else
            throw InvalidArgument("extra.v: entries must be integers or \"p/q\" strings");
    }
    return lo::SignedVector::from_rationals(xs);
}

inline std::string dyadic_text(const Dyadic& d)
{
    return to_string(d.numerator()) + "/" + to_string(u128{1} << d.log2_denominator());
}

inline Outputs run_lo(matrices::ExperimentConfig& cfg, const nlohmann::json& raw, std::ostream& log)
{
    Extras ex(cfg, {"v", "beta", "halasz_k", "C"});
    const auto v = parse_signed_vector(ex.require<nlohmann::json>("v"));
    if (!raw.contains("n")) cfg.n = v.size(), cfg.shift = matrices::ShiftSpec::zero(v.size());
    if (cfg.n != v.size()) throw InvalidArgument("n: does not match the length of extra.v");
    const auto k = ex.get("halasz_k", 1u);

    const auto d = lo::exact_distribution(v);
    const auto p = d.max_prob();
    const auto n = static_cast<unsigned>(v.size());
    std::string summary = "key,value\n";
    summary += csv_row({"n", std::to_string(n)});
    summary += csv_row({"has_zero", v.has_zero() ? "true" : "false"});
    summary += csv_row({"support_size", std::to_string(d.support.size())});
    summary += csv_row({"concentration_prob", dyadic_text(p)});
    summary += csv_row({"concentration_prob_float", fmt17(p.to_double())});
    if (n <= 120) {
        const Dyadic bound(binomial(n, n / 2), static_cast<int>(n));
        summary += csv_row({"erdos_bound", dyadic_text(bound)});
        summary += csv_row({"erdos_bound_holds", p <= bound ? "true" : "false"});
    }
    if (k >= 1) {
        try {
            summary += csv_row({"halasz_R" + std::to_string(k), std::to_string(lo::halasz_Rk(v, k))});
            summary += csv_row({"halasz_ratio_" + std::to_string(k), fmt17(lo::halasz_ratio(v, k))});
        } catch (const BudgetExceeded&) {
            summary += csv_row({"halasz_R" + std::to_string(k), "over_budget"});
        }
    }
    if (ex.has("beta")) {
        const double beta = ex.require<double>("beta");
        std::vector<complex> cv;
        for (auto x : v.values()) cv.emplace_back(static_cast<double>(x) / static_cast<double>(v.denominator()), 0.0);
        const auto sb = lo::small_ball_prob(cv, beta, lo::ExactFiniteSupport{});
        summary += csv_row({"small_ball_prob", fmt17(sb.estimate)});
    }
    if (ex.has("C")) {
        std::vector<std::vector<std::int64_t>> c;
        try {
            c = ex.raw("C").get<std::vector<std::vector<std::int64_t>>>();
        } catch (const nlohmann::json::exception&) {
            throw InvalidArgument("extra.C: expected a square integer matrix");
        }
        summary += csv_row({"quadratic_small_ball", dyadic_text(lo::quadratic_small_ball(c))});
    }
    log << "lo: p_v = " << dyadic_text(p) << " (" << fmt17(p.to_double()) << ")\n";
    return {{"result.csv", lo::to_csv(d)}, {"summary.csv", summary}};
}

inline Outputs run_gap(matrices::ExperimentConfig& cfg, std::ostream& log)
{
    Extras ex(cfg, {"a0", "generators", "lower", "upper", "c"});
    const lo::GAP q(ex.get("a0", std::int64_t{0}), ex.require<std::vector<std::int64_t>>("generators"),
                    ex.require<std::vector<std::int64_t>>("lower"), ex.require<std::vector<std::int64_t>>("upper"));
    const double c = ex.get("c", 0.01);
    const auto el = lo::gap_elements(q);
    const double bench = lo::pigeonhole_lower_bound(q, cfg.n);
    std::string result = "trial,concentration_prob,benchmark,passes\n";
    std::size_t passes = 0;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        const auto v = lo::gap_sample_vector(q, cfg.n, cfg.seed, t);
        const double p = lo::concentration_prob(v).to_double();
        const bool ok = p >= c * bench;
        passes += ok;
        result += csv_row({std::to_string(t), fmt17(p), fmt17(bench), ok ? "1" : "0"});
    }
    log << "gap: rank " << q.rank() << ", |Q| = " << el.elements.size() << ", volume " << fmt17(q.volume())
        << (el.proper ? ", proper" : ", not proper") << "; " << passes << "/" << cfg.trials << " draws meet "
        << fmt17(c) << " x benchmark\n";
    return {{"gap.json", lo::to_json(q).dump(2) + "\n"}, {"result.csv", result}};
}

inline Outputs run_condition(matrices::ExperimentConfig& cfg, std::size_t threads, std::ostream& log)
{
    Extras ex(cfg, {"x_grid", "slack"});
    const auto xs = ex.get("x_grid", std::vector<double>{10.0, 100.0, 1000.0});
    const double slack = ex.get("slack", 10.0);
    if (cfg.shift.kind == matrices::ShiftSpec::Kind::Sandwich)
        throw InvalidArgument("shift.kind: Sandwich is not an additive perturbation base");
    if (cfg.shift.n != cfg.n) throw InvalidArgument("shift: dimension does not match n");
    const auto a = matrices::build_shift(cfg.shift).a;
    const auto r = smoothed::condition_tail(a, cfg.distribution, xs, cfg.trials, cfg.seed, threads);
    bool within = true;
    for (std::size_t i = 0; i < xs.size(); ++i) within = within && r.survival[i] <= slack * r.bound_curve[i];
    log << "condition: " << r.failed_trials.size() << " failed trials; survival "
        << (within ? "within " : "exceeds ") << fmt17(slack) << " x sqrt(n)/x\n";
    return {{"result.csv", smoothed::to_csv(r)}};
}

inline Outputs run_distance(matrices::ExperimentConfig& cfg, std::size_t threads, std::ostream& log)
{
    Extras ex(cfg, {"k", "relaxed"});
    const auto k = ex.require<std::size_t>("k");
    const bool relaxed = ex.get("relaxed", false);
    const auto r = smoothed::distance_experiment(cfg.n, k, cfg.distribution, cfg.trials, cfg.seed, relaxed, threads);
    const double lo = *std::min_element(r.distances.begin(), r.distances.end());
    log << "distance: min " << fmt17(lo) << " vs threshold " << fmt17(r.threshold) << "\n";
    return {{"result.csv", smoothed::to_csv(r)}};
}

// Identity and exact-value checks; all must hold on any correct build.
inline bool run_verify(std::ostream& log)
{
    bool all = true;
    const auto report = [&](const std::string& name, bool ok) {
        log << (ok ? "PASS " : "FAIL ") << name << "\n";
        all = all && ok;
    };
    const auto guarded = [&](const std::string& name, const std::function<bool()>& fn) {
        try {
            report(name, fn());
        } catch (const std::exception& e) {
            log << "FAIL " << name << " (" << e.what() << ")\n";
            all = false;
        }
    };
    using matrices::EntryDistribution;

    guarded("nsmi identity on 20 random matrices", [] {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const std::size_t n = 5 + s, m = 1 + s % n;
            const auto x = linalg::truncate_rows(matrices::sample_matrix(EntryDistribution::real_gaussian(), n, s), n - m);
            if (!(linalg::nsmi_check(x).rel_err < 1e-10)) return false;
        }
        return true;
    });
    guarded("cauchy interlacing under row deletion", [] {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const std::size_t n = 10 + s, k = 1 + s % 4;
            const auto a = matrices::sample_matrix(EntryDistribution::bernoulli(), n, s);
            const auto sa = linalg::singular_values(a).values;
            const auto sb = linalg::singular_values(linalg::truncate_rows(a, k)).values;
            const double tol = 1e-10 * linalg::frobenius_norm(a);
            for (std::size_t j = 0; j < sb.size(); ++j) {
                if (sa[j] < sb[j] - tol) return false;
                if (j + k < n && sb[j] < sa[j + k] - tol) return false;
            }
        }
        return true;
    });
    guarded("erdos equality for all-ones vectors, n = 1..24", [] {
        for (unsigned n = 1; n <= 24; ++n)
            if (lo::concentration_prob(lo::SignedVector(std::vector<std::int64_t>(n, 1))) !=
                Dyadic(binomial(n, n / 2), static_cast<int>(n)))
                return false;
        return true;
    });
    guarded("dyadic vectors have distinct sums, n = 1..20", [] {
        for (unsigned n = 1; n <= 20; ++n) {
            std::vector<std::int64_t> v;
            for (unsigned i = 0; i < n; ++i) v.push_back(std::int64_t{1} << i);
            if (lo::concentration_prob(lo::SignedVector(v)) != Dyadic(1, static_cast<int>(n))) return false;
        }
        return true;
    });
    guarded("log-determinant identity at n = 30", [] {
        const auto m = matrices::sample_matrix(EntryDistribution::bernoulli(), 30, 1);
        return spectral::log_det_identity_check(m, complex(1.0, 1.0)).abs_err < 1e-8;
    });
    guarded("2x2 sign matrices: 8 of 16 singular", [] {
        int singular = 0;
        for (int mask = 0; mask < 16; ++mask) {
            DenseMatrix m(2, 2);
            for (int k = 0; k < 4; ++k) m(k / 2, k % 2) = (mask >> k) & 1 ? 1.0 : -1.0;
            singular += linalg::singular_values(m).values.back() == 0.0;
        }
        return singular == 8;
    });
    guarded("trace identity of the eigensolver", [] {
        const auto a = matrices::sample_matrix(EntryDistribution::complex_gaussian(), 40, 2);
        complex s{};
        for (const auto& l : linalg::eigenvalues(a).eigenvalues) s += l;
        return std::abs(s - trace(a)) < 1e-9;
    });
    return all;
}

inline void write_outputs(const std::filesystem::path& dir, const Outputs& files, bool force)
{
    std::filesystem::create_directories(dir);
    for (const auto& [name, _] : files)
        if (!force && std::filesystem::exists(dir / name))
            throw InvalidArgument("output " + (dir / name).string() + " exists; pass --force to overwrite");
    for (const auto& [name, body] : files) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw InvalidArgument("cannot write " + (dir / name).string());
        f << body;
    }
}

} // namespace detail

/// Runs one subcommand. Messages go to `log`, errors to `err`.
inline int run(const Command& cmd, std::ostream& log, std::ostream& err)
{
    try {
        if (std::find(subcommands().begin(), subcommands().end(), cmd.subcommand) == subcommands().end())
            throw InvalidArgument("unknown subcommand '" + cmd.subcommand + "'");
        if (cmd.subcommand == "verify") return detail::run_verify(log) ? ok : numerical_failure;

        const auto raw = detail::load_config(cmd.config);
        auto cfg = matrices::config_from_json(raw);
        if (cmd.seed) cfg.seed = *cmd.seed;
        const std::size_t threads = std::max<std::size_t>(cmd.threads, 1);

        Outputs files;
        if (cmd.subcommand == "esd") files = detail::run_esd(cfg, threads, log);
        else if (cmd.subcommand == "universality") files = detail::run_universality(cfg, threads, log);
        else if (cmd.subcommand == "lo") files = detail::run_lo(cfg, raw, log);
        else if (cmd.subcommand == "gap") files = detail::run_gap(cfg, log);
        else if (cmd.subcommand == "condition") files = detail::run_condition(cfg, threads, log);
        else files = detail::run_distance(cfg, threads, log);

        files.emplace_back("config.echo.json", matrices::to_json(cfg).dump(2) + "\n");
        detail::write_outputs(cmd.out_dir, files, cmd.force);
        return ok;
    } catch (const spectral::PseudospectrumProximity& e) {
        err << "error: " << e.what() << "\n";
        return numerical_failure;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    } catch (const NumericalFailure& e) {
        err << "error: " << e.what() << "\n";
        return numerical_failure;
    }
}

} // namespace circlab::cli
