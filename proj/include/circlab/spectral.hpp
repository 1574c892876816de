#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "circlab/core/error.hpp"
#include "circlab/core/format.hpp"
#include "circlab/core/matrix.hpp"
#include "circlab/linalg.hpp"

namespace circlab::spectral {

/// z closer than `pseudospectrum_guard` to a point of the spectrum.
class PseudospectrumProximity : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

inline constexpr double pseudospectrum_guard = 1e-9;

/// Uniform probability measure on a finite list of complex atoms.
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(std::vector<complex> atoms) : atoms_(std::move(atoms))
    {
        detail::require(!atoms_.empty(), "EmpiricalMeasure: needs at least one atom");
        for (const auto& a : atoms_)
            detail::require(std::isfinite(a.real()) && std::isfinite(a.imag()), "EmpiricalMeasure: non-finite atom");
    }

    static EmpiricalMeasure from_real(const std::vector<double>& xs)
    {
        return EmpiricalMeasure(std::vector<complex>(xs.begin(), xs.end()));
    }

    [[nodiscard]] const std::vector<complex>& atoms() const& noexcept { return atoms_; }
    [[nodiscard]] std::vector<complex> atoms() && noexcept { return std::move(atoms_); }
    [[nodiscard]] std::size_t count() const noexcept { return atoms_.size(); }
    [[nodiscard]] double weight() const noexcept { return 1.0 / static_cast<double>(atoms_.size()); }

private:
    std::vector<complex> atoms_;
};

enum class ReferenceLaw { CircularUnit, Semicircle };

using MeasureLike = std::variant<EmpiricalMeasure, ReferenceLaw>;

struct Rectangle {
    double s, t;
};
struct Disk {
    double r;
};
using Region = std::variant<Rectangle, Disk>;

inline EmpiricalMeasure esd(const DenseMatrix& a, bool normalize, double tol = 1e-10)
{
    detail::require(a.square(), "esd: matrix is not square");
    if (!normalize) return EmpiricalMeasure(linalg::eigenvalues(a, tol).eigenvalues);
    DenseMatrix scaled = a;
    scaled *= complex(1.0 / std::sqrt(static_cast<double>(a.rows())));
    return EmpiricalMeasure(linalg::eigenvalues(scaled, tol).eigenvalues);
}

inline double rectangle_mass(const EmpiricalMeasure& mu, double s, double t)
{
    std::size_t hits = 0;
    for (const auto& a : mu.atoms())
        if (a.real() <= s && a.imag() <= t) ++hits;
    return static_cast<double>(hits) / static_cast<double>(mu.count());
}

inline double semicircle_cdf(double x)
{
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    const double v = 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) + std::asin(x / 2.0) / std::numbers::pi;
    return std::clamp(v, 0.0, 1.0);
}

namespace detail {

// Antiderivative of sqrt(1 - x^2).
inline double half_chord_integral(double x)
{
    x = std::clamp(x, -1.0, 1.0);
    return 0.5 * (x * std::sqrt(1.0 - x * x) + std::asin(x));
}

// Mass of the uniform unit disk in {Re z <= s, Im z <= t}.
inline double circular_rectangle_mass(double s, double t)
{
    if (s <= -1.0 || t <= -1.0) return 0.0;
    const double sc = std::min(s, 1.0);
    const double tc = std::min(t, 1.0);
    const auto g = [](double lo, double hi) { return half_chord_integral(hi) - half_chord_integral(lo); };
    double area = 0.0;
    if (tc >= 1.0) {
        area = 2.0 * g(-1.0, sc);
    } else {
        // Chord length is 2h where h < |t| (only if t >= 0), t + h where h >= |t|.
        const double a = std::sqrt(1.0 - tc * tc);
        const double cuts[4] = {-1.0, -a, a, 1.0};
        for (int k = 0; k < 3; ++k) {
            const double lo = cuts[k];
            const double hi = std::min(cuts[k + 1], sc);
            if (hi <= lo) continue;
            if (k == 1)
                area += tc * (hi - lo) + g(lo, hi);
            else if (tc >= 0.0)
                area += 2.0 * g(lo, hi);
        }
    }
    return std::clamp(area / std::numbers::pi, 0.0, 1.0);
}

// Rectangle CDF of a reference law; `open` gives the limit from below in both
// coordinates, which differs from the closed value only at the semicircle's
// real-axis edge t = 0.
inline double law_cdf(ReferenceLaw law, double s, double t, bool open = false)
{
    if (law == ReferenceLaw::CircularUnit) return circular_rectangle_mass(s, t);
    const bool below = open ? t <= 0.0 : t < 0.0;
    return below ? 0.0 : semicircle_cdf(s);
}

struct Box {
    double s0 = std::numeric_limits<double>::infinity(), s1 = -std::numeric_limits<double>::infinity();
    double t0 = std::numeric_limits<double>::infinity(), t1 = -std::numeric_limits<double>::infinity();

    void cover(double s, double t)
    {
        s0 = std::min(s0, s), s1 = std::max(s1, s);
        t0 = std::min(t0, t), t1 = std::max(t1, t);
    }
};

inline void cover(Box& box, const MeasureLike& m)
{
    if (const auto* e = std::get_if<EmpiricalMeasure>(&m)) {
        for (const auto& a : e->atoms()) box.cover(a.real(), a.imag());
    } else if (std::get<ReferenceLaw>(m) == ReferenceLaw::CircularUnit) {
        box.cover(-1.0, -1.0), box.cover(1.0, 1.0);
    } else {
        box.cover(-2.0, 0.0), box.cover(2.0, 0.0);
    }
}

inline std::vector<double> lattice(double lo, double hi, std::size_t grid)
{
    std::vector<double> v(grid);
    for (std::size_t i = 0; i < grid; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
    v.back() = hi;
    return v;
}

// F on the lattice, row-major over (s index, t index).
inline std::vector<double> cdf_on_lattice(const MeasureLike& m, const std::vector<double>& ss,
                                          const std::vector<double>& ts)
{
    const std::size_t gs = ss.size(), gt = ts.size();
    std::vector<double> f(gs * gt, 0.0);
    if (const auto* e = std::get_if<EmpiricalMeasure>(&m)) {
        // Bin each atom at the first lattice point that dominates it, then
        // accumulate a 2-D prefix sum of counts.
        std::vector<std::int64_t> c(gs * gt, 0);
        for (const auto& a : e->atoms()) {
            const auto is = static_cast<std::size_t>(std::lower_bound(ss.begin(), ss.end(), a.real()) - ss.begin());
            const auto it = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), a.imag()) - ts.begin());
            if (is < gs && it < gt) ++c[is * gt + it];
        }
        for (std::size_t i = 0; i < gs; ++i)
            for (std::size_t j = 0; j < gt; ++j) {
                if (i > 0) c[i * gt + j] += c[(i - 1) * gt + j];
                if (j > 0) c[i * gt + j] += c[i * gt + j - 1];
                if (i > 0 && j > 0) c[i * gt + j] -= c[(i - 1) * gt + j - 1];
                f[i * gt + j] = static_cast<double>(c[i * gt + j]) / static_cast<double>(e->count());
            }
    } else {
        const auto law = std::get<ReferenceLaw>(m);
        for (std::size_t i = 0; i < gs; ++i)
            for (std::size_t j = 0; j < gt; ++j) f[i * gt + j] = law_cdf(law, ss[i], ts[j]);
    }
    return f;
}

} // namespace detail

inline double law_mass(ReferenceLaw law, const Region& region)
{
    if (const auto* d = std::get_if<Disk>(&region)) {
        circlab::detail::require(law == ReferenceLaw::CircularUnit, "law_mass: Disk region needs CircularUnit");
        circlab::detail::require(d->r >= 0.0, "law_mass: negative radius");
        const double r = std::min(d->r, 1.0);
        return r * r;
    }
    const auto& rect = std::get<Rectangle>(region);
    return detail::law_cdf(law, rect.s, rect.t);
}

/// Largest rectangle-CDF gap |F_mu - F_nu| over a grid x grid lattice spanning
/// the joint bounding box of atoms and supports.
inline double measure_distance(const MeasureLike& mu, const MeasureLike& nu, std::size_t grid = 64)
{
    circlab::detail::require(grid >= 2, "measure_distance: grid must be at least 2");
    detail::Box box;
    detail::cover(box, mu);
    detail::cover(box, nu);
    const auto ss = detail::lattice(box.s0, box.s1, grid);
    const auto ts = detail::lattice(box.t0, box.t1, grid);
    const auto f = detail::cdf_on_lattice(mu, ss, ts);
    const auto g = detail::cdf_on_lattice(nu, ss, ts);
    double worst = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, std::abs(f[k] - g[k]));
    return worst;
}

/// Exact supremum of |F_mu - F_nu| over all (s, t). At least one side must be
/// empirical, with at most 500 atoms per empirical side.
inline double measure_distance_exact(const MeasureLike& mu, const MeasureLike& nu)
{
    const auto* em = std::get_if<EmpiricalMeasure>(&mu);
    const auto* en = std::get_if<EmpiricalMeasure>(&nu);
    circlab::detail::require(em || en, "measure_distance_exact: needs an empirical side");
    for (const auto* e : {em, en})
        circlab::detail::require(!e || e->count() <= 500, "measure_distance_exact: more than 500 atoms");

    std::vector<double> xs, ys;
    for (const auto* e : {em, en}) {
        if (!e) continue;
        for (const auto& a : e->atoms()) xs.push_back(a.real()), ys.push_back(a.imag());
    }
    for (const auto* m : {&mu, &nu})
        if (const auto* law = std::get_if<ReferenceLaw>(m); law && *law == ReferenceLaw::Semicircle) ys.push_back(0.0);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    // Cell (i, j) covers [X(i), X(i+1)) x [Y(j), Y(j+1)), X(0) = -inf,
    // X(K+1) = +inf. Empirical CDFs are constant on each cell.
    const std::size_t K = xs.size(), L = ys.size();
    const double inf = std::numeric_limits<double>::infinity();
    const auto X = [&](std::size_t i) { return i == 0 ? -inf : (i > K ? inf : xs[i - 1]); };
    const auto Y = [&](std::size_t j) { return j == 0 ? -inf : (j > L ? inf : ys[j - 1]); };

    const auto prefix = [&](const EmpiricalMeasure& e) {
        std::vector<std::int64_t> c((K + 1) * (L + 1), 0);
        for (const auto& a : e.atoms()) {
            const auto i = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), a.real()) - xs.begin()) + 1;
            const auto j = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), a.imag()) - ys.begin()) + 1;
            ++c[i * (L + 1) + j];
        }
        for (std::size_t i = 0; i <= K; ++i)
            for (std::size_t j = 0; j <= L; ++j) {
                if (i > 0) c[i * (L + 1) + j] += c[(i - 1) * (L + 1) + j];
                if (j > 0) c[i * (L + 1) + j] += c[i * (L + 1) + j - 1];
                if (i > 0 && j > 0) c[i * (L + 1) + j] -= c[(i - 1) * (L + 1) + j - 1];
            }
        std::vector<double> p(c.size());
        for (std::size_t k = 0; k < c.size(); ++k)
            p[k] = static_cast<double>(c[k]) / static_cast<double>(e.count());
        return p;
    };

    double worst = 0.0;
    if (em && en) {
        const auto p = prefix(*em), q = prefix(*en);
        for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, std::abs(p[k] - q[k]));
        return worst;
    }
    const auto& emp = em ? *em : *en;
    const auto law = em ? std::get<ReferenceLaw>(nu) : std::get<ReferenceLaw>(mu);
    const auto p = prefix(emp);
    for (std::size_t i = 0; i <= K; ++i)
        for (std::size_t j = 0; j <= L; ++j) {
            const double c = p[i * (L + 1) + j];
            const double lo = detail::law_cdf(law, X(i), Y(j));
            const double hi = detail::law_cdf(law, X(i + 1), Y(j + 1), true);
            worst = std::max({worst, std::abs(c - lo), std::abs(c - hi)});
        }
    return worst;
}

inline complex stieltjes(const EmpiricalMeasure& mu, complex z)
{
    complex acc{};
    for (const auto& a : mu.atoms()) {
        if (std::abs(a - z) < pseudospectrum_guard)
            throw PseudospectrumProximity("stieltjes: z within 1e-9 of an atom");
        acc += 1.0 / (a - z);
    }
    return acc * mu.weight();
}

/// Squared singular values of M/sqrt(n) - zI.
inline EmpiricalMeasure eta_measure(const DenseMatrix& m, complex z)
{
    circlab::detail::require(m.square(), "eta_measure: matrix is not square");
    const std::size_t n = m.rows();
    DenseMatrix w = m;
    w *= complex(1.0 / std::sqrt(static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) w(i, i) -= z;
    std::vector<double> sq;
    for (double s : linalg::singular_values(w).values) sq.push_back(s * s);
    return EmpiricalMeasure::from_real(sq);
}

struct LogDetCheck {
    double via_eigen = 0.0;
    double via_eta = 0.0;
    double abs_err = 0.0;
};

/// (1/n) log|det(M/sqrt(n) - zI)| computed from the eigenvalues and from the
/// squared singular values.
inline LogDetCheck log_det_identity_check(const DenseMatrix& m, complex z)
{
    circlab::detail::require(m.square(), "log_det_identity_check: matrix is not square");
    const double n = static_cast<double>(m.rows());
    const auto mu = esd(m, true);
    LogDetCheck r;
    for (const auto& l : mu.atoms()) {
        const double d = std::abs(l - z);
        if (d < pseudospectrum_guard)
            throw PseudospectrumProximity("log_det_identity_check: z = (" + fmt17(z.real()) + ", " + fmt17(z.imag()) +
                                          ") lies in the pseudospectrum (distance " + fmt17(d) + ")");
        r.via_eigen += std::log(d);
    }
    r.via_eigen /= n;
    for (const auto& x : eta_measure(m, z).atoms()) r.via_eta += std::log(x.real());
    r.via_eta /= 2.0 * n;
    r.abs_err = std::abs(r.via_eigen - r.via_eta);
    return r;
}

/// Unnormalized log of the Ginibre eigenvalue density; the constant is dropped.
inline double ginibre_log_density(const std::vector<complex>& lambdas, bool drop_constant = true)
{
    circlab::detail::require(drop_constant, "ginibre_log_density: the normalizing constant is not available");
    const double n = static_cast<double>(lambdas.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
            const double d = std::abs(lambdas[i] - lambdas[j]);
            if (d == 0.0) return -std::numeric_limits<double>::infinity();
            acc += 2.0 * std::log(d);
        }
        acc -= n * std::norm(lambdas[i]);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string to_csv(const EmpiricalMeasure& mu)
{
    std::string out = "re,im\n";
    for (const auto& a : mu.atoms()) out += fmt17(a.real()) + "," + fmt17(a.imag()) + "\n";
    return out;
}

inline EmpiricalMeasure measure_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    circlab::detail::require(std::getline(in, line) && line == "re,im", "measure csv: expected header re,im");
    std::vector<complex> atoms;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        circlab::detail::require(comma != std::string::npos, "measure csv: malformed row '" + line + "'");
        try {
            atoms.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw InvalidArgument("measure csv: malformed row '" + line + "'");
        }
    }
    return EmpiricalMeasure(std::move(atoms));
}

inline nlohmann::json to_json(const EmpiricalMeasure& mu)
{
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : mu.atoms()) atoms.push_back({a.real(), a.imag()});
    return {{"count", mu.count()}, {"atoms", atoms}};
}

inline EmpiricalMeasure measure_from_json(const nlohmann::json& j)
{
    circlab::detail::require(j.is_object() && j.contains("count") && j.contains("atoms"),
                             "measure json: needs count and atoms");
    std::vector<complex> atoms;
    for (const auto& a : j.at("atoms")) {
        circlab::detail::require(a.is_array() && a.size() == 2, "measure json: atom must be [re, im]");
        atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    circlab::detail::require(j.at("count").get<std::size_t>() == atoms.size(), "measure json: count mismatch");
    return EmpiricalMeasure(std::move(atoms));
}

} // namespace circlab::spectral
