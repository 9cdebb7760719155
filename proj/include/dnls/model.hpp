#ifndef DNLS_MODEL_HPP
#define DNLS_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

inline int l1_norm(std::span<const int> x)
{
    int n = 0;
    for (int c : x)
        n += std::abs(c);
    return n;
}

/// 2 + 4/d
inline double mass_critical_exponent(int d) { return 2.0 + 4.0 / d; }

// ---------------------------------------------------------------------------
// Nonlinearities.
//
// Every catalog entry has the form
//     f(x, s) = (1 + b(x)) * sum_k c_k |s|^{e_k - 2} s,
//     F(x, s) = (1 + b(x)) * sum_k c_k |s|^{e_k} / e_k,
// with b(x) = b0 (1 + |x|^2)^{-decay} for modulated specs and b = 0 otherwise.
// The x-independent part is the limit nonlinearity f~.

enum class NonlinearityKind { zero, power, combined_power, modulated };

struct PowerTerm
{
    double coefficient;
    double exponent;
};

class Nonlinearity
{
public:
    /// F == 0. Not a valid hypothesis-satisfying model; used for the linear problem.
    static Nonlinearity zero() { return Nonlinearity(NonlinearityKind::zero, {}); }

    static Nonlinearity power(double p)
    {
        require_exponent(p, "power: p");
        return Nonlinearity(NonlinearityKind::power, {{1.0, p}});
    }

    static Nonlinearity combined_power(double p, double q, double mu)
    {
        require_exponent(p, "combined_power: p");
        require_exponent(q, "combined_power: q");
        if (!(mu >= 0.0) || !std::isfinite(mu))
            throw std::invalid_argument("combined_power: mu must be >= 0");
        return Nonlinearity(NonlinearityKind::combined_power, {{1.0, p}, {mu, q}});
    }

    static Nonlinearity modulated(const Nonlinearity& base, double b0, double decay = 1.0)
    {
        if (base.kind_ == NonlinearityKind::modulated)
            throw std::invalid_argument("modulated: base must not itself be modulated");
        if (!(b0 >= 0.0) || !std::isfinite(b0))
            throw std::invalid_argument("modulated: amplitude must be >= 0");
        if (!(decay > 0.0) || !std::isfinite(decay))
            throw std::invalid_argument("modulated: decay must be > 0");
        Nonlinearity n(NonlinearityKind::modulated, base.terms_);
        n.base_kind_ = base.kind_;
        n.b0_ = b0;
        n.decay_ = decay;
        return n;
    }

    NonlinearityKind kind() const { return kind_; }
    NonlinearityKind base_kind() const { return kind_ == NonlinearityKind::modulated ? base_kind_ : kind_; }
    std::span<const PowerTerm> terms() const { return terms_; }
    double modulation_amplitude() const { return b0_; }
    double modulation_decay() const { return decay_; }

    /// f~: the same spec without spatial modulation.
    Nonlinearity limit() const
    {
        Nonlinearity n = *this;
        n.kind_ = base_kind();
        n.b0_ = 0.0;
        n.decay_ = 1.0;
        return n;
    }

    bool is_modulated() const { return kind_ == NonlinearityKind::modulated && b0_ > 0.0; }

    /// b(x) as a function of |x|.
    double modulation(int l1) const
    {
        if (kind_ != NonlinearityKind::modulated || b0_ == 0.0)
            return 0.0;
        const double r2 = static_cast<double>(l1) * static_cast<double>(l1);
        return b0_ * std::pow(1.0 + r2, -decay_);
    }

    /// f~(s)
    double limit_f(double s) const
    {
        const double a = std::abs(s);
        double acc = 0.0;
        for (const auto& t : terms_)
            acc += t.coefficient * std::pow(a, t.exponent - 2.0);
        return acc * s;
    }

    /// F~(s)
    double limit_F(double s) const
    {
        const double a = std::abs(s);
        double acc = 0.0;
        for (const auto& t : terms_)
            acc += t.coefficient * std::pow(a, t.exponent) / t.exponent;
        return acc;
    }

    /// d f~ / ds
    double limit_df(double s) const
    {
        const double a = std::abs(s);
        double acc = 0.0;
        for (const auto& t : terms_)
            acc += t.coefficient * (t.exponent - 1.0) * std::pow(a, t.exponent - 2.0);
        return acc;
    }

    /// Smallest exponent, which decides the behavior of F near 0.
    std::optional<double> leading_exponent() const
    {
        std::optional<double> e;
        for (const auto& t : terms_) {
            if (t.coefficient > 0.0)
                e = e ? std::min(*e, t.exponent) : t.exponent;
        }
        return e;
    }

    std::optional<double> top_exponent() const
    {
        std::optional<double> e;
        for (const auto& t : terms_) {
            if (t.coefficient > 0.0)
                e = e ? std::max(*e, t.exponent) : t.exponent;
        }
        return e;
    }

    /// Reporting only: the exponent q of the growth condition, taken as top exponent - 1.
    std::optional<double> growth_exponent() const
    {
        auto e = top_exponent();
        if (e)
            *e -= 1.0;
        return e;
    }

    std::string name() const
    {
        switch (kind_) {
        case NonlinearityKind::zero: return "zero";
        case NonlinearityKind::power: return "power";
        case NonlinearityKind::combined_power: return "combined_power";
        case NonlinearityKind::modulated: return "modulated";
        }
        return "unknown";
    }

private:
    Nonlinearity(NonlinearityKind kind, std::vector<PowerTerm> terms)
        : kind_(kind), base_kind_(kind), terms_(std::move(terms))
    {
    }

    static void require_exponent(double e, const char* what)
    {
        if (!(e > 2.0) || !std::isfinite(e))
            throw std::invalid_argument(std::string(what) + " must be > 2");
    }

    NonlinearityKind kind_;
    NonlinearityKind base_kind_;
    std::vector<PowerTerm> terms_;
    double b0_ = 0.0;
    double decay_ = 1.0;
};

inline double eval_f(const Nonlinearity& spec, std::span<const int> x, double s)
{
    return (1.0 + spec.modulation(l1_norm(x))) * spec.limit_f(s);
}

inline double eval_F(const Nonlinearity& spec, std::span<const int> x, double s)
{
    return (1.0 + spec.modulation(l1_norm(x))) * spec.limit_F(s);
}

// ---------------------------------------------------------------------------
// Potentials.

enum class PotentialKind { zero, well, trapping, table };

class Potential
{
public:
    static Potential zero() { return Potential(PotentialKind::zero); }

    /// V(x) = -c / (1 + |x|^2)
    static Potential well(double c)
    {
        if (!(c >= 0.0) || !std::isfinite(c))
            throw std::invalid_argument("well: depth must be >= 0");
        Potential v(PotentialKind::well);
        v.param_ = c;
        return v;
    }

    /// V(x) = |x|^beta
    static Potential trapping(double beta)
    {
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw std::invalid_argument("trapping: exponent must be > 0");
        Potential v(PotentialKind::trapping);
        v.param_ = beta;
        return v;
    }

    /// Site values on `domain` in enumeration order, with the given limit at infinity.
    static Potential table(BoxDomain domain, std::vector<double> values, double v_inf)
    {
        if (values.size() != domain.site_count())
            throw std::invalid_argument("table: value count does not match site count");
        for (double x : values) {
            if (!std::isfinite(x))
                throw std::invalid_argument("table: non-finite value");
        }
        if (std::isnan(v_inf))
            throw std::invalid_argument("table: V_inf is NaN");
        Potential v(PotentialKind::table);
        v.table_domain_ = std::move(domain);
        v.table_ = std::move(values);
        v.v_inf_ = v_inf;
        return v;
    }

    PotentialKind kind() const { return kind_; }
    double parameter() const { return param_; }
    double v_infinity() const { return v_inf_; }
    const std::vector<double>& table_values() const { return table_; }
    const std::optional<BoxDomain>& table_domain() const { return table_domain_; }

    /// Radial profile for the closed-form kinds, as a function of |x|^2.
    double radial(double r2) const
    {
        switch (kind_) {
        case PotentialKind::zero: return 0.0;
        case PotentialKind::well: return -param_ / (1.0 + r2);
        case PotentialKind::trapping: return std::pow(r2, 0.5 * param_);
        case PotentialKind::table: break;
        }
        throw std::logic_error("radial: table potentials have no closed form");
    }

    std::string name() const
    {
        switch (kind_) {
        case PotentialKind::zero: return "zero";
        case PotentialKind::well: return "well";
        case PotentialKind::trapping: return "trapping";
        case PotentialKind::table: return "table";
        }
        return "unknown";
    }

private:
    explicit Potential(PotentialKind kind)
        : kind_(kind),
          v_inf_(kind == PotentialKind::trapping ? std::numeric_limits<double>::infinity() : 0.0)
    {
    }

    PotentialKind kind_;
    double param_ = 0.0;
    double v_inf_;
    std::optional<BoxDomain> table_domain_;
    std::vector<double> table_;
};

inline double eval_V(const Potential& spec, std::span<const int> x)
{
    if (spec.kind() == PotentialKind::table) {
        const auto idx = spec.table_domain()->index_of(x);
        if (!idx)
            throw std::out_of_range("eval_V: site outside the stored table");
        return spec.table_values()[*idx];
    }
    const double r = l1_norm(x);
    return spec.radial(r * r);
}

// ---------------------------------------------------------------------------
// Hypothesis checks.

struct HypothesisCheck
{
    std::string name;
    bool passed = true;
    std::string detail;   // first violating tuple, or a short witness description
};

struct HypothesisReport
{
    std::vector<HypothesisCheck> checks;
    std::optional<double> xi_witness;   // some xi > 0 with F~(xi) > 0

    bool all_passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }

    const HypothesisCheck* find(const std::string& name) const
    {
        for (const auto& c : checks) {
            if (c.name == name)
                return &c;
        }
        return nullptr;
    }
};

struct SampleGrid
{
    std::vector<double> thetas;      // each > 1
    std::vector<double> amplitudes;  // each != 0
    BoxDomain sites;

    static SampleGrid standard(const BoxDomain& sites)
    {
        SampleGrid g{{1.01, 1.5, 2.0, 4.0, 10.0}, {}, sites};
        for (double s : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0}) {
            g.amplitudes.push_back(s);
            g.amplitudes.push_back(-s);
        }
        return g;
    }
};

namespace detail {

inline std::string site_string(std::span<const int> x)
{
    std::string s = "(";
    for (std::size_t k = 0; k < x.size(); ++k)
        s += (k ? "," : "") + std::to_string(x[k]);
    return s + ")";
}

inline std::string num(double v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}   // namespace detail

/**
 * Checks (f0)-(f4) for `f` and (V0) for `v` on a finite sample grid.
 * Strict inequalities are accepted when they hold up to a relative slack of
 * 1e-12; an exact tie of zeros counts as a violation.
 */
inline HypothesisReport check_hypotheses(const Nonlinearity& f, const Potential& v, const SampleGrid& grid)
{
    constexpr double slack = 1e-12;
    HypothesisReport report;
    const BoxDomain& sites = grid.sites;

    {   // (f0): finite values on the grid
        HypothesisCheck c{"f0", true, "finite on grid"};
        for (std::size_t i = 0; i < sites.site_count() && c.passed; ++i) {
            for (double s : grid.amplitudes) {
                if (!std::isfinite(eval_f(f, sites.coordinates(i), s))) {
                    c = {"f0", false, "non-finite f at x=" + detail::site_string(sites.coordinates(i)) +
                                          " s=" + detail::num(s)};
                    break;
                }
            }
        }
        report.checks.push_back(c);
    }

    {   // (f1): f(x,s)/s -> 0 as s -> 0, bounded by the leading-order term
        HypothesisCheck c{"f1", true, ""};
        const auto lead = f.leading_exponent();
        if (!lead) {
            c.detail = "f == 0";
        } else {
            double sum_coeff = 0.0;
            for (const auto& t : f.terms())
                sum_coeff += t.coefficient;
            const double amp = 1.0 + f.modulation_amplitude();
            for (double s : {1e-6, 1e-7, 1e-8}) {
                for (std::size_t i = 0; i < sites.site_count(); ++i) {
                    const double ratio = std::abs(eval_f(f, sites.coordinates(i), s) / s);
                    const double bound = 2.0 * amp * sum_coeff * std::pow(s, *lead - 2.0);
                    if (ratio > bound) {
                        c = {"f1", false, "f(x,s)/s=" + detail::num(ratio) + " at s=" + detail::num(s)};
                        break;
                    }
                }
            }
            if (c.passed)
                c.detail = "growth q=" + detail::num(*f.growth_exponent());
        }
        report.checks.push_back(c);
    }

    {   // (f2): dominance by the limit and strictness at x1 = 0
        HypothesisCheck c{"f2", true, ""};
        const Nonlinearity lim = f.limit();
        for (std::size_t i = 0; i < sites.site_count() && c.passed; ++i) {
            const auto x = sites.coordinates(i);
            for (double s : grid.amplitudes) {
                const double fx = eval_f(f, x, s);
                const double ft = lim.limit_f(s);
                const bool ok_f = s >= 0 ? fx >= ft * (1 - slack) : fx <= ft * (1 - slack);
                const bool ok_F = eval_F(f, x, s) >= lim.limit_F(s) * (1 - slack);
                if (!ok_f || !ok_F) {
                    c = {"f2", false, "dominance fails at x=" + detail::site_string(x) + " s=" + detail::num(s)};
                    break;
                }
            }
        }
        if (c.passed && f.is_modulated()) {
            std::vector<int> origin(static_cast<std::size_t>(sites.dimension()), 0);
            for (double s : grid.amplitudes) {
                if (!(std::abs(eval_f(f, origin, s)) > std::abs(lim.limit_f(s)))) {
                    c = {"f2", false, "no strict dominance at x1=0, s=" + detail::num(s)};
                    break;
                }
            }
            if (c.passed)
                c.detail = "strict at x1=0";
        } else if (c.passed) {
            c.detail = "f == f~";
        }
        report.checks.push_back(c);
    }

    {   // (f3): a positive witness for F~
        HypothesisCheck c{"f3", false, "no xi with F~(xi) > 0"};
        for (double xi : {1.0, 0.5, 2.0, 0.25, 4.0, 0.1, 10.0}) {
            if (f.limit_F(xi) > 0.0) {
                report.xi_witness = xi;
                c = {"f3", true, "xi=" + detail::num(xi) + " F~(xi)=" + detail::num(f.limit_F(xi))};
                break;
            }
        }
        report.checks.push_back(c);
    }

    {   // (f4): F(x, sqrt(theta) s) > theta F(x, s)
        HypothesisCheck c{"f4", true, "holds on grid"};
        for (std::size_t i = 0; i < sites.site_count() && c.passed; ++i) {
            const auto x = sites.coordinates(i);
            for (double th : grid.thetas) {
                for (double s : grid.amplitudes) {
                    const double lhs = eval_F(f, x, std::sqrt(th) * s);
                    const double rhs = th * eval_F(f, x, s);
                    const double scale = std::abs(lhs) + std::abs(rhs);
                    if (scale == 0.0 || lhs - rhs <= -slack * scale) {
                        c = {"f4", false, "x=" + detail::site_string(x) + " theta=" + detail::num(th) +
                                              " s=" + detail::num(s)};
                        break;
                    }
                }
                if (!c.passed)
                    break;
            }
        }
        report.checks.push_back(c);
    }

    {   // (V0): V(x) <= V_inf on the box
        HypothesisCheck c{"V0", true, "holds on box"};
        for (std::size_t i = 0; i < sites.site_count(); ++i) {
            const auto x = sites.coordinates(i);
            double vx;
            try {
                vx = eval_V(v, x);
            } catch (const std::out_of_range&) {
                continue;
            }
            if (vx > v.v_infinity()) {
                c = {"V0", false, "V(x) > V_inf at site " + std::to_string(i) + " x=" + detail::site_string(x)};
                break;
            }
        }
        report.checks.push_back(c);
    }
    return report;
}

}   // namespace dnls

#endif   // DNLS_MODEL_HPP
