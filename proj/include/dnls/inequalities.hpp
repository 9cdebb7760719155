#ifndef DNLS_INEQUALITIES_HPP
#define DNLS_INEQUALITIES_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/model.hpp"
#include "dnls/random.hpp"
#include "dnls/sphere_descent.hpp"

namespace dnls {

namespace detail {

inline void require_nonzero(const LatticeField& u, const char* what)
{
    if (!(squared_norm(u.values()) > 0.0))
        throw std::invalid_argument(std::string(what) + ": zero field");
}

inline double power_sum(std::span<const double> u, double p)
{
    double acc = 0.0;
    for (double x : u)
        acc += std::pow(std::abs(x), p);
    return acc;
}

inline std::vector<double> hardy_weights(const BoxDomain& domain)
{
    std::vector<double> w(domain.site_count());
    for (std::size_t s = 0; s < w.size(); ++s) {
        const double r = domain.l1_norm(s);
        w[s] = 1.0 / (1.0 + r * r);
    }
    return w;
}

}   // namespace detail

/// ||u||_p / (||grad u||_2^theta ||u||_2^{1-theta})
inline double gns_quotient(const LatticeField& u, double p, double theta)
{
    detail::require_nonzero(u, "gns_quotient");
    if (!(p > 2.0))
        throw std::invalid_argument("gns_quotient: p must be > 2");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("gns_quotient: theta must lie in (0, 1]");
    const double grad = std::sqrt(gradient_energy(u));
    const double l2 = std::sqrt(mass(u));
    return lp_norm(u, p) / (std::pow(grad, theta) * std::pow(l2, 1.0 - theta));
}

/**
 * ||u||_p^p / (||grad u||_2^2 ||u||_2^{p-2}). With p = 2 + 4/d this is the
 * mass-critical quotient; p = 4 in d = 2 gives the four-norm bound.
 */
inline double critical_gns_quotient(const LatticeField& u, double p)
{
    detail::require_nonzero(u, "critical_gns_quotient");
    if (!(p > 2.0))
        throw std::invalid_argument("critical_gns_quotient: p must be > 2");
    const double m = squared_norm(u.values());
    return detail::power_sum(u.values(), p) / (gradient_energy(u) * std::pow(m, 0.5 * (p - 2.0)));
}

inline double critical_gns_quotient(const LatticeField& u)
{
    return critical_gns_quotient(u, mass_critical_exponent(u.domain().dimension()));
}

/// ||grad u||_2^2 / sum u(x)^2 / (1 + |x|^2)
inline double hardy_quotient(const LatticeField& u)
{
    detail::require_nonzero(u, "hardy_quotient");
    const auto w = detail::hardy_weights(u.domain());
    double weighted = 0.0;
    for (std::size_t s = 0; s < u.size(); ++s)
        weighted += w[s] * u[s] * u[s];
    return gradient_energy(u) / weighted;
}

/// ||u||_q <= ||u||_p + 1e-12
inline bool check_norm_monotonicity(const LatticeField& u, double p, double q)
{
    if (!(p >= 1.0))
        throw std::invalid_argument("check_norm_monotonicity: p must be >= 1");
    if (!(p < q))
        throw std::invalid_argument("check_norm_monotonicity: requires p < q");
    return lp_norm(u, q) <= lp_norm(u, p) + 1e-12;
}

/// Once-per-edge total variation, boundary edges included.
inline double total_variation(const LatticeField& u)
{
    const BoxDomain& domain = u.domain();
    double tv = 0.0;
    for (std::size_t s = 0; s < domain.site_count(); ++s) {
        const auto nb = domain.neighbors(s);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            if (nb[k] == BoxDomain::exterior)
                tv += std::abs(u[s]);
            else if (k % 2 == 1)
                tv += std::abs(u[static_cast<std::size_t>(nb[k])] - u[s]);
        }
    }
    return tv;
}

/// ||u||_inf <= total variation, for d = 1.
inline bool check_sup_tv_d1(const LatticeField& u)
{
    if (u.domain().dimension() != 1)
        throw std::invalid_argument("check_sup_tv_d1: requires d = 1");
    return lp_norm(u, INFINITY) <= total_variation(u) * (1.0 + 1e-12);
}

// ---------------------------------------------------------------------------
// Constant estimation by refining random starts on the unit sphere.

struct QuotientSearch
{
    DescentParams descent{1e-9, 20000, 1.0, 0.5, 1e-4, 1e-16};
    std::uint64_t seed = 0;
};

struct ConstantEstimate
{
    std::string inequality;
    int d = 0;
    double p = 0.0;
    double estimate = 0.0;
    std::string direction;          // "lower" (supremum search) or "upper" (infimum search)
    int box_L = 0;
    long trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> running;    // extremum after each trial
};

namespace detail {

/// -Q for the critical quotient, whose gradient is already tangent to spheres.
struct NegativeGnsObjective
{
    const BoxDomain& domain;
    double p;

    double value(std::span<const double> u) const
    {
        const double m = squared_norm(u);
        return -power_sum(u, p) / (gradient_energy<double>(domain, u) * std::pow(m, 0.5 * (p - 2.0)));
    }

    void gradient(std::span<const double> u, std::span<double> g) const
    {
        const double m = squared_norm(u);
        const double G = gradient_energy<double>(domain, u);
        const double N = power_sum(u, p);
        const double Q = N / (G * std::pow(m, 0.5 * (p - 2.0)));
        apply_laplacian<double>(domain, u, g);   // g <- Lap u
        for (std::size_t s = 0; s < u.size(); ++s) {
            const double dN = p * std::pow(std::abs(u[s]), p - 2.0) * u[s];
            const double dG = -2.0 * g[s];
            g[s] = -Q * (dN / N - dG / G - (p - 2.0) * u[s] / m);
        }
    }
};

struct HardyObjective
{
    const BoxDomain& domain;
    std::vector<double> w;

    double weighted(std::span<const double> u) const
    {
        double acc = 0.0;
        for (std::size_t s = 0; s < u.size(); ++s)
            acc += w[s] * u[s] * u[s];
        return acc;
    }

    double value(std::span<const double> u) const { return gradient_energy<double>(domain, u) / weighted(u); }

    void gradient(std::span<const double> u, std::span<double> g) const
    {
        const double G = gradient_energy<double>(domain, u);
        const double W = weighted(u);
        apply_laplacian<double>(domain, u, g);
        for (std::size_t s = 0; s < u.size(); ++s)
            g[s] = (G / W) * (-2.0 * g[s] / G - 2.0 * w[s] * u[s] / W);
    }
};

/// Trial 0 is delta_0; later trials are Gaussian fields from their own substream.
inline LatticeField quotient_start(const BoxDomain& domain, long trial, std::uint64_t seed)
{
    if (trial == 0)
        return delta(domain);
    LatticeField u(domain);
    auto rng = substream(seed, static_cast<std::uint64_t>(trial));
    fill_gaussian(rng, u.values());
    return u;
}

}   // namespace detail

/**
 * Lower estimate of the best constant in ||u||_p^p <= C ||grad u||^2 ||u||^{p-2}
 * (default p = 2 + 4/d): the supremum of the quotient over `trials` starts,
 * each refined by ascent on the unit sphere. Truncation to the box only
 * removes competitors, so the value is also a lower bound on Z^d.
 */
inline ConstantEstimate estimate_gns_constant(const BoxDomain& domain, long trials, const QuotientSearch& search = {},
                                              double p = 0.0)
{
    if (trials < 1)
        throw std::invalid_argument("estimate_gns_constant: trials must be >= 1");
    if (p == 0.0)
        p = mass_critical_exponent(domain.dimension());
    ConstantEstimate est{"gns", domain.dimension(), p, 0.0, "lower", domain.radius(), trials, search.seed, {}};
    const detail::NegativeGnsObjective objective{domain, p};
    for (long t = 0; t < trials; ++t) {
        LatticeField u = detail::quotient_start(domain, t, search.seed);
        double q = critical_gns_quotient(u, p);
        sphere_descent(objective, u.values(), 1.0, search.descent);
        q = std::max(q, critical_gns_quotient(u, p));
        est.estimate = std::max(est.estimate, q);
        est.running.push_back(est.estimate);
    }
    return est;
}

/**
 * Upper estimate of the best Hardy constant: the infimum of hardy_quotient
 * over `trials` starts, each refined by descent on the unit sphere.
 */
inline ConstantEstimate estimate_hardy_constant(const BoxDomain& domain, long trials, const QuotientSearch& search = {})
{
    if (trials < 1)
        throw std::invalid_argument("estimate_hardy_constant: trials must be >= 1");
    ConstantEstimate est{"hardy", domain.dimension(), 2.0, INFINITY, "upper", domain.radius(), trials, search.seed, {}};
    const detail::HardyObjective objective{domain, detail::hardy_weights(domain)};
    for (long t = 0; t < trials; ++t) {
        LatticeField u = detail::quotient_start(domain, t, search.seed);
        double q = hardy_quotient(u);
        sphere_descent(objective, u.values(), 1.0, search.descent);
        q = std::min(q, hardy_quotient(u));
        est.estimate = std::min(est.estimate, q);
        est.running.push_back(est.estimate);
    }
    return est;
}

// ---------------------------------------------------------------------------
// Property sweeps over random fields.

/**
 * A random nonzero field: Gaussian values on a random l1 ball around a
 * random site, drawn either as is, cubed (spiky), or as a smooth positive
 * bump, one third each.
 */
inline LatticeField random_test_field(std::mt19937_64& rng, const BoxDomain& domain)
{
    const std::size_t n = domain.site_count();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<int> radius_dist(0, domain.radius());
    std::uniform_int_distribution<int> style_dist(0, 2);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto center = domain.coordinates(pick(rng));
    const int radius = radius_dist(rng);
    const int style = style_dist(rng);
    const double width = 0.5 + radius;
    LatticeField u(domain);
    for (;;) {
        for (std::size_t s = 0; s < n; ++s) {
            const auto x = domain.coordinates(s);
            int dist = 0;
            for (std::size_t k = 0; k < x.size(); ++k)
                dist += std::abs(x[k] - center[k]);
            if (dist > radius) {
                u[s] = 0.0;
                continue;
            }
            const double z = normal(rng);
            if (style == 0)
                u[s] = z;
            else if (style == 1)
                u[s] = z * z * z;
            else
                u[s] = std::exp(-dist / width) * (1.0 + 0.1 * z);
        }
        if (squared_norm(u.values()) > 0.0)
            return u;
    }
}

struct SweepResult
{
    std::string name;
    long fields = 0;
    long failures = 0;
    double worst = 0.0;   // extreme observed ratio against the bound (<= 1 means the bound held)

    bool passed() const { return fields > 0 && failures == 0; }
};

/// ||u||_q <= ||u||_p for random 1 <= p < q.
inline SweepResult sweep_norm_monotonicity(const BoxDomain& domain, long count, std::uint64_t seed)
{
    SweepResult r{"norm_monotonicity"};
    auto rng = substream(seed, 0x4d4f4eu);
    std::uniform_real_distribution<double> pd(1.0, 8.0), gap(1e-3, 8.0);
    for (long k = 0; k < count; ++k) {
        const LatticeField u = random_test_field(rng, domain);
        const double p = pd(rng);
        const double q = p + gap(rng);
        ++r.fields;
        r.worst = std::max(r.worst, lp_norm(u, q) / lp_norm(u, p));
        if (!check_norm_monotonicity(u, p, q))
            ++r.failures;
    }
    return r;
}

/// critical_gns_quotient(u, p) <= constant (1 + 1e-9)
inline SweepResult sweep_gns(const BoxDomain& domain, double p, double constant, long count, std::uint64_t seed)
{
    SweepResult r{"gns_p" + detail::num(p)};
    auto rng = substream(seed, 0x474e53u);
    for (long k = 0; k < count; ++k) {
        const double ratio = critical_gns_quotient(random_test_field(rng, domain), p) / constant;
        ++r.fields;
        r.worst = std::max(r.worst, ratio);
        if (ratio > 1.0 + 1e-9)
            ++r.failures;
    }
    return r;
}

/// hardy_quotient(u) >= constant (1 - 1e-9); `worst` is the largest constant / quotient.
inline SweepResult sweep_hardy(const BoxDomain& domain, double constant, long count, std::uint64_t seed)
{
    SweepResult r{"hardy"};
    auto rng = substream(seed, 0x484152u);
    for (long k = 0; k < count; ++k) {
        const double ratio = constant / hardy_quotient(random_test_field(rng, domain));
        ++r.fields;
        r.worst = std::max(r.worst, ratio);
        if (ratio > 1.0 + 1e-9)
            ++r.failures;
    }
    return r;
}

inline SweepResult sweep_sup_tv(const BoxDomain& domain, long count, std::uint64_t seed)
{
    SweepResult r{"sup_tv"};
    auto rng = substream(seed, 0x535456u);
    for (long k = 0; k < count; ++k) {
        const LatticeField u = random_test_field(rng, domain);
        ++r.fields;
        r.worst = std::max(r.worst, lp_norm(u, INFINITY) / total_variation(u));
        if (!check_sup_tv_d1(u))
            ++r.failures;
    }
    return r;
}

}   // namespace dnls

#endif   // DNLS_INEQUALITIES_HPP
