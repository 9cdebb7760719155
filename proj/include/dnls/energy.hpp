#ifndef DNLS_ENERGY_HPP
#define DNLS_ENERGY_HPP

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/model.hpp"

namespace dnls {

/**
 * Problem data for the functional
 *
 *   Phi(u) = 1/2 sum |grad u|^2 + 1/2 sum V u^2 - sum F(x, u)
 *
 * on the sphere ||u||_2^2 = mass. Site values of V and of the modulation
 * factor (1 + b(x)) are tabulated once at construction.
 */
class EnergyContext
{
public:
    EnergyContext(BoxDomain domain, Potential potential, Nonlinearity nonlinearity, double mass)
        : domain_(std::move(domain)),
          potential_(std::move(potential)),
          nonlinearity_(std::move(nonlinearity)),
          mass_(mass)
    {
        if (!(mass_ > 0.0) || !std::isfinite(mass_))
            throw std::invalid_argument("EnergyContext: mass must be > 0");
        const std::size_t n = domain_.site_count();
        v_.resize(n);
        weight_.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            const auto x = domain_.coordinates(s);
            v_[s] = eval_V(potential_, x);
            if (!std::isfinite(v_[s]))
                throw std::invalid_argument("EnergyContext: potential is not finite on the box");
            weight_[s] = 1.0 + nonlinearity_.modulation(domain_.l1_norm(s));
        }
    }

    const BoxDomain& domain() const { return domain_; }
    const Potential& potential() const { return potential_; }
    const Nonlinearity& nonlinearity() const { return nonlinearity_; }
    double mass() const { return mass_; }

    std::span<const double> potential_values() const { return v_; }
    std::span<const double> modulation_weights() const { return weight_; }

    /// Same data at another mass.
    EnergyContext with_mass(double a) const
    {
        EnergyContext c = *this;
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("EnergyContext: mass must be > 0");
        c.mass_ = a;
        return c;
    }

    /// The limit problem: V = 0 and f replaced by f~.
    EnergyContext limit() const
    {
        return EnergyContext(domain_, Potential::zero(), nonlinearity_.limit(), mass_);
    }

    double f(std::size_t site, double s) const { return weight_[site] * nonlinearity_.limit_f(s); }
    double F(std::size_t site, double s) const { return weight_[site] * nonlinearity_.limit_F(s); }

private:
    BoxDomain domain_;
    Potential potential_;
    Nonlinearity nonlinearity_;
    double mass_;
    std::vector<double> v_;
    std::vector<double> weight_;
};

// Span kernels -------------------------------------------------------------

inline double energy(const EnergyContext& ctx, std::span<const double> u)
{
    const auto v = ctx.potential_values();
    double quad = gradient_energy<double>(ctx.domain(), u);
    double nonlinear = 0.0;
    for (std::size_t s = 0; s < u.size(); ++s) {
        quad += v[s] * u[s] * u[s];
        nonlinear += ctx.F(s, u[s]);
    }
    return 0.5 * quad - nonlinear;
}

/// g = -Lap u + V u - f(x, u)
inline void energy_gradient(const EnergyContext& ctx, std::span<const double> u, std::span<double> g)
{
    apply_laplacian<double>(ctx.domain(), u, g);
    const auto v = ctx.potential_values();
    for (std::size_t s = 0; s < u.size(); ++s)
        g[s] = -g[s] + v[s] * u[s] - ctx.f(s, u[s]);
}

/// Phi for a complex field, using F(x, |psi|).
inline double energy(const EnergyContext& ctx, std::span<const std::complex<double>> psi)
{
    const auto v = ctx.potential_values();
    double quad = gradient_energy<std::complex<double>>(ctx.domain(), psi);
    double nonlinear = 0.0;
    for (std::size_t s = 0; s < psi.size(); ++s) {
        const double r = std::abs(psi[s]);
        quad += v[s] * r * r;
        nonlinear += ctx.F(s, r);
    }
    return 0.5 * quad - nonlinear;
}

// Field-level API ------------------------------------------------------------

inline double energy(const EnergyContext& ctx, const LatticeField& u)
{
    detail::require_same_domain(ctx.domain(), u.domain(), "energy");
    return energy(ctx, u.values());
}

inline LatticeField energy_gradient(const EnergyContext& ctx, const LatticeField& u)
{
    detail::require_same_domain(ctx.domain(), u.domain(), "energy_gradient");
    LatticeField g(u.domain());
    energy_gradient(ctx, u.values(), g.values());
    return g;
}

/// lambda = <f(., u) - (-Lap + V) u, u> / ||u||^2, the residual-minimizing multiplier.
inline double lagrange_multiplier(const EnergyContext& ctx, const LatticeField& u)
{
    const double norm2 = squared_norm(u.values());
    if (!(norm2 > 0.0))
        throw std::invalid_argument("lagrange_multiplier: zero field");
    const LatticeField g = energy_gradient(ctx, u);
    return -inner(g, u) / norm2;
}

struct Residual
{
    LatticeField field;
    double norm;            // ||r||_2
    double relative_norm;   // ||r||_2 / ||u||_2, or 0 for u == 0
};

/// r = -Lap u + V u + lambda u - f(x, u)
inline Residual el_residual(const EnergyContext& ctx, const LatticeField& u, double lambda)
{
    LatticeField r = energy_gradient(ctx, u);
    for (std::size_t s = 0; s < r.size(); ++s)
        r[s] += lambda * u[s];
    const double norm = std::sqrt(squared_norm(r.values()));
    const double un = std::sqrt(squared_norm(u.values()));
    return {std::move(r), norm, un > 0.0 ? norm / un : 0.0};
}

}   // namespace dnls

#endif   // DNLS_ENERGY_HPP
