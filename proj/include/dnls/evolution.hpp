#ifndef DNLS_EVOLUTION_HPP
#define DNLS_EVOLUTION_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "dnls/energy.hpp"
#include "dnls/lattice.hpp"

namespace dnls {

// Integrates
//
//     i psi_t = -Lap psi + V psi - g(x, |psi|) psi,   g(x, r) = f(x, r) / r,
//
// with g(x, 0) = 0. A real solution u of -Lap u + V u + lambda u = f(x, u)
// then gives the standing wave psi(t) = exp(i lambda t) u.

enum class Scheme { strang_split, implicit_midpoint };

inline std::string to_string(Scheme s)
{
    return s == Scheme::strang_split ? "strang_split" : "implicit_midpoint";
}

inline Scheme parse_scheme(const std::string& s)
{
    if (s == "strang_split")
        return Scheme::strang_split;
    if (s == "implicit_midpoint")
        return Scheme::implicit_midpoint;
    throw std::invalid_argument("unknown scheme: " + s);
}

struct EvolutionConfig
{
    double dt = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::strang_split;
    long sample_every = 100;      // steps between recorded samples; the final time is always recorded
    int direction = 1;            // -1 integrates backward in time
    double solve_tol = 1e-12;     // relative residual accepted from the linear and fixed-point solves
    int max_fixed_point = 100;

    void validate() const
    {
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw std::invalid_argument("evolution: dt must be > 0");
        if (!(T > 0.0) || !std::isfinite(T))
            throw std::invalid_argument("evolution: T must be > 0");
        if (!(dt < T))
            throw std::invalid_argument("evolution: dt must be < T");
        if (dt > 0.1)
            throw std::invalid_argument("evolution: dt must be <= 0.1");
        if (sample_every < 1)
            throw std::invalid_argument("evolution: sample_every must be >= 1");
        if (direction != 1 && direction != -1)
            throw std::invalid_argument("evolution: direction must be +1 or -1");
    }
};

class EvolutionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Reference standing wave exp(i lambda t) u for the diagnostics.
struct StandingWave
{
    LatticeField u;
    double lambda = 0.0;
};

struct TrajectorySample
{
    double t;
    double mass;
    double energy;
    double mod_dev;     // max_x | |psi(t,x)| - |ref(x)| |
    double phase_err;   // ||psi(t) - exp(i lambda t) ref||_2
};

struct Trajectory
{
    std::vector<TrajectorySample> samples;
    ComplexLatticeField final_state;
    long steps = 0;
};

namespace detail {

using cplx = std::complex<double>;
using SparseC = Eigen::SparseMatrix<cplx>;
using VectorC = Eigen::VectorXcd;

/// I + i c (-Lap + diag(shift))
inline SparseC shifted_operator(const BoxDomain& domain, double c, std::span<const double> shift)
{
    const std::size_t n = domain.site_count();
    const double degree = 2.0 * domain.dimension();
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(n * (2 * static_cast<std::size_t>(domain.dimension()) + 1));
    const cplx ic(0.0, c);
    for (std::size_t s = 0; s < n; ++s) {
        const double sh = shift.empty() ? 0.0 : shift[s];
        entries.emplace_back(s, s, 1.0 + ic * (degree + sh));
        for (std::ptrdiff_t y : domain.neighbors(s)) {
            if (y != BoxDomain::exterior)
                entries.emplace_back(s, y, -ic);
        }
    }
    SparseC m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return m;
}

class Integrator
{
public:
    Integrator(const EnergyContext& ctx, const EvolutionConfig& config, double h)
        : ctx_(ctx), config_(config), h_(h)
    {
        const std::span<const double> none;
        if (config.scheme == Scheme::strang_split) {
            // Crank-Nicolson for i psi_t = -Lap psi over a full step
            lhs_ = shifted_operator(ctx.domain(), 0.5 * h, none);
            rhs_ = shifted_operator(ctx.domain(), -0.5 * h, none);
        } else {
            lhs_ = shifted_operator(ctx.domain(), 0.5 * h, ctx.potential_values());
        }
        lu_.compute(lhs_);
        if (lu_.info() != Eigen::Success)
            throw EvolutionError("evolve: factorization failed");
    }

    void step(VectorC& psi, double t)
    {
        if (config_.scheme == Scheme::strang_split)
            strang(psi, t);
        else
            midpoint(psi, t);
    }

private:
    double g(std::size_t s, double r) const { return r > 0.0 ? ctx_.f(s, r) / r : 0.0; }

    void rotate(VectorC& psi, double tau) const
    {
        const auto v = ctx_.potential_values();
        for (Eigen::Index s = 0; s < psi.size(); ++s) {
            const auto i = static_cast<std::size_t>(s);
            const double w = v[i] - g(i, std::abs(psi[s]));
            psi[s] *= std::polar(1.0, -w * tau);
        }
    }

    VectorC solve(const VectorC& b, double t) const
    {
        VectorC x = lu_.solve(b);
        x += lu_.solve(b - lhs_ * x);   // one refinement pass
        const double bn = b.norm();
        if (lu_.info() != Eigen::Success || (lhs_ * x - b).norm() > config_.solve_tol * (bn > 0.0 ? bn : 1.0))
            throw EvolutionError("evolve: linear solve rejected at t=" + std::to_string(t));
        return x;
    }

    void strang(VectorC& psi, double t) const
    {
        rotate(psi, 0.5 * h_);
        psi = solve(rhs_ * psi, t);
        rotate(psi, 0.5 * h_);
    }

    // mid = psi - i h/2 (A + V - g(|mid|)) mid, iterated with g frozen on the right
    void midpoint(VectorC& psi, double t) const
    {
        VectorC mid = psi;
        VectorC b(psi.size());
        const cplx ih(0.0, 0.5 * h_);
        for (int k = 0;; ++k) {
            for (Eigen::Index s = 0; s < psi.size(); ++s)
                b[s] = psi[s] + ih * g(static_cast<std::size_t>(s), std::abs(mid[s])) * mid[s];
            VectorC next = solve(b, t);
            const double change = (next - mid).norm();
            const double scale = next.norm();
            mid = std::move(next);
            if (change <= config_.solve_tol * (scale > 0.0 ? scale : 1.0))
                break;
            if (k + 1 >= config_.max_fixed_point)
                throw EvolutionError("evolve: fixed-point iteration rejected step at t=" + std::to_string(t));
        }
        psi = 2.0 * mid - psi;
    }

    const EnergyContext& ctx_;
    const EvolutionConfig& config_;
    double h_;
    SparseC lhs_, rhs_;
    Eigen::SparseLU<SparseC> lu_;
};

inline TrajectorySample measure(const EnergyContext& ctx, const Eigen::VectorXcd& psi, double t,
                                const StandingWave& ref)
{
    const std::span<const std::complex<double>> view(psi.data(), static_cast<std::size_t>(psi.size()));
    TrajectorySample out{t, psi.squaredNorm(), energy(ctx, view), 0.0, 0.0};
    const std::complex<double> phase = std::polar(1.0, ref.lambda * t);
    double err2 = 0.0;
    for (Eigen::Index s = 0; s < psi.size(); ++s) {
        const double r = ref.u[static_cast<std::size_t>(s)];
        out.mod_dev = std::max(out.mod_dev, std::abs(std::abs(psi[s]) - std::abs(r)));
        err2 += std::norm(psi[s] - phase * r);
    }
    out.phase_err = std::sqrt(err2);
    return out;
}

}   // namespace detail

/**
 * Integrates from psi0 over [0, T] (or [0, -T] backward). The step is T / n
 * for the smallest n with T / n <= dt. Samples are taken at t = 0, every
 * `sample_every` steps and at the final time; mod_dev and phase_err are
 * measured against `reference`, or against psi0's real part with lambda = 0.
 */
inline Trajectory evolve(const EnergyContext& ctx, const ComplexLatticeField& psi0, const EvolutionConfig& config,
                         const std::optional<StandingWave>& reference = std::nullopt)
{
    config.validate();
    detail::require_same_domain(ctx.domain(), psi0.domain(), "evolve");
    StandingWave ref = reference.value_or(StandingWave{LatticeField(ctx.domain()), 0.0});
    if (!reference) {
        for (std::size_t s = 0; s < psi0.size(); ++s)
            ref.u[s] = psi0[s].real();
    }
    detail::require_same_domain(ctx.domain(), ref.u.domain(), "evolve reference");

    const long n = static_cast<long>(std::ceil(config.T / config.dt - 1e-9));
    const double h = config.direction * config.T / static_cast<double>(n);
    detail::Integrator integrator(ctx, config, h);

    Eigen::VectorXcd psi(static_cast<Eigen::Index>(psi0.size()));
    for (std::size_t s = 0; s < psi0.size(); ++s)
        psi[static_cast<Eigen::Index>(s)] = psi0[s];

    Trajectory traj{{}, ComplexLatticeField(ctx.domain()), n};
    traj.samples.push_back(detail::measure(ctx, psi, 0.0, ref));
    for (long k = 1; k <= n; ++k) {
        integrator.step(psi, (k - 1) * h);
        if (k % config.sample_every == 0 || k == n)
            traj.samples.push_back(detail::measure(ctx, psi, k * h, ref));
    }
    for (std::size_t s = 0; s < psi0.size(); ++s)
        traj.final_state[s] = psi[static_cast<Eigen::Index>(s)];
    return traj;
}

struct StandingWaveReport
{
    double max_mod_dev = 0.0;
    double max_phase_err = 0.0;
    double mass_drift = 0.0;     // max |mass(t) - mass(0)|
    double energy_drift = 0.0;   // max |Phi(t) - Phi(0)|
    Trajectory trajectory;
};

inline double max_mass_drift(const Trajectory& tr)
{
    double d = 0.0;
    for (const auto& s : tr.samples)
        d = std::max(d, std::abs(s.mass - tr.samples.front().mass));
    return d;
}

inline double max_energy_drift(const Trajectory& tr)
{
    double d = 0.0;
    for (const auto& s : tr.samples)
        d = std::max(d, std::abs(s.energy - tr.samples.front().energy));
    return d;
}

/// Evolves psi0 = u and compares with exp(i lambda t) u.
inline StandingWaveReport standing_wave_check(const EnergyContext& ctx, const LatticeField& u, double lambda,
                                              const EvolutionConfig& config)
{
    ComplexLatticeField psi0(u.domain());
    for (std::size_t s = 0; s < u.size(); ++s)
        psi0[s] = u[s];
    StandingWaveReport r{0.0, 0.0, 0.0, 0.0, evolve(ctx, psi0, config, StandingWave{u, lambda})};
    for (const auto& s : r.trajectory.samples) {
        r.max_mod_dev = std::max(r.max_mod_dev, s.mod_dev);
        r.max_phase_err = std::max(r.max_phase_err, s.phase_err);
    }
    r.mass_drift = max_mass_drift(r.trajectory);
    r.energy_drift = max_energy_drift(r.trajectory);
    return r;
}

}   // namespace dnls

#endif   // DNLS_EVOLUTION_HPP
