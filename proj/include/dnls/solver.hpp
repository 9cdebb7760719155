#ifndef DNLS_SOLVER_HPP
#define DNLS_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnls/energy.hpp"
#include "dnls/lattice.hpp"
#include "dnls/random.hpp"
#include "dnls/sphere_descent.hpp"

namespace dnls {

class NotConvergedError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Test fields.

/// Tent profile (n - |x|) on |x| <= n, scaled to mass a. Requires 1 <= n <= L.
inline LatticeField tent_field(const BoxDomain& domain, double a, int n)
{
    if (n < 1)
        throw std::invalid_argument("tent_field: n must be >= 1");
    if (n > domain.radius())
        throw std::out_of_range("tent_field: n exceeds the box radius");
    if (!(a > 0.0))
        throw std::invalid_argument("tent_field: mass must be > 0");
    LatticeField u(domain);
    for (std::size_t s = 0; s < domain.site_count(); ++s)
        u[s] = std::max(0, n - domain.l1_norm(s));
    renormalize(u.values(), a);
    return u;
}

/// xi on the sup-norm ball |x|_inf <= R, zero elsewhere. The ball must fit in
/// the l1 box, i.e. d * R <= L.
inline LatticeField box_field(const BoxDomain& domain, double xi, int R)
{
    if (R < 0)
        throw std::invalid_argument("box_field: R must be >= 0");
    if (static_cast<long>(domain.dimension()) * R > domain.radius())
        throw std::out_of_range("box_field: sup-norm ball does not fit in the box");
    LatticeField u(domain);
    for (std::size_t s = 0; s < domain.site_count(); ++s) {
        if (domain.sup_norm(s) <= R)
            u[s] = xi;
    }
    return u;
}

// ---------------------------------------------------------------------------
// Solver.

enum class StartKind { tent, box, gaussian_bump, uniform_random };

inline std::string to_string(StartKind k)
{
    switch (k) {
    case StartKind::tent: return "tent";
    case StartKind::box: return "box";
    case StartKind::gaussian_bump: return "gaussian_bump";
    case StartKind::uniform_random: return "uniform_random";
    }
    return "unknown";
}

inline std::vector<StartKind> default_starts()
{
    return {StartKind::tent, StartKind::box, StartKind::gaussian_bump,
            StartKind::uniform_random, StartKind::uniform_random, StartKind::uniform_random};
}

struct SolveConfig
{
    DescentParams descent;
    std::vector<StartKind> starts = default_starts();
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool strict = false;   // throw NotConvergedError when no start converges
};

struct SolveResult
{
    LatticeField u;
    double mass = 0.0;
    double E = 0.0;
    double lambda = 0.0;
    double residual_norm = 0.0;
    double relative_residual = 0.0;
    long iters = 0;
    bool converged = false;
    std::string start_label{};
    std::size_t start_index = 0;
};

struct SolveReport
{
    std::vector<SolveResult> per_start;
    std::size_t best_index = 0;
    bool any_converged = false;

    const SolveResult& best() const { return per_start.at(best_index); }
};

namespace detail {

struct EnergyObjective
{
    const EnergyContext& ctx;
    double value(std::span<const double> u) const { return energy(ctx, u); }
    void gradient(std::span<const double> u, std::span<double> g) const { energy_gradient(ctx, u, g); }
};

}   // namespace detail

/**
 * Initial field for start `index` of kind `kind`. Random kinds draw from the
 * substream keyed by (seed, mass, index), so a start is reproducible on its own.
 */
inline LatticeField make_start(const EnergyContext& ctx, StartKind kind, std::size_t index,
                               std::uint64_t seed, std::string* label = nullptr)
{
    const BoxDomain& domain = ctx.domain();
    const int L = domain.radius();
    const int d = domain.dimension();
    const double a = ctx.mass();
    std::string name;
    LatticeField u(domain);

    switch (kind) {
    case StartKind::tent: {
        const int n = std::max(1, L / 2);
        if (n > L) {
            u = delta(domain, std::sqrt(a));
            name = "tent(n=0)";
        } else {
            u = tent_field(domain, a, n);
            name = "tent(n=" + std::to_string(n) + ")";
        }
        break;
    }
    case StartKind::box: {
        const int R = L / d;
        // amplitude is irrelevant once rescaled to the sphere
        u = box_field(domain, 1.0, R);
        name = "box(R=" + std::to_string(R) + ")";
        break;
    }
    case StartKind::gaussian_bump: {
        auto rng = substream(seed, stream_id(a, index));
        std::uniform_int_distribution<std::size_t> pick(0, domain.site_count() - 1);
        std::uniform_real_distribution<double> width_dist(0.5, 2.0);
        const auto center = domain.coordinates(pick(rng));
        const double w = width_dist(rng);
        for (std::size_t s = 0; s < domain.site_count(); ++s) {
            const auto x = domain.coordinates(s);
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                const double dx = x[static_cast<std::size_t>(k)] - center[static_cast<std::size_t>(k)];
                r2 += dx * dx;
            }
            u[s] = std::exp(-0.5 * r2 / (w * w));
        }
        name = "gaussian_bump";
        break;
    }
    case StartKind::uniform_random: {
        auto rng = substream(seed, stream_id(a, index));
        fill_gaussian(rng, u.values());
        name = "uniform_random";
        break;
    }
    }
    renormalize(u.values(), a);
    if (label)
        *label = name + "#" + std::to_string(index);
    return u;
}

/// Runs the descent from `u0` and packages the result with lambda and residual.
inline SolveResult descend_from(const EnergyContext& ctx, LatticeField u0, const DescentParams& params,
                                std::string label = {}, std::size_t index = 0,
                                const DescentObserver& observer = {})
{
    detail::require_same_domain(ctx.domain(), u0.domain(), "descend_from");
    const detail::EnergyObjective objective{ctx};
    const DescentStats stats = sphere_descent(objective, u0.values(), ctx.mass(), params, observer);

    SolveResult r{.u = std::move(u0)};
    r.mass = ctx.mass();
    r.E = energy(ctx, r.u);
    r.lambda = lagrange_multiplier(ctx, r.u);
    const Residual res = el_residual(ctx, r.u, r.lambda);
    r.residual_norm = res.norm;
    r.relative_residual = res.relative_norm;
    r.iters = stats.iters;
    r.converged = stats.converged;
    r.start_label = std::move(label);
    r.start_index = index;
    return r;
}

/**
 * Multi-start minimization of Phi over ||u||^2 = mass.
 *
 * The best result is the lowest-energy converged start (all starts if none
 * converged); energies within 1e-12 go to the lowest start index. Its energy
 * is an upper bound on the infimum over the sphere.
 */
inline SolveReport minimize_on_sphere(const EnergyContext& ctx, const SolveConfig& config)
{
    if (config.starts.empty())
        throw std::invalid_argument("minimize_on_sphere: no starts configured");
    if (!(config.descent.tol > 0.0))
        throw std::invalid_argument("minimize_on_sphere: tol must be > 0");

    auto run_one = [&](std::size_t i) {
        std::string label;
        LatticeField u0 = make_start(ctx, config.starts[i], i, config.seed, &label);
        return descend_from(ctx, std::move(u0), config.descent, label, i);
    };

    SolveReport report;
    const std::size_t n = config.starts.size();
    if (config.threads > 1 && n > 1) {
        std::vector<std::future<SolveResult>> pending;
        pending.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            pending.push_back(std::async(std::launch::async, run_one, i));
        for (auto& f : pending)
            report.per_start.push_back(f.get());
    } else {
        for (std::size_t i = 0; i < n; ++i)
            report.per_start.push_back(run_one(i));
    }

    report.any_converged = std::any_of(report.per_start.begin(), report.per_start.end(),
                                       [](const SolveResult& r) { return r.converged; });
    const SolveResult* best = nullptr;
    for (const auto& r : report.per_start) {
        if (report.any_converged && !r.converged)
            continue;
        if (!best || r.E < best->E - 1e-12)
            best = &r;
    }
    report.best_index = best->start_index;
    if (config.strict && !report.any_converged)
        throw NotConvergedError("minimize_on_sphere: no start converged at mass " + std::to_string(ctx.mass()));
    return report;
}

/**
 * Desk-scale oracle: best energy over `budget` uniform random points on the
 * sphere, each refined by descent, with the winner polished. Only for boxes
 * of at most 13 sites.
 */
inline double brute_force_min(const EnergyContext& ctx, long budget, std::uint64_t seed = 0)
{
    const BoxDomain& domain = ctx.domain();
    if (domain.site_count() > 13)
        throw std::invalid_argument("brute_force_min: domain too large");
    if (budget < 1)
        throw std::invalid_argument("brute_force_min: budget must be >= 1");

    DescentParams coarse;
    coarse.tol = 1e-7;
    coarse.max_iters = 20000;
    auto rng = substream(seed, 0xb0u);
    const detail::EnergyObjective objective{ctx};

    std::vector<double> u(domain.site_count()), best_u;
    double best = std::numeric_limits<double>::infinity();
    for (long k = 0; k < budget; ++k) {
        fill_gaussian(rng, u);
        if (squared_norm(u) == 0.0)
            continue;
        const DescentStats s = sphere_descent(objective, std::span<double>(u), ctx.mass(), coarse);
        if (s.value < best) {
            best = s.value;
            best_u = u;
        }
    }
    DescentParams fine;
    fine.tol = 1e-10;
    const DescentStats s = sphere_descent(objective, std::span<double>(best_u), ctx.mass(), fine);
    return std::min(best, s.value);
}

// ---------------------------------------------------------------------------
// Vanishing profiles beyond the box.

struct SpreadingBound
{
    double energy = std::numeric_limits<double>::infinity();
    int radius = 0;   // tent radius attaining it
};

inline int default_spreading_radius(int dimension)
{
    switch (dimension) {
    case 1: return 4096;
    case 2: return 256;
    case 3: return 64;
    default: return 16;
    }
}

/**
 * Smallest Phi over tent fields of radius n = 1, 2, 4, ..., max_radius at the
 * context's mass, each evaluated on Z^d (on a box of radius n, outside of
 * which the tent vanishes). These are finitely supported points of the
 * sphere, so the value is an upper bound on the lattice infimum that is not
 * limited by the box radius. Empty for tabulated potentials.
 */
inline std::optional<SpreadingBound> spreading_bound(const EnergyContext& ctx, int max_radius)
{
    if (ctx.potential().kind() == PotentialKind::table)
        return std::nullopt;
    SpreadingBound best;
    for (int n = 1; n <= max_radius; n *= 2) {
        const EnergyContext big(BoxDomain(ctx.domain().dimension(), n), ctx.potential(), ctx.nonlinearity(),
                                ctx.mass());
        const LatticeField u = tent_field(big.domain(), ctx.mass(), n);
        const double e = energy(big, u);
        if (e < best.energy)
            best = {e, n};
    }
    return best;
}

}   // namespace dnls

#endif   // DNLS_SOLVER_HPP
