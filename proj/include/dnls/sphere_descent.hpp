#ifndef DNLS_SPHERE_DESCENT_HPP
#define DNLS_SPHERE_DESCENT_HPP

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

/// A smooth objective on R^n with its Euclidean gradient.
template <class T>
concept SmoothObjective = requires(const T& obj, std::span<const double> x, std::span<double> g) {
    { obj.value(x) } -> std::convertible_to<double>;
    obj.gradient(x, g);
};

struct DescentParams
{
    double tol = 1e-9;                 // stop when the tangential gradient norm is <= tol
    long max_iters = 200000;
    double initial_step = 1.0;
    double shrink = 0.5;
    double sufficient_decrease = 1e-4;
    double min_step = 1e-16;
};

struct DescentStats
{
    double value = 0.0;
    double gradient_norm = 0.0;
    long iters = 0;
    bool converged = false;
};

struct DescentStep
{
    long iter;
    double value;
    double mass;            // ||u||^2 after the retraction
    double gradient_norm;   // tangential gradient norm before the step
    double step;
};

using DescentObserver = std::function<void(const DescentStep&)>;

/// Rescales u so that ||u||^2 == mass. Throws on a zero vector.
inline void renormalize(std::span<double> u, double mass)
{
    const double n2 = squared_norm(u);
    if (!(n2 > 0.0))
        throw std::invalid_argument("renormalize: zero vector");
    const double c = std::sqrt(mass / n2);
    for (double& x : u)
        x *= c;
}

/**
 * Projected gradient descent on the sphere {||u||^2 = mass}.
 *
 * Each step moves along the tangential gradient g - (<g,u>/mass) u and
 * retracts by rescaling. The step is found by Armijo backtracking, starting
 * from a Barzilai-Borwein guess (or twice the previous step), capped at
 * initial_step. Once the expected decrease drops below the rounding level of
 * the objective, the last accepted step is reused and accepted unless the
 * objective rises by more than that level.
 *
 * `u` is updated in place and starts from the given point, rescaled.
 */
template <SmoothObjective Objective>
DescentStats sphere_descent(const Objective& objective, std::span<double> u, double mass,
                            const DescentParams& params, const DescentObserver& observer = {})
{
    if (!(mass > 0.0))
        throw std::invalid_argument("sphere_descent: mass must be > 0");
    const std::size_t n = u.size();
    renormalize(u, mass);

    std::vector<double> g(n), trial(n), prev_u(n), prev_g(n);
    bool have_prev = false;
    DescentStats stats;
    double value = objective.value(u);
    double step = params.initial_step;
    double previous_gnorm = std::numeric_limits<double>::infinity();

    for (long k = 0;; ++k) {
        objective.gradient(u, g);
        const double radial = dot(g, u) / mass;
        for (std::size_t i = 0; i < n; ++i)
            g[i] -= radial * u[i];
        const double gnorm = std::sqrt(squared_norm(g));

        stats.value = value;
        stats.gradient_norm = gnorm;
        stats.iters = k;
        if (gnorm <= params.tol) {
            stats.converged = true;
            return stats;
        }
        if (k >= params.max_iters)
            return stats;

        const double rounding = 1e-14 * (1.0 + std::abs(value));
        const double g2 = gnorm * gnorm;
        const bool below_rounding = step * g2 < rounding;

        double t = below_rounding ? step : std::min(params.initial_step, 2.0 * step);
        if (!below_rounding && have_prev) {
            // Barzilai-Borwein trial from the last accepted pair
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double si = u[i] - prev_u[i];
                ss += si * si;
                sy += si * (g[i] - prev_g[i]);
            }
            if (sy > 0.0)
                t = std::min(params.initial_step, ss / sy);
        }
        if (below_rounding && gnorm > 2.0 * previous_gnorm)
            t *= params.shrink;

        bool accepted = false;
        double trial_value = value;
        while (t >= params.min_step) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = u[i] - t * g[i];
            renormalize(trial, mass);
            trial_value = objective.value(trial);
            const double predicted = params.sufficient_decrease * t * g2;
            if (predicted >= rounding) {
                if (trial_value <= value - predicted) {
                    accepted = true;
                    break;
                }
            } else if (trial_value <= value + rounding) {
                accepted = true;
                break;
            }
            t *= params.shrink;
        }
        if (!accepted)
            return stats;   // stalled: no admissible step

        std::copy(u.begin(), u.end(), prev_u.begin());
        std::copy(g.begin(), g.end(), prev_g.begin());
        have_prev = true;
        std::copy(trial.begin(), trial.end(), u.begin());
        value = trial_value;
        step = t;
        previous_gnorm = gnorm;
        if (observer)
            observer({k, value, squared_norm(u), gnorm, t});
    }
}

}   // namespace dnls

#endif   // DNLS_SPHERE_DESCENT_HPP
