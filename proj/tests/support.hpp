#ifndef DNLS_TESTS_SUPPORT_HPP
#define DNLS_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dnls/lattice.hpp"

namespace dnls::test {

/// -Lap assembled from coordinates alone: degree 2d on the diagonal, -1 for
/// every pair of sites at l1 distance 1. Does not touch the neighbor tables.
inline Eigen::MatrixXd dense_negative_laplacian(const BoxDomain& domain)
{
    const auto n = static_cast<Eigen::Index>(domain.site_count());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = 2.0 * domain.dimension();
        const auto xi = domain.coordinates(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto xj = domain.coordinates(static_cast<std::size_t>(j));
            int dist = 0;
            for (std::size_t k = 0; k < xi.size(); ++k)
                dist += std::abs(xi[k] - xj[k]);
            if (dist == 1)
                A(i, j) = -1.0;
        }
    }
    return A;
}

/// Smallest eigenvalue of -Lap on the box.
inline double ground_eigenvalue(const BoxDomain& domain)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_negative_laplacian(domain));
    return es.eigenvalues()(0);
}

/// Sum of (u(y) - u(x))^2 over undirected edges, enumerated over pairs of
/// points of the enlarged cube with u = 0 outside the box.
inline double edge_sum_gradient_energy(const LatticeField& u)
{
    const BoxDomain& domain = u.domain();
    const int d = domain.dimension();
    const int R = domain.radius() + 1;
    auto value = [&](const std::vector<int>& x) {
        const auto idx = domain.index_of(x);
        return idx ? u[*idx] : 0.0;
    };
    double total = 0.0;
    std::vector<int> x(static_cast<std::size_t>(d), -R);
    for (;;) {
        for (int k = 0; k < d; ++k) {
            std::vector<int> y = x;
            ++y[static_cast<std::size_t>(k)];
            const double diff = value(y) - value(x);
            total += diff * diff;
        }
        int k = d - 1;
        for (; k >= 0; --k) {
            if (++x[static_cast<std::size_t>(k)] <= R)
                break;
            x[static_cast<std::size_t>(k)] = -R;
        }
        if (k < 0)
            break;
    }
    return total;
}

inline LatticeField gaussian_field(std::mt19937_64& rng, const BoxDomain& domain, double scale = 1.0)
{
    std::normal_distribution<double> normal(0.0, scale);
    LatticeField u(domain);
    for (std::size_t s = 0; s < u.size(); ++s)
        u[s] = normal(rng);
    return u;
}

inline double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}   // namespace dnls::test

#endif   // DNLS_TESTS_SUPPORT_HPP
