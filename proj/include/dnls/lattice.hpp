#ifndef DNLS_LATTICE_HPP
#define DNLS_LATTICE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

/**
 * Truncated lattice: the sites x of Z^d with |x| = sum_i |x_i| <= L.
 *
 * Sites are numbered 0..site_count()-1 in lexicographic order of their
 * coordinates. Values outside the box are taken to be zero, so every site
 * owns exactly 2d neighbor slots; slots pointing outside hold `exterior`.
 *
 * Copies share the (immutable) geometry tables.
 */
class BoxDomain
{
public:
    static constexpr std::ptrdiff_t exterior = -1;

    BoxDomain(int dimension, int radius)
    {
        if (dimension < 1)
            throw std::invalid_argument("BoxDomain: dimension must be >= 1");
        if (radius < 0)
            throw std::invalid_argument("BoxDomain: radius must be >= 0");
        geometry_ = std::make_shared<const Geometry>(dimension, radius);
    }

    int dimension() const { return geometry_->d; }
    int radius() const { return geometry_->L; }
    std::size_t site_count() const { return geometry_->count; }

    std::span<const int> coordinates(std::size_t site) const
    {
        const auto d = static_cast<std::size_t>(geometry_->d);
        return {geometry_->coords.data() + site * d, d};
    }

    /// Neighbor slots of a site, ordered (-e_1, +e_1, -e_2, +e_2, ...).
    std::span<const std::ptrdiff_t> neighbors(std::size_t site) const
    {
        const auto slots = 2 * static_cast<std::size_t>(geometry_->d);
        return {geometry_->neighbors.data() + site * slots, slots};
    }

    int l1_norm(std::size_t site) const { return geometry_->l1[site]; }

    int sup_norm(std::size_t site) const
    {
        int m = 0;
        for (int c : coordinates(site))
            m = std::max(m, std::abs(c));
        return m;
    }

    std::optional<std::size_t> index_of(std::span<const int> x) const
    {
        if (static_cast<int>(x.size()) != geometry_->d)
            return std::nullopt;
        const std::ptrdiff_t idx = geometry_->lookup(x);
        if (idx == exterior)
            return std::nullopt;
        return static_cast<std::size_t>(idx);
    }

    bool contains(std::span<const int> x) const { return index_of(x).has_value(); }

    friend bool operator==(const BoxDomain& a, const BoxDomain& b)
    {
        return a.geometry_ == b.geometry_ ||
               (a.dimension() == b.dimension() && a.radius() == b.radius());
    }

private:
    struct Geometry
    {
        int d;
        int L;
        std::size_t count = 0;
        std::vector<int> coords;
        std::vector<int> l1;
        std::vector<std::ptrdiff_t> neighbors;
        std::vector<std::int32_t> cube;   // dense (2L+1)^d table -> site index or -1

        Geometry(int dim, int radius) : d(dim), L(radius)
        {
            const std::size_t side = 2 * static_cast<std::size_t>(L) + 1;
            std::size_t cube_size = 1;
            for (int k = 0; k < d; ++k) {
                if (cube_size > (std::size_t{1} << 31) / side)
                    throw std::invalid_argument("BoxDomain: box too large");
                cube_size *= side;
            }
            cube.assign(cube_size, -1);

            std::vector<int> x(static_cast<std::size_t>(d), -L);
            for (std::size_t flat = 0; flat < cube_size; ++flat) {
                int norm = 0;
                for (int c : x)
                    norm += std::abs(c);
                if (norm <= L) {
                    cube[flat] = static_cast<std::int32_t>(count++);
                    coords.insert(coords.end(), x.begin(), x.end());
                    l1.push_back(norm);
                }
                // odometer increment, last coordinate fastest
                for (int k = d - 1; k >= 0; --k) {
                    if (++x[static_cast<std::size_t>(k)] <= L)
                        break;
                    x[static_cast<std::size_t>(k)] = -L;
                }
            }

            neighbors.assign(count * 2 * static_cast<std::size_t>(d), exterior);
            std::vector<int> y(static_cast<std::size_t>(d));
            for (std::size_t s = 0; s < count; ++s) {
                const int* xs = coords.data() + s * static_cast<std::size_t>(d);
                for (int k = 0; k < d; ++k) {
                    for (int sign = 0; sign < 2; ++sign) {
                        std::copy(xs, xs + d, y.begin());
                        y[static_cast<std::size_t>(k)] += sign == 0 ? -1 : 1;
                        neighbors[s * 2 * static_cast<std::size_t>(d) + 2 * static_cast<std::size_t>(k) +
                                  static_cast<std::size_t>(sign)] = lookup(y);
                    }
                }
            }
        }

        std::ptrdiff_t lookup(std::span<const int> x) const
        {
            const std::size_t side = 2 * static_cast<std::size_t>(L) + 1;
            std::size_t flat = 0;
            for (int c : x) {
                if (c < -L || c > L)
                    return exterior;
                flat = flat * side + static_cast<std::size_t>(c + L);
            }
            return cube[flat];
        }
    };

    std::shared_ptr<const Geometry> geometry_;
};

namespace detail {

inline void require_same_domain(const BoxDomain& a, const BoxDomain& b, const char* what)
{
    if (!(a == b))
        throw std::invalid_argument(std::string(what) + ": fields live on different domains");
}

}   // namespace detail

/// Real-valued function on a BoxDomain, zero outside the box.
template <class T>
class BasicField
{
public:
    using value_type = T;

    explicit BasicField(BoxDomain domain)
        : domain_(std::move(domain)), values_(domain_.site_count(), T{})
    {
    }

    BasicField(BoxDomain domain, std::vector<T> values)
        : domain_(std::move(domain)), values_(std::move(values))
    {
        if (values_.size() != domain_.site_count())
            throw std::invalid_argument("field: value count does not match site count");
        for (const T& v : values_) {
            if (!is_finite(v))
                throw std::invalid_argument("field: non-finite value");
        }
    }

    const BoxDomain& domain() const { return domain_; }
    std::size_t size() const { return values_.size(); }

    std::span<const T> values() const { return values_; }
    std::span<T> values() { return values_; }

    const T& operator[](std::size_t i) const { return values_[i]; }
    T& operator[](std::size_t i) { return values_[i]; }

    BasicField& operator*=(double c)
    {
        for (T& v : values_)
            v *= c;
        return *this;
    }

    friend BasicField operator*(double c, BasicField u) { return u *= c; }

    BasicField& operator+=(const BasicField& o)
    {
        detail::require_same_domain(domain_, o.domain_, "field +=");
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] += o.values_[i];
        return *this;
    }

    BasicField& operator-=(const BasicField& o)
    {
        detail::require_same_domain(domain_, o.domain_, "field -=");
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] -= o.values_[i];
        return *this;
    }

    friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
    friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
    friend BasicField operator-(BasicField a) { return a *= -1.0; }

private:
    static bool is_finite(double v) { return std::isfinite(v); }
    static bool is_finite(const std::complex<double>& v)
    {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    }

    BoxDomain domain_;
    std::vector<T> values_;
};

using LatticeField = BasicField<double>;
using ComplexLatticeField = BasicField<std::complex<double>>;

// ---------------------------------------------------------------------------
// Span kernels. These work on raw value arrays laid out in site order and are
// what the solver and the integrators call in their inner loops.

/// out = Lap u, with Lap u(x) = sum_{y~x} (u(y) - u(x)) and u = 0 off the box.
template <class T>
void apply_laplacian(const BoxDomain& domain, std::span<const T> u, std::span<T> out)
{
    const std::size_t n = domain.site_count();
    const double degree = 2.0 * domain.dimension();
    for (std::size_t s = 0; s < n; ++s) {
        T acc = -degree * u[s];
        for (std::ptrdiff_t y : domain.neighbors(s)) {
            if (y != BoxDomain::exterior)
                acc += u[static_cast<std::size_t>(y)];
        }
        out[s] = acc;
    }
}

/// Sum over undirected edges touching the box of |u(y) - u(x)|^2.
template <class T>
double gradient_energy(const BoxDomain& domain, std::span<const T> u)
{
    const std::size_t n = domain.site_count();
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto nb = domain.neighbors(s);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const std::ptrdiff_t y = nb[k];
            if (y == BoxDomain::exterior) {
                total += std::norm(u[s]);
            } else if (k % 2 == 1) {
                // interior edges are counted from their lower endpoint only
                total += std::norm(u[static_cast<std::size_t>(y)] - u[s]);
            }
        }
    }
    return total;
}

inline double dot(std::span<const double> u, std::span<const double> v)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        acc += u[i] * v[i];
    return acc;
}

inline double squared_norm(std::span<const double> u) { return dot(u, u); }

// ---------------------------------------------------------------------------
// Field-level operations.

template <class T>
BasicField<T> laplacian(const BasicField<T>& u)
{
    BasicField<T> out(u.domain());
    apply_laplacian<T>(u.domain(), u.values(), out.values());
    return out;
}

template <class T>
double gradient_energy(const BasicField<T>& u)
{
    return gradient_energy<T>(u.domain(), u.values());
}

template <class T>
double lp_norm(const BasicField<T>& u, double p)
{
    if (std::isnan(p) || p < 1.0)
        throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const T& v : u.values())
            m = std::max(m, std::abs(v));
        return m;
    }
    // scale by the sup norm so large p does not overflow
    double m = 0.0;
    for (const T& v : u.values())
        m = std::max(m, std::abs(v));
    if (m == 0.0)
        return 0.0;
    double acc = 0.0;
    for (const T& v : u.values())
        acc += std::pow(std::abs(v) / m, p);
    return m * std::pow(acc, 1.0 / p);
}

inline double inner(const LatticeField& u, const LatticeField& v)
{
    detail::require_same_domain(u.domain(), v.domain(), "inner");
    return dot(u.values(), v.values());
}

template <class T>
double mass(const BasicField<T>& u)
{
    double acc = 0.0;
    for (const T& v : u.values())
        acc += std::norm(v);
    return acc;
}

inline LatticeField delta(const BoxDomain& domain, std::span<const int> x, double value = 1.0)
{
    const auto idx = domain.index_of(x);
    if (!idx)
        throw std::out_of_range("delta: site outside the box");
    LatticeField u(domain);
    u[*idx] = value;
    return u;
}

/// delta at the origin.
inline LatticeField delta(const BoxDomain& domain, double value = 1.0)
{
    std::vector<int> origin(static_cast<std::size_t>(domain.dimension()), 0);
    return delta(domain, origin, value);
}

/**
 * u(. - shift). Throws if any nonzero value would leave the box, so the
 * shifted field represents the same function of Z^d translated.
 */
template <class T>
BasicField<T> translate(const BasicField<T>& u, std::span<const int> shift)
{
    const BoxDomain& domain = u.domain();
    if (static_cast<int>(shift.size()) != domain.dimension())
        throw std::invalid_argument("translate: shift has wrong dimension");
    BasicField<T> out(domain);
    std::vector<int> y(shift.size());
    for (std::size_t s = 0; s < domain.site_count(); ++s) {
        if (u[s] == T{})
            continue;
        const auto x = domain.coordinates(s);
        for (std::size_t k = 0; k < y.size(); ++k)
            y[k] = x[k] + shift[k];
        const auto idx = domain.index_of(y);
        if (!idx)
            throw std::out_of_range("translate: support leaves the box");
        out[*idx] = u[s];
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV: one row per site in enumeration order, columns x1..xd,value.

inline std::string field_csv_header(int dimension)
{
    std::string h;
    for (int k = 1; k <= dimension; ++k)
        h += "x" + std::to_string(k) + ",";
    return h + "value";
}

inline void write_field_csv(std::ostream& os, const LatticeField& u)
{
    const BoxDomain& domain = u.domain();
    os << field_csv_header(domain.dimension()) << '\n';
    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t s = 0; s < domain.site_count(); ++s) {
        line.str({});
        for (int c : domain.coordinates(s))
            line << c << ',';
        line << u[s];
        os << line.str() << '\n';
    }
}

inline LatticeField read_field_csv(std::istream& is, const BoxDomain& domain)
{
    std::string line;
    if (!std::getline(is, line) || line != field_csv_header(domain.dimension()))
        throw std::runtime_error("field csv: missing or unexpected header");
    LatticeField u(domain);
    std::vector<int> x(static_cast<std::size_t>(domain.dimension()));
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string cell;
        for (auto& c : x) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error("field csv: short row");
            c = std::stoi(cell);
        }
        if (!std::getline(row, cell))
            throw std::runtime_error("field csv: missing value");
        const auto idx = domain.index_of(x);
        if (!idx)
            throw std::runtime_error("field csv: site outside the box");
        const double v = std::stod(cell);
        if (!std::isfinite(v))
            throw std::runtime_error("field csv: non-finite value");
        u[*idx] = v;
        ++rows;
    }
    if (rows != domain.site_count())
        throw std::runtime_error("field csv: row count does not match site count");
    return u;
}

}   // namespace dnls

#endif   // DNLS_LATTICE_HPP
