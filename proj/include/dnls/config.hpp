#ifndef DNLS_CONFIG_HPP
#define DNLS_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dnls/evolution.hpp"
#include "dnls/lattice.hpp"
#include "dnls/model.hpp"
#include "dnls/solver.hpp"
#include "dnls/thresholds.hpp"

namespace dnls {

using json = nlohmann::json;

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct BoundsConfig
{
    std::optional<double> xi;       // witness for the upper bound; defaults to the hypothesis check's witness
    double delta = 0.5;
    double eps = 0.5;
    std::optional<double> gns_constant;   // estimated from the box when absent
};

struct InequalityConfig
{
    long trials = 20;
    long sweep = 1000;   // random fields per property in `verify`
};

/**
 * A parsed run configuration. Sections:
 *
 *   domain        {"d": int, "L": int}
 *   potential     {"kind": "zero" | "well" | "trapping" | "table", ...}
 *   nonlinearity  {"kind": "zero" | "power" | "combined_power" | "modulated", ...}
 *   mass          number
 *   mass_grid     [numbers] or {"spacing": "log" | "linear", "min", "max", "points"}
 *   solver        {"tol", "max_iters", "initial_step", "starts", "threads", "eps_neg",
 *                  "spreading_radius", "refine"}
 *   evolution     {"dt", "T", "scheme", "sample_every"}
 *   bounds        {"xi", "delta", "eps", "gns_constant"}
 *   inequalities  {"trials", "sweep"}
 *   output_dir    string
 *   seed          unsigned integer
 */
struct RunConfig
{
    BoxDomain domain{1, 0};
    Potential potential = Potential::zero();
    Nonlinearity nonlinearity = Nonlinearity::zero();
    std::optional<double> mass;
    std::vector<double> mass_grid;
    ScanConfig scan;
    int refine = 0;
    EvolutionConfig evolution;
    BoundsConfig bounds;
    InequalityConfig inequalities;
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    json potential_json;
    json nonlinearity_json;
};

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError("missing field '" + where + key + "'");
    return obj.at(key);
}

inline double number(const json& v, const std::string& name)
{
    if (!v.is_number())
        throw ConfigError("field '" + name + "' must be a number");
    return v.get<double>();
}

inline long integer(const json& v, const std::string& name)
{
    if (!v.is_number_integer())
        throw ConfigError("field '" + name + "' must be an integer");
    return v.get<long>();
}

inline double number_or(const json& obj, const std::string& key, double fallback, const std::string& where)
{
    return obj.contains(key) ? number(obj.at(key), where + key) : fallback;
}

inline long integer_or(const json& obj, const std::string& key, long fallback, const std::string& where)
{
    return obj.contains(key) ? integer(obj.at(key), where + key) : fallback;
}

inline std::string kind_of(const json& obj, const std::string& where)
{
    const json& k = require(obj, "kind", where);
    if (!k.is_string())
        throw ConfigError("field '" + where + "kind' must be a string");
    return k.get<std::string>();
}

}   // namespace detail

inline Nonlinearity parse_nonlinearity(const json& j, const std::string& where = "nonlinearity.")
{
    const std::string kind = detail::kind_of(j, where);
    auto num = [&](const char* key) { return detail::number(detail::require(j, key, where), where + key); };
    if (kind == "zero")
        return Nonlinearity::zero();
    if (kind == "power")
        return Nonlinearity::power(num("p"));
    if (kind == "combined_power")
        return Nonlinearity::combined_power(num("p"), num("q"), num("mu"));
    if (kind == "modulated") {
        const Nonlinearity base = parse_nonlinearity(detail::require(j, "base", where), where + "base.");
        return Nonlinearity::modulated(base, num("b0"), detail::number_or(j, "decay", 1.0, where));
    }
    throw ConfigError("unknown " + where + "kind '" + kind + "'");
}

inline Potential parse_potential(const json& j, const BoxDomain& domain)
{
    const std::string where = "potential.";
    const std::string kind = detail::kind_of(j, where);
    auto num = [&](const char* key) { return detail::number(detail::require(j, key, where), where + key); };
    if (kind == "zero")
        return Potential::zero();
    if (kind == "well")
        return Potential::well(num("c"));
    if (kind == "trapping")
        return Potential::trapping(num("beta"));
    if (kind == "table") {
        const json& values = detail::require(j, "values", where);
        if (!values.is_array())
            throw ConfigError("field 'potential.values' must be an array");
        std::vector<double> v;
        for (const auto& x : values)
            v.push_back(detail::number(x, "potential.values"));
        return Potential::table(domain, std::move(v), detail::number_or(j, "v_inf", 0.0, where));
    }
    throw ConfigError("unknown potential.kind '" + kind + "'");
}

inline std::vector<double> parse_mass_grid(const json& j)
{
    std::vector<double> grid;
    if (j.is_array()) {
        for (const auto& x : j)
            grid.push_back(detail::number(x, "mass_grid"));
    } else if (j.is_object()) {
        const std::string w = "mass_grid.";
        const json& sp = detail::require(j, "spacing", w);
        const double lo = detail::number(detail::require(j, "min", w), w + "min");
        const double hi = detail::number(detail::require(j, "max", w), w + "max");
        const long n = detail::integer(detail::require(j, "points", w), w + "points");
        if (n < 2 || !(lo > 0.0) || !(hi > lo))
            throw ConfigError("mass_grid needs points >= 2 and 0 < min < max");
        const std::string spacing = sp.is_string() ? sp.get<std::string>() : "";
        for (long i = 0; i < n; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(n - 1);
            if (spacing == "log")
                grid.push_back(lo * std::pow(hi / lo, s));
            else if (spacing == "linear")
                grid.push_back(lo + (hi - lo) * s);
            else
                throw ConfigError("mass_grid.spacing must be 'log' or 'linear'");
        }
        grid.back() = hi;
    } else {
        throw ConfigError("field 'mass_grid' must be an array or an object");
    }
    try {
        detail::require_grid(grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("mass_grid: ") + e.what());
    }
    return grid;
}

inline std::vector<StartKind> parse_starts(const json& j)
{
    if (!j.is_array() || j.empty())
        throw ConfigError("field 'solver.starts' must be a nonempty array");
    std::vector<StartKind> out;
    for (const auto& s : j) {
        const std::string name = s.is_string() ? s.get<std::string>() : "";
        if (name == "tent")
            out.push_back(StartKind::tent);
        else if (name == "box")
            out.push_back(StartKind::box);
        else if (name == "gaussian_bump")
            out.push_back(StartKind::gaussian_bump);
        else if (name == "uniform_random")
            out.push_back(StartKind::uniform_random);
        else
            throw ConfigError("unknown start kind in solver.starts: '" + name + "'");
    }
    return out;
}

/**
 * Builds a RunConfig. domain, potential and nonlinearity are required;
 * whether mass or mass_grid is needed depends on the subcommand, so that
 * check is left to the caller.
 */
inline RunConfig parse_config(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    RunConfig c;
    try {
        const json& dom = detail::require(j, "domain", "");
        const long d = detail::integer(detail::require(dom, "d", "domain."), "domain.d");
        const long L = detail::integer(detail::require(dom, "L", "domain."), "domain.L");
        c.domain = BoxDomain(static_cast<int>(d), static_cast<int>(L));

        c.potential_json = detail::require(j, "potential", "");
        c.potential = parse_potential(c.potential_json, c.domain);
        c.nonlinearity_json = detail::require(j, "nonlinearity", "");
        c.nonlinearity = parse_nonlinearity(c.nonlinearity_json);

        if (j.contains("mass")) {
            c.mass = detail::number(j.at("mass"), "mass");
            if (!(*c.mass > 0.0))
                throw ConfigError("field 'mass' must be > 0");
        }
        if (j.contains("mass_grid"))
            c.mass_grid = parse_mass_grid(j.at("mass_grid"));

        if (j.contains("seed")) {
            const json& s = j.at("seed");
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
                throw ConfigError("field 'seed' must be a nonnegative integer");
            c.seed = s.get<std::uint64_t>();
        }

        const json solver = j.value("solver", json::object());
        const std::string sw = "solver.";
        SolveConfig& sc = c.scan.solve;
        sc.descent.tol = detail::number_or(solver, "tol", sc.descent.tol, sw);
        sc.descent.max_iters = detail::integer_or(solver, "max_iters", sc.descent.max_iters, sw);
        sc.descent.initial_step = detail::number_or(solver, "initial_step", sc.descent.initial_step, sw);
        if (solver.contains("starts"))
            sc.starts = parse_starts(solver.at("starts"));
        sc.threads = static_cast<unsigned>(std::max(1L, detail::integer_or(solver, "threads", 1, sw)));
        c.scan.eps_neg = detail::number_or(solver, "eps_neg", c.scan.eps_neg, sw);
        c.scan.spreading_radius =
            static_cast<int>(detail::integer_or(solver, "spreading_radius", c.scan.spreading_radius, sw));
        c.refine = static_cast<int>(detail::integer_or(solver, "refine", 0, sw));
        if (!(sc.descent.tol > 0.0) || sc.descent.max_iters < 1 || !(sc.descent.initial_step > 0.0))
            throw ConfigError("solver: tol, max_iters and initial_step must be positive");
        if (!(c.scan.eps_neg > 0.0))
            throw ConfigError("field 'solver.eps_neg' must be > 0");

        const json evo = j.value("evolution", json::object());
        const std::string ew = "evolution.";
        c.evolution.dt = detail::number_or(evo, "dt", c.evolution.dt, ew);
        c.evolution.T = detail::number_or(evo, "T", c.evolution.T, ew);
        c.evolution.sample_every = detail::integer_or(evo, "sample_every", c.evolution.sample_every, ew);
        if (evo.contains("scheme")) {
            const json& s = evo.at("scheme");
            c.evolution.scheme = parse_scheme(s.is_string() ? s.get<std::string>() : "");
        }
        c.evolution.validate();

        const json bounds = j.value("bounds", json::object());
        const std::string bw = "bounds.";
        if (bounds.contains("xi"))
            c.bounds.xi = detail::number(bounds.at("xi"), "bounds.xi");
        c.bounds.delta = detail::number_or(bounds, "delta", c.bounds.delta, bw);
        c.bounds.eps = detail::number_or(bounds, "eps", c.bounds.eps, bw);
        if (bounds.contains("gns_constant"))
            c.bounds.gns_constant = detail::number(bounds.at("gns_constant"), "bounds.gns_constant");

        const json ineq = j.value("inequalities", json::object());
        c.inequalities.trials = detail::integer_or(ineq, "trials", c.inequalities.trials, "inequalities.");
        c.inequalities.sweep = detail::integer_or(ineq, "sweep", c.inequalities.sweep, "inequalities.");
        if (c.inequalities.trials < 1 || c.inequalities.sweep < 1)
            throw ConfigError("inequalities: trials and sweep must be >= 1");

        if (j.contains("output_dir")) {
            if (!j.at("output_dir").is_string())
                throw ConfigError("field 'output_dir' must be a string");
            c.output_dir = j.at("output_dir").get<std::string>();
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
    c.scan.solve.seed = c.seed;
    return c;
}

inline json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

}   // namespace dnls

#endif   // DNLS_CONFIG_HPP
