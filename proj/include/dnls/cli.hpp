#ifndef DNLS_CLI_HPP
#define DNLS_CLI_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dnls/config.hpp"
#include "dnls/evolution.hpp"
#include "dnls/inequalities.hpp"
#include "dnls/io.hpp"
#include "dnls/model.hpp"
#include "dnls/solver.hpp"
#include "dnls/thresholds.hpp"

namespace dnls::cli {

enum ExitCode : int { ok = 0, invalid_config = 2, not_converged = 3, verification_failed = 4 };

struct Flags
{
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    bool strict = false;
};

inline const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"solve", "scan", "bounds", "gns", "hardy", "verify", "evolve"};
    return names;
}

namespace detail {

using nlohmann::json;

inline unsigned thread_cap(unsigned requested)
{
    if (const char* env = std::getenv("LATTICE_NLS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1)
            return std::min<unsigned>(requested, static_cast<unsigned>(v));
    }
    return requested;
}

inline json problem_json(const RunConfig& c)
{
    return {{"d", c.domain.dimension()},
            {"L", c.domain.radius()},
            {"potential", c.potential_json},
            {"nonlinearity", c.nonlinearity_json},
            {"seed", c.seed}};
}

inline EnergyContext context(const RunConfig& c, double a)
{
    return EnergyContext(c.domain, c.potential, c.nonlinearity, a);
}

inline double require_mass(const RunConfig& c)
{
    if (!c.mass)
        throw ConfigError("missing field 'mass'");
    return *c.mass;
}

inline const std::vector<double>& require_grid(const RunConfig& c)
{
    if (c.mass_grid.empty())
        throw ConfigError("missing field 'mass_grid'");
    return c.mass_grid;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::filesystem::path out_path(const RunConfig& c, const char* name)
{
    return std::filesystem::path(c.output_dir) / name;
}

inline std::optional<double> xi_for(const RunConfig& c)
{
    if (c.bounds.xi)
        return c.bounds.xi;
    return check_hypotheses(c.nonlinearity, c.potential, SampleGrid::standard(BoxDomain(c.domain.dimension(), 0)))
        .xi_witness;
}

inline json alpha_upper_json(const RunConfig& c)
{
    const auto xi = xi_for(c);
    if (!xi || !(c.nonlinearity.limit_F(*xi) > 0.0))
        return nullptr;
    return alpha_upper_bound(c.nonlinearity.limit(), *xi, c.domain.dimension());
}

// Subcommands --------------------------------------------------------------

inline int solve(const RunConfig& c, std::ostream& log)
{
    const EnergyContext ctx = context(c, require_mass(c));
    const SolveReport report = minimize_on_sphere(ctx, c.scan.solve);
    const SolveResult& best = report.best();
    json starts = json::array();
    for (const auto& r : report.per_start)
        starts.push_back(to_json(r));
    json j = to_json(best);
    j["problem"] = problem_json(c);
    j["starts"] = starts;
    atomic_write(out_path(c, "solve.json"), dump(j));
    atomic_write(out_path(c, "field.csv"), field_csv(best.u));
    log << "E=" << fmt17(best.E) << " lambda=" << fmt17(best.lambda) << " converged=" << best.converged << "\n";
    return ok;
}

inline ThresholdScan run_scan(const RunConfig& c)
{
    const EnergyContext tmpl = context(c, c.mass_grid.front());
    ThresholdScan scan = scan_energy_curve(tmpl, c.mass_grid, c.scan);
    if (c.refine > 0)
        scan.alpha = refine_alpha(tmpl, c.scan, scan.alpha, c.refine);
    return scan;
}

inline json bounds_json(const RunConfig& c)
{
    const int d = c.domain.dimension();
    const Nonlinearity lim = c.nonlinearity.limit();
    json j{{"d", d}};
    const auto xi = xi_for(c);
    j["xi"] = xi ? json(*xi) : json(nullptr);
    j["alpha_upper"] = alpha_upper_json(c);
    const bool sub = is_mass_subcritical_at_zero(lim, d);
    j["mass_subcritical"] = sub;
    const auto CF = critical_growth_constant(c.nonlinearity, d, c.bounds.delta);
    if (sub || !CF || !(*CF > 0.0)) {
        j["alpha_lower"] = sub ? json(0.0) : json(nullptr);
        return j;
    }
    double C_gns = 0.0;
    if (c.bounds.gns_constant) {
        C_gns = *c.bounds.gns_constant;
    } else {
        QuotientSearch search;
        search.seed = c.seed;
        C_gns = estimate_gns_constant(c.domain, c.inequalities.trials, search).estimate;
    }
    j["C_F"] = *CF;
    j["delta"] = c.bounds.delta;
    j["eps"] = c.bounds.eps;
    j["C_gns"] = C_gns;
    j["alpha_lower"] = alpha_lower_bound(*CF, c.bounds.delta, c.bounds.eps, C_gns, d);
    j["alpha_lower_caveat"] = "C_gns is a numerical lower estimate of the best constant, so alpha_lower is "
                              "heuristic rather than certified";
    return j;
}

inline int scan(const RunConfig& c, std::ostream& log)
{
    require_grid(c);
    const ThresholdScan s = run_scan(c);
    const json b = bounds_json(c);
    json j{{"problem", problem_json(c)},
           {"eps_neg", s.eps_neg},
           {"alpha_bracket", to_json(s.alpha)},
           {"bounds", {{"upper", b["alpha_upper"]}, {"lower", b["alpha_lower"]}}},
           {"mass_subcritical", b["mass_subcritical"]},
           {"a", s.a_grid},
           {"upper_envelope", s.upper_values},
           {"spreading_radius", s.spreading_radius},
           {"all_converged", std::all_of(s.converged.begin(), s.converged.end(), [](bool v) { return v; })}};
    atomic_write(out_path(c, "scan.csv"), scan_csv(s));
    atomic_write(out_path(c, "scan_summary.json"), dump(j));
    log << "alpha " << to_string(s.alpha.status) << " (" << fmt17(s.alpha.lower) << ", " << fmt17(s.alpha.upper)
        << "]\n";
    return ok;
}

inline int bounds(const RunConfig& c, std::ostream& log)
{
    const json j = bounds_json(c);
    atomic_write(out_path(c, "bounds.json"), dump(j));
    log << j.dump() << "\n";
    return ok;
}

inline int constant(const RunConfig& c, bool hardy, std::ostream& log)
{
    QuotientSearch search;
    search.seed = c.seed;
    const ConstantEstimate est = hardy ? estimate_hardy_constant(c.domain, c.inequalities.trials, search)
                                       : estimate_gns_constant(c.domain, c.inequalities.trials, search);
    atomic_write(out_path(c, hardy ? "hardy.json" : "gns.json"), dump(to_json(est)));
    log << est.inequality << " " << est.direction << " estimate " << fmt17(est.estimate) << "\n";
    return ok;
}

inline json sweep_json(const SweepResult& r)
{
    return {{"name", r.name}, {"fields", r.fields}, {"failures", r.failures}, {"worst", r.worst},
            {"passed", r.passed()}};
}

inline int verify(const RunConfig& c, std::ostream& log)
{
    require_grid(c);
    bool ok_all = true;
    json j{{"problem", problem_json(c)}};

    const HypothesisReport hyp = check_hypotheses(c.nonlinearity, c.potential, SampleGrid::standard(c.domain));
    j["hypotheses"] = to_json(hyp);
    ok_all = ok_all && hyp.all_passed();

    const EnergyContext tmpl = context(c, c.mass_grid.front());
    const ThresholdScan s = run_scan(c);
    const CurveSamples samples = collect_curve_samples(tmpl, s, c.scan);
    const CurveReport curve = verify_curve_properties(tmpl, s, samples, 1e-6);
    j["curve"] = to_json(curve);
    j["alpha"] = to_json(s.alpha);
    ok_all = ok_all && curve.all_passed();

    const bool has_limit = c.potential.kind() != PotentialKind::zero || c.nonlinearity.is_modulated();
    if (has_limit && c.potential.kind() != PotentialKind::trapping) {
        const ThresholdScan inf = scan_energy_curve(tmpl.limit(), c.mass_grid, c.scan);
        double worst = -INFINITY;
        std::size_t at = 0;
        for (std::size_t i = 0; i < s.a_grid.size(); ++i) {
            const double gap = s.upper_values[i] - inf.upper_values[i];
            if (gap > worst) {
                worst = gap;
                at = i;
            }
        }
        const bool passed = worst <= 1e-6;
        j["limit_comparison"] = {{"passed", passed}, {"worst_violation", worst}, {"index", at}};
        ok_all = ok_all && passed;
    }

    const long n = c.inequalities.sweep;
    QuotientSearch search;
    search.seed = c.seed;
    const ConstantEstimate gns = estimate_gns_constant(c.domain, c.inequalities.trials, search);
    std::vector<SweepResult> sweeps{sweep_norm_monotonicity(c.domain, n, c.seed),
                                    sweep_gns(c.domain, gns.p, gns.estimate, n, c.seed)};
    if (c.domain.dimension() == 1)
        sweeps.push_back(sweep_sup_tv(c.domain, n, c.seed));
    if (c.domain.dimension() >= 3) {
        const ConstantEstimate h = estimate_hardy_constant(c.domain, c.inequalities.trials, search);
        sweeps.push_back(sweep_hardy(c.domain, h.estimate, n, c.seed));
    }
    json sj = json::array();
    for (const auto& r : sweeps) {
        sj.push_back(sweep_json(r));
        ok_all = ok_all && r.passed();
    }
    j["inequalities"] = sj;
    j["passed"] = ok_all;
    atomic_write(out_path(c, "verify.json"), dump(j));
    log << (ok_all ? "verification passed" : "verification FAILED") << "\n";
    return ok_all ? ok : verification_failed;
}

inline int evolve(const RunConfig& c, std::ostream& log)
{
    const EnergyContext ctx = context(c, require_mass(c));
    const SolveResult best = minimize_on_sphere(ctx, c.scan.solve).best();
    const StandingWaveReport r = standing_wave_check(ctx, best.u, best.lambda, c.evolution);
    const json j{{"problem", problem_json(c)},
                 {"solve", to_json(best)},
                 {"scheme", to_string(c.evolution.scheme)},
                 {"dt", c.evolution.dt},
                 {"T", c.evolution.T},
                 {"max_mod_dev", r.max_mod_dev},
                 {"max_phase_err", r.max_phase_err},
                 {"mass_drift", r.mass_drift},
                 {"energy_drift", r.energy_drift}};
    atomic_write(out_path(c, "trajectory.csv"), trajectory_csv(r.trajectory));
    atomic_write(out_path(c, "evolve.json"), dump(j));
    log << "mod_dev=" << fmt17(r.max_mod_dev) << " mass_drift=" << fmt17(r.mass_drift) << "\n";
    return ok;
}

}   // namespace detail

/// Runs one subcommand. Diagnostics go to `err`, progress to `log`.
inline int run(const std::string& subcommand, const Flags& flags, std::ostream& log = std::cout,
               std::ostream& err = std::cerr)
{
    RunConfig c;
    try {
        c = parse_config(load_json(flags.config));
        if (flags.seed) {
            c.seed = *flags.seed;
            c.scan.solve.seed = *flags.seed;
        }
        if (flags.out)
            c.output_dir = *flags.out;
        c.scan.solve.strict = flags.strict;
        c.scan.solve.threads = detail::thread_cap(c.scan.solve.threads);

        if (subcommand == "solve")
            return detail::solve(c, log);
        if (subcommand == "scan")
            return detail::scan(c, log);
        if (subcommand == "bounds")
            return detail::bounds(c, log);
        if (subcommand == "gns")
            return detail::constant(c, false, log);
        if (subcommand == "hardy")
            return detail::constant(c, true, log);
        if (subcommand == "verify")
            return detail::verify(c, log);
        if (subcommand == "evolve")
            return detail::evolve(c, log);
        err << "error: unknown subcommand '" << subcommand << "'\n";
        return invalid_config;
    } catch (const ConfigError& e) {
        err << "invalid config: " << e.what() << "\n";
        return invalid_config;
    } catch (const NotConvergedError& e) {
        err << "not converged: " << e.what() << "\n";
        return not_converged;
    }
}

/// argv entry point: lattice_nls <subcommand> --config PATH [--out DIR] [--seed N] [--strict]
inline int main(int argc, char** argv)
{
    CLI::App app{"Mass-constrained discrete NLS ground states on truncated lattices"};
    app.require_subcommand(1);
    Flags flags;
    std::string chosen;
    for (const auto& name : subcommands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config, "run configuration (JSON)")->required();
        sub->add_option("--out", flags.out, "output directory, overrides output_dir");
        sub->add_option("--seed", flags.seed, "random seed, overrides seed");
        sub->add_flag("--strict", flags.strict, "exit 3 when a solve does not converge");
        sub->callback([&chosen, name] { chosen = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid_config;
    }
    try {
        return run(chosen, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}   // namespace dnls::cli

#endif   // DNLS_CLI_HPP
