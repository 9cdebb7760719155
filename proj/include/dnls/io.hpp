#ifndef DNLS_IO_HPP
#define DNLS_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "dnls/evolution.hpp"
#include "dnls/inequalities.hpp"
#include "dnls/lattice.hpp"
#include "dnls/model.hpp"
#include "dnls/solver.hpp"
#include "dnls/thresholds.hpp"

namespace dnls {

/// Writes to a sibling temp file and renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush())
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* scan_csv_header() { return "a,E,lambda,residual,iters,converged"; }
inline const char* trajectory_csv_header() { return "t,mass,energy,mod_dev,phase_err"; }

inline std::string scan_csv(const ThresholdScan& scan)
{
    std::string s = std::string(scan_csv_header()) + "\n";
    for (std::size_t i = 0; i < scan.a_grid.size(); ++i) {
        const SolveResult& r = scan.results[i];
        s += fmt17(scan.a_grid[i]) + "," + fmt17(r.E) + "," + fmt17(r.lambda) + "," + fmt17(r.residual_norm) +
             "," + std::to_string(r.iters) + "," + (r.converged ? "true" : "false") + "\n";
    }
    return s;
}

inline std::string trajectory_csv(const Trajectory& tr)
{
    std::string s = std::string(trajectory_csv_header()) + "\n";
    for (const auto& p : tr.samples) {
        s += fmt17(p.t) + "," + fmt17(p.mass) + "," + fmt17(p.energy) + "," + fmt17(p.mod_dev) + "," +
             fmt17(p.phase_err) + "\n";
    }
    return s;
}

inline std::string field_csv(const LatticeField& u)
{
    std::ostringstream os;
    write_field_csv(os, u);
    return os.str();
}

// JSON views ---------------------------------------------------------------

inline nlohmann::json to_json(const SolveResult& r)
{
    return {{"a", r.mass},
            {"E", r.E},
            {"lambda", r.lambda},
            {"residual", r.residual_norm},
            {"relative_residual", r.relative_residual},
            {"iters", r.iters},
            {"converged", r.converged},
            {"start_label", r.start_label}};
}

inline nlohmann::json to_json(const AlphaEstimate& a)
{
    nlohmann::json j{{"status", to_string(a.status)}, {"lower", a.lower}};
    if (std::isfinite(a.upper))
        j["upper"] = a.upper;
    else
        j["upper"] = nullptr;
    return j;
}

inline nlohmann::json to_json(const ConstantEstimate& c)
{
    return {{"inequality", c.inequality}, {"d", c.d},         {"p", c.p},           {"estimate", c.estimate},
            {"direction", c.direction},   {"box_L", c.box_L}, {"trials", c.trials}, {"seed", c.seed}};
}

inline nlohmann::json to_json(const HypothesisReport& h)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : h.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    nlohmann::json j{{"checks", checks}, {"all_passed", h.all_passed()}};
    if (h.xi_witness)
        j["xi_witness"] = *h.xi_witness;
    return j;
}

inline nlohmann::json to_json(const CurveReport& r)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        nlohmann::json e{{"name", c.name}, {"passed", c.passed}, {"worst_violation", c.worst_violation}};
        e["index"] = c.index ? nlohmann::json(*c.index) : nlohmann::json(nullptr);
        if (!c.diagnosis.empty())
            e["diagnosis"] = c.diagnosis;
        checks.push_back(e);
    }
    return {{"checks", checks}, {"all_passed", r.all_passed()}};
}

}   // namespace dnls

#endif   // DNLS_IO_HPP
