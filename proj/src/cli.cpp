// cli.cpp: heatrect subcommands

#include "heatrect/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "heatrect/floquet_solver.hpp"
#include "heatrect/metrics.hpp"
#include "heatrect/oracle.hpp"
#include "heatrect/parallel.hpp"
#include "heatrect/stability.hpp"
#include "heatrect/static_solver.hpp"
#include "heatrect/sweep.hpp"

namespace heatrect {

namespace {

constexpr const char* version = "heatrect 1.0.0";
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return format_number(v, 12); }

Model static_part(const Model& m) {
    return Model(NetworkSpec(m.network().masses(), m.network().v0()), m.baths(), m.units());
}

double model_omega_d(const RunConfig& c) { return c.model.omega_d.value_or(nan); }
double model_c0(const RunConfig& c) { return c.model.type == "two_oscillator" ? c.model.c0 : nan; }

double relative_residual(const CurrentsReport& r) {
    double scale = std::abs(r.work);
    for (double q : r.heat) scale = std::max(scale, std::abs(q));
    return scale > 0.0 ? std::abs(r.first_law_residual) / scale : 0.0;
}

std::function<void(std::size_t, std::size_t)> progress_printer(bool enabled) {
    if (!enabled) return {};
    return [last = -1](std::size_t done, std::size_t total) mutable {
        const int pct = static_cast<int>(100 * done / total);
        if (pct != last || done == total) {
            last = pct;
            std::cerr << "\r[heatrect] " << done << "/" << total << " (" << pct << "%)" << (done == total ? "\n" : "")
                      << std::flush;
        }
    };
}

// Per-bath currents; one row per (grid point, bath).
ResultTable currents_table(const RunConfig& cfg, bool driven, unsigned workers, bool progress) {
    const auto grid = grid_coordinates(cfg.sweep.axes);
    std::vector<RunConfig> configs;
    for (const auto& c : grid) configs.push_back(config_at(cfg, c));
    std::vector<CurrentsReport> reps(grid.size());
    std::vector<StabilityReport> stab(grid.size());
    parallel_for(
        grid.size(), workers,
        [&](std::size_t i) {
            const Model m = build_model(configs[i]);
            if (!driven) {
                reps[i] = static_currents(static_part(m), solver_options(configs[i]));
                return;
            }
            if (!m.network().driven()) throw ValidationError("driven-currents: model.omega_d is not set");
            stab[i] = stability_check(m, stability_options(configs[i]));
            if (!stab[i].stable)
                throw InstabilityError("driven-currents: no periodic steady state (" + stab[i].reason + ")");
            reps[i] = averaged_currents(m, solver_options(configs[i]));
        },
        progress_printer(progress && grid.size() > 1));

    ResultTable t;
    for (const auto& ax : cfg.sweep.axes) t.columns.push_back(axis_column(ax.path));
    for (const char* c : {"bath", "node", "temperature", "heat"}) t.columns.push_back(c);
    if (driven)
        for (const char* c : {"local_work", "quasi_heat"}) t.columns.push_back(c);
    double worst_res = 0.0, worst_quad = 0.0, worst_tail = 0.0;
    bool converged = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = reps[i];
        const Model m = build_model(configs[i]);
        const auto quasi = quasi_currents(r);
        for (std::size_t a = 0; a < r.heat.size(); ++a) {
            std::vector<Cell> row(grid[i].begin(), grid[i].end());
            row.push_back(static_cast<long long>(a + 1));
            row.push_back(static_cast<long long>(m.baths()[a].node));
            row.push_back(r.temperatures[a]);
            row.push_back(r.heat[a]);
            if (driven) {
                row.push_back(r.local_work[a]);
                row.push_back(quasi[a]);
            }
            t.add_row(std::move(row));
        }
        worst_res = std::max(worst_res, relative_residual(r));
        worst_quad = std::max(worst_quad, r.quadrature_error);
        worst_tail = std::max(worst_tail, r.tail_bound);
        converged = converged && r.order_converged;
    }
    if (grid.size() == 1) {
        const auto& r = reps.front();
        if (driven) t.metadata.emplace_back("work", num(r.work));
        t.metadata.emplace_back("first_law_residual", num(r.first_law_residual));
        t.metadata.emplace_back("omega_max", num(r.omega_max));
        t.metadata.emplace_back("evaluations", std::to_string(r.evaluations));
        if (driven) t.metadata.emplace_back("floquet_order", std::to_string(r.floquet_order));
    }
    t.metadata.emplace_back("max_relative_first_law_residual", num(worst_res));
    t.metadata.emplace_back("max_quadrature_error", num(worst_quad));
    t.metadata.emplace_back("max_tail_bound", num(worst_tail));
    if (driven) t.metadata.emplace_back("order_converged", converged ? "true" : "false");
    return t;
}

MapOptions map_options(const RunConfig& c) {
    MapOptions o;
    o.solver = solver_options(c);
    o.stability = stability_options(c);
    return o;
}

void enforce_policy(const RunConfig& c, const RectificationPoint& p) {
    if (c.solver.instability_policy == "error" && !p.stable)
        throw InstabilityError("grid point omega_d = " + num(p.omega_d) + ", c0 = " + num(p.c0) + ": " + p.reason);
}

ResultTable rectification_table(const RunConfig& cfg, bool quasi, unsigned workers, bool progress) {
    std::vector<std::string> cols;
    if (quasi)
        cols = {"q_fwd", "q_rev", "w_fwd", "w_rev", "qq_fwd", "qq_rev", "r_full", "r_quasi", "residual", "stable",
                "reason"};
    else
        cols = {"q_fwd", "q_rev", "r_full", "r_quasi", "stable", "reason"};
    std::mutex lock;
    double worst = 0.0;
    ResultTable t = run_sweep(
        cfg, cols,
        [&](const RunConfig& pc, const std::vector<double>&) -> std::vector<Cell> {
            const Model m = build_model(pc);
            if (!m.network().driven()) throw ValidationError("rectification map: model.omega_d is not set");
            const RectificationPoint p = rectification_point(m, model_omega_d(pc), model_c0(pc), map_options(pc));
            enforce_policy(pc, p);
            if (p.stable && std::isfinite(p.residual)) {
                std::lock_guard<std::mutex> g(lock);
                worst = std::max(worst, p.residual);
            }
            if (quasi)
                return {p.q_fwd, p.q_rev, p.w_fwd, p.w_rev, p.q_fwd + p.w_fwd, p.q_rev + p.w_rev, p.r_full, p.r_quasi,
                        p.residual, p.stable, p.reason};
            return {p.q_fwd, p.q_rev, p.r_full, p.r_quasi, p.stable, p.reason};
        },
        workers, progress_printer(progress));
    t.metadata.emplace_back("max_relative_first_law_residual", num(worst));
    return t;
}

ResultTable stability_table(const RunConfig& cfg, unsigned workers, bool progress) {
    return run_sweep(
        cfg, {"stable", "reason", "max_multiplier", "max_condition"},
        [](const RunConfig& pc, const std::vector<double>&) -> std::vector<Cell> {
            const Model m = build_model(pc);
            const StabilityReport r = stability_check(m, stability_options(pc));
            return {r.stable, r.reason, r.max_multiplier, r.max_condition};
        },
        workers, progress_printer(progress));
}

ResultTable transistor_dynamic_table(const RunConfig& cfg, unsigned workers, bool progress) {
    return run_sweep(
        cfg, {"e_dot", "a1", "a2", "residual", "derivative_step", "defined", "reason"},
        [](const RunConfig& pc, const std::vector<double>&) -> std::vector<Cell> {
            const Model m = build_model(pc);
            if (!m.network().driven()) throw ValidationError("transistor-dynamic: model.omega_d is not set");
            if (m.bath_count() != 2) throw ValidationError("transistor-dynamic: two baths required");
            const double wd = *m.network().omega_d();
            const StabilityReport st = stability_check(m, stability_options(pc));
            if (!st.stable) {
                if (pc.solver.instability_policy == "error")
                    throw InstabilityError("transistor-dynamic at omega_d = " + num(wd) + ": " + st.reason);
                return {nan, nan, nan, nan, nan, false, st.reason};
            }
            try {
                const AmplificationPoint a = amplification_dynamic(m, wd, pc.sweep.derivative_step, solver_options(pc));
                return {a.e_dot, a.a1, a.a2, a.residual, a.derivative_step, true, std::string{}};
            } catch (const DomainError&) {
                return {nan, nan, nan, nan, nan, false, std::string("transistor_undefined")};
            } catch (const InstabilityError&) {
                return {nan, nan, nan, nan, nan, false, std::string("unstable_solver")};
            }
        },
        workers, progress_printer(progress));
}

ResultTable transistor_static_table(const RunConfig& cfg, unsigned workers, bool progress) {
    return run_sweep(
        cfg, {"t3", "e_dot", "a1", "a2", "residual", "derivative_step", "a1_integral", "a2_integral"},
        [](const RunConfig& pc, const std::vector<double>&) -> std::vector<Cell> {
            const Model m = static_part(build_model(pc));
            if (m.bath_count() != 3) throw ValidationError("transistor-static: three baths required");
            const double t3 = m.baths()[2].temperature;
            const SolverOptions so = solver_options(pc);
            const AmplificationPoint a = amplification_static(m, t3, pc.sweep.derivative_step, so);
            const auto ints = static_control_integrals(m, so);
            const double sum = ints[0] + ints[1];
            return {t3, a.e_dot, a.a1, a.a2, a.residual, a.derivative_step, -ints[0] / sum, -ints[1] / sum};
        },
        workers, progress_printer(progress));
}

CommandResult oracle_check(const RunConfig& cfg) {
    if (!cfg.sweep.axes.empty()) throw ConfigError("oracle-check: sweep axes are not supported");
    const Model m = build_model(cfg);
    const bool driven = m.network().driven();
    CurrentsReport sp;
    if (driven) {
        const StabilityReport st = stability_check(m, stability_options(cfg));
        if (!st.stable) throw InstabilityError("oracle-check: no periodic steady state (" + st.reason + ")");
        sp = averaged_currents(m, solver_options(cfg));
    } else {
        sp = static_currents(m, solver_options(cfg));
    }
    const OracleComparison c = oracle_compare(m, sp, oracle_settings(cfg));
    const double limit_a = driven ? 0.05 : 0.03;
    const double limit_b = 0.01;

    CommandResult out;
    out.table.columns = {"bath", "spectral", "commutator", "bath_energy", "relative_deviation"};
    for (std::size_t a = 0; a < c.spectral.size(); ++a)
        out.table.add_row({static_cast<long long>(a + 1), c.spectral[a], c.commutator[a], c.bath_energy[a],
                           c.relative_per_bath[a]});
    out.table.metadata = {{"deviation_spectral", num(c.deviation_spectral)},
                          {"deviation_definitions", num(c.deviation_definitions)},
                          {"inconclusive", c.inconclusive ? "true" : "false"},
                          {"modes_per_bath", std::to_string(c.modes_per_bath)},
                          {"bath_omega_max", num(c.bath_omega_max)},
                          {"t_end", num(c.t_end)},
                          {"recurrence_time", num(c.recurrence_time)}};
    out.report = {{"driven", driven},
                  {"deviation_spectral", c.deviation_spectral},
                  {"deviation_definitions", c.deviation_definitions},
                  {"threshold_spectral", limit_a},
                  {"threshold_definitions", limit_b},
                  {"pass_spectral", c.deviation_spectral < limit_a},
                  {"pass_definitions", c.deviation_definitions < limit_b},
                  {"inconclusive", c.inconclusive},
                  {"window_variation", c.window_variation},
                  {"oracle_work", c.oracle_work},
                  {"spectral_work", c.spectral_work},
                  {"modes_per_bath", c.modes_per_bath},
                  {"bath_omega_max", c.bath_omega_max},
                  {"t_end", c.t_end},
                  {"recurrence_time", c.recurrence_time},
                  {"window", {c.trajectory.window_start, c.trajectory.window_end}}};
    if (cfg.solver.oracle.trajectory) {
        std::ostringstream os;
        write_trajectory_csv(os, c.trajectory);
        out.trajectory_csv = os.str();
    }
    return out;
}

std::string gnuplot_script(const std::string& sub, const ResultTable& t, const std::string& csv_name,
                           std::size_t naxes, const std::vector<std::size_t>& counts) {
    std::ostringstream g;
    g << "# " << sub << ": plots " << csv_name << "\n";
    g << "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n";
    g << "set terminal pngcairo size 1000,700\nset output '" << sub << ".png'\n";
    if (naxes == 2) {
        std::string value = "r_full";
        if (sub == "stability-map") value = "stable";
        if (sub == "quasi-rectification-map") value = "r_quasi";
        std::size_t col = 0;
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            if (t.columns[i] == value) col = i + 1;
        g << "set xlabel '" << t.columns[0] << "'\nset ylabel '" << t.columns[1] << "'\n";
        g << "set view map\nset pm3d map\nset dgrid3d " << counts[0] << "," << counts[1] << "\n";
        g << "splot '" << csv_name << "' using 1:2:" << col << " with pm3d title '" << value << "'\n";
    } else if (naxes == 1) {
        g << "set xlabel '" << t.columns[0] << "'\nplot ";
        bool first = true;
        for (std::size_t i = 1; i < t.columns.size(); ++i) {
            const auto& c = t.columns[i];
            if (c == "reason" || c == "defined" || c == "stable" || c == "derivative_step") continue;
            g << (first ? "" : ", ") << "'" << csv_name << "' using 1:" << i + 1 << " with lines";
            first = false;
        }
        g << "\n";
    } else {
        g << "set style data histogram\nplot '" << csv_name << "' using 4:xtic(1)\n";
    }
    return g.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    f << content;
    if (!f) throw IoError("write failed for '" + p.string() + "'");
}

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::validation: return "validation";
    case ErrorKind::singular: return "singular";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::instability: return "instability";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

int report_error(std::ostream& err, const std::string& kind, const std::string& msg, int code) {
    err << Json{{"error", {{"kind", kind}, {"message", msg}, {"exit_code", code}}}}.dump() << "\n";
    return code;
}

} // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"static-currents",     "driven-currents",   "rectification-map",
                                            "quasi-rectification-map", "transistor-dynamic", "transistor-static",
                                            "oracle-check",        "stability-map"};
    return s;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config: return exit_code::config;
    case ErrorKind::domain:
    case ErrorKind::validation:
    case ErrorKind::unsupported: return exit_code::validation;
    case ErrorKind::singular:
    case ErrorKind::quadrature:
    case ErrorKind::instability: return exit_code::solver;
    case ErrorKind::io: return exit_code::io;
    }
    return exit_code::solver;
}

CommandResult run_command(const std::string& sub, const RunConfig& cfg, unsigned workers, bool progress) {
    CommandResult r;
    if (sub == "static-currents")
        r.table = currents_table(cfg, false, workers, progress);
    else if (sub == "driven-currents")
        r.table = currents_table(cfg, true, workers, progress);
    else if (sub == "rectification-map")
        r.table = rectification_table(cfg, false, workers, progress);
    else if (sub == "quasi-rectification-map")
        r.table = rectification_table(cfg, true, workers, progress);
    else if (sub == "transistor-dynamic")
        r.table = transistor_dynamic_table(cfg, workers, progress);
    else if (sub == "transistor-static")
        r.table = transistor_static_table(cfg, workers, progress);
    else if (sub == "stability-map")
        r.table = stability_table(cfg, workers, progress);
    else if (sub == "oracle-check")
        r = oracle_check(cfg);
    else
        throw ConfigError("unknown subcommand '" + sub + "'");
    return r;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steady-state heat transport in static and periodically driven harmonic networks", "heatrect"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1, 1);
    std::string config_path, out_dir;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::optional<double> tolerance;
    bool gnuplot = false, quiet = false;
    for (const auto& name : subcommands()) {
        auto* sc = app.add_subcommand(name);
        sc->add_option("--config", config_path, "JSON configuration file")->required();
        sc->add_option("--out", out_dir, "Output directory (overrides output.directory)");
        sc->add_option("--workers", workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
        sc->add_option("--tolerance", tolerance, "Relative quadrature tolerance (overrides solver.quad_rel_tol)")
            ->check(CLI::PositiveNumber);
        sc->add_flag("--emit-gnuplot", gnuplot, "Also write a gnuplot script next to the CSV");
        sc->add_flag("--quiet", quiet, "No progress output");
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::Success& e) {
        std::ostringstream o, e2;
        app.exit(e, o, e2);
        out << o.str();
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "usage", e.what(), exit_code::usage);
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        const auto t0 = std::chrono::steady_clock::now();
        Json doc = read_config_file(config_path);
        apply_env_overrides(doc, environment_variables());
        RunConfig cfg = parse_config(doc);
        if (tolerance) cfg.solver.quad_rel_tol = *tolerance;
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        build_model(cfg);  // validation before any work

        CommandResult res = run_command(sub, cfg, workers, !quiet);
        std::vector<std::pair<std::string, std::string>> meta = {
            {"tool", version},
            {"subcommand", sub},
            {"config_hash", "fnv1a64:" + hex64(config_hash(cfg))},
            {"quad_rel_tol", num(cfg.solver.quad_rel_tol)},
            {"rows", std::to_string(res.table.rows.size())}};
        meta.insert(meta.end(), res.table.metadata.begin(), res.table.metadata.end());
        res.table.metadata = meta;

        namespace fs = std::filesystem;
        const fs::path dir(cfg.output.directory);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
        const int prec = cfg.output.precision;
        for (const auto& fmt : cfg.output.formats) {
            if (fmt == "csv") {
                std::ostringstream os;
                write_csv(os, res.table, prec);
                write_file(dir / (sub + ".csv"), os.str());
                out << (dir / (sub + ".csv")).string() << "\n";
            } else if (fmt == "json") {
                Json j = table_json(res.table);
                j["config"] = to_json(cfg);
                j["config"].erase("output");
                if (!res.report.is_null()) j["report"] = res.report;
                write_file(dir / (sub + ".json"), j.dump(2) + "\n");
                out << (dir / (sub + ".json")).string() << "\n";
            }
        }
        if (!res.trajectory_csv.empty()) write_file(dir / (sub + "_trajectory.csv"), res.trajectory_csv);
        if (gnuplot) {
            std::vector<std::size_t> counts;
            for (const auto& ax : cfg.sweep.axes) counts.push_back(static_cast<std::size_t>(ax.count));
            write_file(dir / (sub + ".gp"), gnuplot_script(sub, res.table, sub + ".csv", counts.size(), counts));
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!quiet) err << "[heatrect] " << sub << " finished in " << format_number(wall, 4) << " s\n";
        return exit_code::ok;
    } catch (const Error& e) {
        return report_error(err, kind_name(e.kind()), e.what(), exit_code_for(e.kind()));
    } catch (const std::exception& e) {
        return report_error(err, "internal", e.what(), exit_code::solver);
    }
}

} // namespace heatrect
