#include "ccfv/analysis.hpp"
#include "ccfv/config.hpp"
#include "ccfv/errors.hpp"
#include "ccfv/output.hpp"
#include "ccfv/steady.hpp"
#include "ccfv/transport.hpp"
#include "ccfv/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace ccfv;

struct Options {
    std::string config_path;
    std::string out_override;
    bool quiet = false;
    long long seed = -1;
};

std::string resolve_out_dir(const Options& opt, const RunConfig& cfg) {
    if (!opt.out_override.empty())
        return opt.out_override;
    if (const char* env = std::getenv("CCFV_OUT_DIR"); env != nullptr && env[0] != '\0')
        return env;
    return cfg.output.directory;
}

RunConfig load(const Options& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (opt.seed >= 0)
        cfg.seed = static_cast<unsigned>(opt.seed);
    return cfg;
}

int cmd_simulate(const Options& opt) {
    RunConfig cfg = load(opt);
    const std::string dir = resolve_out_dir(opt, cfg);
    ensure_directory(dir);

    const TimeSeries series = simulate(cfg);
    const Mesh& mesh = *series.mesh;
    const BoundaryData bc = make_boundary_data(cfg, mesh);

    std::optional<StationaryState> stat;
    std::vector<EnergyReport> energies;
    if (cfg.analysis.attach_stationary && bc.min_g() > 0.0) {
        stat = solve_stationary(series.initial_mass, mesh, bc, cfg.solver.elliptic_tol,
                                cfg.solver.mass_tol, cfg.solver.newton_cap);
        energies = attach_energy(series, *stat, bc);
    }

    write_timeseries_csv(dir + "/timeseries.csv", series, stat ? &energies : nullptr);
    write_snapshots(dir, series);
    write_run_manifest(dir + "/run-manifest.json", cfg, stat);

    if (!opt.quiet) {
        const TimeRecord& last = series.records.back();
        std::cout << "simulate: " << series.aggregates.steps << " steps to t = " << last.t
                  << ", mass drift " << format_double(series.aggregates.max_mass_drift_rel)
                  << ", min n " << format_double(series.aggregates.min_n) << "\n";
        if (stat && !energies.empty())
            std::cout << "  final ||n - n_inf||_L2 = "
                      << format_double(std::sqrt(energies.back().E_n)) << "\n";
        std::cout << "  wrote " << dir << "/timeseries.csv and " << series.records.size()
                  << " snapshots\n";
    }
    return 0;
}

int cmd_stationary(const Options& opt) {
    RunConfig cfg = load(opt);
    const std::string dir = resolve_out_dir(opt, cfg);
    ensure_directory(dir);

    const Mesh mesh = make_mesh(cfg);
    const BoundaryData bc = make_boundary_data(cfg, mesh);
    double mass;
    if (cfg.init.mass) {
        mass = *cfg.init.mass;
    } else {
        const CellField n0 = make_initial_density(cfg, mesh);
        mass = integrate(n0);
    }
    const StationaryState stat = solve_stationary(mass, mesh, bc, cfg.solver.elliptic_tol,
                                                  cfg.solver.mass_tol, cfg.solver.newton_cap);
    write_stationary_csv(dir + "/stationary.csv", stat);
    write_stationary_manifest(dir + "/stationary-manifest.json", cfg, stat);

    if (!opt.quiet)
        std::cout << "stationary: alpha_inf = " << format_double(stat.alpha) << ", n_inf in ["
                  << format_double(stat.n.min()) << ", " << format_double(stat.n.max())
                  << "], residual " << format_double(stat.elliptic_residual) << "\n  wrote " << dir
                  << "/stationary.csv\n";
    return 0;
}

int cmd_verify(const Options& opt) {
    RunConfig cfg = load(opt);
    const std::string dir = resolve_out_dir(opt, cfg);
    ensure_directory(dir);

    const std::vector<CheckResult> checks = run_verification(cfg);
    nlohmann::json j;
    j["version"] = kVersion;
    j["passed"] = all_passed(checks);
    for (const CheckResult& c : checks)
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    std::ofstream out(dir + "/verify-report.json");
    if (!out)
        throw IoError("cannot open '" + dir + "/verify-report.json' for writing");
    out << j.dump(2) << '\n';
    out.flush();
    if (!out)
        throw IoError("write failure on verify-report.json");

    for (const CheckResult& c : checks)
        if (!opt.quiet || !c.passed)
            std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " — " << c.detail << "\n";
    if (!all_passed(checks)) {
        for (const CheckResult& c : checks)
            if (!c.passed)
                std::cerr << "verify failed: " << c.name << "\n";
        return 2;
    }
    if (!opt.quiet)
        std::cout << "verify: all " << checks.size() << " checks passed\n";
    return 0;
}

int cmd_sweep(const Options& opt) {
    RunConfig cfg = load(opt);
    if (!cfg.sweep)
        throw ConfigError("sweep: config has no [sweep] section");
    const std::string dir = resolve_out_dir(opt, cfg);
    ensure_directory(dir);

    const Mesh mesh = make_mesh(cfg);
    const double lambda1 = neumann_lambda1(mesh);
    const double c_trace = cfg.analysis.c_trace
                               ? *cfg.analysis.c_trace
                               : estimate_trace_constant(mesh, cfg.analysis.trace_q,
                                                         cfg.analysis.trace_lambda,
                                                         cfg.analysis.trace_samples, cfg.seed);

    std::vector<SweepRow> rows;
    for (double m : cfg.sweep->m_list) {
        for (double g : cfg.sweep->g_list) {
            for (double gamma : cfg.sweep->gamma_list) {
                SweepRow row;
                row.m = m;
                row.gnorm = g;
                row.gamma = gamma;
                try {
                    RunConfig point = cfg;
                    point.sweep.reset();
                    point.params.gamma = gamma;
                    point.params.g = {g, g, g, g};
                    point.init.mass = m;

                    KInputs in{m, g, gamma, lambda1, c_trace, mesh.domain_measure()};
                    row.K = K_of(in);

                    const TimeSeries series = simulate(point);
                    const BoundaryData bc = make_boundary_data(point, *series.mesh);
                    const StationaryState stat =
                        solve_stationary(series.initial_mass, *series.mesh, bc,
                                         point.solver.elliptic_tol, point.solver.mass_tol,
                                         point.solver.newton_cap);
                    const std::vector<EnergyReport> energies = attach_energy(series, stat, bc);
                    const Convergence conv =
                        detect_convergence(energies, point.analysis.tail_fraction);
                    row.converged = conv.converged;
                    row.rate = conv.rate;
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
                rows.push_back(row);
                if (!opt.quiet)
                    std::cout << "sweep point m=" << format_double(row.m)
                              << " g=" << format_double(row.gnorm)
                              << " gamma=" << format_double(row.gamma) << ": K="
                              << format_double(row.K)
                              << (row.error.empty()
                                      ? std::string(row.converged ? ", converged" : ", not converged")
                                      : ", error: " + row.error)
                              << "\n";
            }
        }
    }
    write_sweep_csv(dir + "/sweep.csv", rows);
    if (!opt.quiet)
        std::cout << "sweep: wrote " << rows.size() << " rows to " << dir << "/sweep.csv\n";
    return 0;
}

int cmd_trace_constant(const Options& opt) {
    RunConfig cfg = load(opt);
    const std::string dir = resolve_out_dir(opt, cfg);
    ensure_directory(dir);

    const Mesh mesh = make_mesh(cfg);
    const double q = cfg.analysis.trace_q;
    const double lambda = cfg.analysis.trace_lambda;
    const double c_hat =
        estimate_trace_constant(mesh, q, lambda, cfg.analysis.trace_samples, cfg.seed);
    const TraceValidation val = validate_trace_constant(mesh, q, lambda, c_hat, 1000,
                                                        cfg.seed + 1000);

    nlohmann::json j;
    j["version"] = kVersion;
    j["q"] = q;
    j["lambda"] = lambda;
    j["samples"] = cfg.analysis.trace_samples;
    j["seed"] = cfg.seed;
    j["C_hat"] = c_hat;
    j["validation_worst_factor"] = val.worst_factor;
    j["validation_holds"] = val.holds;
    std::ofstream out(dir + "/trace-constant.json");
    if (!out)
        throw IoError("cannot open '" + dir + "/trace-constant.json' for writing");
    out << j.dump(2) << '\n';

    if (!opt.quiet)
        std::cout << "trace-constant: C_hat = " << format_double(c_hat) << " (worst fresh factor "
                  << format_double(val.worst_factor) << (val.holds ? ", validates" : ", FAILS")
                  << ")\n";
    return val.holds ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ccfv: finite-volume simulator for the chemotaxis-consumption system with "
                 "Robin oxygen boundary conditions"};
    app.set_version_flag("--version", ccfv::kVersion);
    app.require_subcommand(1);

    Options opt;
    app.add_option("--out", opt.out_override, "output directory override");
    app.add_flag("--quiet", opt.quiet, "suppress progress output");
    app.add_option("--seed", opt.seed, "random seed override");

    int mode = 0;
    auto add = [&](const char* name, const char* desc, int m) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->fallthrough(); // global flags may follow the subcommand
        sub->add_option("config", opt.config_path, "config file")->required();
        sub->callback([&mode, m] { mode = m; });
        return sub;
    };
    add("simulate", "run the coupled system and write time series + snapshots", 1);
    add("stationary", "solve the stationary system at the prescribed mass", 2);
    add("verify", "run the full invariant suite", 3);
    add("sweep", "map convergence across a (m, g, gamma) grid", 4);
    add("trace-constant", "estimate and validate the trace-inequality constant", 5);

    CLI11_PARSE(app, argc, argv);

    try {
        switch (mode) {
        case 1: return cmd_simulate(opt);
        case 2: return cmd_stationary(opt);
        case 3: return cmd_verify(opt);
        case 4: return cmd_sweep(opt);
        case 5: return cmd_trace_constant(opt);
        }
        return 1;
    } catch (const ccfv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ccfv::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const ccfv::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
