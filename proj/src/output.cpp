#include "ccfv/output.hpp"

#include "ccfv/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ccfv {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out)
        throw IoError("write failure on '" + path + "'");
}

json config_json(const RunConfig& cfg) {
    json j;
    j["domain"] = {{"kind", cfg.domain.kind == DomainKind::Interval ? "interval" : "rectangle"},
                   {"length_x", cfg.domain.length_x},
                   {"length_y", cfg.domain.length_y},
                   {"cells_x", cfg.domain.cells_x},
                   {"cells_y", cfg.domain.cells_y}};
    j["params"] = {{"gamma", cfg.params.gamma},
                   {"chi", cfg.params.chi},
                   {"g_left", cfg.params.g[0]},
                   {"g_right", cfg.params.g[1]},
                   {"g_bottom", cfg.params.g[2]},
                   {"g_top", cfg.params.g[3]}};
    j["init"] = {{"profile", profile_name(cfg.init.profile)},
                 {"amplitude", cfg.init.amplitude},
                 {"width", cfg.init.width},
                 {"baseline", cfg.init.baseline},
                 {"center_x", cfg.init.center_x},
                 {"center_y", cfg.init.center_y},
                 {"center2_x", cfg.init.center2_x},
                 {"center2_y", cfg.init.center2_y}};
    if (cfg.init.mass)
        j["init"]["mass"] = *cfg.init.mass;
    j["time"] = {{"t_end", cfg.time.t_end},
                 {"dt_cap", cfg.time.dt_cap},
                 {"output_every", cfg.time.output_every}};
    j["solver"] = {{"elliptic_tol", cfg.solver.elliptic_tol},
                   {"mass_tol", cfg.solver.mass_tol},
                   {"newton_cap", cfg.solver.newton_cap}};
    j["analysis"] = {{"trace_lambda", cfg.analysis.trace_lambda},
                     {"trace_q", cfg.analysis.trace_q},
                     {"trace_samples", cfg.analysis.trace_samples},
                     {"attach_stationary", cfg.analysis.attach_stationary},
                     {"tail_fraction", cfg.analysis.tail_fraction}};
    if (cfg.analysis.c_trace)
        j["analysis"]["c_trace"] = *cfg.analysis.c_trace;
    j["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
    if (cfg.sweep)
        j["sweep"] = {{"gamma_list", cfg.sweep->gamma_list},
                      {"m_list", cfg.sweep->m_list},
                      {"g_list", cfg.sweep->g_list}};
    return j;
}

} // namespace

void write_timeseries_csv(const std::string& path, const TimeSeries& series,
                          const std::vector<EnergyReport>* energies) {
    std::ofstream out = open_out(path);
    out << "t,mass,min_n,max_n,min_c,max_c,max_drift,E_n,E_grad_c,E_c,rhs36,cum_En,dt\n";
    for (size_t k = 0; k < series.records.size(); ++k) {
        const TimeRecord& rec = series.records[k];
        double min_c = rec.signal.c.min();
        double max_c = rec.signal.c.max();
        for (double v : rec.signal.c_boundary) {
            min_c = std::min(min_c, v);
            max_c = std::max(max_c, v);
        }
        out << format_double(rec.t) << ',' << format_double(rec.state.mass) << ','
            << format_double(rec.state.n.min()) << ',' << format_double(rec.state.n.max()) << ','
            << format_double(min_c) << ',' << format_double(max_c) << ','
            << format_double(rec.report.max_drift) << ',';
        if (energies != nullptr) {
            const EnergyReport& e = (*energies)[k];
            out << format_double(e.E_n) << ',' << format_double(e.E_grad_c) << ','
                << format_double(e.E_c) << ',' << format_double(e.rhs36) << ','
                << format_double(e.cum_En) << ',';
        } else {
            out << ",,,,,";
        }
        out << format_double(rec.report.dt) << '\n';
    }
    finish(out, path);
}

void write_snapshots(const std::string& dir, const TimeSeries& series) {
    const Mesh& mesh = *series.mesh;
    for (size_t k = 0; k < series.records.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%06zu.csv", k);
        const std::string path = dir + "/" + name;
        std::ofstream out = open_out(path);
        out << (mesh.dim() == 2 ? "x,y,n,c\n" : "x,n,c\n");
        const TimeRecord& rec = series.records[k];
        for (int i = 0; i < mesh.num_cells(); ++i) {
            const auto [x, y] = mesh.cell_center(i);
            out << format_double(x) << ',';
            if (mesh.dim() == 2)
                out << format_double(y) << ',';
            out << format_double(rec.state.n[static_cast<size_t>(i)]) << ','
                << format_double(rec.signal.c[static_cast<size_t>(i)]) << '\n';
        }
        finish(out, path);
    }
}

void write_run_manifest(const std::string& path, const RunConfig& cfg,
                        const std::optional<StationaryState>& stat) {
    json j;
    j["version"] = kVersion;
    j["seed"] = cfg.seed;
    j["config"] = config_json(cfg);
    if (stat) {
        j["stationary"] = {{"alpha_inf", stat->alpha},
                           {"mass", stat->mass},
                           {"mass_residual", stat->mass_residual},
                           {"elliptic_residual", stat->elliptic_residual},
                           {"min_n_inf", stat->n.min()},
                           {"max_n_inf", stat->n.max()},
                           {"min_c_inf", stat->c.min()},
                           {"max_c_inf", stat->c.max()}};
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

void write_stationary_csv(const std::string& path, const StationaryState& stat) {
    const Mesh& mesh = *stat.c.mesh;
    std::ofstream out = open_out(path);
    out << (mesh.dim() == 2 ? "x,y,n_inf,c_inf\n" : "x,n_inf,c_inf\n");
    for (int i = 0; i < mesh.num_cells(); ++i) {
        const auto [x, y] = mesh.cell_center(i);
        out << format_double(x) << ',';
        if (mesh.dim() == 2)
            out << format_double(y) << ',';
        out << format_double(stat.n[static_cast<size_t>(i)]) << ','
            << format_double(stat.c[static_cast<size_t>(i)]) << '\n';
    }
    finish(out, path);
}

void write_stationary_manifest(const std::string& path, const RunConfig& cfg,
                               const StationaryState& stat) {
    json j;
    j["version"] = kVersion;
    j["seed"] = cfg.seed;
    j["config"] = config_json(cfg);
    j["alpha_inf"] = stat.alpha;
    j["mass"] = stat.mass;
    j["mass_residual"] = stat.mass_residual;
    j["elliptic_residual"] = stat.elliptic_residual;
    j["min_n_inf"] = stat.n.min();
    j["max_n_inf"] = stat.n.max();
    j["min_c_inf"] = stat.c.min();
    j["max_c_inf"] = stat.c.max();
    j["alpha_bracket"] = {stat.mass / (std::exp(cfg.params.gamma) *
                                       stat.c.mesh->domain_measure()),
                          stat.mass / stat.c.mesh->domain_measure()};
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out = open_out(path);
    out << "m,gnorm,gamma,K,converged,rate,error\n";
    for (const SweepRow& r : rows) {
        out << format_double(r.m) << ',' << format_double(r.gnorm) << ','
            << format_double(r.gamma) << ',' << format_double(r.K) << ','
            << (r.converged ? "true" : "false") << ',' << format_double(r.rate) << ',' << r.error
            << '\n';
    }
    finish(out, path);
}

} // namespace ccfv
