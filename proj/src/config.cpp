#include "ccfv/config.hpp"

#include "ccfv/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ccfv {

const char* profile_name(InitProfile p) {
    switch (p) {
    case InitProfile::Constant: return "constant";
    case InitProfile::GaussianBump: return "gaussian-bump";
    case InitProfile::TwoBumps: return "two-bumps";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct RawEntry {
    std::string value;
    int line;
};

using Section = std::map<std::string, RawEntry>;

struct RawConfig {
    std::map<std::string, Section> sections;
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("parse error at line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("parse error at line " + std::to_string(lineno) +
                                  ": empty section name");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("parse error at line " + std::to_string(lineno) +
                              ": expected key = value");
        if (section.empty())
            throw ConfigError("parse error at line " + std::to_string(lineno) +
                              ": key outside of any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("parse error at line " + std::to_string(lineno) + ": empty key");
        auto [it, inserted] = raw.sections[section].emplace(key, RawEntry{value, lineno});
        if (!inserted)
            throw ConfigError("parse error at line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "' in [" + section + "]");
    }
    return raw;
}

/// Tracks which keys of a section were consumed so leftovers can be rejected.
class SectionReader {
public:
    SectionReader(const RawConfig& raw, const std::string& name) : name_(name) {
        auto it = raw.sections.find(name);
        if (it != raw.sections.end())
            section_ = &it->second;
    }

    bool present() const { return section_ != nullptr; }

    std::optional<std::string> get(const std::string& key) {
        if (section_ == nullptr)
            return std::nullopt;
        auto it = section_->find(key);
        if (it == section_->end())
            return std::nullopt;
        used_.insert(key);
        return it->second.value;
    }

    double number(const std::string& key, double fallback) {
        auto v = get(key);
        return v ? parse_number(key, *v) : fallback;
    }

    std::optional<double> number_opt(const std::string& key) {
        auto v = get(key);
        if (!v)
            return std::nullopt;
        return parse_number(key, *v);
    }

    int integer(const std::string& key, int fallback) {
        auto v = get(key);
        if (!v)
            return fallback;
        const double d = parse_number(key, *v);
        const int i = static_cast<int>(d);
        if (static_cast<double>(i) != d)
            throw ConfigError("[" + name_ + "] " + key + ": expected an integer, got '" + *v + "'");
        return i;
    }

    bool boolean(const std::string& key, bool fallback) {
        auto v = get(key);
        if (!v)
            return fallback;
        if (*v == "true") return true;
        if (*v == "false") return false;
        throw ConfigError("[" + name_ + "] " + key + ": expected true or false, got '" + *v + "'");
    }

    std::string text(const std::string& key, const std::string& fallback) {
        auto v = get(key);
        return v ? *v : fallback;
    }

    std::vector<double> number_list(const std::string& key) {
        auto v = get(key);
        std::vector<double> out;
        if (!v)
            return out;
        std::string item;
        std::istringstream ss(*v);
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty())
                throw ConfigError("[" + name_ + "] " + key + ": empty list entry");
            out.push_back(parse_number(key, item));
        }
        return out;
    }

    void reject_unknown() const {
        if (section_ == nullptr)
            return;
        for (const auto& [key, entry] : *section_)
            if (!used_.contains(key))
                throw ConfigError("unknown key '" + key + "' in [" + name_ + "] at line " +
                                  std::to_string(entry.line));
    }

private:
    double parse_number(const std::string& key, const std::string& value) const {
        char* end = nullptr;
        const double d = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0' || !std::isfinite(d))
            throw ConfigError("[" + name_ + "] " + key + ": expected a number, got '" + value + "'");
        return d;
    }

    std::string name_;
    const Section* section_ = nullptr;
    std::set<std::string> used_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    const RawConfig raw = tokenize(text);
    static const std::set<std::string> known_sections = {
        "domain", "params", "init", "time", "solver", "analysis", "output", "sweep", "run"};
    for (const auto& [name, _] : raw.sections)
        if (!known_sections.contains(name))
            throw ConfigError("unknown section [" + name + "]");

    RunConfig cfg;

    SectionReader domain(raw, "domain");
    const std::string kind = domain.text("kind", "interval");
    if (kind == "interval")
        cfg.domain.kind = DomainKind::Interval;
    else if (kind == "rectangle")
        cfg.domain.kind = DomainKind::Rectangle;
    else
        throw ConfigError("[domain] kind: expected interval or rectangle, got '" + kind + "'");
    cfg.domain.length_x = domain.number("length_x", 1.0);
    cfg.domain.length_y = domain.number("length_y", 1.0);
    cfg.domain.cells_x = domain.integer("cells_x", 64);
    cfg.domain.cells_y = domain.integer("cells_y", 64);
    domain.reject_unknown();

    SectionReader params(raw, "params");
    cfg.params.gamma = params.number("gamma", 0.0);
    cfg.params.chi = params.number("chi", 1.0);
    const auto g_all = params.number_opt("g");
    const double g_default = g_all.value_or(1.0);
    cfg.params.g[0] = params.number("g_left", g_default);
    cfg.params.g[1] = params.number("g_right", g_default);
    cfg.params.g[2] = params.number("g_bottom", g_default);
    cfg.params.g[3] = params.number("g_top", g_default);
    params.reject_unknown();

    SectionReader init(raw, "init");
    const std::string profile = init.text("profile", "constant");
    if (profile == "constant")
        cfg.init.profile = InitProfile::Constant;
    else if (profile == "gaussian-bump")
        cfg.init.profile = InitProfile::GaussianBump;
    else if (profile == "two-bumps")
        cfg.init.profile = InitProfile::TwoBumps;
    else
        throw ConfigError("[init] profile: expected constant, gaussian-bump or two-bumps, got '" +
                          profile + "'");
    cfg.init.amplitude = init.number("amplitude", 0.0);
    cfg.init.width = init.number("width", 0.1);
    cfg.init.baseline = init.number("baseline", 1.0);
    cfg.init.center_x = init.number("center_x", 0.5 * cfg.domain.length_x);
    cfg.init.center_y = init.number("center_y", 0.5 * cfg.domain.length_y);
    cfg.init.center2_x = init.number("center2_x", 0.75 * cfg.domain.length_x);
    cfg.init.center2_y = init.number("center2_y", 0.75 * cfg.domain.length_y);
    cfg.init.mass = init.number_opt("mass");
    init.reject_unknown();

    SectionReader time(raw, "time");
    cfg.time.t_end = time.number("t_end", 1.0);
    cfg.time.dt_cap = time.number("dt_cap", 0.0);
    cfg.time.output_every = time.number("output_every", cfg.time.t_end > 0.0 ? cfg.time.t_end / 10.0 : 1.0);
    time.reject_unknown();

    SectionReader solver(raw, "solver");
    cfg.solver.elliptic_tol = solver.number("elliptic_tol", 1e-12);
    cfg.solver.mass_tol = solver.number("mass_tol", 1e-10);
    cfg.solver.newton_cap = solver.integer("newton_cap", 30);
    solver.reject_unknown();

    SectionReader analysis(raw, "analysis");
    cfg.analysis.trace_lambda = analysis.number("trace_lambda", 1.0 / 3.0);
    cfg.analysis.trace_q = analysis.number("trace_q", 2.0);
    cfg.analysis.trace_samples = analysis.integer("trace_samples", 200);
    cfg.analysis.c_trace = analysis.number_opt("c_trace");
    cfg.analysis.attach_stationary = analysis.boolean("attach_stationary", true);
    cfg.analysis.tail_fraction = analysis.number("tail_fraction", 0.5);
    analysis.reject_unknown();

    SectionReader output(raw, "output");
    cfg.output.directory = output.text("directory", "out");
    cfg.output.formats = output.text("formats", "csv");
    output.reject_unknown();

    SectionReader run(raw, "run");
    cfg.seed = static_cast<unsigned>(run.integer("seed", 42));
    run.reject_unknown();

    SectionReader sweep(raw, "sweep");
    if (sweep.present()) {
        SweepConfig sw;
        sw.gamma_list = sweep.number_list("gamma_list");
        auto m_list = sweep.number_list("m_list");
        if (!m_list.empty())
            sw.m_list = std::move(m_list);
        auto g_list = sweep.number_list("g_list");
        if (!g_list.empty())
            sw.g_list = std::move(g_list);
        sweep.reject_unknown();
        cfg.sweep = std::move(sw);
    }

    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const RunConfig& cfg) {
    const bool two_d = cfg.domain.kind == DomainKind::Rectangle;
    if (!(cfg.domain.length_x > 0.0) || (two_d && !(cfg.domain.length_y > 0.0)))
        throw ConfigError("domain lengths must be > 0");
    if (cfg.domain.cells_x < 2 || (two_d && cfg.domain.cells_y < 2))
        throw ConfigError("domain cell counts must be >= 2 per axis");
    if (!(cfg.params.gamma >= 0.0))
        throw ConfigError("params: gamma must be >= 0");
    if (!(cfg.params.chi > 0.0))
        throw ConfigError("params: chi must be > 0");
    for (double g : cfg.params.g)
        if (!(g >= 0.0))
            throw ConfigError("params: boundary transfer rates g must be >= 0");
    if (!(cfg.init.baseline > 0.0))
        throw ConfigError("init: baseline must be > 0 (initial density n0 must be strictly positive)");
    if (!(cfg.init.amplitude >= 0.0))
        throw ConfigError("init: amplitude must be >= 0");
    if (!(cfg.init.width > 0.0))
        throw ConfigError("init: width must be > 0");
    if (cfg.init.mass && !(*cfg.init.mass > 0.0))
        throw ConfigError("init: mass must be > 0");
    if (!(cfg.time.t_end >= 0.0))
        throw ConfigError("time: t_end must be >= 0");
    if (!(cfg.time.dt_cap >= 0.0))
        throw ConfigError("time: dt_cap must be >= 0");
    if (!(cfg.time.output_every > 0.0))
        throw ConfigError("time: output_every must be > 0");
    if (!(cfg.solver.elliptic_tol > 0.0))
        throw ConfigError("solver: elliptic_tol must be > 0");
    if (!(cfg.solver.mass_tol > 0.0))
        throw ConfigError("solver: mass_tol must be > 0");
    if (cfg.solver.newton_cap < 1)
        throw ConfigError("solver: newton_cap must be >= 1");
    const double q = cfg.analysis.trace_q;
    if (!(q > 0.0) || q > 2.0)
        throw ConfigError("analysis: trace_q must lie in (0, 2]");
    const double dim = two_d ? 2.0 : 1.0;
    const double window = q / (2.0 * dim + 2.0 * q - dim * q);
    if (!(cfg.analysis.trace_lambda > 0.0) || !(cfg.analysis.trace_lambda < window))
        throw ConfigError("analysis: trace_lambda must lie in (0, " + fmt(window) +
                          ") for this domain dimension");
    if (cfg.analysis.trace_samples < 1)
        throw ConfigError("analysis: trace_samples must be >= 1");
    if (cfg.analysis.c_trace && !(*cfg.analysis.c_trace > 0.0))
        throw ConfigError("analysis: c_trace must be > 0");
    if (!(cfg.analysis.tail_fraction > 0.0) || !(cfg.analysis.tail_fraction <= 1.0))
        throw ConfigError("analysis: tail_fraction must lie in (0, 1]");
    if (cfg.output.formats != "csv")
        throw ConfigError("output: only the csv format is supported");
    if (cfg.sweep) {
        if (cfg.sweep->gamma_list.empty())
            throw ConfigError("sweep: gamma_list must not be empty");
        for (double g : cfg.sweep->gamma_list)
            if (!(g >= 0.0))
                throw ConfigError("sweep: gamma values must be >= 0");
        if (cfg.sweep->m_list.empty())
            throw ConfigError("sweep: m_list must not be empty");
        for (double m : cfg.sweep->m_list)
            if (!(m > 0.0))
                throw ConfigError("sweep: mass values must be > 0");
        if (cfg.sweep->g_list.empty())
            throw ConfigError("sweep: g_list must not be empty");
        for (double g : cfg.sweep->g_list)
            if (!(g > 0.0))
                throw ConfigError("sweep: g values must be > 0");
    }
}

std::string write_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[domain]\n";
    out << "kind = " << (cfg.domain.kind == DomainKind::Interval ? "interval" : "rectangle") << "\n";
    out << "length_x = " << fmt(cfg.domain.length_x) << "\n";
    out << "length_y = " << fmt(cfg.domain.length_y) << "\n";
    out << "cells_x = " << cfg.domain.cells_x << "\n";
    out << "cells_y = " << cfg.domain.cells_y << "\n";
    out << "\n[params]\n";
    out << "gamma = " << fmt(cfg.params.gamma) << "\n";
    out << "chi = " << fmt(cfg.params.chi) << "\n";
    out << "g_left = " << fmt(cfg.params.g[0]) << "\n";
    out << "g_right = " << fmt(cfg.params.g[1]) << "\n";
    out << "g_bottom = " << fmt(cfg.params.g[2]) << "\n";
    out << "g_top = " << fmt(cfg.params.g[3]) << "\n";
    out << "\n[init]\n";
    out << "profile = " << profile_name(cfg.init.profile) << "\n";
    out << "amplitude = " << fmt(cfg.init.amplitude) << "\n";
    out << "width = " << fmt(cfg.init.width) << "\n";
    out << "baseline = " << fmt(cfg.init.baseline) << "\n";
    out << "center_x = " << fmt(cfg.init.center_x) << "\n";
    out << "center_y = " << fmt(cfg.init.center_y) << "\n";
    out << "center2_x = " << fmt(cfg.init.center2_x) << "\n";
    out << "center2_y = " << fmt(cfg.init.center2_y) << "\n";
    if (cfg.init.mass)
        out << "mass = " << fmt(*cfg.init.mass) << "\n";
    out << "\n[time]\n";
    out << "t_end = " << fmt(cfg.time.t_end) << "\n";
    out << "dt_cap = " << fmt(cfg.time.dt_cap) << "\n";
    out << "output_every = " << fmt(cfg.time.output_every) << "\n";
    out << "\n[solver]\n";
    out << "elliptic_tol = " << fmt(cfg.solver.elliptic_tol) << "\n";
    out << "mass_tol = " << fmt(cfg.solver.mass_tol) << "\n";
    out << "newton_cap = " << cfg.solver.newton_cap << "\n";
    out << "\n[analysis]\n";
    out << "trace_lambda = " << fmt(cfg.analysis.trace_lambda) << "\n";
    out << "trace_q = " << fmt(cfg.analysis.trace_q) << "\n";
    out << "trace_samples = " << cfg.analysis.trace_samples << "\n";
    if (cfg.analysis.c_trace)
        out << "c_trace = " << fmt(*cfg.analysis.c_trace) << "\n";
    out << "attach_stationary = " << (cfg.analysis.attach_stationary ? "true" : "false") << "\n";
    out << "tail_fraction = " << fmt(cfg.analysis.tail_fraction) << "\n";
    out << "\n[output]\n";
    out << "directory = " << cfg.output.directory << "\n";
    out << "formats = " << cfg.output.formats << "\n";
    out << "\n[run]\n";
    out << "seed = " << cfg.seed << "\n";
    if (cfg.sweep) {
        auto list = [&](const std::vector<double>& v) {
            std::string s;
            for (size_t i = 0; i < v.size(); ++i)
                s += (i ? ", " : "") + fmt(v[i]);
            return s;
        };
        out << "\n[sweep]\n";
        out << "gamma_list = " << list(cfg.sweep->gamma_list) << "\n";
        out << "m_list = " << list(cfg.sweep->m_list) << "\n";
        out << "g_list = " << list(cfg.sweep->g_list) << "\n";
    }
    return out.str();
}

Mesh make_mesh(const RunConfig& cfg) {
    if (cfg.domain.kind == DomainKind::Interval)
        return Mesh::interval(cfg.domain.length_x, cfg.domain.cells_x);
    return Mesh::rectangle(cfg.domain.length_x, cfg.domain.length_y, cfg.domain.cells_x,
                           cfg.domain.cells_y);
}

BoundaryData make_boundary_data(const RunConfig& cfg, const Mesh& mesh) {
    return BoundaryData::per_side(mesh, cfg.params.gamma, cfg.params.g[0], cfg.params.g[1],
                                  cfg.params.g[2], cfg.params.g[3]);
}

CellField make_initial_density(const RunConfig& cfg, const Mesh& mesh) {
    CellField n0(mesh);
    const InitConfig& init = cfg.init;
    const double w2 = 2.0 * init.width * init.width;
    auto bump = [&](double x, double y, double cx, double cy) {
        const double dx = x - cx;
        const double dy = mesh.dim() == 2 ? y - cy : 0.0;
        return std::exp(-(dx * dx + dy * dy) / w2);
    };
    for (int i = 0; i < mesh.num_cells(); ++i) {
        const auto [x, y] = mesh.cell_center(i);
        double shape = 0.0;
        switch (init.profile) {
        case InitProfile::Constant:
            shape = 1.0;
            break;
        case InitProfile::GaussianBump:
            shape = bump(x, y, init.center_x, init.center_y);
            break;
        case InitProfile::TwoBumps:
            shape = bump(x, y, init.center_x, init.center_y) +
                    bump(x, y, init.center2_x, init.center2_y);
            break;
        }
        n0[static_cast<size_t>(i)] = init.baseline + init.amplitude * shape;
    }
    if (init.mass) {
        const double factor = *init.mass / integrate(n0);
        for (double& v : n0.values)
            v *= factor;
    }
    return n0;
}

} // namespace ccfv
