#pragma once

#include "ccfv/mesh.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ccfv {

enum class InitProfile { Constant, GaussianBump, TwoBumps };

const char* profile_name(InitProfile p);

struct DomainConfig {
    DomainKind kind = DomainKind::Interval;
    double length_x = 1.0;
    double length_y = 1.0;
    int cells_x = 64;
    int cells_y = 64;

    bool operator==(const DomainConfig&) const = default;
};

struct ParamsConfig {
    double gamma = 0.0;
    double chi = 1.0;
    // transfer rate per boundary side: left, right, bottom, top
    std::array<double, 4> g{1.0, 1.0, 1.0, 1.0};

    bool operator==(const ParamsConfig&) const = default;
};

struct InitConfig {
    InitProfile profile = InitProfile::Constant;
    double amplitude = 0.0;
    double width = 0.1;
    double baseline = 1.0;
    double center_x = 0.5, center_y = 0.5;
    double center2_x = 0.75, center2_y = 0.75;
    std::optional<double> mass; // if set, the profile is rescaled to this exact mass

    bool operator==(const InitConfig&) const = default;
};

struct TimeConfig {
    double t_end = 1.0;
    double dt_cap = 0.0; // 0 = no cap
    double output_every = 0.1;

    bool operator==(const TimeConfig&) const = default;
};

struct SolverConfig {
    double elliptic_tol = 1e-12;
    double mass_tol = 1e-10;
    int newton_cap = 30;

    bool operator==(const SolverConfig&) const = default;
};

struct AnalysisConfig {
    double trace_lambda = 1.0 / 3.0;
    double trace_q = 2.0;
    int trace_samples = 200;
    std::optional<double> c_trace; // override for the estimated trace constant
    bool attach_stationary = true;
    double tail_fraction = 0.5;

    bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    std::string formats = "csv";

    bool operator==(const OutputConfig&) const = default;
};

struct SweepConfig {
    std::vector<double> gamma_list;
    std::vector<double> m_list{1.0};
    std::vector<double> g_list{1.0};

    bool operator==(const SweepConfig&) const = default;
};

struct RunConfig {
    DomainConfig domain;
    ParamsConfig params;
    InitConfig init;
    TimeConfig time;
    SolverConfig solver;
    AnalysisConfig analysis;
    OutputConfig output;
    std::optional<SweepConfig> sweep;
    unsigned seed = 42;

    bool operator==(const RunConfig&) const = default;
};

/// Parse a sectioned key = value config. Unknown sections or keys are rejected,
/// parse errors carry the line number, validation errors name the violated rule.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Serialize; parse_config(write_config(cfg)) == cfg for every valid config.
std::string write_config(const RunConfig& cfg);

/// Check every config invariant, throwing ConfigError naming the violated one.
void validate(const RunConfig& cfg);

Mesh make_mesh(const RunConfig& cfg);
BoundaryData make_boundary_data(const RunConfig& cfg, const Mesh& mesh);
CellField make_initial_density(const RunConfig& cfg, const Mesh& mesh);

} // namespace ccfv
