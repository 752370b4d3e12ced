#pragma once

#include "ccfv/config.hpp"
#include "ccfv/mesh.hpp"
#include "ccfv/signal.hpp"

#include <memory>
#include <span>
#include <vector>

namespace ccfv {

/// Cell density together with its time and mass.
struct TransportState {
    double t = 0.0;
    CellField n;
    double mass = 0.0;
};

struct StepReport {
    double dt = 0.0;
    double mass = 0.0;
    double min_n = 0.0;
    double max_n = 0.0;
    double max_drift = 0.0;
};

/// Largest explicit step keeping the update a convex combination of old cell
/// values: safety / (sum_axes 2/h^2 + sum_axes 2 max|drift|/h), safety = 0.9.
double stable_dt(const Mesh& mesh, std::span<const double> drift);

/// Drift velocity chi * face_gradient(c), one value per interior face.
std::vector<double> drift_velocity(const SignalSolution& c, double chi);

struct StepResult {
    TransportState state;
    StepReport report;
};

/// One explicit conservative step of n_t = div(grad n - n grad c): diffusive flux
/// by central differences, advective flux upwinded, zero total flux through the
/// boundary. Refuses dt above the stability bound.
StepResult advance(const TransportState& state, const SignalSolution& c, double dt, double chi);

struct TimeRecord {
    double t = 0.0;
    TransportState state;
    SignalSolution signal;
    StepReport report;
};

/// Extrema tracked at every step (not just output times).
struct RunAggregates {
    double min_n = 0.0, max_n = 0.0;
    double min_c = 0.0, max_c = 0.0; // over cells and boundary faces
    double max_drift = 0.0;
    double max_mass_drift_rel = 0.0;
    // suprema over the first 10% of the run, for boundedness monitoring
    double early_max_n = 0.0, early_max_c = 0.0, early_max_drift = 0.0;
    long long steps = 0;
};

struct TimeSeries {
    std::shared_ptr<const Mesh> mesh;
    std::vector<TimeRecord> records;
    RunAggregates aggregates;
    double initial_mass = 0.0;
};

/// Run the coupled system: re-solve the signal problem from the current density
/// every step, then advance with dt = min(stable_dt, dt_cap, time to next output).
TimeSeries simulate(const RunConfig& cfg);

} // namespace ccfv
