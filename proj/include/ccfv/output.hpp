#pragma once

#include "ccfv/analysis.hpp"
#include "ccfv/config.hpp"
#include "ccfv/steady.hpp"
#include "ccfv/transport.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ccfv {

inline constexpr const char* kVersion = "0.1.0";

std::string format_double(double v);

void ensure_directory(const std::string& dir);

/// Columns, in order: t, mass, min_n, max_n, min_c, max_c, max_drift,
/// E_n, E_grad_c, E_c, rhs36, cum_En, dt. Energy columns are empty when no
/// stationary state is attached.
void write_timeseries_csv(const std::string& path, const TimeSeries& series,
                          const std::vector<EnergyReport>* energies);

/// One snapshot_%06d.csv per output record, header x[,y],n,c at cell centers.
void write_snapshots(const std::string& dir, const TimeSeries& series);

void write_run_manifest(const std::string& path, const RunConfig& cfg,
                        const std::optional<StationaryState>& stat);

void write_stationary_csv(const std::string& path, const StationaryState& stat);
void write_stationary_manifest(const std::string& path, const RunConfig& cfg,
                               const StationaryState& stat);

struct SweepRow {
    double m = 0.0;
    double gnorm = 0.0;
    double gamma = 0.0;
    double K = 0.0;
    bool converged = false;
    double rate = 0.0;
    std::string error; // empty on success
};

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

} // namespace ccfv
