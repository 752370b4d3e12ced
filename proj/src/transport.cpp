#include "ccfv/transport.hpp"

#include "ccfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccfv {

double stable_dt(const Mesh& mesh, std::span<const double> drift) {
    std::array<double, 2> max_drift{0.0, 0.0};
    const auto& faces = mesh.interior_faces();
    for (size_t k = 0; k < faces.size(); ++k)
        max_drift[static_cast<size_t>(faces[k].axis)] =
            std::max(max_drift[static_cast<size_t>(faces[k].axis)], std::abs(drift[k]));
    double denom = 0.0;
    for (int axis = 0; axis < mesh.dim(); ++axis) {
        const double h = mesh.spacing(axis);
        denom += 2.0 / (h * h) + 2.0 * max_drift[static_cast<size_t>(axis)] / h;
    }
    return 0.9 / denom;
}

std::vector<double> drift_velocity(const SignalSolution& c, double chi) {
    std::vector<double> u = face_gradient(c.c);
    for (double& v : u)
        v *= chi;
    return u;
}

StepResult advance(const TransportState& state, const SignalSolution& c, double dt, double chi) {
    const Mesh& mesh = *state.n.mesh;
    if (!same_geometry(*c.c.mesh, *state.n.mesh))
        throw std::invalid_argument("advance: mesh mismatch between density and signal");
    if (!state.n.all_finite() || !c.c.all_finite() || !std::isfinite(dt))
        throw NumericalError("advance: non-finite input");

    const std::vector<double> u = drift_velocity(c, chi);
    const double dt_max = stable_dt(mesh, u);
    if (dt > dt_max)
        throw StabilityError("advance: dt " + std::to_string(dt) +
                             " exceeds stability bound " + std::to_string(dt_max));

    StepResult out;
    out.state.t = state.t + dt;
    out.state.n = CellField(mesh);
    std::vector<double>& n_new = out.state.n.values;
    n_new = state.n.values;

    const auto& faces = mesh.interior_faces();
    const double inv_vol = 1.0 / mesh.cell_volume();
    double max_u = 0.0;
    for (size_t k = 0; k < faces.size(); ++k) {
        const InteriorFace& f = faces[k];
        const double h = mesh.spacing(f.axis);
        const double nl = state.n[static_cast<size_t>(f.left)];
        const double nr = state.n[static_cast<size_t>(f.right)];
        const double upwind = u[k] > 0.0 ? nl : nr;
        const double flux = -(nr - nl) / h + upwind * u[k]; // from left cell into right cell
        const double transfer = dt * inv_vol * flux * f.measure;
        n_new[static_cast<size_t>(f.left)] -= transfer;
        n_new[static_cast<size_t>(f.right)] += transfer;
        max_u = std::max(max_u, std::abs(u[k]));
    }
    // boundary faces carry zero total flux

    out.state.mass = integrate(out.state.n);
    out.report.dt = dt;
    out.report.mass = out.state.mass;
    out.report.min_n = out.state.n.min();
    out.report.max_n = out.state.n.max();
    out.report.max_drift = max_u;
    return out;
}

namespace {

void track(RunAggregates& agg, const TransportState& state, const SignalSolution& sig,
           double max_drift, double initial_mass, bool early, bool first) {
    const double n_min = state.n.min();
    const double n_max = state.n.max();
    double c_min = sig.c.min();
    double c_max = sig.c.max();
    for (double v : sig.c_boundary) {
        c_min = std::min(c_min, v);
        c_max = std::max(c_max, v);
    }
    if (first) {
        agg.min_n = n_min;
        agg.max_n = n_max;
        agg.min_c = c_min;
        agg.max_c = c_max;
    } else {
        agg.min_n = std::min(agg.min_n, n_min);
        agg.max_n = std::max(agg.max_n, n_max);
        agg.min_c = std::min(agg.min_c, c_min);
        agg.max_c = std::max(agg.max_c, c_max);
    }
    agg.max_drift = std::max(agg.max_drift, max_drift);
    if (initial_mass != 0.0)
        agg.max_mass_drift_rel = std::max(
            agg.max_mass_drift_rel, std::abs(state.mass - initial_mass) / std::abs(initial_mass));
    if (early) {
        agg.early_max_n = std::max(agg.early_max_n, n_max);
        agg.early_max_c = std::max(agg.early_max_c, c_max);
        agg.early_max_drift = std::max(agg.early_max_drift, max_drift);
    }
}

} // namespace

TimeSeries simulate(const RunConfig& cfg) {
    validate(cfg);
    TimeSeries series;
    series.mesh = std::make_shared<Mesh>(make_mesh(cfg));
    const Mesh& mesh = *series.mesh;
    const BoundaryData bc = make_boundary_data(cfg, mesh);

    TransportState state;
    state.t = 0.0;
    state.n = make_initial_density(cfg, mesh);
    if (!(state.n.min() > 0.0))
        throw ConfigError("simulate: initial density must be strictly positive");
    state.mass = integrate(state.n);
    series.initial_mass = state.mass;

    const double t_end = cfg.time.t_end;
    const double out_every = cfg.time.output_every;
    const double chi = cfg.params.chi;
    const double tol = cfg.solver.elliptic_tol;
    const double early_cutoff = 0.1 * t_end;

    SignalSolution sig = solve_signal(state.n, bc, tol);
    std::vector<double> u = drift_velocity(sig, chi);
    double dt_next = stable_dt(mesh, u);
    if (cfg.time.dt_cap > 0.0)
        dt_next = std::min(dt_next, cfg.time.dt_cap);

    StepReport report0;
    report0.dt = dt_next;
    report0.mass = state.mass;
    report0.min_n = state.n.min();
    report0.max_n = state.n.max();
    for (double v : u)
        report0.max_drift = std::max(report0.max_drift, std::abs(v));

    track(series.aggregates, state, sig, report0.max_drift, series.initial_mass, true, true);
    series.records.push_back({0.0, state, sig, report0});

    if (t_end <= 0.0)
        return series;

    int next_output = 1;
    StepReport last_report = report0;
    while (state.t < t_end) {
        double target = std::min(t_end, next_output * out_every);
        if (target > t_end)
            target = t_end;

        double dt = stable_dt(mesh, u);
        if (cfg.time.dt_cap > 0.0)
            dt = std::min(dt, cfg.time.dt_cap);
        bool hits_target = false;
        if (state.t + dt >= target - 1e-12 * std::max(1.0, target)) {
            dt = target - state.t;
            hits_target = true;
        }

        StepResult step = advance(state, sig, dt, chi);
        state = std::move(step.state);
        if (hits_target)
            state.t = target; // land exactly on the output grid
        last_report = step.report;

        sig = solve_signal(state.n, bc, tol, &sig.c);
        u = drift_velocity(sig, chi);
        ++series.aggregates.steps;
        track(series.aggregates, state, sig, last_report.max_drift, series.initial_mass,
              state.t <= early_cutoff, false);

        if (hits_target) {
            series.records.push_back({state.t, state, sig, last_report});
            if (target >= t_end)
                break;
            if (target == next_output * out_every)
                ++next_output;
        }
    }
    return series;
}

} // namespace ccfv
