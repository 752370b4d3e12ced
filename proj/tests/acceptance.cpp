// Acceptance suite: one pass/fail line per criterion, exit nonzero on any failure.

#include "ccfv/analysis.hpp"
#include "ccfv/output.hpp"
#include "ccfv/steady.hpp"
#include "ccfv/transport.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

using namespace ccfv;

namespace {

int failures = 0;

void criterion(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!pass)
        ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }

RunConfig bump_run(int cells, double gamma, double t_end, double output_every) {
    RunConfig cfg;
    cfg.domain = {DomainKind::Interval, 1.0, 1.0, cells, 2};
    cfg.params.gamma = gamma;
    cfg.params.g = {1.0, 1.0, 1.0, 1.0};
    cfg.init.profile = InitProfile::GaussianBump;
    cfg.init.amplitude = 4.0;
    cfg.init.width = 0.06;
    cfg.init.baseline = 0.3;
    cfg.init.center_x = 0.35;
    cfg.init.mass = 1.0;
    cfg.time = {t_end, 0.0, output_every};
    return cfg;
}

struct BoundsWitness {
    double min_c = 1e300, max_c = -1e300, gamma = 0.0, min_n = 1e300;
    bool strict_applicable = false;
    double strict_margin = 1e300; // gamma - max_c where applicable
};

BoundsWitness witness(const TimeSeries& s, double gamma, double min_g) {
    BoundsWitness w;
    w.min_c = s.aggregates.min_c;
    w.max_c = s.aggregates.max_c;
    w.min_n = s.aggregates.min_n;
    w.gamma = gamma;
    if (gamma > 0.0 && min_g > 0.0) {
        w.strict_applicable = true;
        w.strict_margin = gamma - s.aggregates.max_c;
    }
    return w;
}

} // namespace

int main() {
    std::printf("acceptance suite (desk scale)\n");
    const double pi2 = std::numbers::pi * std::numbers::pi;

    // --- criterion 1: mass conservation over >= 1e4 coupled steps --------------------
    auto t1 = std::chrono::steady_clock::now();
    const RunConfig cfg1 = bump_run(64, 0.5, 1.2, 0.1);
    const TimeSeries run1 = simulate(cfg1);
    const double el1 = seconds_since(t1);
    {
        const bool steps_ok = run1.aggregates.steps >= 10000;
        const double drift = run1.aggregates.max_mass_drift_rel;
        criterion(1, "mass conservation over 1e4 steps", steps_ok && drift <= 1e-12 && el1 < 10.0,
                  std::to_string(run1.aggregates.steps) + " steps, max relative drift " +
                      fmt(drift) + ", " + fmt(el1) + " s");
    }

    // --- criterion 6 run (shared with 7, 8, and the bounds witnesses) ----------------
    auto t6 = std::chrono::steady_clock::now();
    const RunConfig cfg6 = bump_run(64, 0.1, 50.0, 0.02);
    const TimeSeries run6 = simulate(cfg6);
    const BoundaryData bc6 = make_boundary_data(cfg6, *run6.mesh);
    const StationaryState stat6 =
        solve_stationary(run6.initial_mass, *run6.mesh, bc6, 1e-12, 1e-11);
    const std::vector<EnergyReport> energies6 = attach_energy(run6, stat6, bc6);
    const double el6 = seconds_since(t6);

    // --- criterion 9 run: gamma = 0 heat flow -----------------------------------------
    RunConfig cfg9 = bump_run(64, 0.0, 1.0, 0.02);
    cfg9.init.amplitude = 0.4;
    cfg9.init.width = 0.07;
    cfg9.init.baseline = 1.0;
    cfg9.init.center_x = 0.3;
    cfg9.init.mass.reset();
    const TimeSeries run9 = simulate(cfg9);
    const BoundaryData bc9 = make_boundary_data(cfg9, *run9.mesh);
    const StationaryState stat9 =
        solve_stationary(run9.initial_mass, *run9.mesh, bc9, 1e-12, 1e-11);
    const std::vector<EnergyReport> energies9 = attach_energy(run9, stat9, bc9);

    // --- criterion 2: signal bounds at every step of every acceptance run ------------
    {
        const std::vector<BoundsWitness> ws = {witness(run1, 0.5, 1.0), witness(run6, 0.1, 1.0),
                                               witness(run9, 0.0, 1.0)};
        bool ok = true;
        double worst_low = 0.0, worst_high = 0.0, worst_margin = 1e300;
        for (const BoundsWitness& w : ws) {
            ok = ok && w.min_c >= 0.0 && w.max_c <= w.gamma + 1e-12;
            worst_low = std::min(worst_low, w.min_c);
            worst_high = std::max(worst_high, w.max_c - w.gamma);
            if (w.strict_applicable) {
                ok = ok && w.strict_margin > 0.0;
                worst_margin = std::min(worst_margin, w.strict_margin);
            }
        }
        criterion(2, "signal bounds 0 <= c <= gamma (strict below gamma)", ok,
                  "min c " + fmt(worst_low) + ", max c - gamma " + fmt(worst_high) +
                      ", strict margin " + fmt(worst_margin));
    }

    // --- criterion 3: positivity of the density ---------------------------------------
    {
        const double m1 = run1.aggregates.min_n;
        const double m6 = run6.aggregates.min_n;
        const double m9 = run9.aggregates.min_n;
        const double worst = std::min({m1, m6, m9});
        criterion(3, "density positivity at every step", worst > 0.0, "min n over runs " + fmt(worst));
    }

    // --- criterion 4: signal-solver order against the cosh oracle --------------------
    {
        const double A = 1.0 / (2.0 * std::sinh(1.0) + std::cosh(1.0));
        bool ok = true;
        std::string detail;
        double prev = 0.0;
        for (int cells : {16, 32, 64, 128}) {
            const Mesh m = Mesh::interval(1.0, cells);
            const BoundaryData bc = BoundaryData::uniform(m, 1.0, 1.0);
            const SignalSolution sol = solve_signal(CellField(m, 4.0), bc, 1e-10);
            double err = 0.0;
            for (int i = 0; i < cells; ++i)
                err = std::max(err, std::abs(sol.c[static_cast<size_t>(i)] -
                                             A * std::cosh(2.0 * (m.cell_center(i)[0] - 0.5))));
            if (cells > 16)
                ok = ok && err <= 0.3 * prev;
            detail += (detail.empty() ? "L_inf err " : ", ") + std::to_string(cells) + ": " + fmt(err);
            prev = err;
        }
        criterion(4, "signal-solver order (ratio <= 0.3 per doubling)", ok, detail);
    }

    // --- criterion 5: stationary correctness across gamma x m x domains ---------------
    {
        auto t5 = std::chrono::steady_clock::now();
        bool ok = true;
        double worst_res = 0.0, worst_mass = 0.0;
        const Mesh square = Mesh::rectangle(1.0, 1.0, 32, 32);
        for (double gamma : {0.1, 0.5, 1.0}) {
            for (double m : {0.5, 1.0, 2.0}) {
                for (int dom = 0; dom < 2; ++dom) {
                    const Mesh mesh = dom == 0 ? Mesh::interval(1.0, 64) : square;
                    const BoundaryData bc = BoundaryData::uniform(mesh, gamma, 1.0);
                    const StationaryState st = solve_stationary(m, mesh, bc, 1e-11, 1e-11);
                    const double rel_mass = st.mass_residual / m;
                    worst_res = std::max(worst_res, st.elliptic_residual);
                    worst_mass = std::max(worst_mass, rel_mass);
                    const double lo = m / (std::exp(gamma) * mesh.domain_measure());
                    const double hi = m / mesh.domain_measure();
                    ok = ok && st.elliptic_residual <= 1e-10 && rel_mass <= 1e-10 &&
                         st.alpha >= lo * (1.0 - 1e-12) && st.alpha <= hi * (1.0 + 1e-12);
                }
            }
        }
        const double el5 = seconds_since(t5);
        criterion(5, "stationary residuals, mass error, alpha bracket", ok && el5 < 60.0,
                  "worst residual " + fmt(worst_res) + ", worst relative mass error " +
                      fmt(worst_mass) + ", " + fmt(el5) + " s");
    }

    // --- criterion 6: dynamics converge to the stationary state ----------------------
    {
        const double gap = std::sqrt(energies6.back().E_n);
        const Convergence conv = detect_convergence(energies6, 0.5);
        criterion(6, "dynamics -> stationary (gamma = 0.1, T = 50)",
                  gap <= 1e-6 && conv.converged && el6 < 120.0,
                  "final L2 distance " + fmt(gap) + ", converged " +
                      (conv.converged ? "yes" : "no") + ", " + fmt(el6) + " s");
    }

    // --- criterion 7: energy inequality at every output time -------------------------
    {
        bool ok = true;
        double worst = -1e300;
        for (const TimeRecord& rec : run6.records) {
            const InequalityCheck chk = check_energy_inequality(rec.state.n, rec.signal.c, stat6, bc6);
            ok = ok && chk.holds;
            worst = std::max(worst, chk.lhs - chk.rhs);
        }
        criterion(7, "energy inequality along the run", ok, "max lhs - rhs = " + fmt(worst));
    }

    // --- criterion 8: integral inequality with the indicative K ----------------------
    {
        const double c_hat = estimate_trace_constant(*run6.mesh, 2.0, 1.0 / 3.0, 200, 42);
        KInputs in{run6.initial_mass, 1.0, 0.1, neumann_lambda1(*run6.mesh), c_hat, 1.0};
        const double K = K_of(in);
        const InequalityCheck chk = check_34(energies6, K);
        criterion(8, "integral inequality K int E_n <= E_n(0)", chk.holds,
                  "K = " + fmt(K) + (K > 0.0 ? "" : " (vacuous)") + ", lhs " + fmt(chk.lhs) +
                      ", rhs " + fmt(chk.rhs));
    }

    // --- criterion 9: heat-flow decay rate --------------------------------------------
    {
        const Convergence conv = detect_convergence(energies9, 0.5);
        const double expected = -2.0 * pi2;
        const bool ok = std::abs(conv.rate - expected) <= 0.1 * std::abs(expected);
        criterion(9, "gamma = 0 decay rate within 10% of -2 pi^2", ok,
                  "rate " + fmt(conv.rate) + " vs " + fmt(expected));
    }

    // --- criterion 10: chi rescaling ---------------------------------------------------
    {
        RunConfig cfg10 = bump_run(32, 0.1, 0.5, 0.1);
        bool ok = true;
        std::string detail;
        for (double chi : {0.5, 2.0}) {
            const ChiCheckResult r = chi_check(cfg10, chi);
            ok = ok && r.ok;
            detail += (detail.empty() ? "chi " : "; chi ") + fmt(chi) + ": n dev " +
                      fmt(r.max_n_dev) + ", c dev " + fmt(r.max_c_dev);
        }
        criterion(10, "chi rescaling identity at 1e-12", ok, detail);
    }

    // --- criterion 11: trace-inequality constant --------------------------------------
    {
        const Mesh iv = Mesh::interval(1.0, 64);
        const Mesh sq = Mesh::rectangle(1.0, 1.0, 32, 32);
        const double c_iv = estimate_trace_constant(iv, 2.0, 1.0 / 3.0, 200, 42);
        const double c_sq = estimate_trace_constant(sq, 2.0, 1.0 / 3.0, 200, 42);
        const TraceValidation v_iv = validate_trace_constant(iv, 2.0, 1.0 / 3.0, c_iv, 1000, 1042);
        const TraceValidation v_sq = validate_trace_constant(sq, 2.0, 1.0 / 3.0, c_sq, 1000, 1042);
        const bool lower = c_iv >= std::sqrt(2.0) * (1.0 - 1e-12);
        criterion(11, "trace constant generalizes within 5%", v_iv.holds && v_sq.holds && lower,
                  "interval C_hat " + fmt(c_iv) + " (worst factor " + fmt(v_iv.worst_factor) +
                      "), square C_hat " + fmt(c_sq) + " (worst factor " + fmt(v_sq.worst_factor) +
                      ")");
    }

    // --- criterion 12: nonconstant stationary state (frozen regression value) ---------
    {
        const Mesh m = Mesh::interval(1.0, 64);
        const BoundaryData bc = BoundaryData::uniform(m, 0.5, 1.0);
        const StationaryState st = solve_stationary(1.0, m, bc, 1e-12, 1e-10);
        const double spread = st.n.max() - st.n.min();
        const double frozen = 3.746110989884444e-02; // measured on first verified run
        const bool ok = spread > 1e-6 && std::abs(spread - frozen) <= 1e-6;
        criterion(12, "nonconstant stationary state (regression)", ok,
                  "max n_inf - min n_inf = " + fmt(spread) + ", frozen " + fmt(frozen));
    }

    if (failures == 0)
        std::printf("acceptance: all 12 criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
