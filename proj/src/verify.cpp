#include "ccfv/verify.hpp"

#include "ccfv/analysis.hpp"
#include "ccfv/errors.hpp"
#include "ccfv/output.hpp"
#include "ccfv/signal.hpp"
#include "ccfv/steady.hpp"
#include "ccfv/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace ccfv {

bool all_passed(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
}

double lambda1_inverse_power(const Mesh& mesh, int iterations) {
    const BoundaryData neumann = BoundaryData::uniform(mesh, 0.0, 0.0);
    RobinLaplacian lap(mesh, neumann);
    const size_t n = static_cast<size_t>(mesh.num_cells());
    const double vol = mesh.cell_volume();
    const std::vector<double> zero(n, 0.0);

    auto demean = [&](std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v)
            mean += x;
        mean /= static_cast<double>(n);
        for (double& x : v)
            x -= mean;
    };

    // CG for L y = b on the zero-mean subspace (system is consistent there)
    auto subspace_solve = [&](const std::vector<double>& b, std::vector<double>& y) {
        y.assign(n, 0.0);
        std::vector<double> r = b, p(n), ap(n);
        demean(r);
        p = r;
        double rr = 0.0;
        for (double v : r)
            rr += v * v;
        const double target = rr * 1e-24;
        for (size_t it = 0; it < 10 * n && rr > target; ++it) {
            lap.apply(zero, p, ap);
            demean(ap);
            double pap = 0.0;
            for (size_t i = 0; i < n; ++i)
                pap += p[i] * ap[i];
            if (!(pap > 0.0))
                break;
            const double alpha = rr / pap;
            double rr_new = 0.0;
            for (size_t i = 0; i < n; ++i) {
                y[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
                rr_new += r[i] * r[i];
            }
            const double beta = rr_new / rr;
            rr = rr_new;
            for (size_t i = 0; i < n; ++i)
                p[i] = r[i] + beta * p[i];
        }
        demean(y);
    };

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(n), y(n), lx(n);
    for (double& v : x)
        v = u(rng);
    demean(x);
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> b(n);
        for (size_t i = 0; i < n; ++i)
            b[i] = vol * x[i];
        subspace_solve(b, y);
        double norm = 0.0;
        for (double v : y)
            norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0))
            break;
        for (size_t i = 0; i < n; ++i)
            x[i] = y[i] / norm;
    }
    lap.apply(zero, x, lx);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += x[i] * lx[i];
        den += vol * x[i] * x[i];
    }
    return num / den;
}

namespace {

std::string num(double v) { return format_double(v); }

class Suite {
public:
    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        CheckResult r;
        r.name = name;
        try {
            auto [ok, detail] = body();
            r.passed = ok;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }

    std::vector<CheckResult> results;
};

CellField random_density(const Mesh& mesh, std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    CellField f(mesh);
    for (double& v : f.values)
        v = u(rng);
    return f;
}

} // namespace

std::vector<CheckResult> run_verification(const RunConfig& cfg) {
    validate(cfg);
    Suite suite;
    std::mt19937 rng(cfg.seed);

    const Mesh mesh = make_mesh(cfg);
    const BoundaryData bc = make_boundary_data(cfg, mesh);
    const double gamma = cfg.params.gamma;
    const double tol = cfg.solver.elliptic_tol;

    suite.run("grid.quadrature-exactness", [&] {
        CellField f(mesh, 3.25);
        const double err_cell = std::abs(integrate(f) - 3.25 * mesh.domain_measure());
        std::vector<double> trace(mesh.boundary_faces().size(), 1.75);
        const double err_face =
            std::abs(boundary_integrate(mesh, trace) - 1.75 * mesh.boundary_measure());
        const bool ok = err_cell <= 1e-12 * mesh.domain_measure() && err_face <= 1e-12;
        return std::make_pair(ok, "cell err " + num(err_cell) + ", face err " + num(err_face));
    });

    suite.run("grid.face-gradient-affine", [&] {
        CellField f(mesh);
        for (int i = 0; i < mesh.num_cells(); ++i) {
            const auto [x, y] = mesh.cell_center(i);
            f[static_cast<size_t>(i)] = 2.0 * x + (mesh.dim() == 2 ? -0.5 * y : 0.0) + 1.0;
        }
        const std::vector<double> grad = face_gradient(f);
        double err = 0.0;
        const auto& faces = mesh.interior_faces();
        for (size_t k = 0; k < faces.size(); ++k) {
            const double expect = faces[k].axis == 0 ? 2.0 : -0.5;
            err = std::max(err, std::abs(grad[k] - expect));
        }
        return std::make_pair(err <= 1e-11, "max deviation " + num(err));
    });

    suite.run("grid.lambda1-refinement", [&] {
        const double exact = std::pow(std::numbers::pi / cfg.domain.length_x, 2);
        double prev_err = 0.0;
        bool ok = true;
        std::string detail;
        for (int cells : {16, 32, 64}) {
            const Mesh m = Mesh::interval(cfg.domain.length_x, cells);
            const double est = lambda1_inverse_power(m);
            const double err = std::abs(est - exact);
            if (cells > 16)
                ok = ok && err < prev_err && err <= 0.3 * prev_err;
            detail += (detail.empty() ? "" : ", ") + std::to_string(cells) + ": " + num(err);
            prev_err = err;
        }
        return std::make_pair(ok, detail);
    });

    suite.run("signal.maximum-principle", [&] {
        bool ok = true;
        double worst_low = 0.0, worst_high = 0.0;
        for (int trial = 0; trial < 8 && ok; ++trial) {
            const CellField n = random_density(mesh, rng, 0.0, 4.0);
            const SignalSolution sol = solve_signal(n, bc, tol);
            double lo = sol.c.min(), hi = sol.c.max();
            for (double v : sol.c_boundary) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            worst_low = std::min(worst_low, lo);
            worst_high = std::max(worst_high, hi - gamma);
            ok = lo >= -tol && hi <= gamma + tol;
        }
        return std::make_pair(ok, "min c " + num(worst_low) + ", max c - gamma " + num(worst_high));
    });

    suite.run("signal.strict-interior-bound", [&] {
        if (!(bc.min_g() > 0.0) || gamma <= 0.0)
            return std::make_pair(true, std::string("not applicable (needs g > 0 and gamma > 0)"));
        const CellField n = random_density(mesh, rng, 0.5, 2.0);
        const SignalSolution sol = solve_signal(n, bc, tol);
        const double delta = gamma - sol.c.max();
        return std::make_pair(delta > 0.0, "measured gamma - max c = " + num(delta));
    });

    suite.run("signal.monotonicity-in-n", [&] {
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 8 && ok; ++trial) {
            CellField n2 = random_density(mesh, rng, 0.0, 2.0);
            CellField n1 = n2;
            const CellField extra = random_density(mesh, rng, 0.0, 2.0);
            for (size_t i = 0; i < n1.size(); ++i)
                n1[i] += extra[i];
            if (bc.max_g() == 0.0 && n2.max() == 0.0)
                continue;
            const SignalSolution c1 = solve_signal(n1, bc, tol);
            const SignalSolution c2 = solve_signal(n2, bc, tol);
            for (size_t i = 0; i < c1.c.size(); ++i)
                worst = std::max(worst, c1.c[i] - c2.c[i]);
            ok = worst <= 1e-10;
        }
        return std::make_pair(ok, "max violation " + num(worst));
    });

    suite.run("signal.cosh-oracle-order", [&] {
        const double A = 1.0 / (2.0 * std::sinh(1.0) + std::cosh(1.0));
        double prev = 0.0;
        bool ok = true;
        std::string detail;
        for (int cells : {16, 32, 64, 128}) {
            const Mesh m = Mesh::interval(1.0, cells);
            const BoundaryData b = BoundaryData::uniform(m, 1.0, 1.0);
            const CellField n(m, 4.0);
            const SignalSolution sol = solve_signal(n, b, 1e-10);
            double err = 0.0;
            for (int i = 0; i < cells; ++i) {
                const double x = m.cell_center(i)[0];
                err = std::max(err, std::abs(sol.c[static_cast<size_t>(i)] -
                                             A * std::cosh(2.0 * (x - 0.5))));
            }
            if (cells > 16)
                ok = ok && err <= 0.3 * prev;
            detail += (detail.empty() ? "" : ", ") + std::to_string(cells) + ": " + num(err);
            prev = err;
        }
        return std::make_pair(ok, detail);
    });

    // one simulation feeds the dynamic checks
    TimeSeries series;
    bool have_series = false;
    suite.run("transport.simulation-completes", [&] {
        series = simulate(cfg);
        have_series = true;
        return std::make_pair(true, std::to_string(series.aggregates.steps) + " steps, " +
                                        std::to_string(series.records.size()) + " records");
    });

    suite.run("transport.mass-conservation", [&] {
        if (!have_series)
            return std::make_pair(false, std::string("no simulation"));
        const double drift = series.aggregates.max_mass_drift_rel;
        return std::make_pair(drift <= 1e-12, "max relative drift " + num(drift));
    });

    suite.run("transport.positivity", [&] {
        if (!have_series)
            return std::make_pair(false, std::string("no simulation"));
        return std::make_pair(series.aggregates.min_n > 0.0,
                              "min n over run " + num(series.aggregates.min_n));
    });

    suite.run("transport.uniform-boundedness", [&] {
        if (!have_series)
            return std::make_pair(false, std::string("no simulation"));
        const RunAggregates& a = series.aggregates;
        const bool ok = a.max_n <= 10.0 * a.early_max_n &&
                        a.max_c <= 10.0 * a.early_max_c + 1e-30 &&
                        a.max_drift <= 10.0 * a.early_max_drift + 1e-30;
        std::ostringstream os;
        os << "sup n " << num(a.max_n) << " vs early " << num(a.early_max_n) << "; sup c "
           << num(a.max_c) << " vs " << num(a.early_max_c);
        return std::make_pair(ok, os.str());
    });

    suite.run("transport.signal-bounds-all-steps", [&] {
        if (!have_series)
            return std::make_pair(false, std::string("no simulation"));
        const RunAggregates& a = series.aggregates;
        const bool ok = a.min_c >= 0.0 && a.max_c <= gamma + 1e-12;
        return std::make_pair(ok, "min c " + num(a.min_c) + ", max c " + num(a.max_c) +
                                      ", gamma " + num(gamma));
    });

    suite.run("transport.dt-cap-stability", [&] {
        if (cfg.time.dt_cap <= 0.0)
            return std::make_pair(true, std::string("no dt_cap configured"));
        TransportState st;
        st.t = 0.0;
        st.n = make_initial_density(cfg, mesh);
        st.mass = integrate(st.n);
        const SignalSolution sig = solve_signal(st.n, bc, tol);
        const double bound = stable_dt(mesh, drift_velocity(sig, cfg.params.chi));
        if (cfg.time.dt_cap <= bound)
            return std::make_pair(true, "dt_cap " + num(cfg.time.dt_cap) +
                                            " within stability bound " + num(bound));
        try {
            advance(st, sig, cfg.time.dt_cap, cfg.params.chi);
            return std::make_pair(false,
                                  std::string("step above the stability bound was not refused"));
        } catch (const StabilityError& e) {
            return std::make_pair(false, std::string("stability error: ") + e.what());
        }
    });

    // stationary checks need a strictly positive transfer rate
    StationaryState stat;
    bool have_stat = false;
    const double run_mass = have_series ? series.initial_mass : 0.0;
    suite.run("steady.solve-and-residuals", [&] {
        if (!(bc.min_g() > 0.0))
            return std::make_pair(true, std::string("not applicable (needs min g > 0)"));
        if (!have_series)
            return std::make_pair(false, std::string("no simulation"));
        stat = solve_stationary(run_mass, mesh, bc, tol, cfg.solver.mass_tol,
                                cfg.solver.newton_cap);
        have_stat = true;
        const bool ok = stat.elliptic_residual <= tol &&
                        stat.mass_residual <= cfg.solver.mass_tol * run_mass * 10.0;
        return std::make_pair(ok, "elliptic residual " + num(stat.elliptic_residual) +
                                      ", mass residual " + num(stat.mass_residual));
    });

    suite.run("steady.alpha-bracket", [&] {
        if (!have_stat)
            return std::make_pair(true, std::string("not applicable"));
        const double lo = run_mass / (std::exp(gamma) * mesh.domain_measure());
        const double hi = run_mass / mesh.domain_measure();
        const bool ok = stat.alpha >= lo * (1.0 - 1e-12) && stat.alpha <= hi * (1.0 + 1e-12);
        return std::make_pair(ok, "alpha " + num(stat.alpha) + " in [" + num(lo) + ", " +
                                      num(hi) + "]");
    });

    suite.run("steady.exponential-structure", [&] {
        if (!have_stat)
            return std::make_pair(true, std::string("not applicable"));
        double lo = 1e300, hi = 0.0;
        for (size_t i = 0; i < stat.n.size(); ++i) {
            const double ratio = stat.n[i] / std::exp(stat.c[i]);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        const double spread = (hi - lo) / stat.alpha;
        return std::make_pair(spread <= 1e-12, "relative spread of n/e^c: " + num(spread));
    });

    suite.run("steady.nonconstant-state", [&] {
        if (!have_stat)
            return std::make_pair(true, std::string("not applicable"));
        const double spread = stat.n.max() - stat.n.min();
        if (gamma == 0.0)
            return std::make_pair(spread <= 1e-12 * stat.n.max(),
                                  "gamma = 0, spread " + num(spread));
        const double floor = 1e-10 * run_mass / mesh.domain_measure();
        return std::make_pair(spread > floor,
                              "max n_inf - min n_inf = " + num(spread) + " (floor " + num(floor) + ")");
    });

    suite.run("steady.signal-consistency", [&] {
        if (!have_stat)
            return std::make_pair(true, std::string("not applicable"));
        const SignalSolution again = solve_signal(stat.n, bc, tol);
        double dev = 0.0;
        for (size_t i = 0; i < again.c.size(); ++i)
            dev = std::max(dev, std::abs(again.c[i] - stat.c[i]));
        return std::make_pair(dev <= 10.0 * tol, "max |c - c_again| = " + num(dev));
    });

    suite.run("analysis.K-decreasing-in-gamma", [&] {
        std::uniform_real_distribution<double> u(0.1, 3.0);
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            KInputs in;
            in.m = u(rng);
            in.gnorm = u(rng);
            in.lambda1 = u(rng);
            in.c_trace = u(rng);
            in.volume = u(rng);
            double g1 = u(rng), g2 = u(rng);
            if (g1 > g2)
                std::swap(g1, g2);
            if (g2 - g1 < 1e-6)
                continue;
            in.gamma = g1;
            const double k1 = K_of(in);
            in.gamma = g2;
            const double k2 = K_of(in);
            ok = k1 > k2;
        }
        return std::make_pair(ok, std::string(ok ? "50 random input sets" : "violated"));
    });

    std::vector<EnergyReport> energies;
    suite.run("analysis.energy-inequality-per-state", [&] {
        if (!have_stat || !have_series)
            return std::make_pair(true, std::string("not applicable"));
        energies = attach_energy(series, stat, bc);
        double worst = -1e300;
        bool ok = true;
        for (const TimeRecord& rec : series.records) {
            const InequalityCheck chk = check_energy_inequality(rec.state.n, rec.signal.c, stat, bc);
            worst = std::max(worst, chk.lhs - chk.rhs);
            ok = ok && chk.holds;
        }
        return std::make_pair(ok, "max lhs - rhs = " + num(worst));
    });

    suite.run("analysis.check34-indicative-K", [&] {
        if (energies.empty())
            return std::make_pair(true, std::string("not applicable"));
        KInputs in;
        in.m = run_mass;
        in.gnorm = bc.max_g();
        in.gamma = gamma;
        in.lambda1 = neumann_lambda1(mesh);
        in.volume = mesh.domain_measure();
        in.c_trace = cfg.analysis.c_trace
                         ? *cfg.analysis.c_trace
                         : estimate_trace_constant(mesh, cfg.analysis.trace_q,
                                                   cfg.analysis.trace_lambda,
                                                   cfg.analysis.trace_samples, cfg.seed);
        const double K = K_of(in);
        const InequalityCheck chk = check_34(energies, K);
        return std::make_pair(chk.holds, "K = " + num(K) + ", lhs " + num(chk.lhs) + ", rhs " +
                                             num(chk.rhs));
    });

    suite.run("analysis.heat-flow-check34", [&] {
        const Mesh m = Mesh::interval(1.0, 32);
        const BoundaryData b = BoundaryData::uniform(m, 0.0, 1.0);
        RunConfig heat = cfg;
        heat.domain = DomainConfig{DomainKind::Interval, 1.0, 1.0, 32, 2};
        heat.params.gamma = 0.0;
        heat.params.chi = 1.0;
        heat.params.g = {1.0, 1.0, 1.0, 1.0};
        heat.init = InitConfig{};
        heat.init.profile = InitProfile::GaussianBump;
        heat.init.amplitude = 0.5;
        heat.init.width = 0.08;
        heat.init.baseline = 1.0;
        heat.init.center_x = 0.3;
        heat.time = TimeConfig{2.0, 0.0, 0.05};
        heat.sweep.reset();
        const TimeSeries hs = simulate(heat);
        const StationaryState flat = solve_stationary(hs.initial_mass, m, b, tol,
                                                      cfg.solver.mass_tol, cfg.solver.newton_cap);
        const std::vector<EnergyReport> he = attach_energy(hs, flat, b);
        const double K = 0.5 * neumann_lambda1(m);
        const InequalityCheck chk = check_34(he, K);
        const double ratio = chk.rhs > 0.0 ? chk.lhs / chk.rhs : 0.0;
        return std::make_pair(chk.holds && ratio <= 1.0, "lhs/rhs = " + num(ratio));
    });

    suite.run("analysis.trace-constant-validation", [&] {
        const double q = cfg.analysis.trace_q;
        const double lam = cfg.analysis.trace_lambda;
        const double c_hat =
            estimate_trace_constant(mesh, q, lam, cfg.analysis.trace_samples, cfg.seed);
        const TraceValidation val = validate_trace_constant(mesh, q, lam, c_hat, 1000, cfg.seed + 1000);
        const double const_ratio =
            std::sqrt(mesh.boundary_measure()) / std::pow(mesh.domain_measure(), 1.0 / q);
        const bool lower_ok = c_hat >= const_ratio * (1.0 - 1e-12);
        return std::make_pair(val.holds && lower_ok,
                              "C_hat " + num(c_hat) + ", worst fresh factor " +
                                  num(val.worst_factor) + ", constant-function ratio " +
                                  num(const_ratio));
    });

    suite.run("analysis.poincare-consistency", [&] {
        const double lam1 = neumann_lambda1(mesh);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 100 && ok; ++trial) {
            CellField phi(mesh);
            for (double& v : phi.values)
                v = u(rng);
            double mean = 0.0;
            for (double v : phi.values)
                mean += v;
            mean /= static_cast<double>(phi.size());
            for (double& v : phi.values)
                v -= mean;
            const double l2 = norm_lq(phi, 2.0);
            const double grad = norm_grad_l2(phi);
            const double bound = (1.0 / lam1) * grad * grad * 1.05;
            worst = std::max(worst, l2 * l2 / (grad * grad / lam1));
            ok = l2 * l2 <= bound;
        }
        return std::make_pair(ok, "worst (int phi^2) / (int |grad phi|^2 / lambda1) = " + num(worst));
    });

    suite.run("analysis.chi-rescaling", [&] {
        RunConfig small = cfg;
        small.sweep.reset();
        bool ok = true;
        std::string detail;
        for (double chi : {2.0, 0.5}) {
            const ChiCheckResult r = chi_check(small, chi);
            ok = ok && r.ok;
            detail += (detail.empty() ? "chi " : ", chi ") + num(chi) + ": n dev " +
                      num(r.max_n_dev) + ", c dev " + num(r.max_c_dev);
        }
        return std::make_pair(ok, detail);
    });

    suite.run("cli.config-round-trip", [&] {
        const RunConfig again = parse_config(write_config(cfg));
        return std::make_pair(again == cfg, std::string(again == cfg ? "stable" : "mismatch"));
    });

    return suite.results;
}

} // namespace ccfv
