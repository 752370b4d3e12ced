#include "ccfv/analysis.hpp"

#include "ccfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ccfv {

double K_of(const KInputs& in) {
    const double g2 = in.gamma * in.gamma * in.gnorm * in.gnorm;
    return 0.5 * in.lambda1 -
           in.gamma * (in.c_trace * in.gnorm * std::max(g2, 1.0) +
                       in.m * in.gamma * std::exp(2.0 * in.gamma) / (2.0 * in.volume));
}

namespace {

double dirichlet_energy_of_difference(const CellField& a, const CellField& b) {
    const Mesh& mesh = *a.mesh;
    double sum = 0.0;
    for (const InteriorFace& f : mesh.interior_faces()) {
        const double h = mesh.spacing(f.axis);
        const double da = a[static_cast<size_t>(f.right)] - a[static_cast<size_t>(f.left)];
        const double db = b[static_cast<size_t>(f.right)] - b[static_cast<size_t>(f.left)];
        const double grad = (da - db) / h;
        sum += grad * grad * f.measure * h;
    }
    return sum;
}

} // namespace

InequalityCheck check_energy_inequality(const CellField& n, const CellField& c,
                                        const StationaryState& stat, const BoundaryData& bc) {
    if (!same_geometry(*n.mesh, *c.mesh) || !same_geometry(*n.mesh, *stat.c.mesh))
        throw std::invalid_argument("check_energy_inequality: mesh mismatch");
    const Mesh& mesh = *n.mesh;
    const double vol = mesh.cell_volume();
    double weighted_ec = 0.0, rhs = 0.0;
    for (size_t i = 0; i < n.size(); ++i) {
        const double dc = c[i] - stat.c[i];
        const double dn = n[i] - stat.n[i];
        weighted_ec += stat.n[i] * dc * dc * vol;
        rhs += dn * dn / stat.n[i] * vol;
    }
    InequalityCheck out;
    out.lhs = dirichlet_energy_of_difference(c, stat.c) + 0.5 * weighted_ec;
    out.rhs = 0.5 * bc.gamma * bc.gamma * rhs;
    out.holds = out.lhs <= out.rhs * (1.0 + 1e-8) + 1e-14;
    return out;
}

std::vector<EnergyReport> attach_energy(const TimeSeries& series, const StationaryState& stat,
                                        const BoundaryData& bc) {
    std::vector<EnergyReport> out;
    out.reserve(series.records.size());
    const Mesh& mesh = *series.mesh;
    const double vol = mesh.cell_volume();
    double cum = 0.0;
    for (size_t k = 0; k < series.records.size(); ++k) {
        const TimeRecord& rec = series.records[k];
        EnergyReport e;
        e.t = rec.t;
        double en = 0.0, ec = 0.0, r36 = 0.0;
        for (size_t i = 0; i < rec.state.n.size(); ++i) {
            const double dn = rec.state.n[i] - stat.n[i];
            const double dc = rec.signal.c[i] - stat.c[i];
            en += dn * dn * vol;
            ec += dc * dc * vol;
            r36 += dn * dn / stat.n[i] * vol;
        }
        e.E_n = en;
        e.E_c = ec;
        e.E_grad_c = dirichlet_energy_of_difference(rec.signal.c, stat.c);
        e.rhs36 = 0.5 * bc.gamma * bc.gamma * r36;
        if (k > 0)
            cum += 0.5 * (out[k - 1].E_n + en) * (rec.t - out[k - 1].t);
        e.cum_En = cum;
        e.mass = rec.state.mass;
        e.min_n = rec.state.n.min();
        e.max_n = rec.state.n.max();
        e.min_c = rec.signal.c.min();
        e.max_c = rec.signal.c.max();
        for (double v : rec.signal.c_boundary) {
            e.min_c = std::min(e.min_c, v);
            e.max_c = std::max(e.max_c, v);
        }
        out.push_back(e);
    }
    return out;
}

InequalityCheck check_34(const std::vector<EnergyReport>& energies, double K) {
    if (energies.empty())
        throw std::invalid_argument("check_34: empty time series");
    InequalityCheck out;
    out.lhs = K * energies.back().cum_En;
    out.rhs = energies.front().E_n;
    out.holds = K <= 0.0 || out.lhs <= out.rhs * (1.0 + 1e-6);
    return out;
}

std::vector<NeumannMode> neumann_modes(const Mesh& mesh, int count) {
    const double pi = std::numbers::pi;
    struct ModeIdx {
        int kx, ky;
        double ev;
    };
    auto ev1d = [&](int k, int axis, double length) {
        if (k == 0)
            return 0.0;
        const double h = mesh.spacing(axis);
        return (2.0 - 2.0 * std::cos(k * pi * h / length)) / (h * h);
    };
    std::vector<ModeIdx> idx;
    const int kx_max = std::min(mesh.nx() - 1, count);
    const int ky_max = mesh.dim() == 2 ? std::min(mesh.ny() - 1, count) : 0;
    for (int kx = 0; kx <= kx_max; ++kx)
        for (int ky = 0; ky <= ky_max; ++ky)
            idx.push_back({kx, ky,
                           ev1d(kx, 0, mesh.length_x()) +
                               (mesh.dim() == 2 ? ev1d(ky, 1, mesh.length_y()) : 0.0)});
    std::stable_sort(idx.begin(), idx.end(),
                     [](const ModeIdx& a, const ModeIdx& b) { return a.ev < b.ev; });
    if (static_cast<int>(idx.size()) > count)
        idx.resize(static_cast<size_t>(count));

    std::vector<NeumannMode> modes;
    modes.reserve(idx.size());
    for (const ModeIdx& m : idx) {
        NeumannMode mode;
        mode.eigenvalue = m.ev;
        mode.field = CellField(mesh);
        for (int i = 0; i < mesh.num_cells(); ++i) {
            const auto [x, y] = mesh.cell_center(i);
            double v = std::cos(m.kx * pi * x / mesh.length_x());
            if (mesh.dim() == 2)
                v *= std::cos(m.ky * pi * y / mesh.length_y());
            mode.field[static_cast<size_t>(i)] = v;
        }
        modes.push_back(std::move(mode));
    }
    return modes;
}

double norm_boundary_l2(const Mesh& mesh, const CellField& phi) {
    double sum = 0.0;
    for (const BoundaryFace& f : mesh.boundary_faces()) {
        const double v = phi[static_cast<size_t>(f.cell)];
        sum += v * v * f.measure;
    }
    return std::sqrt(sum);
}

double norm_grad_l2(const CellField& phi) {
    const Mesh& mesh = *phi.mesh;
    double sum = 0.0;
    for (const InteriorFace& f : mesh.interior_faces()) {
        const double h = mesh.spacing(f.axis);
        const double grad = (phi[static_cast<size_t>(f.right)] - phi[static_cast<size_t>(f.left)]) / h;
        sum += grad * grad * f.measure * h;
    }
    return std::sqrt(sum);
}

double norm_lq(const CellField& phi, double q) {
    const double vol = phi.mesh->cell_volume();
    double sum = 0.0;
    for (double v : phi.values)
        sum += std::pow(std::abs(v), q) * vol;
    return std::pow(sum, 1.0 / q);
}

namespace {

void require_admissible(const Mesh& mesh, double q, double lambda) {
    if (!(q > 0.0) || q > 2.0)
        throw std::domain_error("trace inequality: q must lie in (0, 2]");
    const double dim = static_cast<double>(mesh.dim());
    const double window = q / (2.0 * dim + 2.0 * q - dim * q);
    if (!(lambda > 0.0) || !(lambda < window))
        throw std::domain_error("trace inequality: lambda outside the admissible window (0, " +
                                std::to_string(window) + ")");
}

double trace_ratio(const Mesh& mesh, const CellField& phi, double q, double lambda) {
    const double nb = norm_boundary_l2(mesh, phi);
    const double ng = norm_grad_l2(phi);
    const double nq = norm_lq(phi, q);
    const double denom = std::pow(ng, 1.0 - lambda) * std::pow(nq, lambda) + nq;
    if (!(denom > 0.0))
        return 0.0;
    return nb / denom;
}

CellField random_combination(const Mesh& mesh, const std::vector<NeumannMode>& modes,
                             std::mt19937& rng) {
    std::uniform_int_distribution<size_t> pick(0, modes.size() - 1);
    std::normal_distribution<double> coeff(0.0, 1.0);
    CellField phi(mesh);
    for (int term = 0; term < 5; ++term) {
        const size_t k = pick(rng);
        const double a = coeff(rng);
        for (size_t i = 0; i < phi.size(); ++i)
            phi[i] += a * modes[k].field[i];
    }
    return phi;
}

} // namespace

double estimate_trace_constant(const Mesh& mesh, double q, double lambda, int samples,
                               unsigned seed) {
    require_admissible(mesh, q, lambda);
    if (samples < 1)
        throw std::invalid_argument("estimate_trace_constant: samples must be >= 1");
    const int mode_count = std::min(20, mesh.num_cells());
    const std::vector<NeumannMode> modes = neumann_modes(mesh, mode_count);
    double c_hat = 0.0;
    for (const NeumannMode& m : modes)
        c_hat = std::max(c_hat, trace_ratio(mesh, m.field, q, lambda));
    std::mt19937 rng(seed);
    for (int s = 0; s < samples; ++s)
        c_hat = std::max(c_hat, trace_ratio(mesh, random_combination(mesh, modes, rng), q, lambda));
    return c_hat;
}

TraceValidation validate_trace_constant(const Mesh& mesh, double q, double lambda, double c_hat,
                                        int samples, unsigned seed) {
    require_admissible(mesh, q, lambda);
    const int mode_count = std::min(20, mesh.num_cells());
    const std::vector<NeumannMode> modes = neumann_modes(mesh, mode_count);
    std::mt19937 rng(seed);
    TraceValidation out;
    for (int s = 0; s < samples; ++s) {
        const CellField phi = random_combination(mesh, modes, rng);
        out.worst_factor = std::max(out.worst_factor, trace_ratio(mesh, phi, q, lambda) / c_hat);
    }
    out.holds = out.worst_factor <= 1.05;
    return out;
}

ChiCheckResult chi_check(const RunConfig& cfg, double chi) {
    if (!(chi > 0.0))
        throw std::invalid_argument("chi_check: chi must be > 0");
    RunConfig ref = cfg;
    ref.params.chi = 1.0;
    RunConfig scaled = cfg;
    scaled.params.chi = 1.0 / chi;
    scaled.params.gamma = chi * cfg.params.gamma;
    // the scaled problem is the reference problem times chi, so its absolute
    // solver tolerance scales with it (keeps binary powers of chi bit-exact)
    scaled.solver.elliptic_tol = chi * cfg.solver.elliptic_tol;

    const TimeSeries a = simulate(ref);
    const TimeSeries b = simulate(scaled);

    ChiCheckResult out;
    if (a.records.size() != b.records.size())
        return out;
    double n_scale = 0.0, c_scale = 0.0;
    for (const TimeRecord& rec : a.records) {
        n_scale = std::max(n_scale, rec.state.n.max());
        c_scale = std::max(c_scale, chi * rec.signal.c.max());
    }
    double n_dev = 0.0, c_dev = 0.0;
    for (size_t k = 0; k < a.records.size(); ++k) {
        const TimeRecord& ra = a.records[k];
        const TimeRecord& rb = b.records[k];
        for (size_t i = 0; i < ra.state.n.size(); ++i) {
            n_dev = std::max(n_dev, std::abs(ra.state.n[i] - rb.state.n[i]));
            c_dev = std::max(c_dev, std::abs(chi * ra.signal.c[i] - rb.signal.c[i]));
        }
    }
    out.max_n_dev = n_scale > 0.0 ? n_dev / n_scale : n_dev;
    out.max_c_dev = c_scale > 0.0 ? c_dev / c_scale : c_dev;
    out.ok = out.max_n_dev <= 1e-12 && out.max_c_dev <= 1e-12;
    return out;
}

Convergence detect_convergence(const std::vector<EnergyReport>& energies, double tail_fraction) {
    if (energies.size() < 10)
        throw std::invalid_argument("detect_convergence: need at least 10 output records");
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw std::invalid_argument("detect_convergence: tail_fraction must lie in (0, 1]");
    const size_t n = energies.size();
    size_t tail_start = n - std::max<size_t>(2, static_cast<size_t>(std::ceil(tail_fraction * n)));
    if (tail_start > n - 2)
        tail_start = n - 2;

    bool nonincreasing = true;
    for (size_t k = tail_start; k + 1 < n; ++k) {
        // tolerate roundoff jitter at the floor
        if (energies[k + 1].E_n > energies[k].E_n * (1.0 + 1e-9) + 1e-18) {
            nonincreasing = false;
            break;
        }
    }
    const bool small = energies.back().E_n <= 1e-12 * energies.front().E_n + 1e-14;

    // least-squares slope of log E_n over the tail (zeros excluded)
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (size_t k = tail_start; k < n; ++k) {
        if (!(energies[k].E_n > 0.0))
            continue;
        const double x = energies[k].t;
        const double y = std::log(energies[k].E_n);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    Convergence out;
    const double det = count * sxx - sx * sx;
    out.rate = (count >= 2 && det != 0.0) ? (count * sxy - sx * sy) / det : 0.0;
    out.converged = nonincreasing && small;
    return out;
}

} // namespace ccfv
