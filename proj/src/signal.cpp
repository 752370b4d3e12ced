#include "ccfv/signal.hpp"

#include "ccfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace ccfv {

RobinLaplacian::RobinLaplacian(const Mesh& mesh, const BoundaryData& bc)
    : mesh_(&mesh), bc_(&bc) {
    const auto& faces = mesh.boundary_faces();
    if (bc.g.size() != faces.size())
        throw std::invalid_argument("boundary data does not match mesh boundary faces");
    if (!std::isfinite(bc.gamma) || bc.gamma < 0.0)
        throw std::invalid_argument("boundary data: gamma must be finite and >= 0");
    robin_coeff_.resize(faces.size());
    robin_diag_.assign(static_cast<size_t>(mesh.num_cells()), 0.0);
    rhs_.assign(static_cast<size_t>(mesh.num_cells()), 0.0);
    for (size_t k = 0; k < faces.size(); ++k) {
        const double g = bc.g[k];
        if (!(g >= 0.0) || !std::isfinite(g))
            throw std::invalid_argument("boundary data: g must be finite and >= 0");
        const double h = mesh.spacing(faces[k].axis);
        robin_coeff_[k] = g * faces[k].measure / (1.0 + 0.5 * h * g);
        robin_diag_[static_cast<size_t>(faces[k].cell)] += robin_coeff_[k];
        rhs_[static_cast<size_t>(faces[k].cell)] += bc.gamma * robin_coeff_[k];
    }
}

void RobinLaplacian::apply(std::span<const double> reaction, std::span<const double> x,
                           std::span<double> y) const {
    const size_t nc = x.size();
    for (size_t i = 0; i < nc; ++i)
        y[i] = (robin_diag_[i] + reaction[i]) * x[i];
    for (const InteriorFace& f : mesh_->interior_faces()) {
        const double w = f.measure / mesh_->spacing(f.axis);
        const double flux = w * (x[static_cast<size_t>(f.left)] - x[static_cast<size_t>(f.right)]);
        y[static_cast<size_t>(f.left)] += flux;
        y[static_cast<size_t>(f.right)] -= flux;
    }
}

std::vector<double> RobinLaplacian::diagonal(std::span<const double> reaction) const {
    std::vector<double> d(robin_diag_.size());
    for (size_t i = 0; i < d.size(); ++i)
        d[i] = robin_diag_[i] + reaction[i];
    for (const InteriorFace& f : mesh_->interior_faces()) {
        const double w = f.measure / mesh_->spacing(f.axis);
        d[static_cast<size_t>(f.left)] += w;
        d[static_cast<size_t>(f.right)] += w;
    }
    return d;
}

double RobinLaplacian::pde_residual(std::span<const double> reaction, std::span<const double> b,
                                    std::span<const double> x) const {
    std::vector<double> ax(x.size());
    apply(reaction, x, ax);
    const double inv_vol = 1.0 / mesh_->cell_volume();
    double r = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        r = std::max(r, std::abs(b[i] - ax[i]) * inv_vol);
    return r;
}

std::vector<double> RobinLaplacian::boundary_values(std::span<const double> c) const {
    const auto& faces = mesh_->boundary_faces();
    std::vector<double> out(faces.size());
    for (size_t k = 0; k < faces.size(); ++k) {
        const double g = bc_->g[k];
        const double h = mesh_->spacing(faces[k].axis);
        out[k] = (c[static_cast<size_t>(faces[k].cell)] + 0.5 * h * g * bc_->gamma) /
                 (1.0 + 0.5 * h * g);
    }
    return out;
}

double RobinLaplacian::solve_tridiagonal(std::span<const double> reaction,
                                         std::span<const double> b,
                                         std::vector<double>& x, double tol) const {
    const size_t n = static_cast<size_t>(mesh_->num_cells());
    const double w = 1.0 / mesh_->hx(); // face measure 1 in 1D
    std::vector<double> factored(n);
    for (size_t i = 0; i < n; ++i) {
        double d = robin_diag_[i] + reaction[i];
        if (i > 0) d += w;
        if (i + 1 < n) d += w;
        factored[i] = d;
    }
    // forward elimination with constant off-diagonal -w
    for (size_t i = 1; i < n; ++i)
        factored[i] -= w * w / factored[i - 1];

    std::vector<double> rhs(n);
    auto back_substitute = [&](std::span<const double> f, std::vector<double>& out) {
        rhs.assign(f.begin(), f.end());
        for (size_t i = 1; i < n; ++i)
            rhs[i] += w * rhs[i - 1] / factored[i - 1];
        out.resize(n);
        out[n - 1] = rhs[n - 1] / factored[n - 1];
        for (size_t i = n - 1; i-- > 0;)
            out[i] = (rhs[i] + w * out[i + 1]) / factored[i];
    };

    back_substitute(b, x);
    double res = pde_residual(reaction, b, x);

    // iterative refinement pushes the residual to the evaluation floor
    std::vector<double> r(n), dx(n), trial(n);
    for (int pass = 0; pass < 3 && res > tol; ++pass) {
        apply(reaction, x, r);
        for (size_t i = 0; i < n; ++i)
            r[i] = b[i] - r[i];
        back_substitute(r, dx);
        trial = x;
        for (size_t i = 0; i < n; ++i)
            trial[i] += dx[i];
        const double res_new = pde_residual(reaction, b, trial);
        if (res_new >= res)
            break;
        x = trial;
        res = res_new;
    }
    return res;
}

double RobinLaplacian::solve_pcg(std::span<const double> reaction, std::span<const double> b,
                                 std::vector<double>& x, double tol) const {
    const size_t n = x.size();
    const double inv_vol = 1.0 / mesh_->cell_volume();
    const long cap = 50L * static_cast<long>(n);
    const std::vector<double> diag = diagonal(reaction);

    std::vector<double> r(n), z(n), p(n), ap(n);
    auto true_residual = [&]() {
        apply(reaction, x, ap);
        double m = 0.0;
        for (size_t i = 0; i < n; ++i) {
            r[i] = b[i] - ap[i];
            m = std::max(m, std::abs(r[i]) * inv_vol);
        }
        return m;
    };

    double res = true_residual();
    long iters = 0;
    while (res > tol && iters < cap) {
        // (re)start from the exact residual
        double rz = 0.0;
        for (size_t i = 0; i < n; ++i) {
            z[i] = r[i] / diag[i];
            p[i] = z[i];
            rz += r[i] * z[i];
        }
        bool stalled = false;
        while (iters < cap) {
            ++iters;
            apply(reaction, p, ap);
            double pap = 0.0;
            for (size_t i = 0; i < n; ++i)
                pap += p[i] * ap[i];
            if (!(pap > 0.0)) { stalled = true; break; }
            const double alpha = rz / pap;
            double maxr = 0.0;
            for (size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
                maxr = std::max(maxr, std::abs(r[i]) * inv_vol);
            }
            if (maxr <= 0.5 * tol)
                break;
            double rz_new = 0.0;
            for (size_t i = 0; i < n; ++i) {
                z[i] = r[i] / diag[i];
                rz_new += r[i] * z[i];
            }
            const double beta = rz_new / rz;
            rz = rz_new;
            for (size_t i = 0; i < n; ++i)
                p[i] = z[i] + beta * p[i];
        }
        res = true_residual();
        if (stalled && res > tol)
            break;
    }
    return res;
}

double RobinLaplacian::solve(std::span<const double> reaction, std::span<const double> b,
                             std::vector<double>& x, double tol) const {
    double res;
    if (mesh_->kind() == DomainKind::Interval)
        res = solve_tridiagonal(reaction, b, x, tol);
    else
        res = solve_pcg(reaction, b, x, tol);
    if (!(res <= tol)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "elliptic solve did not reach tolerance %.3e (residual %.3e)", tol, res);
        throw NumericalError(msg);
    }
    return res;
}

SignalSolution solve_signal(const CellField& n, const BoundaryData& bc, double tol,
                            const CellField* initial_guess) {
    if (n.mesh == nullptr)
        throw std::invalid_argument("solve_signal: density field has no mesh");
    if (!(tol > 0.0))
        throw std::invalid_argument("solve_signal: tol must be > 0");
    if (!n.all_finite())
        throw std::invalid_argument("solve_signal: density field has non-finite entries");
    double n_max = 0.0;
    for (double v : n.values) {
        if (v < 0.0)
            throw std::invalid_argument("solve_signal: density must be >= 0");
        n_max = std::max(n_max, v);
    }
    const Mesh& mesh = *n.mesh;
    RobinLaplacian op(mesh, bc);
    if (n_max == 0.0 && bc.max_g() == 0.0)
        throw DegenerateProblemError(
            "signal problem is singular: n identically zero and g identically zero");

    const double vol = mesh.cell_volume();
    std::vector<double> reaction(n.size());
    for (size_t i = 0; i < n.size(); ++i)
        reaction[i] = n[i] * vol;

    SignalSolution sol;
    sol.c = CellField(mesh);
    if (initial_guess != nullptr && initial_guess->size() == n.size())
        sol.c.values = initial_guess->values;
    sol.residual = op.solve(reaction, op.rhs(), sol.c.values, tol);
    sol.c_boundary = op.boundary_values(sol.c.values);
    return sol;
}

double signal_residual(const SignalSolution& sol, const CellField& n, const BoundaryData& bc) {
    if (!same_geometry(*sol.c.mesh, *n.mesh))
        throw std::invalid_argument("signal_residual: mesh mismatch");
    const Mesh& mesh = *n.mesh;
    RobinLaplacian op(mesh, bc);
    const double vol = mesh.cell_volume();
    std::vector<double> reaction(n.size());
    for (size_t i = 0; i < n.size(); ++i)
        reaction[i] = n[i] * vol;
    return op.pde_residual(reaction, op.rhs(), sol.c.values);
}

} // namespace ccfv
