#include "ccfv/steady.hpp"

#include "ccfv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccfv {

namespace {

/// Pointwise max-norm of F(c) = A0 c + alpha vol e^c c - b, per volume.
double semilinear_residual(const RobinLaplacian& op, double alpha, double vol,
                           const std::vector<double>& c, std::vector<double>& f) {
    const size_t n = c.size();
    std::vector<double> zero(n, 0.0);
    f.resize(n);
    op.apply(zero, c, f);
    const std::vector<double>& b = op.rhs();
    double res = 0.0;
    for (size_t i = 0; i < n; ++i) {
        f[i] += alpha * vol * std::exp(c[i]) * c[i] - b[i];
        res = std::max(res, std::abs(f[i]) / vol);
    }
    return res;
}

} // namespace

CellField solve_semilinear(double alpha, const Mesh& mesh, const BoundaryData& bc, double tol,
                           int newton_cap, const CellField* initial_guess) {
    if (alpha < 0.0 || !std::isfinite(alpha))
        throw std::domain_error("solve_semilinear: alpha must be >= 0");
    if (!(tol > 0.0))
        throw std::invalid_argument("solve_semilinear: tol must be > 0");
    RobinLaplacian op(mesh, bc);
    if (alpha == 0.0 && bc.max_g() == 0.0)
        throw DegenerateProblemError(
            "semilinear problem is singular: alpha zero and g identically zero");

    const size_t nc = static_cast<size_t>(mesh.num_cells());
    const double vol = mesh.cell_volume();

    CellField c(mesh, 0.5 * bc.gamma);
    if (initial_guess != nullptr && initial_guess->size() == nc)
        c.values = initial_guess->values;

    std::vector<double> f, jac_reaction(nc), delta(nc), trial(nc);
    double res = semilinear_residual(op, alpha, vol, c.values, f);
    for (int iter = 0; iter < newton_cap && res > tol; ++iter) {
        // Jacobian reaction: alpha e^c (1 + c) vol, SPD for c >= 0
        for (size_t i = 0; i < nc; ++i)
            jac_reaction[i] = alpha * vol * std::exp(c[i]) * (1.0 + c[i]);
        for (size_t i = 0; i < nc; ++i)
            f[i] = -f[i];
        delta.assign(nc, 0.0);
        const double inner_tol = std::max(1e-3 * res, 0.05 * tol);
        op.solve(jac_reaction, f, delta, inner_tol);

        double step = 1.0;
        double new_res = res;
        for (int halving = 0; halving < 40; ++halving) {
            for (size_t i = 0; i < nc; ++i)
                trial[i] = c[i] + step * delta[i];
            new_res = semilinear_residual(op, alpha, vol, trial, f);
            if (new_res < res)
                break;
            step *= 0.5;
        }
        if (!(new_res < res))
            throw NumericalError("solve_semilinear: Newton line search stalled at residual " +
                                 std::to_string(res));
        c.values = trial;
        res = new_res;
    }
    if (!(res <= tol))
        throw NumericalError("solve_semilinear: Newton did not converge (residual " +
                             std::to_string(res) + ")");
    // discrete maximum principle carries over from the linear problem
    if (c.min() < -tol || c.max() > bc.gamma + tol)
        throw NumericalError("solve_semilinear: solution violates the [0, gamma] bounds");
    return c;
}

double mass_of_alpha(double alpha, const Mesh& mesh, const BoundaryData& bc, double tol) {
    if (alpha == 0.0)
        return 0.0;
    const CellField c = solve_semilinear(alpha, mesh, bc, tol);
    double sum = 0.0;
    for (double v : c.values)
        sum += std::exp(v);
    return alpha * sum * mesh.cell_volume();
}

StationaryState solve_stationary(double m, const Mesh& mesh, const BoundaryData& bc,
                                 double elliptic_tol, double mass_tol, int newton_cap) {
    if (!(m > 0.0))
        throw std::domain_error("solve_stationary: mass must be > 0");
    if (!(bc.min_g() > 0.0))
        throw std::domain_error("solve_stationary: requires min g > 0");

    const double vol_omega = mesh.domain_measure();
    const double gamma = bc.gamma;
    const double alpha_lo = m / (std::exp(gamma) * vol_omega);
    const double alpha_hi = m / vol_omega;

    CellField c(mesh, 0.5 * gamma);
    auto mass_at = [&](double alpha) {
        c = solve_semilinear(alpha, mesh, bc, elliptic_tol, newton_cap, &c);
        double sum = 0.0;
        for (double v : c.values)
            sum += std::exp(v);
        return alpha * sum * mesh.cell_volume();
    };

    const int cap = 200;
    int iters = 0;
    double alpha = m / (vol_omega * std::exp(0.5 * gamma));
    alpha = std::clamp(alpha, alpha_lo, alpha_hi);
    double mass = mass_at(alpha);
    double best_err = std::abs(mass - m);
    int stalls = 0;
    bool use_bisection = false;

    while (best_err > mass_tol * m && iters < cap) {
        ++iters;
        if (!use_bisection) {
            const double next = std::clamp(alpha * m / mass, alpha_lo, alpha_hi);
            const double next_mass = mass_at(next);
            const double err = std::abs(next_mass - m);
            if (err >= best_err) {
                if (++stalls >= 3) {
                    use_bisection = true;
                    continue;
                }
            } else {
                stalls = 0;
            }
            alpha = next;
            mass = next_mass;
            best_err = std::min(best_err, err);
        } else {
            // bracket endpoints give mass <= m and >= m by the c-bounds
            double lo = alpha_lo, hi = alpha_hi;
            const double f_lo = mass_at(lo) - m;
            const double f_hi = mass_at(hi) - m;
            if (f_lo > mass_tol * m || f_hi < -mass_tol * m)
                throw std::logic_error("solve_stationary: analytic alpha bracket violated");
            while (iters < cap) {
                ++iters;
                alpha = 0.5 * (lo + hi);
                mass = mass_at(alpha);
                best_err = std::abs(mass - m);
                if (best_err <= mass_tol * m)
                    break;
                if (mass < m)
                    lo = alpha;
                else
                    hi = alpha;
            }
            break;
        }
    }
    if (best_err > mass_tol * m)
        throw NumericalError("solve_stationary: no convergence after " + std::to_string(iters) +
                             " outer iterations (mass error " + std::to_string(best_err) + ")");

    StationaryState st;
    st.alpha = alpha;
    st.mass = m;
    st.c = solve_semilinear(alpha, mesh, bc, elliptic_tol, newton_cap, &c);
    st.n = CellField(mesh);
    for (size_t i = 0; i < st.c.size(); ++i)
        st.n[i] = alpha * std::exp(st.c[i]);
    st.mass_residual = std::abs(integrate(st.n) - m);

    RobinLaplacian op(mesh, bc);
    const double vol = mesh.cell_volume();
    std::vector<double> reaction(st.n.size());
    for (size_t i = 0; i < st.n.size(); ++i)
        reaction[i] = st.n[i] * vol;
    st.elliptic_residual = op.pde_residual(reaction, op.rhs(), st.c.values);
    st.c_boundary = op.boundary_values(st.c.values);
    return st;
}

} // namespace ccfv
