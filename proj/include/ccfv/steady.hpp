#pragma once

#include "ccfv/mesh.hpp"
#include "ccfv/signal.hpp"

#include <vector>

namespace ccfv {

/// Stationary state at prescribed mass: n = alpha * exp(c) with c solving the
/// semilinear problem Lap c = alpha e^c c under the Robin boundary condition.
struct StationaryState {
    double alpha = 0.0;
    double mass = 0.0; // prescribed mass
    CellField c;
    CellField n;
    std::vector<double> c_boundary;
    double mass_residual = 0.0;     // |integrate(n) - mass|
    double elliptic_residual = 0.0; // pointwise max-norm residual of the c-equation
};

/// Newton solve of Lap c = alpha e^c c with Robin boundary closure.
/// Halving line search, initial guess c = gamma/2 (or the provided field).
CellField solve_semilinear(double alpha, const Mesh& mesh, const BoundaryData& bc, double tol,
                           int newton_cap = 30, const CellField* initial_guess = nullptr);

/// alpha * integrate(exp(c(alpha))): the mass the exponential ansatz carries.
double mass_of_alpha(double alpha, const Mesh& mesh, const BoundaryData& bc, double tol);

/// Solve for alpha so the ansatz carries mass m: fixed-point iteration
/// alpha <- m / integrate(exp(c(alpha))) with bisection fallback on the
/// analytically guaranteed bracket [m/(e^gamma |Omega|), m/|Omega|].
StationaryState solve_stationary(double m, const Mesh& mesh, const BoundaryData& bc,
                                 double elliptic_tol = 1e-12, double mass_tol = 1e-10,
                                 int newton_cap = 30);

} // namespace ccfv
