#pragma once

#include "ccfv/mesh.hpp"

#include <span>
#include <vector>

namespace ccfv {

/// Finite-volume Laplacian with Robin boundary closure, in integrated form:
///   (A x)_i = robin_diag_i x_i + reaction_i x_i + sum_faces (x_i - x_nbr) * measure / h.
///
/// The Robin condition d_nu c = (gamma - c) g is folded into each boundary row by
/// second-order ghost elimination: with cell value c_c and spacing h, the ghost value
/// solves (c_g - c_c)/h = (gamma - (c_c + c_g)/2) g, giving the face coefficient
/// g * measure / (1 + h g / 2) and the source gamma times that coefficient.
class RobinLaplacian {
public:
    RobinLaplacian(const Mesh& mesh, const BoundaryData& bc);

    const Mesh& mesh() const { return *mesh_; }
    const BoundaryData& bc() const { return *bc_; }

    /// Robin source term (integrated): rhs of the n-independent part of the system.
    const std::vector<double>& rhs() const { return rhs_; }

    /// y = A(reaction) x, reaction given per cell in integrated form (already times volume).
    void apply(std::span<const double> reaction, std::span<const double> x,
               std::span<double> y) const;

    /// Diagonal of A(reaction), for Jacobi preconditioning.
    std::vector<double> diagonal(std::span<const double> reaction) const;

    /// Max-norm residual of the equation in pointwise (per-volume) form:
    /// max_i |b_i - (A(reaction) x)_i| / vol.
    double pde_residual(std::span<const double> reaction, std::span<const double> b,
                        std::span<const double> x) const;

    /// Second-order boundary-face values (c_c + h g gamma / 2) / (1 + h g / 2).
    std::vector<double> boundary_values(std::span<const double> c) const;

    /// Solve A(reaction) x = b so the pointwise residual is <= tol.
    /// Direct tridiagonal elimination in 1D, Jacobi-preconditioned CG otherwise
    /// (iteration cap 50 * cell count). Returns the achieved residual; throws
    /// NumericalError if the tolerance cannot be met.
    double solve(std::span<const double> reaction, std::span<const double> b,
                 std::vector<double>& x, double tol) const;

private:
    double solve_tridiagonal(std::span<const double> reaction, std::span<const double> b,
                             std::vector<double>& x, double tol) const;
    double solve_pcg(std::span<const double> reaction, std::span<const double> b,
                     std::vector<double>& x, double tol) const;

    const Mesh* mesh_;
    const BoundaryData* bc_;
    std::vector<double> robin_coeff_; // per boundary face
    std::vector<double> robin_diag_;  // per cell
    std::vector<double> rhs_;         // per cell
};

/// Result of the elliptic signal solve 0 = Lap c - n c with Robin boundary data.
struct SignalSolution {
    CellField c;
    std::vector<double> c_boundary; // per boundary face
    double residual = 0.0;          // achieved pointwise max-norm residual
};

/// Solve the signal subproblem for a given nonnegative density field.
/// An optional initial guess warm-starts the iterative path.
SignalSolution solve_signal(const CellField& n, const BoundaryData& bc, double tol = 1e-12,
                            const CellField* initial_guess = nullptr);

/// A-posteriori pointwise max-norm residual of a signal solution.
double signal_residual(const SignalSolution& sol, const CellField& n, const BoundaryData& bc);

} // namespace ccfv
