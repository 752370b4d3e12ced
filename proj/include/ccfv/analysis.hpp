#pragma once

#include "ccfv/config.hpp"
#include "ccfv/mesh.hpp"
#include "ccfv/steady.hpp"
#include "ccfv/transport.hpp"

#include <vector>

namespace ccfv {

/// Inputs of the convergence threshold K(m, g, gamma).
struct KInputs {
    double m = 0.0;       // total mass
    double gnorm = 0.0;   // max of g over the boundary
    double gamma = 0.0;   // saturation
    double lambda1 = 0.0; // smallest positive Neumann eigenvalue
    double c_trace = 0.0; // trace-inequality constant
    double volume = 0.0;  // |Omega|
};

/// K = lambda1/2 - gamma (C gnorm max{gamma^2 gnorm^2, 1} + m gamma e^{2 gamma} / (2 |Omega|)).
double K_of(const KInputs& in);

/// Per-output-time energy record relative to a stationary state.
struct EnergyReport {
    double t = 0.0;
    double E_n = 0.0;      // int (n - n_inf)^2
    double E_grad_c = 0.0; // int |grad(c - c_inf)|^2
    double E_c = 0.0;      // int (c - c_inf)^2
    double rhs36 = 0.0;    // (gamma^2/2) int (n - n_inf)^2 / n_inf
    double cum_En = 0.0;   // trapezoid of E_n over [0, t]
    double mass = 0.0;
    double min_n = 0.0, max_n = 0.0;
    double min_c = 0.0, max_c = 0.0;
};

std::vector<EnergyReport> attach_energy(const TimeSeries& series, const StationaryState& stat,
                                        const BoundaryData& bc);

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Energy inequality at one state:
///   int |grad(c - c_inf)|^2 + 1/2 int n_inf (c - c_inf)^2
///     <= (gamma^2/2) int (n - n_inf)^2 / n_inf.
InequalityCheck check_energy_inequality(const CellField& n, const CellField& c,
                                        const StationaryState& stat, const BoundaryData& bc);

/// Integral inequality over a run: K * trapezoid(E_n) <= E_n(0).
/// Holds vacuously when K <= 0.
InequalityCheck check_34(const std::vector<EnergyReport>& energies, double K);

/// Lower estimate of the trace-inequality constant on this mesh: the max of
///   norm_b(phi) / (norm_grad(phi)^(1-lambda) norm_q(phi)^lambda + norm_q(phi))
/// over the first min(20, cells) Neumann-Laplacian eigenvectors plus `samples`
/// random five-term combinations of them (seeded). lambda must lie in the
/// admissibility window (0, q / (2N + 2q - N q)).
double estimate_trace_constant(const Mesh& mesh, double q, double lambda, int samples,
                               unsigned seed = 42);

struct TraceValidation {
    double worst_factor = 0.0; // max over fresh samples of norm_b / (C * denominator)
    bool holds = false;        // worst_factor <= 1.05
};

/// Re-test an estimated constant against a fresh random family.
TraceValidation validate_trace_constant(const Mesh& mesh, double q, double lambda, double c_hat,
                                        int samples = 1000, unsigned seed = 1042);

struct ChiCheckResult {
    bool ok = false;
    double max_n_dev = 0.0; // relative to max n of the reference run
    double max_c_dev = 0.0; // relative to chi * max c of the reference run
};

/// Rescaling identity: a run with sensitivity 1 and saturation gamma matches a
/// run with sensitivity 1/chi and saturation chi*gamma, with identical density
/// fields and signal scaled by chi. Exact for binary powers of chi.
ChiCheckResult chi_check(const RunConfig& cfg, double chi);

struct Convergence {
    bool converged = false;
    double rate = 0.0; // least-squares slope of log E_n over the tail
};

/// Converged iff E_n is nonincreasing over the last tail_fraction of records
/// and the final E_n is below 1e-12 E_n(0) + 1e-14. Needs >= 10 records.
Convergence detect_convergence(const std::vector<EnergyReport>& energies, double tail_fraction);

/// Discrete Neumann-Laplacian eigenvector (cosine mode) machinery, exposed for
/// diagnostics and tests.
struct NeumannMode {
    CellField field;
    double eigenvalue = 0.0; // discrete eigenvalue
};

std::vector<NeumannMode> neumann_modes(const Mesh& mesh, int count);

/// FV quadrature norms used throughout the diagnostics.
double norm_boundary_l2(const Mesh& mesh, const CellField& phi);
double norm_grad_l2(const CellField& phi);
double norm_lq(const CellField& phi, double q);

} // namespace ccfv
