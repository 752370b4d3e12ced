#pragma once

#include "ccfv/config.hpp"
#include "ccfv/mesh.hpp"

#include <string>
#include <vector>

namespace ccfv {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Run the cross-module invariant suite against one configuration.
std::vector<CheckResult> run_verification(const RunConfig& cfg);

bool all_passed(const std::vector<CheckResult>& checks);

/// Smallest positive Neumann eigenvalue of the discrete FV Laplacian by
/// inverse-power iteration on the zero-mean subspace. Independent of the
/// closed-form neumann_lambda1.
double lambda1_inverse_power(const Mesh& mesh, int iterations = 40);

} // namespace ccfv
