#pragma once

#include <string>
#include <vector>

namespace cliffmorse {

// One entry of the self-check panel: value is the measured deviation, pass
// means value <= tolerance (tolerance already includes any scaling).
struct CheckResult {
    std::string suite;
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    double seconds = 0.0; // wall time since the previous entry finished
    std::string details;
};

struct CheckOptions {
    unsigned seed = 1;      // seed of the generated conformal factor
    int degree = 4;         // its polynomial degree
    int grid_n = 32;        // field grid for the spectral checks
    double tol_scale = 1.0; // multiplies every tolerance (tiny = negative control)
    int n_slices = 101;     // slice count for the flow-residual scaling check
    unsigned threads = 0;
    std::string suites;     // comma-separated suite names; empty runs everything
};

// Runs the full identity panel: quadrature and kernel identities, chart
// isometries, symmetric-space identities, functional derivatives, flow and
// complex consistency, graph solver invariances, and residual scaling.
std::vector<CheckResult> run_invariant_checks(const CheckOptions& opt = {});

} // namespace cliffmorse
