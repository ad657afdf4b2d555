#pragma once

#include "cliffmorse/ambient.hpp"
#include "cliffmorse/clifford.hpp"
#include "cliffmorse/end2.hpp"
#include "cliffmorse/kernel.hpp"

#include <vector>

namespace cliffmorse {

// The flow metric on the torus family differs from the plain frame metric by
// this constant factor: first variation of area under the conformal factor
// couples the kernel projection of the normal derivative with weight 2, and
// the second-order normal graph responds with another factor 4.
inline constexpr double kFlowMetricScale = 8.0;

// First-order area change I[u](M T0) = (1/2) integral of u over M T0, together
// with its gradient and Hessian in the orthonormal frame E_alpha of the
// tangent space at M. All quadrature nodes and polynomial evaluators are
// cached at construction, so value/gradient cost one sweep over the grid.
class AreaFunctional {
public:
    explicit AreaFunctional(AmbientFunction u, int quad_n = 0);

    const AmbientFunction& u() const { return u_; }
    int quad_n() const { return nq_; }

    double value(const Eigen::Matrix4d& m) const;
    Eigen::Vector4d grad_frame(const Eigen::Matrix4d& m) const;
    Eigen::Matrix4d hess_frame(const Eigen::Matrix4d& m) const;
    // normal derivative of u along M T0 as grid values (for field-level work)
    double grad_norm(const Eigen::Matrix4d& m) const { return grad_frame(m).norm(); }

private:
    AmbientFunction u_;
    PolyEvaluator pu_, px_, py_, pz_, pw_;
    int nq_;
    double weight_; // (2 pi / nq)^2 / 2, the quadrature weight times the area-form half
    std::vector<Eigen::Vector4d> x0_, nu0_;  // base torus nodes and unit normal
    std::vector<Eigen::Vector4d> psi_;       // per node: psi_{E_alpha}, alpha = 0..3
};

// single-shot wrappers for callers without a cached functional
double eval_I(const AmbientFunction& u, const CliffordPoint& m);
EndMatrix2 grad_I(const AmbientFunction& u, const CliffordPoint& m);
Eigen::Matrix4d hess_I(const AmbientFunction& u, const CliffordPoint& m); // frame coords

struct CriticalPoint {
    CliffordPoint torus;
    double value = 0.0;
    int index = 0;               // negative eigenvalue count of the frame Hessian
    Eigen::Vector4d eigenvalues; // ascending
    double grad_norm = 0.0;
};

struct CriticalSet {
    std::vector<CriticalPoint> points;
    bool degenerate = false;       // an eigenvalue fell below the Morse cut
    bool counts_ok = false;        // index counts satisfy the closed-family constraints
    double min_abs_eigenvalue = 0.0;
    int starts_converged = 0;      // summed over all multistart rounds
    int rounds = 0;                // multistart rounds actually run
};

struct SearchOptions {
    int starts_per_sphere = 20;  // starts = (starts_per_sphere)^2 invariant pairs
    double tol_crit = 1e-10;     // frame gradient norm at acceptance
    double morse_cut = 1e-6;     // |eigenvalue| below this flags degeneracy
    double dedup_tol = 1e-6;     // cl_distance identifying two finds
    int max_newton = 80;
    double max_step = 0.35;      // trust clamp on the frame-coordinate step
    int max_rounds = 3;          // denser restarts fired while a nondegenerate census
                                 // still violates the Euler / Morse count constraints
    unsigned threads = 0;
};

CriticalSet find_critical_points(const AreaFunctional& f, const SearchOptions& opt = {});

} // namespace cliffmorse
