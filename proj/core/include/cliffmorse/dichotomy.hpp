#pragma once

#include "cliffmorse/morse.hpp"

#include <vector>

namespace cliffmorse {

// The linearized flow along a path, in the left-trivialized frame carried by
// the integrated lift (which is parallel along horizontal curves): perturbation
// coordinates g satisfy gdot = M(t) g with M = -direction * 8 * Hess. Limits
// hold the values at the critical points the path leaves and approaches.
struct LinearizedFlow {
    std::vector<double> times;
    std::vector<Eigen::Matrix4d> m;
    std::vector<Eigen::Vector4d> velocity; // frame coordinates of the path velocity
    Eigen::Matrix4d limit_start;
    Eigen::Matrix4d limit_end;
};

LinearizedFlow linearized_flow_matrix(const AreaFunctional& f, const FlowPath& path,
                                      const CliffordPoint* start_crit = nullptr,
                                      const CliffordPoint* end_crit = nullptr);

struct MorseSmaleOptions {
    double grid_h = 0.01;      // dense resampling step for subspace propagation
    double angle_tol = 1e-6;   // principal-angle threshold for detecting intersection
    double cond_limit = 1e12;
};

struct MorseSmaleReport {
    int bounded_dim = 0;     // dim of bounded solutions of gdot = M g
    int expected_dim = 0;    // index difference of the endpoints
    bool verdict = false;    // bounded_dim == expected_dim
    double smallest_sine = 0.0;      // smallest principal sine between the families
    double separation_sine = 0.0;    // next principal sine, the transversality margin
    double velocity_defect = 0.0;    // distance of the orbit velocity from the unstable family
    int adjoint_kernel_dim = 0;
    double adjoint_orthogonality = 0.0; // pairing of adjoint solutions with the velocity
    double condition = 1.0;
    bool ill_conditioned = false;
};

// Propagates the unstable family of M(start limit) forward and the stable
// family of M(end limit) backward, measures their intersection mid-orbit, and
// runs the same count for the adjoint equation gdot = -M g, whose solutions
// must stay orthogonal to the transported velocity.
MorseSmaleReport morse_smale_check(const AreaFunctional& f, const ConnectingOrbit& orbit,
                                   const CriticalSet& cs, const MorseSmaleOptions& opt = {});

// Bounded solution of etadot = A(t) eta + w(t) on a uniform grid, by
// Hermite collocation assembled as a sparse least-squares system. Boundary
// rows pin the backward-growing components at the start node to the frozen
// equilibrium eta_inf_start; a gauge row removes the homogeneous bounded
// solution along gauge_dir at gauge_node. One defect-correction pass against
// sixth-order finite differences sharpens the result.
struct BoundedSolveResult {
    std::vector<Eigen::Vector4d> eta;
    std::vector<Eigen::Vector4d> eta_dot; // A eta + w on the grid
    double collocation_defect = 0.0;
};

BoundedSolveResult bounded_solution(const std::vector<double>& times,
                                    const std::vector<Eigen::Matrix4d>& a,
                                    const std::vector<Eigen::Vector4d>& w,
                                    const Eigen::Matrix4d& a_limit_start,
                                    const Eigen::Vector4d& eta_inf_start,
                                    const Eigen::Vector4d& gauge_dir, int gauge_node);

} // namespace cliffmorse
