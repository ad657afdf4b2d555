#pragma once

#include "cliffmorse/area_functional.hpp"

#include <vector>

namespace cliffmorse {

struct FlowSample {
    double t = 0.0;
    CliffordPoint point;
    EndMatrix2 velocity; // frame-metric velocity, i.e. -8 grad for descent
    double value = 0.0;
    double grad_norm = 0.0;
};

struct FlowPath {
    std::vector<FlowSample> samples;
    int direction = 1; // +1 descent, -1 ascent, as integrated
    int source = -1;   // caller-declared origin in a critical list, if any
    int sink = -1;     // critical point reached, or -1
    bool no_convergence = false;
    double t_end = 0.0;
    std::vector<double> closest_approach; // per critical point, min distance seen
};

struct FlowOptions {
    double rel_tol = 1e-10;
    // cl_distance at which a critical point absorbs; its acos turns roundoff
    // into ~sqrt(eps) near zero, so anything below ~1e-6 is never reached
    double terminate_radius = 1e-6;
    double t_max = 400.0;
    double h0 = 1e-2;
    double h_min = 1e-10;
    double h_max = 5.0;
    bool record = true;      // keep all accepted samples, not just endpoints
    bool sinks_only = false; // only flow-stable critical points may terminate
    int source = -1;
};

// velocity of the area-derivative descent flow at m, in kernel coordinates
EndMatrix2 flow_velocity(const AreaFunctional& f, const Eigen::Matrix4d& m, int direction);

// integrate the descent (+1) or ascent (-1) flow from start until it lands in
// the terminate radius of a critical point or t_max runs out
FlowPath integrate_flow(const AreaFunctional& f, const CliffordPoint& start, int direction,
                        const std::vector<CriticalPoint>& crits, const FlowOptions& opt = {});

} // namespace cliffmorse
