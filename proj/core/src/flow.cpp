#include "cliffmorse/flow.hpp"

#include "cliffmorse/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cliffmorse {

EndMatrix2 flow_velocity(const AreaFunctional& f, const Eigen::Matrix4d& m, int direction) {
    return from_frame_coords(-direction * kFlowMetricScale * f.grad_frame(m));
}

FlowPath integrate_flow(const AreaFunctional& f, const CliffordPoint& start, int direction,
                        const std::vector<CriticalPoint>& crits, const FlowOptions& opt) {
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("integrate_flow: direction must be +1 or -1");
    const VelocityField field = [&](double, const Eigen::Matrix4d& m) {
        return flow_velocity(f, m, direction);
    };
    const int sink_index = (direction == 1) ? 0 : 4;

    FlowPath path;
    path.direction = direction;
    path.source = opt.source;
    path.closest_approach.assign(crits.size(), std::numeric_limits<double>::infinity());

    Eigen::Matrix4d m = start.matrix();
    double t = 0.0, h = opt.h0;
    {
        const double g0 = f.grad_norm(m);
        if (g0 < 1e-13)
            throw std::invalid_argument("integrate_flow: vanishing gradient at start");
        path.samples.push_back({0.0, start, flow_velocity(f, m, direction), f.value(m), g0});
        for (size_t k = 0; k < crits.size(); ++k)
            path.closest_approach[k] = cl_distance(start, crits[k].torus);
    }

    int accepted = 0;
    while (t < opt.t_max) {
        h = std::min(h, opt.t_max - t);
        const Eigen::Matrix4d full = rkmk4_step(m, t, h, field);
        const Eigen::Matrix4d half = rkmk4_step(m, t, 0.5 * h, field);
        const Eigen::Matrix4d fine = rkmk4_step(half, t + 0.5 * h, 0.5 * h, field);
        const double err = (full - fine).norm() / 15.0;
        const double tol = opt.rel_tol * 2.0; // matrices are orthogonal, norm 2
        const bool accept = err <= tol || h <= opt.h_min;
        if (accept) {
            t += h;
            m = fine;
            if (++accepted % 64 == 0) m = 1.5 * m - 0.5 * m * (m.transpose() * m);
            CliffordPoint pt(m);
            const double gn = f.grad_norm(m);
            if (opt.record || path.samples.size() < 2)
                path.samples.push_back({t, pt, flow_velocity(f, m, direction), f.value(m), gn});
            else
                path.samples.back() = {t, pt, flow_velocity(f, m, direction), f.value(m), gn};
            int hit = -1;
            for (size_t k = 0; k < crits.size(); ++k) {
                const double d = cl_distance(pt, crits[k].torus);
                path.closest_approach[k] = std::min(path.closest_approach[k], d);
                if (d < opt.terminate_radius &&
                    (!opt.sinks_only || crits[k].index == sink_index))
                    hit = static_cast<int>(k);
            }
            if (hit >= 0) {
                path.sink = hit;
                path.t_end = t;
                return path;
            }
        }
        const double scale = (err > 0)
            ? std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 4.0) : 4.0;
        h = std::clamp(h * scale, opt.h_min, opt.h_max);
    }
    path.no_convergence = true;
    path.t_end = t;
    return path;
}

} // namespace cliffmorse
