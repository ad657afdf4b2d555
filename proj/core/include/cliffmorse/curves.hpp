#pragma once

#include "cliffmorse/end2.hpp"
#include "cliffmorse/torus_field.hpp"

#include <functional>

namespace cliffmorse {

// second-order graph field of the curve exp(xi_{tA + t^2 B / 2}) . T0:
//   t psi_A + (1/2) t^2 (psi_B - (d psi_A/d theta)^2 + (d psi_A/d phi)^2)
TorusField curve_expansion(const EndMatrix2& a, const EndMatrix2& b, double t, int n);

// velocity of a left-trivialized matrix curve: Mdot = M xi_{field(t, M)}
using VelocityField = std::function<EndMatrix2(double, const Eigen::Matrix4d&)>;

// one Munthe-Kaas RK4 step; exact orthogonality via closed-form exponentials
Eigen::Matrix4d rkmk4_step(const Eigen::Matrix4d& m, double t, double h,
                           const VelocityField& field);

struct IntegrateOptions {
    double rel_tol = 1e-10;
    double h0 = 1e-2;
    double h_min = 1e-10;
    double h_max = 5.0;
};

// adaptive integration from t0 to t1 (either direction); visit runs after
// every accepted step with (t, M, velocity at t)
Eigen::Matrix4d rkmk4_integrate(
    Eigen::Matrix4d m, double t0, double t1, const VelocityField& field,
    const IntegrateOptions& opt = {},
    const std::function<void(double, const Eigen::Matrix4d&, const EndMatrix2&)>& visit = {});

// Horizontal lift through velocity samples: starting from lift0, advance with
// Mdot = M xi_{V(t)} where V interpolates the samples cubically. Transporting
// tangent coordinates along the curve is the identity in this lifted frame,
// which is what makes the frame useful.
std::vector<Eigen::Matrix4d> horizontal_lift(const Eigen::Matrix4d& lift0,
                                             const std::vector<double>& times,
                                             const std::vector<EndMatrix2>& velocities);

} // namespace cliffmorse
