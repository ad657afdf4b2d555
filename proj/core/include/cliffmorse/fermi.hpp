#pragma once

#include "cliffmorse/ambient.hpp"
#include "cliffmorse/end2.hpp"
#include "cliffmorse/kernel.hpp"
#include "cliffmorse/torus_field.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace cliffmorse {

// Tubular-neighborhood chart of the 3-sphere about the square torus r = 0:
//   (theta, phi, r) -> (sin(pi/4+r) e(theta), sin(pi/4-r) e(phi)),
// defined for |r| < pi/4. The surfaces r = const are the parallel tori; r is
// arc length along the normal geodesics.
struct FermiPoint {
    double theta = 0.0;
    double phi = 0.0;
    double r = 0.0;
};

struct NotAGraph : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Eigen::Vector4d fermi_embed(const FermiPoint& p);
Eigen::Vector4d fermi_tangent_theta(const FermiPoint& p);
Eigen::Vector4d fermi_tangent_phi(const FermiPoint& p);
Eigen::Vector4d fermi_tangent_r(const FermiPoint& p);
Eigen::Matrix3d fermi_metric(const FermiPoint& p);
FermiPoint fermi_chart_inverse(const Eigen::Vector4d& x);

// Chart components (d theta, d phi, d r) of the rotation vector field
// x -> omega x restricted to the sphere. For omega = xi_A this is
//   (cot(pi/4+r) d psi_A/d theta, -tan(pi/4+r) d psi_A/d phi, psi_A);
// block-diagonal generators add their two rotation rates to the angular slots.
Eigen::Vector3d killing_field_so4(const Eigen::Matrix4d& omega, const FermiPoint& p);
Eigen::Vector3d killing_field(const KernelCoords& a, const FermiPoint& p);

// Normal-graph field of the torus m . T0 over the base torus: f with
// Phi(theta, phi, f) in m . T0 at every node. Bisection bracket then Newton.
TorusField graph_of_torus(const Eigen::Matrix4d& m, int n);

// area of the graph r = f under the metric e^{2 s w} g
double graph_area(const TorusField& f, const AmbientFunction& w, double s);

// Scalar mean curvature (sum of principal curvatures) of the graph r = f
// under e^{2 s w} g, normal on the +r side, computed in divergence form
// H = div(unit normal) from the level function r - f. Sign convention makes
// the linearization at f = 0, s = 0 equal to -2(Laplacian + 2).
TorusField mean_curvature(const TorusField& f, const AmbientFunction& w, double s);

// (theta, phi) -> < grad u (m Phi0), m nu >, nu the unit normal of the base torus
TorusField ambient_normal_derivative(const AmbientFunction& u, const Eigen::Matrix4d& m,
                                     int n = 64);

} // namespace cliffmorse
