#pragma once

#include <Eigen/Dense>

namespace cliffmorse {

// 2x2 real matrix A, doubling as the coordinate of the kernel field psi_A and
// of the Lie-algebra element xi_A. The natural pairing throughout is
// <A,B> = 2 pi^2 tr(A B^T), under which e_ij / (sqrt(2) pi) is orthonormal.
using EndMatrix2 = Eigen::Matrix2d;

double end_inner(const EndMatrix2& a, const EndMatrix2& b);
double end_norm(const EndMatrix2& a);

// block embedding [[0, A], [-A^T, 0]] into the antisymmetric 4x4 matrices
Eigen::Matrix4d xi(const EndMatrix2& a);
EndMatrix2 xi_k_part(const Eigen::Matrix4d& omega);      // upper-right block
Eigen::Matrix4d so4_h_part(const Eigen::Matrix4d& omega); // block-diagonal part
// rotation rates of the block-diagonal part: (omega_21, omega_43)
Eigen::Vector2d h_rates(const Eigen::Matrix4d& omega);

// bi-invariant pairing -pi^2 tr(xy) on antisymmetric matrices; restricted to
// xi_A it reproduces end_inner
double bform(const Eigen::Matrix4d& x, const Eigen::Matrix4d& y);

// the linear isometry End(R^2) -> R^4: (pi(a+d), pi(b-c), pi(a-d), pi(b+c))
Eigen::Vector4d theta_map(const EndMatrix2& a);
Eigen::Vector2d theta_plus(const EndMatrix2& a);
Eigen::Vector2d theta_minus(const EndMatrix2& a);
EndMatrix2 theta_inverse(const Eigen::Vector4d& v);

Eigen::Matrix2d rot2(double angle);

// A = M diag(delta) N with M, N rotations; canonical pick delta(0) >= |delta(1)|
// and M(0,0) >= 0. unique is false when A is a multiple of an orthogonal
// matrix (both factors can then be rotated against each other).
struct RotationDecomposition {
    Eigen::Matrix2d m;
    Eigen::Vector2d delta;
    Eigen::Matrix2d n;
    bool unique = true;
};
RotationDecomposition decompose(const EndMatrix2& a);

// Split of an antisymmetric 4x4 matrix into commuting self-dual and
// anti-self-dual parts, each encoded by a 3-vector in the standard basis of
// 2-forms. Both parts square to -|coords|^2 I, which gives the closed-form
// exponential below.
struct SelfDualSplit {
    Eigen::Vector3d plus;
    Eigen::Vector3d minus;
};
SelfDualSplit selfdual_split(const Eigen::Matrix4d& omega);
Eigen::Matrix4d selfdual_matrix(const Eigen::Vector3d& coords);      // sum c_i S_i
Eigen::Matrix4d antiselfdual_matrix(const Eigen::Vector3d& coords);  // sum c_i A_i

// exact exponential of an antisymmetric 4x4 matrix via the self-dual split
Eigen::Matrix4d so4_exp(const Eigen::Matrix4d& omega);
Eigen::Matrix4d exp_xi(const EndMatrix2& a);

// d exp^{-1}: v + (1/2)[x,v] + (1/12)[x,[x,v]] + ..., truncated power series;
// valid for the small increments a Lie group integrator feeds it
Eigen::Matrix4d dexpinv(const Eigen::Matrix4d& x, const Eigen::Matrix4d& v);
// left-trivialized differential: exp(-x) d/dt exp(x(t)) for xdot = v
Eigen::Matrix4d dexp_left(const Eigen::Matrix4d& x, const Eigen::Matrix4d& v);

} // namespace cliffmorse
