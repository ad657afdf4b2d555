#pragma once

#include "cliffmorse/torus_field.hpp"

#include <Eigen/Dense>
#include <utility>

namespace cliffmorse {

// Coefficient matrix A of the product-form field
//   psi_A(theta, phi) = (cos theta, sin theta) A (cos phi, sin phi)^T.
// These four fields span the kernel of (Laplacian + 2) on the square torus;
// they are the infinitesimal deformations that stay inside the family of
// minimal Clifford tori.
using KernelCoords = Eigen::Matrix2d;

TorusField kernel_field(const KernelCoords& a, int n);

// L^2 split f = psi_A + remainder with remainder orthogonal to every kernel
// field. Uses  integral psi_A psi_B dtheta dphi = pi^2 tr(A B^T),  so
// a_ij = quadrature(f * basis_ij) / pi^2.
std::pair<KernelCoords, TorusField> kernel_project(const TorusField& f);

// pairing of two kernel fields: integral of psi_A psi_B over the square torus
double kernel_l2(const KernelCoords& a, const KernelCoords& b);

// Orthonormal frame for the scaled pairing 2 pi^2 tr(A B^T) used on the Lie
// algebra side: E_alpha = e_alpha / (sqrt(2) pi), alpha running row-major over
// the elementary matrices e11, e12, e21, e22.
KernelCoords frame_matrix(int alpha);
Eigen::Vector4d frame_coords(const KernelCoords& a);        // sqrt(2) pi * A, row-major
KernelCoords from_frame_coords(const Eigen::Vector4d& v);

} // namespace cliffmorse
