#pragma once

#include "cliffmorse/area_functional.hpp"
#include "cliffmorse/clifford.hpp"
#include "cliffmorse/fermi.hpp"

#include <stdexcept>
#include <vector>

namespace cliffmorse {

struct NoContraction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// contraction range of the frozen-Jacobian iteration below
inline constexpr double kWhiteSMax = 0.05;

// Perturbed minimal graph over m . T0 in the metric e^{2 s u} g: the unique
// small kernel-free field f_perp whose graph has mean curvature lying entirely
// in the four kernel directions. h_k holds those kernel coordinates, area the
// graph area in the perturbed metric.
struct WhiteSolution {
    CliffordPoint m;
    double s = 0.0;
    TorusField f_perp;
    KernelCoords h_k = KernelCoords::Zero();
    double area = 0.0;
    int iterations = 0;
    double residual_sup = 0.0; // final sup norm of the kernel-free curvature part
};

struct WhiteOptions {
    int grid_n = 64;
    double tol = 1e-10; // sup norm target for the kernel-free residual
    int max_iter = 50;
};

// Newton iteration on f -> (kernel-free part of mean curvature of the graph),
// with the Jacobian frozen at the flat linearization -2(Laplacian + 2), which
// is diagonal in Fourier modes. Throws NoContraction if the residual fails to
// reach tol within max_iter, and std::invalid_argument for |s| > kWhiteSMax.
WhiteSolution solve_white(const AmbientFunction& u, const CliffordPoint& m, double s,
                          const WhiteOptions& opt = {});

// Finite-difference validation of the first-order area identities at one base
// torus. Per s: the conformal rate (area(s) - area(0)) / (2 s) against
// I[u](m T0); the directional derivative of area along xi_A against
// (1/2) integral psi_A h; the mixed second derivative along (xi_A, xi_B)
// against (1/2) integral psi_A Dh(xi_B).
struct AreaDerivativeRow {
    double s = 0.0;
    double conformal_error = 0.0; // |(area(s) - area(0)) / (2 s) - I[u]|
    double kernel_error = 0.0;    // max over frame directions, absolute
    double mixed_error = 0.0;     // max over frame pairs, absolute
    double kernel_scale = 0.0;    // magnitude of the matched sides, for relative reads
};

struct AreaDerivativeReport {
    std::vector<AreaDerivativeRow> rows;
    // consecutive row-error ratios (row i over row i+1); meaningful when the
    // s list halves
    std::vector<double> conformal_ratio, kernel_ratio, mixed_ratio;
};

AreaDerivativeReport area_derivative_check(const AmbientFunction& u, const CliffordPoint& m,
                                           const std::vector<double>& s_values,
                                           const WhiteOptions& opt = {});

} // namespace cliffmorse
