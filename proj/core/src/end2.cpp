#include "cliffmorse/end2.hpp"

#include <cmath>
#include <numbers>

namespace cliffmorse {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
    if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
    return std::sin(x) / x;
}

Eigen::Matrix4d wedge(int i, int j) {
    Eigen::Matrix4d e = Eigen::Matrix4d::Zero();
    e(i, j) = 1.0;
    e(j, i) = -1.0;
    return e;
}

Eigen::Matrix4d comm(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
    return a * b - b * a;
}

} // namespace

double end_inner(const EndMatrix2& a, const EndMatrix2& b) {
    return 2.0 * kPi * kPi * (a * b.transpose()).trace();
}

double end_norm(const EndMatrix2& a) { return std::sqrt(end_inner(a, a)); }

Eigen::Matrix4d xi(const EndMatrix2& a) {
    Eigen::Matrix4d x = Eigen::Matrix4d::Zero();
    x.block<2, 2>(0, 2) = a;
    x.block<2, 2>(2, 0) = -a.transpose();
    return x;
}

EndMatrix2 xi_k_part(const Eigen::Matrix4d& omega) { return omega.block<2, 2>(0, 2); }

Eigen::Matrix4d so4_h_part(const Eigen::Matrix4d& omega) {
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    h.block<2, 2>(0, 0) = omega.block<2, 2>(0, 0);
    h.block<2, 2>(2, 2) = omega.block<2, 2>(2, 2);
    return h;
}

Eigen::Vector2d h_rates(const Eigen::Matrix4d& omega) {
    return Eigen::Vector2d(omega(1, 0), omega(3, 2));
}

double bform(const Eigen::Matrix4d& x, const Eigen::Matrix4d& y) {
    return -kPi * kPi * (x * y).trace();
}

Eigen::Vector4d theta_map(const EndMatrix2& m) {
    double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    return kPi * Eigen::Vector4d(a + d, b - c, a - d, b + c);
}

Eigen::Vector2d theta_plus(const EndMatrix2& m) {
    return kPi * Eigen::Vector2d(m(0, 0) + m(1, 1), m(0, 1) - m(1, 0));
}

Eigen::Vector2d theta_minus(const EndMatrix2& m) {
    return kPi * Eigen::Vector2d(m(0, 0) - m(1, 1), m(0, 1) + m(1, 0));
}

EndMatrix2 theta_inverse(const Eigen::Vector4d& v) {
    EndMatrix2 m;
    m(0, 0) = (v(0) + v(2)) / (2.0 * kPi);
    m(1, 1) = (v(0) - v(2)) / (2.0 * kPi);
    m(0, 1) = (v(1) + v(3)) / (2.0 * kPi);
    m(1, 0) = (v(3) - v(1)) / (2.0 * kPi);
    return m;
}

Eigen::Matrix2d rot2(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

RotationDecomposition decompose(const EndMatrix2& a) {
    // Left multiplication by rot(s) turns theta_plus by -s and theta_minus by
    // +s; right multiplication turns both by -s. Polar angles of the two
    // halves therefore determine the rotation factors, and the radii the
    // diagonal.
    Eigen::Vector2d tp = theta_plus(a);
    Eigen::Vector2d tm = theta_minus(a);
    double rp = tp.norm(), rm = tm.norm();
    double phip = (rp > 0.0) ? std::atan2(tp(1), tp(0)) : 0.0;
    double phim = (rm > 0.0) ? std::atan2(tm(1), tm(0)) : 0.0;

    RotationDecomposition out;
    out.delta = Eigen::Vector2d((rp + rm) / (2.0 * kPi), (rp - rm) / (2.0 * kPi));
    double alpha = (phim - phip) / 2.0;
    double beta = -(phip + phim) / 2.0;
    if (std::cos(alpha) < 0.0 || (std::abs(std::cos(alpha)) < 1e-15 && std::sin(alpha) < 0.0)) {
        alpha += kPi;
        beta += kPi;
    }
    out.m = rot2(alpha);
    out.n = rot2(beta);
    out.unique = std::min(rp, rm) > 1e-12 * (rp + rm + 1e-300);
    return out;
}

SelfDualSplit selfdual_split(const Eigen::Matrix4d& w) {
    SelfDualSplit s;
    s.plus << (w(0, 1) + w(2, 3)) / 2, (w(0, 2) - w(1, 3)) / 2, (w(0, 3) + w(1, 2)) / 2;
    s.minus << (w(0, 1) - w(2, 3)) / 2, (w(0, 2) + w(1, 3)) / 2, (w(0, 3) - w(1, 2)) / 2;
    return s;
}

Eigen::Matrix4d selfdual_matrix(const Eigen::Vector3d& c) {
    return c(0) * (wedge(0, 1) + wedge(2, 3)) + c(1) * (wedge(0, 2) - wedge(1, 3)) +
           c(2) * (wedge(0, 3) + wedge(1, 2));
}

Eigen::Matrix4d antiselfdual_matrix(const Eigen::Vector3d& c) {
    return c(0) * (wedge(0, 1) - wedge(2, 3)) + c(1) * (wedge(0, 2) + wedge(1, 3)) +
           c(2) * (wedge(0, 3) - wedge(1, 2));
}

Eigen::Matrix4d so4_exp(const Eigen::Matrix4d& omega) {
    // The two halves commute and each squares to -|coords|^2 I, so each
    // exponential is a plane rotation formula and the product is exact.
    SelfDualSplit s = selfdual_split(omega);
    double np = s.plus.norm(), nm = s.minus.norm();
    Eigen::Matrix4d ep =
        std::cos(np) * Eigen::Matrix4d::Identity() + sinc(np) * selfdual_matrix(s.plus);
    Eigen::Matrix4d em =
        std::cos(nm) * Eigen::Matrix4d::Identity() + sinc(nm) * antiselfdual_matrix(s.minus);
    return ep * em;
}

Eigen::Matrix4d exp_xi(const EndMatrix2& a) { return so4_exp(xi(a)); }

Eigen::Matrix4d dexpinv(const Eigen::Matrix4d& x, const Eigen::Matrix4d& v) {
    Eigen::Matrix4d c1 = comm(x, v);
    Eigen::Matrix4d c2 = comm(x, c1);
    Eigen::Matrix4d c4 = comm(x, comm(x, c2));
    return v + 0.5 * c1 + (1.0 / 12.0) * c2 - (1.0 / 720.0) * c4;
}

Eigen::Matrix4d dexp_left(const Eigen::Matrix4d& x, const Eigen::Matrix4d& v) {
    // exp(-x) d/dt exp(x) = sum_k (-ad_x)^k v / (k+1)!
    Eigen::Matrix4d term = v;
    Eigen::Matrix4d sum = v;
    double fact = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term = -comm(x, term);
        fact *= static_cast<double>(k + 1);
        sum += term / fact;
    }
    return sum;
}

} // namespace cliffmorse
