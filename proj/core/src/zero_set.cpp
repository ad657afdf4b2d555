#include "cliffmorse/zero_set.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cliffmorse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double psi_theta_deriv(const EndMatrix2& a, double th, double ph) {
    const Eigen::Vector2d etp(-std::sin(th), std::cos(th));
    const Eigen::Vector2d ep(std::cos(ph), std::sin(ph));
    return etp.dot(a * ep);
}

double psi_phi_deriv(const EndMatrix2& a, double th, double ph) {
    const Eigen::Vector2d et(std::cos(th), std::sin(th));
    const Eigen::Vector2d epp(-std::sin(ph), std::cos(ph));
    return et.dot(a * epp);
}

} // namespace

ZeroSet zero_set(const EndMatrix2& a, int n_theta) {
    if (n_theta < 4) throw std::invalid_argument("zero_set: need n_theta >= 4");
    const double scale = a.norm();
    if (scale == 0.0) throw std::invalid_argument("zero_set: zero matrix");

    ZeroSet out;
    // classify via the two rotation-invariant radii |Theta_+-(A)|
    const double rp = theta_plus(a).norm();
    const double rm = theta_minus(a).norm();
    const double tot = rp + rm;
    if (std::abs(rp - rm) <= 1e-9 * tot) out.kind = ZeroSetKind::Singular;
    else if (std::min(rp, rm) <= 1e-9 * tot) out.kind = ZeroSetKind::Special;
    else out.kind = ZeroSetKind::Generic;

    // For fixed theta, psi_A(theta, .) = v1 cos(phi) + v2 sin(phi) with
    // (v1, v2) = e_theta^T A; its zeros sit opposite each other.
    for (int i = 0; i < n_theta; ++i) {
        const double th = kTwoPi * i / n_theta;
        const Eigen::RowVector2d v =
            Eigen::RowVector2d(std::cos(th), std::sin(th)) * a;
        if (v.norm() <= 1e-13 * scale) {
            // the whole phi-circle vanishes (singular A, theta on a kernel line)
            for (int j = 0; j < n_theta; ++j)
                out.samples.push_back({th, kTwoPi * j / n_theta});
            continue;
        }
        const double ph = std::atan2(-v(0), v(1));
        out.samples.push_back({th, ph < 0 ? ph + kTwoPi : ph});
        const double ph2 = ph + std::numbers::pi;
        out.samples.push_back({th, ph2 >= kTwoPi ? ph2 - kTwoPi : ph2});
    }
    return out;
}

ObstructionReport second_derivative_obstruction(const EndMatrix2& a, const EndMatrix2& b,
                                                int n_theta) {
    const ZeroSet zs = zero_set(a, n_theta);
    ObstructionReport rep;
    rep.values.reserve(zs.samples.size());
    rep.min_abs = std::numeric_limits<double>::infinity();
    for (const auto& s : zs.samples) {
        const Eigen::Vector2d et(std::cos(s.theta), std::sin(s.theta));
        const Eigen::Vector2d ep(std::cos(s.phi), std::sin(s.phi));
        const double psi_b = et.dot(b * ep);
        const double dth = psi_theta_deriv(a, s.theta, s.phi);
        const double dph = psi_phi_deriv(a, s.theta, s.phi);
        const double val = psi_b - dth * dth + dph * dph;
        rep.values.push_back(val);
        if (std::abs(val) < rep.min_abs) {
            rep.min_abs = std::abs(val);
            rep.argmin = s;
        }
    }
    return rep;
}

} // namespace cliffmorse
