#include "cliffmorse/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cliffmorse {

namespace {
constexpr double kPi = std::numbers::pi;
}

TorusField kernel_field(const KernelCoords& a, int n) {
    TorusField out(n);
    for (int i = 0; i < n; ++i) {
        double th = out.theta(i);
        Eigen::RowVector2d row = Eigen::RowVector2d(std::cos(th), std::sin(th)) * a;
        for (int j = 0; j < n; ++j) {
            double ph = out.phi(j);
            out(i, j) = row(0) * std::cos(ph) + row(1) * std::sin(ph);
        }
    }
    return out;
}

std::pair<KernelCoords, TorusField> kernel_project(const TorusField& f) {
    const int n = f.n();
    KernelCoords a;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            KernelCoords e = KernelCoords::Zero();
            e(r, c) = 1.0;
            a(r, c) = f.cwise_mul(kernel_field(e, n)).quadrature() / (kPi * kPi);
        }
    TorusField rem = f - kernel_field(a, n);
    return {a, rem};
}

double kernel_l2(const KernelCoords& a, const KernelCoords& b) {
    return kPi * kPi * (a * b.transpose()).trace();
}

KernelCoords frame_matrix(int alpha) {
    if (alpha < 0 || alpha > 3) throw std::invalid_argument("frame_matrix: index out of range");
    KernelCoords e = KernelCoords::Zero();
    e(alpha / 2, alpha % 2) = 1.0 / (std::numbers::sqrt2 * kPi);
    return e;
}

Eigen::Vector4d frame_coords(const KernelCoords& a) {
    double s = std::numbers::sqrt2 * kPi;
    return Eigen::Vector4d(s * a(0, 0), s * a(0, 1), s * a(1, 0), s * a(1, 1));
}

KernelCoords from_frame_coords(const Eigen::Vector4d& v) {
    KernelCoords a;
    double s = 1.0 / (std::numbers::sqrt2 * kPi);
    a << v(0) * s, v(1) * s, v(2) * s, v(3) * s;
    return a;
}

} // namespace cliffmorse
