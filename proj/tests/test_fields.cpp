#include "cliffmorse/kernel.hpp"
#include "cliffmorse/rng.hpp"
#include "cliffmorse/torus_field.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cliffmorse;

namespace {

constexpr double kPi = std::numbers::pi;

TorusField sample(int n, double (*g)(double, double)) {
    TorusField f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = g(f.theta(i), f.phi(j));
    return f;
}

} // namespace

TEST_CASE("grid nodes are the uniform angles") {
    const TorusField f(8);
    CHECK(f.n() == 8);
    CHECK(f.theta(0) == doctest::Approx(0.0));
    CHECK(f.theta(2) == doctest::Approx(kPi / 2.0));
    CHECK(f.phi(6) == doctest::Approx(3.0 * kPi / 2.0));
}

TEST_CASE("quadrature integrates trig polynomials exactly") {
    const int n = 32;
    TorusField one(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) one(i, j) = 1.0;
    CHECK(one.quadrature() == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));

    const TorusField c = sample(n, [](double th, double) { return std::cos(th); });
    CHECK(std::abs(c.quadrature()) < 1e-12);
    CHECK(c.cwise_mul(c).quadrature() == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-13));

    // l2_norm is the square root of the quadrature of the square
    CHECK(c.l2_norm() == doctest::Approx(std::sqrt(2.0) * kPi).epsilon(1e-13));
}

TEST_CASE("spectral derivatives are exact on band-limited fields") {
    const int n = 32;
    const TorusField f =
        sample(n, [](double th, double ph) { return std::cos(3.0 * th + 2.0 * ph); });
    const TorusField ft =
        sample(n, [](double th, double ph) { return -3.0 * std::sin(3.0 * th + 2.0 * ph); });
    const TorusField fp =
        sample(n, [](double th, double ph) { return -2.0 * std::sin(3.0 * th + 2.0 * ph); });
    CHECK((f.deriv_theta() - ft).sup_norm() < 1e-12);
    CHECK((f.deriv_phi() - fp).sup_norm() < 1e-12);
    CHECK((f.laplacian() + 13.0 * f).sup_norm() < 1e-11);
    CHECK((f.deriv_theta_phi() - sample(n, [](double th, double ph) {
               return -6.0 * std::cos(3.0 * th + 2.0 * ph);
           })).sup_norm() < 1e-11);
    CHECK((f.deriv_theta2() + 9.0 * f).sup_norm() < 1e-11);
}

TEST_CASE("spectrum round-trips and satisfies Parseval") {
    const int n = 16;
    Rng rng(11);
    TorusField f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = rng.gaussian();
    const TorusField back = TorusField::from_spectrum(f.spectrum());
    CHECK((back - f).sup_norm() < 1e-13);
    const double quad = f.cwise_mul(f).quadrature();
    CHECK(quad == doctest::Approx(4.0 * kPi * kPi * f.spectrum().squaredNorm())
                      .epsilon(1e-12));
}

TEST_CASE("serialization round-trips are exact") {
    const int n = 12;
    Rng rng(5);
    TorusField f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = rng.gaussian() * std::pow(10.0, i - 6);
    const TorusField c = TorusField::from_csv(f.to_csv());
    CHECK((c.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);
    const TorusField j = TorusField::from_json(f.to_json());
    CHECK((j.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.to_csv() == c.to_csv());
}

TEST_CASE("kernel fields are the first-order rotation profiles") {
    const int n = 32;
    KernelCoords a;
    a << 0.7, -0.3, 1.1, 0.4;
    const TorusField psi = kernel_field(a, n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double th = psi.theta(i), ph = psi.phi(j);
            const double want = a(0, 0) * std::cos(th) * std::cos(ph) +
                                a(0, 1) * std::cos(th) * std::sin(ph) +
                                a(1, 0) * std::sin(th) * std::cos(ph) +
                                a(1, 1) * std::sin(th) * std::sin(ph);
            worst = std::max(worst, std::abs(psi(i, j) - want));
        }
    CHECK(worst < 1e-14);

    CHECK((psi.laplacian() + 2.0 * psi).sup_norm() < 1e-12);
}

TEST_CASE("kernel inner products carry the pi^2 normalization") {
    const int n = 32;
    Rng rng(3);
    for (int k = 0; k < 10; ++k) {
        KernelCoords a, b;
        a << rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian();
        b << rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian();
        const double quad = kernel_field(a, n).cwise_mul(kernel_field(b, n)).quadrature();
        const double closed = kPi * kPi * (a * b.transpose()).trace();
        CHECK(quad == doctest::Approx(closed).epsilon(1e-12));
        CHECK(kernel_l2(a, b) == doctest::Approx(closed).epsilon(1e-13));
    }
}

TEST_CASE("kernel projection inverts kernel_field and strips the remainder") {
    const int n = 32;
    KernelCoords a;
    a << 1.0, 2.0, -0.5, 0.25;
    TorusField f = kernel_field(a, n);
    f += sample(n, [](double th, double ph) { return std::cos(3.0 * th) + std::sin(ph + th); });
    const auto split = kernel_project(f);
    CHECK((split.first - a).cwiseAbs().maxCoeff() < 1e-13);
    // remainder keeps the non-kernel content and is kernel-orthogonal
    const auto again = kernel_project(split.second);
    CHECK(again.first.cwiseAbs().maxCoeff() < 1e-13);
    CHECK((split.second + kernel_field(a, n) - f).sup_norm() < 1e-13);
}

TEST_CASE("frame coordinates are sqrt(2) pi scaled and invert") {
    KernelCoords a;
    a << 0.3, -1.2, 0.8, 2.0;
    const Eigen::Vector4d v = frame_coords(a);
    CHECK(v(0) == doctest::Approx(std::sqrt(2.0) * kPi * 0.3).epsilon(1e-15));
    CHECK(v(1) == doctest::Approx(std::sqrt(2.0) * kPi * -1.2).epsilon(1e-15));
    CHECK((from_frame_coords(v) - a).cwiseAbs().maxCoeff() < 1e-15);
    // the scaling makes frame norms match the kernel L2 norm
    CHECK(v.squaredNorm() == doctest::Approx(2.0 * kernel_l2(a, a)).epsilon(1e-13));
}
