#include "cliffmorse/fermi.hpp"
#include "cliffmorse/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cliffmorse;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector3d as_vec(const FermiPoint& p) { return {p.theta, p.phi, p.r}; }

double wrap_pi(double d) {
    while (d > kPi) d -= 2.0 * kPi;
    while (d < -kPi) d += 2.0 * kPi;
    return d;
}

FermiPoint random_point(Rng& rng) {
    return {rng.uniform(0.0, 2.0 * kPi), rng.uniform(0.0, 2.0 * kPi),
            rng.uniform(-0.6, 0.6)};
}

Eigen::Matrix4d random_so4(Rng& rng) {
    Eigen::Matrix4d g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = rng.gaussian();
    return 0.5 * (g - g.transpose());
}

AmbientFunction const_one() {
    return AmbientFunction({MonomialTerm{{0, 0, 0, 0}, 1.0}});
}

} // namespace

TEST_CASE("chart embeds into the unit sphere and inverts") {
    Rng rng(2);
    for (int k = 0; k < 50; ++k) {
        const FermiPoint p = random_point(rng);
        const Eigen::Vector4d x = fermi_embed(p);
        CHECK(std::abs(x.norm() - 1.0) < 1e-14);
        const FermiPoint q = fermi_chart_inverse(x);
        CHECK(std::abs(wrap_pi(q.theta - p.theta)) < 1e-12);
        CHECK(std::abs(wrap_pi(q.phi - p.phi)) < 1e-12);
        CHECK(std::abs(q.r - p.r) < 1e-12);
    }
}

TEST_CASE("chart metric is the product form and matches the embedding") {
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const FermiPoint p = random_point(rng);
        const Eigen::Matrix3d g = fermi_metric(p);
        const double a = std::sin(kPi / 4.0 + p.r);
        const double b = std::sin(kPi / 4.0 - p.r);
        CHECK(std::abs(g(0, 0) - a * a) < 1e-14);
        CHECK(std::abs(g(1, 1) - b * b) < 1e-14);
        CHECK(std::abs(g(2, 2) - 1.0) < 1e-14);
        CHECK(std::abs(g(0, 1)) + std::abs(g(0, 2)) + std::abs(g(1, 2)) < 1e-14);

        Eigen::Matrix<double, 4, 3> t;
        t.col(0) = fermi_tangent_theta(p);
        t.col(1) = fermi_tangent_phi(p);
        t.col(2) = fermi_tangent_r(p);
        CHECK(((t.transpose() * t) - g).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("rotation fields match the finite-difference chart flow") {
    Rng rng(4);
    const double h = 1e-4;
    for (int k = 0; k < 50; ++k) {
        const Eigen::Matrix4d omega = random_so4(rng);
        const FermiPoint p = random_point(rng);
        const Eigen::Vector3d vp =
            as_vec(fermi_chart_inverse(so4_exp(h * omega) * fermi_embed(p)));
        const Eigen::Vector3d vm =
            as_vec(fermi_chart_inverse(so4_exp(-h * omega) * fermi_embed(p)));
        const Eigen::Vector3d fd{wrap_pi(vp(0) - vm(0)) / (2.0 * h),
                                 wrap_pi(vp(1) - vm(1)) / (2.0 * h),
                                 (vp(2) - vm(2)) / (2.0 * h)};
        CHECK((fd - killing_field_so4(omega, p)).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}

TEST_CASE("kernel rotation fields have the kernel profile as radial part") {
    const int n = 16;
    KernelCoords a;
    a << 0.4, -0.9, 0.2, 1.3;
    const TorusField psi = kernel_field(a, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Eigen::Vector3d w = killing_field(a, {psi.theta(i), psi.phi(j), 0.0});
            CHECK(std::abs(w(2) - psi(i, j)) < 1e-13);
        }
}

TEST_CASE("graph extraction linearizes to the kernel profile") {
    const int n = 32;
    KernelCoords a;
    a << 0.8, 0.1, -0.5, 0.6;
    const TorusField psi = kernel_field(a, n);
    const auto err = [&](double t) {
        return (graph_of_torus(exp_xi(t * a), n) - t * psi).sup_norm();
    };
    const double e1 = err(1e-3), e2 = err(5e-4);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("stabiliser elements leave the base torus in place") {
    const int n = 16;
    Eigen::Matrix4d rot = Eigen::Matrix4d::Zero();
    rot.block<2, 2>(0, 0) = rot2(0.7);
    rot.block<2, 2>(2, 2) = rot2(-1.2);
    CHECK(graph_of_torus(rot, n).sup_norm() < 1e-12);
}

TEST_CASE("graph area of parallel tori has the cosine closed form") {
    const int n = 32;
    const AmbientFunction none;
    for (const double c : {0.0, 0.1, -0.25}) {
        TorusField f(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) f(i, j) = c;
        CHECK(graph_area(f, none, 0.0) ==
              doctest::Approx(2.0 * kPi * kPi * std::cos(2.0 * c)).epsilon(1e-12));
    }
}

TEST_CASE("constant conformal factor scales area by its square") {
    const int n = 32;
    TorusField f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f(i, j) = 0.07;
    const double s = 0.31;
    const double flat = graph_area(f, AmbientFunction(), 0.0);
    CHECK(graph_area(f, const_one(), s) ==
          doctest::Approx(std::exp(2.0 * s) * flat).epsilon(1e-12));
}

TEST_CASE("parallel tori have constant mean curvature -2 tan(2c)") {
    const int n = 32;
    const AmbientFunction none;
    for (const double c : {0.0, 0.05, -0.18}) {
        TorusField f(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) f(i, j) = c;
        const TorusField h = mean_curvature(f, none, 0.0);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::abs(h(i, j) + 2.0 * std::tan(2.0 * c)));
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("constant conformal factor scales mean curvature inversely") {
    const int n = 32;
    TorusField f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            f(i, j) = 0.05 * std::cos(f.theta(i)) + 0.03 * std::sin(2.0 * f.phi(j));
    const double s = 0.2;
    const TorusField flat = mean_curvature(f, AmbientFunction(), 0.0);
    const TorusField scaled = mean_curvature(f, const_one(), s);
    CHECK((scaled - std::exp(-s) * flat).sup_norm() < 1e-11);
}

TEST_CASE("mean curvature linearizes to -2(laplacian + 2)") {
    const int n = 32;
    const AmbientFunction none;
    TorusField g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = std::cos(2.0 * g.theta(i)) + 0.5 * std::sin(g.theta(i) + 3.0 * g.phi(j));
    const auto err = [&](double eps) {
        const TorusField f = eps * g;
        const TorusField lin = -2.0 * (f.laplacian() + 2.0 * f);
        return (mean_curvature(f, none, 0.0) - lin).sup_norm();
    };
    const double r1 = err(1e-2) / err(5e-3);
    const double r2 = err(5e-3) / err(2.5e-3);
    CHECK(r1 > 3.5);
    CHECK(r1 < 4.5);
    CHECK(r2 > 3.5);
    CHECK(r2 < 4.5);
}

TEST_CASE("swap symmetry flips the graph and the curvature") {
    const int n = 32;
    TorusField f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            f(i, j) = 0.04 * std::cos(f.theta(i) - 2.0 * f.phi(j)) +
                      0.02 * std::sin(3.0 * f.phi(j));
    const TorusField fs(Eigen::MatrixXd(-f.values().transpose()));
    const Eigen::MatrixXd h = mean_curvature(f, AmbientFunction(), 0.0).values();
    const Eigen::MatrixXd hs = mean_curvature(fs, AmbientFunction(), 0.0).values();
    CHECK((hs + h.transpose()).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("normal derivative of a coordinate function") {
    const int n = 16;
    const AmbientFunction u({MonomialTerm{{1, 0, 0, 0}, 1.0}});
    const TorusField d = ambient_normal_derivative(u, Eigen::Matrix4d::Identity(), n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(std::abs(d(i, j) - std::cos(d.theta(i)) / std::sqrt(2.0)) < 1e-13);
}

TEST_CASE("graph extraction refuses tori outside the chart") {
    const int n = 16;
    // rotating the first plane into the second by a right angle moves the
    // torus through the chart boundary
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(0, 0) = 0.0;
    m(2, 2) = 0.0;
    m(0, 2) = -1.0;
    m(2, 0) = 1.0;
    CHECK_THROWS_AS(graph_of_torus(m, n), NotAGraph);
}
