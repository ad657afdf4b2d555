#include "cliffmorse/area_functional.hpp"
#include "cliffmorse/fermi.hpp"
#include "cliffmorse/kernel.hpp"
#include "cliffmorse/rng.hpp"
#include "cliffmorse/white.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cliffmorse;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix4d random_rotation(Rng& rng) {
    Eigen::Matrix4d g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = rng.gaussian();
    const Eigen::HouseholderQR<Eigen::Matrix4d> qr(g);
    Eigen::Matrix4d q = qr.householderQ();
    const Eigen::Matrix4d r = qr.matrixQR();
    for (int i = 0; i < 4; ++i)
        if (r(i, i) < 0) q.col(i) *= -1.0;
    if (q.determinant() < 0) q.col(3) *= -1.0;
    return q;
}

WhiteOptions small_grid() {
    WhiteOptions o;
    o.grid_n = 32;
    return o;
}

} // namespace

TEST_CASE("zero perturbation keeps the flat torus exactly") {
    const AmbientFunction u = AmbientFunction::random(21, 4);
    Rng rng(40);
    const CliffordPoint m(random_rotation(rng));
    const WhiteSolution sol = solve_white(u, m, 0.0, small_grid());
    CHECK(sol.f_perp.sup_norm() == 0.0);
    CHECK(sol.h_k.cwiseAbs().maxCoeff() == 0.0);
    CHECK(sol.area == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("constant conformal factor rescales the flat torus") {
    // e^{2su} g with u = 1 is a homothety: the flat graph stays minimal and its
    // area picks up e^{2s}
    MonomialTerm one;
    one.coeff = 1.0;
    const AmbientFunction u({one});
    Rng rng(41);
    const CliffordPoint m(random_rotation(rng));
    const double s = 1e-3;
    const WhiteSolution sol = solve_white(u, m, s, small_grid());
    CHECK(sol.f_perp.sup_norm() < 1e-12);
    CHECK(sol.area == doctest::Approx(std::exp(2.0 * s) * 2.0 * kPi * kPi).epsilon(1e-10));
}

TEST_CASE("solution field is kernel-free and solves the projected problem") {
    const AmbientFunction u = AmbientFunction::random(22, 4);
    Rng rng(42);
    const CliffordPoint m(random_rotation(rng));
    const double s = 1e-3;
    const WhiteSolution sol = solve_white(u, m, s, small_grid());
    CHECK(kernel_project(sol.f_perp).first.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sol.residual_sup <= 1e-10);
    CHECK(sol.iterations <= 20);

    // h_k really is the kernel content of the curvature of the solved graph
    const AmbientFunction us = u.compose_linear(m.matrix());
    const TorusField h = mean_curvature(sol.f_perp, us, s);
    const KernelCoords direct = kernel_project(h).first;
    CHECK((direct - sol.h_k).cwiseAbs().maxCoeff() < 1e-9);
    // and the non-kernel part is what the tolerance bounded
    CHECK(kernel_project(h).second.sup_norm() <= 1e-9);
}

TEST_CASE("solution size is first order in the perturbation") {
    const AmbientFunction u = AmbientFunction::random(23, 4);
    Rng rng(43);
    const CliffordPoint m(random_rotation(rng));
    const WhiteOptions opt = small_grid();
    const double n1 = solve_white(u, m, 1e-3, opt).f_perp.l2_norm();
    const double n2 = solve_white(u, m, 5e-4, opt).f_perp.l2_norm();
    const double ratio = n1 / n2;
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("rotating the factor equals rotating the base") {
    const AmbientFunction u = AmbientFunction::random(24, 4);
    Rng rng(44);
    const CliffordPoint m(random_rotation(rng));
    const Eigen::Matrix4d r = random_rotation(rng);
    const double s = 2e-3;
    const WhiteOptions opt = small_grid();
    const WhiteSolution a = solve_white(u.compose_linear(r), m, s, opt);
    const WhiteSolution b = solve_white(u, CliffordPoint(r * m.matrix()), s, opt);
    CHECK((a.f_perp - b.f_perp).sup_norm() < 1e-8);
    CHECK(std::abs(a.area - b.area) < 1e-10);
}

TEST_CASE("grid-aligned stabiliser rotations shift the solution") {
    const AmbientFunction u = AmbientFunction::random(25, 4);
    Rng rng(45);
    const CliffordPoint m(random_rotation(rng));
    const int n = 32;
    const double s = 2e-3;
    WhiteOptions opt;
    opt.grid_n = n;
    const WhiteSolution base = solve_white(u, m, s, opt);

    const int si = 7, sj = 3;
    const double al = 2.0 * kPi * si / n, be = 2.0 * kPi * sj / n;
    const WhiteSolution rot =
        solve_white(u, CliffordPoint(m.matrix() * stab_rotation(al, be)), s, opt);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(rot.f_perp(i, j) -
                                             base.f_perp((i + si) % n, (j + sj) % n)));
    CHECK(worst < 1e-8);
    CHECK(std::abs(rot.area - base.area) < 1e-10);

    const WhiteSolution swp =
        solve_white(u, CliffordPoint(m.matrix() * stab_swap()), s, opt);
    worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(swp.f_perp(i, j) + base.f_perp(j, i)));
    CHECK(worst < 1e-8);
}

TEST_CASE("flipping factor and sign of s solves the identical problem") {
    const AmbientFunction u = AmbientFunction::random(26, 4);
    AmbientFunction nu = u;
    nu *= -1.0;
    Rng rng(46);
    const CliffordPoint m(random_rotation(rng));
    const double s = 5e-3;
    const WhiteOptions opt = small_grid();
    const WhiteSolution a = solve_white(u, m, s, opt);
    const WhiteSolution b = solve_white(nu, m, -s, opt);
    CHECK((a.f_perp - b.f_perp).sup_norm() < 1e-12);
    CHECK(std::abs(a.area - b.area) < 1e-12);
}

TEST_CASE("perturbation scale outside the contraction range is rejected") {
    const AmbientFunction u = AmbientFunction::random(27, 4);
    const CliffordPoint m;
    CHECK_THROWS_AS((void)solve_white(u, m, 0.06, small_grid()), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_white(u, m, -0.06, small_grid()), std::invalid_argument);
    WhiteOptions strangled = small_grid();
    strangled.max_iter = 1;
    strangled.tol = 1e-15;
    CHECK_THROWS_AS((void)solve_white(u, m, 1e-2, strangled), NoContraction);
}

TEST_CASE("area derivatives reproduce the first-order functional") {
    const AmbientFunction u = AmbientFunction::random(28, 4);
    Rng rng(47);
    const CliffordPoint m(random_rotation(rng));
    const AreaDerivativeReport rep =
        area_derivative_check(u, m, {2e-3, 1e-3, 5e-4}, small_grid());
    REQUIRE(rep.rows.size() == 3);
    const double i_val = eval_I(u, m);
    for (const auto& row : rep.rows) {
        // the conformal rate converges to I[u] at first order in s
        CHECK(row.conformal_error < 10.0 * row.s * std::abs(i_val));
    }
    // error halves with s
    for (double r : rep.conformal_ratio) {
        CHECK(r > 1.5);
        CHECK(r < 2.5);
    }
    // kernel and mixed identities hold to O(s) relative accuracy
    for (const auto& row : rep.rows) {
        CHECK(row.kernel_error <= 20.0 * row.s * std::max(1.0, row.kernel_scale));
        CHECK(row.mixed_error <= 40.0 * row.s * std::max(1.0, row.kernel_scale));
    }
}
