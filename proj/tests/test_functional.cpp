#include "cliffmorse/area_functional.hpp"
#include "cliffmorse/clifford.hpp"
#include "cliffmorse/kernel.hpp"
#include "cliffmorse/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cliffmorse;

namespace {

constexpr double kPi = std::numbers::pi;

AmbientFunction monomial(int e1, int e2, int e3, int e4, double c = 1.0) {
    MonomialTerm t;
    t.exponents = {e1, e2, e3, e4};
    t.coeff = c;
    return AmbientFunction({t});
}

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

} // namespace

TEST_CASE("first-order area change has closed forms on quadratic monomials") {
    Rng rng(30);
    const AmbientFunction sq = monomial(2, 0, 0, 0);
    const AmbientFunction cross = monomial(1, 1, 0, 0);
    AmbientFunction ones = monomial(2, 0, 0, 0);
    ones += monomial(0, 2, 0, 0);
    ones += monomial(0, 0, 2, 0);
    ones += monomial(0, 0, 0, 2);
    const AmbientFunction unit = monomial(0, 0, 0, 0);
    for (int k = 0; k < 8; ++k) {
        const CliffordPoint m(random_rotation(rng));
        CHECK(eval_I(sq, m) == doctest::Approx(0.5 * kPi * kPi).epsilon(1e-12));
        CHECK(std::abs(eval_I(cross, m)) < 1e-12);
        CHECK(eval_I(ones, m) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
        CHECK(eval_I(unit, m) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
    }
}

TEST_CASE("value scales linearly in the conformal factor") {
    Rng rng(31);
    AmbientFunction u = AmbientFunction::random(7, 4);
    AmbientFunction u3 = u;
    u3 *= -3.0;
    const AreaFunctional f(u), f3(u3);
    for (int k = 0; k < 5; ++k) {
        const Eigen::Matrix4d m = random_rotation(rng);
        CHECK(f3.value(m) == doctest::Approx(-3.0 * f.value(m)).epsilon(1e-12));
        CHECK((f3.grad_frame(m) + 3.0 * f.grad_frame(m)).norm() <
              1e-12 * std::max(1.0, f.grad_frame(m).norm()));
    }
}

TEST_CASE("value is blind to the stabiliser of the base torus") {
    Rng rng(32);
    const AmbientFunction u = AmbientFunction::random(3, 4);
    const AreaFunctional f(u);
    for (int k = 0; k < 5; ++k) {
        const Eigen::Matrix4d m = random_rotation(rng);
        const double v = f.value(m);
        CHECK(f.value(m * stab_rotation(rng.uniform(0.0, 2.0 * kPi),
                                        rng.uniform(0.0, 2.0 * kPi))) ==
              doctest::Approx(v).epsilon(1e-11));
        CHECK(f.value(m * stab_swap()) == doctest::Approx(v).epsilon(1e-11));
    }
}

TEST_CASE("rotating the factor equals rotating the torus, exactly") {
    Rng rng(33);
    const AmbientFunction u = AmbientFunction::random(11, 4);
    const AreaFunctional f(u);
    const Eigen::Matrix4d r = random_rotation(rng);
    const AreaFunctional fr(u.compose_linear(r));
    REQUIRE(fr.quad_n() == f.quad_n());
    for (int k = 0; k < 5; ++k) {
        const Eigen::Matrix4d m = random_rotation(rng);
        CHECK(std::abs(fr.value(m) - f.value(r * m)) < 1e-12);
        CHECK((fr.grad_frame(m) - f.grad_frame(r * m)).norm() < 1e-12);
        CHECK((fr.hess_frame(m) - f.hess_frame(r * m)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("frame gradient matches central differences of the value") {
    Rng rng(34);
    const AmbientFunction u = AmbientFunction::random(5, 4);
    const AreaFunctional f(u);
    const double h = 1e-3;
    for (int k = 0; k < 10; ++k) {
        const Eigen::Matrix4d m = random_rotation(rng);
        const Eigen::Vector4d g = f.grad_frame(m);
        Eigen::Vector4d fd;
        for (int c = 0; c < 4; ++c) {
            const auto at = [&](double t) {
                return f.value(
                    m * exp_xi(from_frame_coords(t * Eigen::Vector4d::Unit(c))));
            };
            const double d1 = (at(h) - at(-h)) / (2.0 * h);
            const double d2 = (at(0.5 * h) - at(-0.5 * h)) / h;
            fd(c) = (4.0 * d2 - d1) / 3.0;
        }
        CHECK((g - fd).norm() < 1e-6 * std::max(1e-6, fd.norm()));
    }
}

TEST_CASE("factors of degree three or less never move the torus") {
    // averaging kills odd monomials and the quadratic moment matrix of the
    // base torus is a multiple of the identity, so the functional is constant
    Rng rng(35);
    for (unsigned seed : {2u, 9u, 55u}) {
        const AmbientFunction u3 = AmbientFunction::random(seed, 3);
        const AreaFunctional f(u3);
        const double v0 = f.value(Eigen::Matrix4d::Identity());
        for (int k = 0; k < 6; ++k) {
            const Eigen::Matrix4d m = random_rotation(rng);
            CHECK(std::abs(f.value(m) - v0) < 1e-10);
            CHECK(f.grad_frame(m).norm() < 1e-10);
        }
        const CriticalSet cs = find_critical_points(f);
        CHECK(cs.degenerate);
    }
}

TEST_CASE("critical search lands on genuine nondegenerate critical points") {
    const AmbientFunction u = AmbientFunction::random(1, 4);
    const AreaFunctional f(u);
    const CriticalSet cs = find_critical_points(f);
    REQUIRE_FALSE(cs.degenerate);
    CHECK(cs.points.size() >= 9);
    CHECK(cs.min_abs_eigenvalue > 1e-4);
    int by_index[5] = {0, 0, 0, 0, 0};
    for (const CriticalPoint& p : cs.points) {
        CHECK(p.grad_norm <= 1e-10);
        REQUIRE(p.index >= 0);
        REQUIRE(p.index <= 4);
        ++by_index[p.index];
        int neg = 0;
        for (int c = 0; c < 4; ++c) {
            if (p.eigenvalues(c) < 0.0) ++neg;
            if (c) CHECK(p.eigenvalues(c) >= p.eigenvalues(c - 1));
        }
        CHECK(neg == p.index);
        // really a critical point of the smooth functional, not a search artifact
        CHECK(f.grad_frame(p.torus.matrix()).norm() <= 1e-10);
    }
    CHECK(by_index[0] >= 1);
    CHECK(by_index[4] >= 1);
    // distinct points are distinct tori
    for (std::size_t i = 0; i < cs.points.size(); ++i)
        for (std::size_t j = i + 1; j < cs.points.size(); ++j)
            CHECK(cl_distance(cs.points[i].torus, cs.points[j].torus) > 1e-4);
}

TEST_CASE("frame Hessian agrees with gradient differences at critical points") {
    const AmbientFunction u = AmbientFunction::random(1, 4);
    const AreaFunctional f(u);
    const CriticalSet cs = find_critical_points(f);
    REQUIRE_FALSE(cs.points.empty());
    const Eigen::Matrix4d m = cs.points.front().torus.matrix();
    const Eigen::Matrix4d hess = f.hess_frame(m);
    CHECK((hess - hess.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const double h = 1e-4;
    for (int c = 0; c < 4; ++c) {
        const auto shift = [&](double t) {
            return f.grad_frame(
                m * exp_xi(from_frame_coords(t * Eigen::Vector4d::Unit(c))));
        };
        // at a critical point the frame twist drops out of the difference
        const Eigen::Vector4d fd = (shift(h) - shift(-h)) / (2.0 * h);
        CHECK((fd - hess.col(c)).norm() < 1e-5 * std::max(1.0, hess.col(c).norm()));
    }
}

TEST_CASE("one-shot wrappers agree with the cached functional") {
    Rng rng(36);
    const AmbientFunction u = AmbientFunction::random(13, 4);
    const AreaFunctional f(u);
    const CliffordPoint m(random_rotation(rng));
    CHECK(eval_I(u, m) == doctest::Approx(f.value(m.matrix())).epsilon(1e-14));
    CHECK((frame_coords(grad_I(u, m)) - f.grad_frame(m.matrix())).norm() < 1e-14);
    CHECK((hess_I(u, m) - f.hess_frame(m.matrix())).cwiseAbs().maxCoeff() < 1e-14);
}
