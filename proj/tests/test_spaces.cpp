#include "cliffmorse/clifford.hpp"
#include "cliffmorse/curves.hpp"
#include "cliffmorse/end2.hpp"
#include "cliffmorse/rng.hpp"
#include "cliffmorse/zero_set.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

using namespace cliffmorse;

namespace {

constexpr double kPi = std::numbers::pi;

EndMatrix2 random_end(Rng& rng) {
    EndMatrix2 a;
    a << rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian();
    return a;
}

Eigen::Matrix4d random_so4(Rng& rng) {
    Eigen::Matrix4d g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = rng.gaussian();
    return 0.5 * (g - g.transpose());
}

Eigen::Matrix4d random_rotation(Rng& rng) {
    const Eigen::HouseholderQR<Eigen::Matrix4d> qr(random_so4(rng) +
                                                   Eigen::Matrix4d::Identity());
    Eigen::Matrix4d q = qr.householderQ();
    if (q.determinant() < 0) q.col(3) *= -1.0;
    return q;
}

} // namespace

TEST_CASE("xi embeds kernel directions as rotations of the two planes") {
    EndMatrix2 a;
    a << 1.0, 2.0, 3.0, 4.0;
    const Eigen::Matrix4d x = xi(a);
    CHECK((x + x.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(x(0, 2) == 1.0);
    CHECK(x(0, 3) == 2.0);
    CHECK(x(1, 2) == 3.0);
    CHECK(x(1, 3) == 4.0);
    CHECK(x.block<2, 2>(0, 0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((xi_k_part(x) - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the pairing is minus pi^2 times the product trace") {
    Rng rng(10);
    for (int k = 0; k < 20; ++k) {
        const EndMatrix2 a = random_end(rng), b = random_end(rng);
        const double got = bform(xi(a), xi(b));
        const double want = 2.0 * kPi * kPi * (a * b.transpose()).trace();
        CHECK(got == doctest::Approx(want).epsilon(1e-13));
        CHECK(bform(xi(a), xi(b)) ==
              doctest::Approx(-kPi * kPi * (xi(a) * xi(b)).trace()).epsilon(1e-13));
    }
}

TEST_CASE("closed-form exponential matches the matrix exponential") {
    Rng rng(11);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Matrix4d omega = rng.uniform(0.1, 3.0) * random_so4(rng);
        const Eigen::Matrix4d pade = omega.exp();
        CHECK((so4_exp(omega) - pade).cwiseAbs().maxCoeff() < 1e-13);
    }
    const EndMatrix2 a = random_end(rng);
    CHECK((exp_xi(a) - xi(a).exp()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("self-dual split reassembles and commutes") {
    Rng rng(12);
    for (int k = 0; k < 20; ++k) {
        const Eigen::Matrix4d omega = random_so4(rng);
        const SelfDualSplit s = selfdual_split(omega);
        const Eigen::Matrix4d p = selfdual_matrix(s.plus);
        const Eigen::Matrix4d m = antiselfdual_matrix(s.minus);
        CHECK((p + m - omega).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((p * m - m * p).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((p * p + s.plus.squaredNorm() * Eigen::Matrix4d::Identity())
                  .cwiseAbs()
                  .maxCoeff() < 1e-13);
    }
}

TEST_CASE("left-trivialized differential matches finite differences") {
    Rng rng(13);
    const double h = 1e-5;
    for (int k = 0; k < 10; ++k) {
        const Eigen::Matrix4d x = 0.3 * random_so4(rng);
        const Eigen::Matrix4d v = random_so4(rng);
        const Eigen::Matrix4d fd =
            so4_exp(x).transpose() * (so4_exp(x + h * v) - so4_exp(x - h * v)) / (2.0 * h);
        CHECK((dexp_left(x, v) - fd).cwiseAbs().maxCoeff() < 1e-9);
        // dexpinv inverts it on small arguments
        CHECK((dexpinv(x, dexp_left(x, v)) - v).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("theta is an isometry onto R4 with the determinant identity") {
    Rng rng(14);
    for (int k = 0; k < 200; ++k) {
        const EndMatrix2 a = random_end(rng);
        const double np = theta_plus(a).squaredNorm();
        const double nm = theta_minus(a).squaredNorm();
        CHECK(np + nm ==
              doctest::Approx(2.0 * kPi * kPi * a.squaredNorm()).epsilon(1e-12));
        CHECK(np - nm ==
              doctest::Approx(4.0 * kPi * kPi * a.determinant()).epsilon(1e-12));
        CHECK((theta_inverse(theta_map(a)) - a).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("decomposition reconstructs with ordered factors") {
    Rng rng(15);
    for (int k = 0; k < 50; ++k) {
        const EndMatrix2 a = random_end(rng);
        const RotationDecomposition d = decompose(a);
        CHECK((d.m * d.delta.asDiagonal() * d.n - a).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(std::abs(d.m.determinant() - 1.0) < 1e-13);
        CHECK(std::abs(d.n.determinant() - 1.0) < 1e-13);
        CHECK(d.delta(0) >= std::abs(d.delta(1)) - 1e-13);
    }
}

TEST_CASE("invariant pair is stabiliser-blind and separates tori") {
    Rng rng(16);
    // acos at |dot| = 1 turns roundoff into ~sqrt(eps), hence the 1e-6 floor
    for (int k = 0; k < 20; ++k) {
        const Eigen::Matrix4d m = random_rotation(rng);
        const CliffordPoint p(m);
        const double al = rng.uniform(0.0, 2.0 * kPi), be = rng.uniform(0.0, 2.0 * kPi);
        CHECK(cl_distance(p, CliffordPoint(m * stab_rotation(al, be))) < 1e-6);
        CHECK(cl_distance(p, CliffordPoint(m * stab_swap())) < 1e-6);
        CHECK(cl_distance(p, CliffordPoint(m * stab_swap() * stab_rotation(al, be))) <
              1e-6);
    }
    // distinct random tori stay apart
    const CliffordPoint a(random_rotation(rng)), b(random_rotation(rng));
    CHECK(cl_distance(a, b) > 1e-4);
}

TEST_CASE("representative from the invariant pair lands on the same torus") {
    Rng rng(17);
    for (int k = 0; k < 20; ++k) {
        const CliffordPoint p(random_rotation(rng));
        const Eigen::Matrix4d m = matrix_from_invariant(p.inv_p(), p.inv_q());
        CHECK(cl_distance(p, CliffordPoint(m)) < 1e-6);
        CHECK((m.transpose() * m - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("exponential rays have unit speed in the quotient distance") {
    Rng rng(18);
    const CliffordPoint base;
    for (int k = 0; k < 20; ++k) {
        const EndMatrix2 a = random_end(rng);
        const double t = 1e-2;
        const double d = cl_distance(base, exp_map(base, t * a));
        CHECK(std::abs(d / (t * end_norm(a)) - 1.0) < 1e-2);
    }
}

TEST_CASE("curve expansion matches graph extraction at third order") {
    Rng rng(19);
    const int n = 32;
    const EndMatrix2 a = random_end(rng), b = random_end(rng);
    const auto err = [&](double t) {
        const Eigen::Matrix4d m = so4_exp(t * xi(a) + 0.5 * t * t * xi(b));
        return (graph_of_torus(m, n) - curve_expansion(a, b, t, n)).sup_norm();
    };
    const double ratio = err(1e-2) / err(5e-3);
    CHECK(ratio > 7.0);
    CHECK(ratio < 9.0);
}

TEST_CASE("integrator reproduces constant-velocity exponentials") {
    Rng rng(20);
    const EndMatrix2 a = 0.7 * random_end(rng);
    const VelocityField field = [&](double, const Eigen::Matrix4d&) { return a; };
    const Eigen::Matrix4d got =
        rkmk4_integrate(Eigen::Matrix4d::Identity(), 0.0, 2.0, field, IntegrateOptions{});
    CHECK((got - exp_xi(2.0 * a)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((got.transpose() * got - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <
          1e-13);
}

TEST_CASE("zero sets classify by shape") {
    EndMatrix2 generic;
    generic << 1.0, 0.0, 0.0, 2.0;
    CHECK(zero_set(generic, 64).kind == ZeroSetKind::Generic);

    EndMatrix2 special;
    special << 1.0, 0.0, 0.0, 1.0; // psi = cos(theta - phi)
    CHECK(zero_set(special, 64).kind == ZeroSetKind::Special);

    EndMatrix2 singular;
    singular << 1.0, 0.0, 0.0, 0.0; // det = 0, whole circles vanish
    CHECK(zero_set(singular, 64).kind == ZeroSetKind::Singular);
}

TEST_CASE("zero-set samples really are zeros") {
    EndMatrix2 a;
    a << 1.1, -0.4, 0.3, 1.9;
    const ZeroSet z = zero_set(a, 128);
    CHECK(z.kind == ZeroSetKind::Generic);
    CHECK(z.samples.size() >= 128);
    for (const ZeroSetSample& s : z.samples) {
        const double psi = a(0, 0) * std::cos(s.theta) * std::cos(s.phi) +
                           a(0, 1) * std::cos(s.theta) * std::sin(s.phi) +
                           a(1, 0) * std::sin(s.theta) * std::cos(s.phi) +
                           a(1, 1) * std::sin(s.theta) * std::sin(s.phi);
        CHECK(std::abs(psi) < 1e-10);
    }
}

TEST_CASE("obstruction report scans the zero set") {
    EndMatrix2 a, b;
    a << 1.3, 0.2, -0.1, 0.9;
    b << 0.4, -0.7, 0.6, 0.1;
    const ObstructionReport r = second_derivative_obstruction(a, b, 96);
    CHECK(r.values.size() == zero_set(a, 96).samples.size());
    double low = std::numeric_limits<double>::infinity();
    for (const double v : r.values) low = std::min(low, v);
    CHECK(r.min_abs == doctest::Approx(low));
    CHECK(r.min_abs >= 0.0);
}
