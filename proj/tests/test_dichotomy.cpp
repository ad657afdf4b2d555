#include "cliffmorse/dichotomy.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace cliffmorse;

namespace {

constexpr double kSigma = 0.8;
constexpr double kT = 8.0;
constexpr int kNodes = 321;

double gauss(double x) { return std::exp(-x * x / (2.0 * kSigma * kSigma)); }

// bounded solution of etadot = lambda eta + c gauss(t - t0), closed form:
// integrate e^{lambda (t-s)} against the Gaussian from the stable side
double bounded_scalar(double lambda, double c, double t0, double t) {
    const double tau = t - t0;
    const double pref = kSigma * std::sqrt(std::numbers::pi / 2.0) *
                        std::exp(lambda * tau + 0.5 * lambda * lambda * kSigma * kSigma);
    const double y = (tau + lambda * kSigma * kSigma) / (kSigma * std::numbers::sqrt2);
    if (lambda < 0.0) return c * pref * std::erfc(-y);
    return -c * pref * std::erfc(y);
}

} // namespace

TEST_CASE("collocation reproduces the closed-form bounded solution") {
    const Eigen::Vector4d lambda(-1.3, -0.6, -2.0, 0.9);
    const Eigen::Vector4d amp(1.0, -0.7, 0.0, 0.5);
    const Eigen::Vector4d shift(0.0, 0.4, 0.0, -0.3);
    const Eigen::Matrix4d a_mat = lambda.asDiagonal();

    std::vector<double> times(kNodes);
    std::vector<Eigen::Matrix4d> a(kNodes, a_mat);
    std::vector<Eigen::Vector4d> w(kNodes);
    for (int i = 0; i < kNodes; ++i) {
        times[i] = -kT + 2.0 * kT * i / (kNodes - 1);
        for (int c = 0; c < 4; ++c) w[i](c) = amp(c) * gauss(times[i] - shift(c));
    }

    // component 2 is unforced, so its bounded solution vanishes identically and
    // the gauge row along e2 is satisfied exactly by the true solution
    const auto res = bounded_solution(times, a, w, a_mat, Eigen::Vector4d::Zero(),
                                      Eigen::Vector4d::Unit(2), kNodes / 2);
    REQUIRE(res.eta.size() == static_cast<size_t>(kNodes));
    REQUIRE(res.eta_dot.size() == static_cast<size_t>(kNodes));

    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < kNodes; ++i) {
        for (int c = 0; c < 4; ++c) {
            const double exact = bounded_scalar(lambda(c), amp(c), shift(c), times[i]);
            worst = std::max(worst, std::abs(res.eta[i](c) - exact));
            scale = std::max(scale, std::abs(exact));
        }
    }
    CHECK(scale > 0.3); // the oracle is not trivially zero
    CHECK(worst < 1e-7);

    // the reported derivative is the algebraic one on the grid
    double dworst = 0.0;
    for (int i = 0; i < kNodes; ++i)
        dworst = std::max(dworst,
                          (res.eta_dot[i] - (a_mat * res.eta[i] + w[i])).cwiseAbs().maxCoeff());
    CHECK(dworst < 1e-12);

    CHECK(res.collocation_defect < 1e-6);
}

TEST_CASE("refining the grid shrinks the defect") {
    const Eigen::Vector4d lambda(-1.0, -0.5, -1.5, 0.7);
    const Eigen::Matrix4d a_mat = lambda.asDiagonal();
    const auto solve_with = [&](int nodes) {
        std::vector<double> times(nodes);
        std::vector<Eigen::Matrix4d> a(nodes, a_mat);
        std::vector<Eigen::Vector4d> w(nodes);
        for (int i = 0; i < nodes; ++i) {
            times[i] = -kT + 2.0 * kT * i / (nodes - 1);
            w[i] = Eigen::Vector4d(gauss(times[i]), 0.0, gauss(times[i] - 0.5), 0.0);
        }
        return bounded_solution(times, a, w, a_mat, Eigen::Vector4d::Zero(),
                                Eigen::Vector4d::Unit(1), nodes / 2);
    };
    const auto coarse = solve_with(161);
    const auto fine = solve_with(321);
    CHECK(fine.collocation_defect < 0.2 * coarse.collocation_defect);
}

TEST_CASE("non-uniform grids are rejected") {
    std::vector<double> times{0.0, 1.0, 2.5};
    std::vector<Eigen::Matrix4d> a(3, Eigen::Matrix4d::Identity());
    std::vector<Eigen::Vector4d> w(3, Eigen::Vector4d::Zero());
    CHECK_THROWS_AS(bounded_solution(times, a, w, -Eigen::Matrix4d::Identity(),
                                     Eigen::Vector4d::Zero(), Eigen::Vector4d::Unit(0), 1),
                    std::invalid_argument);
}
