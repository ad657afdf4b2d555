#include "cliffmorse/white.hpp"

#include "cliffmorse/end2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace cliffmorse {

namespace {

// apply the inverse of the frozen Jacobian -2(Laplacian + 2) mode by mode;
// the kernel modes m^2 + k^2 = 2 are annihilated instead of divided
TorusField frozen_jacobian_solve(const TorusField& g) {
    Eigen::MatrixXcd c = g.spectrum();
    const int n = g.n();
    for (int a = 0; a < n; ++a) {
        const int m = TorusField::signed_freq(a, n);
        for (int b = 0; b < n; ++b) {
            const int k = TorusField::signed_freq(b, n);
            const int mu = m * m + k * k;
            if (mu == 2)
                c(a, b) = 0.0;
            else
                c(a, b) /= 2.0 * (mu - 2.0);
        }
    }
    return TorusField::from_spectrum(c);
}

} // namespace

WhiteSolution solve_white(const AmbientFunction& u, const CliffordPoint& m, double s,
                          const WhiteOptions& opt) {
    if (std::abs(s) > kWhiteSMax)
        throw std::invalid_argument("solve_white: |s| outside the contraction range");
    WhiteSolution out;
    out.m = m;
    out.s = s;
    const AmbientFunction w = u.compose_linear(m.matrix());
    TorusField f(opt.grid_n);
    if (s == 0.0) {
        out.f_perp = f;
        out.area = graph_area(f, w, 0.0);
        return out;
    }
    for (int iter = 1; iter <= opt.max_iter; ++iter) {
        const TorusField h = mean_curvature(f, w, s);
        auto split = kernel_project(h);
        const double res = split.second.sup_norm();
        out.iterations = iter;
        if (res <= opt.tol) {
            out.f_perp = std::move(f);
            out.h_k = split.first;
            out.residual_sup = res;
            out.area = graph_area(out.f_perp, w, s);
            return out;
        }
        f -= frozen_jacobian_solve(split.second);
    }
    throw NoContraction("solve_white: no contraction within the iteration budget");
}

namespace {

double area_at(const AmbientFunction& u, const Eigen::Matrix4d& m, double s,
               const WhiteOptions& opt) {
    return solve_white(u, CliffordPoint(m), s, opt).area;
}

// central difference with one Richardson sweep
template <typename F>
double deriv_richardson(const F& f, double t) {
    const auto central = [&](double tt) { return (f(tt) - f(-tt)) / (2.0 * tt); };
    return (4.0 * central(0.5 * t) - central(t)) / 3.0;
}

} // namespace

AreaDerivativeReport area_derivative_check(const AmbientFunction& u, const CliffordPoint& m,
                                           const std::vector<double>& s_values,
                                           const WhiteOptions& opt) {
    AreaDerivativeReport rep;
    const double i_u = eval_I(u, m);
    const double area0 = area_at(u, m.matrix(), 0.0, opt);
    const double t_dir = 1e-2;   // step for directional derivatives of the area
    const double t_mixed = 1e-2; // step for the mixed second difference

    for (const double s : s_values) {
        AreaDerivativeRow row;
        row.s = s;

        row.conformal_error =
            std::abs((area_at(u, m.matrix(), s, opt) - area0) / (2.0 * s) - i_u);

        const WhiteSolution base = solve_white(u, m, s, opt);
        for (int alpha = 0; alpha < 4; ++alpha) {
            const KernelCoords a = frame_matrix(alpha);
            const double lhs = deriv_richardson(
                [&](double t) { return area_at(u, m.matrix() * exp_xi(t * a), s, opt); },
                t_dir);
            const double rhs = 0.5 * kernel_l2(a, base.h_k);
            row.kernel_error = std::max(row.kernel_error, std::abs(lhs - rhs));
            row.kernel_scale = std::max(row.kernel_scale, std::abs(rhs));
        }

        for (int alpha = 0; alpha < 4; ++alpha) {
            const KernelCoords a = frame_matrix(alpha);
            for (int beta = 0; beta < 4; ++beta) {
                const KernelCoords b = frame_matrix(beta);
                const auto area_tt = [&](double t, double tau) {
                    return area_at(u, m.matrix() * exp_xi(tau * b) * exp_xi(t * a), s, opt);
                };
                const double lhs = (area_tt(t_mixed, t_mixed) - area_tt(-t_mixed, t_mixed) -
                                    area_tt(t_mixed, -t_mixed) + area_tt(-t_mixed, -t_mixed)) /
                                   (4.0 * t_mixed * t_mixed);
                const auto h_at = [&](double tau) {
                    return solve_white(u, CliffordPoint(m.matrix() * exp_xi(tau * b)), s, opt)
                        .h_k;
                };
                const KernelCoords dh =
                    (4.0 * (h_at(0.5 * t_mixed) - h_at(-0.5 * t_mixed)) / t_mixed -
                     (h_at(t_mixed) - h_at(-t_mixed)) / (2.0 * t_mixed)) /
                    3.0;
                const double rhs = 0.5 * kernel_l2(a, dh);
                row.mixed_error = std::max(row.mixed_error, std::abs(lhs - rhs));
            }
        }
        rep.rows.push_back(row);
    }

    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const auto ratio = [](double hi, double lo) {
            return lo > 0.0 ? hi / lo : (hi > 0.0 ? std::numeric_limits<double>::infinity()
                                                  : 1.0);
        };
        rep.conformal_ratio.push_back(
            ratio(rep.rows[i].conformal_error, rep.rows[i + 1].conformal_error));
        rep.kernel_ratio.push_back(ratio(rep.rows[i].kernel_error, rep.rows[i + 1].kernel_error));
        rep.mixed_ratio.push_back(ratio(rep.rows[i].mixed_error, rep.rows[i + 1].mixed_error));
    }
    return rep;
}

} // namespace cliffmorse
