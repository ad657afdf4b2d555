#include "cliffmorse/fermi.hpp"

#include <cmath>
#include <numbers>

namespace cliffmorse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuarter = kPi / 4.0;

void check_r(double r) {
    if (!(std::abs(r) < kQuarter)) throw std::domain_error("fermi: |r| must be < pi/4");
}

} // namespace

Eigen::Vector4d fermi_embed(const FermiPoint& p) {
    check_r(p.r);
    double a = std::sin(kQuarter + p.r), b = std::sin(kQuarter - p.r);
    return {a * std::cos(p.theta), a * std::sin(p.theta), b * std::cos(p.phi),
            b * std::sin(p.phi)};
}

Eigen::Vector4d fermi_tangent_theta(const FermiPoint& p) {
    check_r(p.r);
    double a = std::sin(kQuarter + p.r);
    return {-a * std::sin(p.theta), a * std::cos(p.theta), 0.0, 0.0};
}

Eigen::Vector4d fermi_tangent_phi(const FermiPoint& p) {
    check_r(p.r);
    double b = std::sin(kQuarter - p.r);
    return {0.0, 0.0, -b * std::sin(p.phi), b * std::cos(p.phi)};
}

Eigen::Vector4d fermi_tangent_r(const FermiPoint& p) {
    check_r(p.r);
    double ap = std::cos(kQuarter + p.r), bp = -std::cos(kQuarter - p.r);
    return {ap * std::cos(p.theta), ap * std::sin(p.theta), bp * std::cos(p.phi),
            bp * std::sin(p.phi)};
}

Eigen::Matrix3d fermi_metric(const FermiPoint& p) {
    check_r(p.r);
    double a = std::sin(kQuarter + p.r), b = std::sin(kQuarter - p.r);
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 0) = a * a;
    g(1, 1) = b * b;
    g(2, 2) = 1.0;
    return g;
}

FermiPoint fermi_chart_inverse(const Eigen::Vector4d& x) {
    double rho = std::hypot(x(0), x(1));
    if (rho <= 0.0 || rho >= 1.0) throw std::domain_error("fermi_chart_inverse: point on a core circle");
    FermiPoint p;
    p.r = std::asin(std::min(rho, 1.0)) - kQuarter;
    check_r(p.r);
    p.theta = std::atan2(x(1), x(0));
    p.phi = std::atan2(x(3), x(2));
    return p;
}

Eigen::Vector3d killing_field_so4(const Eigen::Matrix4d& omega, const FermiPoint& p) {
    check_r(p.r);
    EndMatrix2 a = xi_k_part(omega);
    Eigen::Vector2d rates = h_rates(omega);
    Eigen::RowVector2d et(std::cos(p.theta), std::sin(p.theta));
    Eigen::RowVector2d etp(-std::sin(p.theta), std::cos(p.theta));
    Eigen::Vector2d ep(std::cos(p.phi), std::sin(p.phi));
    Eigen::Vector2d epp(-std::sin(p.phi), std::cos(p.phi));
    double psi = et * a * ep;
    double psi_th = etp * a * ep;
    double psi_ph = et * a * epp;
    double cot_ar = std::cos(kQuarter + p.r) / std::sin(kQuarter + p.r);
    double tan_ar = std::sin(kQuarter + p.r) / std::sin(kQuarter - p.r);
    return {cot_ar * psi_th + rates(0), -tan_ar * psi_ph + rates(1), psi};
}

Eigen::Vector3d killing_field(const KernelCoords& a, const FermiPoint& p) {
    return killing_field_so4(xi(a), p);
}

TorusField graph_of_torus(const Eigen::Matrix4d& m, int n) {
    const double lo = -kQuarter + 0.01, hi = kQuarter - 0.01;
    TorusField f(n);
    Eigen::Matrix4d mt = m.transpose();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double th = f.theta(i), ph = f.phi(j);
            auto level = [&](double r) {
                Eigen::Vector4d q = mt * fermi_embed({th, ph, r});
                return q(0) * q(0) + q(1) * q(1) - 0.5;
            };
            double fa = level(lo), fb = level(hi);
            if (fa == 0.0) { f(i, j) = lo; continue; }
            if (fb == 0.0) { f(i, j) = hi; continue; }
            if ((fa < 0.0) == (fb < 0.0))
                throw NotAGraph("graph_of_torus: no bracket at a grid node");
            double a = lo, b = hi;
            for (int it = 0; it < 40; ++it) {
                double mid = 0.5 * (a + b);
                double fm = level(mid);
                if ((fm < 0.0) == (fa < 0.0)) { a = mid; fa = fm; } else { b = mid; }
            }
            double r = 0.5 * (a + b);
            for (int it = 0; it < 8; ++it) {
                Eigen::Vector4d q = mt * fermi_embed({th, ph, r});
                Eigen::Vector4d qd = mt * fermi_tangent_r({th, ph, r});
                double val = q(0) * q(0) + q(1) * q(1) - 0.5;
                double der = 2.0 * (q(0) * qd(0) + q(1) * qd(1));
                if (der == 0.0) break;
                double step = val / der;
                r -= step;
                if (std::abs(step) < 1e-15) break;
            }
            f(i, j) = r;
        }
    return f;
}

double graph_area(const TorusField& f, const AmbientFunction& w, double s) {
    const int n = f.n();
    TorusField fth = f.deriv_theta(), fph = f.deriv_phi();
    TorusField dens(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double r = f(i, j);
            double a = std::sin(kQuarter + r), b = std::sin(kQuarter - r);
            double q = 1.0 + fth(i, j) * fth(i, j) / (a * a) + fph(i, j) * fph(i, j) / (b * b);
            double c = (s == 0.0) ? 0.0
                                  : s * w.eval(fermi_embed({f.theta(i), f.phi(j), r}));
            dens(i, j) = std::exp(2.0 * c) * a * b * std::sqrt(q);
        }
    return dens.quadrature();
}

TorusField mean_curvature(const TorusField& f, const AmbientFunction& w, double s) {
    if (f.sup_norm() >= kQuarter - 1e-6)
        throw std::domain_error("mean_curvature: graph leaves the chart");
    const int n = f.n();
    TorusField fth = f.deriv_theta(), fph = f.deriv_phi();
    TorusField fthth = f.deriv_theta2(), fphph = f.deriv_phi2(), fthph = f.deriv_theta_phi();
    const bool conformal = (s != 0.0) && !w.empty();
    PolyEvaluator wv, wx, wy, wz, ww;
    if (conformal) {
        wv = PolyEvaluator(w);
        wx = PolyEvaluator(w.partial(0));
        wy = PolyEvaluator(w.partial(1));
        wz = PolyEvaluator(w.partial(2));
        ww = PolyEvaluator(w.partial(3));
    }

    TorusField h(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double r = f(i, j);
            double a = std::sin(kQuarter + r), b = std::sin(kQuarter - r);
            double ap = std::cos(kQuarter + r), bp = -std::cos(kQuarter - r);
            double t1 = fth(i, j), t2 = fph(i, j);
            double q = 1.0 + t1 * t1 / (a * a) + t2 * t2 / (b * b);
            double qth = 2.0 * t1 * fthth(i, j) / (a * a) + 2.0 * t2 * fthph(i, j) / (b * b);
            double qph = 2.0 * t1 * fthph(i, j) / (a * a) + 2.0 * t2 * fphph(i, j) / (b * b);
            double qr = -2.0 * t1 * t1 * ap / (a * a * a) - 2.0 * t2 * t2 * bp / (b * b * b);

            double cth = 0.0, cph = 0.0, cr = 0.0, c = 0.0;
            if (conformal) {
                FermiPoint p{f.theta(i), f.phi(j), r};
                Eigen::Vector4d x = fermi_embed(p);
                Eigen::Vector4d grad(wx(x), wy(x), wz(x), ww(x));
                c = s * wv(x);
                cth = s * grad.dot(fermi_tangent_theta(p));
                cph = s * grad.dot(fermi_tangent_phi(p));
                cr = s * grad.dot(fermi_tangent_r(p));
            }

            double sq = std::sqrt(q);
            // d/dtheta of -e^{2c}(b/a) f_theta / sqrt(q), and the phi, r analogues
            double div_th =
                -std::exp(2.0 * c) * (b / a) *
                (2.0 * cth * t1 / sq + fthth(i, j) / sq - t1 * qth / (2.0 * q * sq));
            double div_ph =
                -std::exp(2.0 * c) * (a / b) *
                (2.0 * cph * t2 / sq + fphph(i, j) / sq - t2 * qph / (2.0 * q * sq));
            double div_r = std::exp(2.0 * c) *
                           (2.0 * cr * a * b / sq + (ap * b + a * bp) / sq -
                            a * b * qr / (2.0 * q * sq));
            h(i, j) = std::exp(-3.0 * c) / (a * b) * (div_th + div_ph + div_r);
        }
    return h;
}

TorusField ambient_normal_derivative(const AmbientFunction& u, const Eigen::Matrix4d& m,
                                     int n) {
    PolyEvaluator ux(u.partial(0)), uy(u.partial(1)), uz(u.partial(2)), uw(u.partial(3));
    return TorusField::sample(n, [&](double th, double ph) {
        FermiPoint p{th, ph, 0.0};
        Eigen::Vector4d x = m * fermi_embed(p);
        Eigen::Vector4d nu = m * fermi_tangent_r(p);
        return ux(x) * nu(0) + uy(x) * nu(1) + uz(x) * nu(2) + uw(x) * nu(3);
    });
}

} // namespace cliffmorse
