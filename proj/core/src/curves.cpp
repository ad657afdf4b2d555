#include "cliffmorse/curves.hpp"

#include <cmath>
#include <stdexcept>

namespace cliffmorse {

TorusField curve_expansion(const EndMatrix2& a, const EndMatrix2& b, double t, int n) {
    TorusField f(n);
    for (int i = 0; i < n; ++i) {
        const double th = f.theta(i);
        const Eigen::Vector2d et(std::cos(th), std::sin(th));
        const Eigen::Vector2d etp(-std::sin(th), std::cos(th));
        const Eigen::RowVector2d ra = et.transpose() * a;
        const Eigen::RowVector2d rap = etp.transpose() * a;
        const Eigen::RowVector2d rb = et.transpose() * b;
        for (int j = 0; j < n; ++j) {
            const double ph = f.phi(j);
            const Eigen::Vector2d ep(std::cos(ph), std::sin(ph));
            const Eigen::Vector2d epp(-std::sin(ph), std::cos(ph));
            const double psi_b = rb.dot(ep);
            const double da_th = rap.dot(ep);
            const double da_ph = ra.dot(epp);
            f.values()(i, j) = t * ra.dot(ep)
                             + 0.5 * t * t * (psi_b - da_th * da_th + da_ph * da_ph);
        }
    }
    return f;
}

namespace {

// one Newton polish toward the orthogonal group, kills integrator roundoff drift
Eigen::Matrix4d polish_orthogonal(const Eigen::Matrix4d& m) {
    return 1.5 * m - 0.5 * m * (m.transpose() * m);
}

} // namespace

Eigen::Matrix4d rkmk4_step(const Eigen::Matrix4d& m, double t, double h,
                           const VelocityField& field) {
    const Eigen::Matrix4d s1 = xi(field(t, m));
    const Eigen::Matrix4d y2 = m * so4_exp(0.5 * h * s1);
    const Eigen::Matrix4d s2 = dexpinv(0.5 * h * s1, xi(field(t + 0.5 * h, y2)));
    const Eigen::Matrix4d y3 = m * so4_exp(0.5 * h * s2);
    const Eigen::Matrix4d s3 = dexpinv(0.5 * h * s2, xi(field(t + 0.5 * h, y3)));
    const Eigen::Matrix4d y4 = m * so4_exp(h * s3);
    const Eigen::Matrix4d s4 = dexpinv(h * s3, xi(field(t + h, y4)));
    const Eigen::Matrix4d sigma = (h / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
    return m * so4_exp(sigma);
}

Eigen::Matrix4d rkmk4_integrate(
    Eigen::Matrix4d m, double t0, double t1, const VelocityField& field,
    const IntegrateOptions& opt,
    const std::function<void(double, const Eigen::Matrix4d&, const EndMatrix2&)>& visit) {
    if (t1 == t0) return m;
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(opt.h0, std::abs(t1 - t0));
    int accepted = 0;
    while (dir * (t1 - t) > 0) {
        if (dir * (t + h) > dir * t1) h = t1 - t;
        const Eigen::Matrix4d full = rkmk4_step(m, t, h, field);
        const Eigen::Matrix4d half = rkmk4_step(m, t, 0.5 * h, field);
        const Eigen::Matrix4d fine = rkmk4_step(half, t + 0.5 * h, 0.5 * h, field);
        const double err = (full - fine).norm() / 15.0;
        const double tol = opt.rel_tol * std::max(1.0, fine.norm());
        if (err <= tol || std::abs(h) <= opt.h_min) {
            t += h;
            m = fine;
            if (++accepted % 64 == 0) m = polish_orthogonal(m);
            if (visit) visit(t, m, field(t, m));
        }
        const double scale = (err > 0)
            ? std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 4.0) : 4.0;
        h = dir * std::clamp(std::abs(h) * scale, opt.h_min, opt.h_max);
    }
    return polish_orthogonal(m);
}

std::vector<Eigen::Matrix4d> horizontal_lift(const Eigen::Matrix4d& lift0,
                                             const std::vector<double>& times,
                                             const std::vector<EndMatrix2>& velocities) {
    if (times.size() != velocities.size() || times.size() < 2)
        throw std::invalid_argument("horizontal_lift: need matching sample lists, length >= 2");
    const int n = static_cast<int>(times.size());
    std::vector<Eigen::Matrix4d> lifts(times.size());
    lifts[0] = lift0;
    for (int k = 0; k + 1 < n; ++k) {
        const double ta = times[k], tb = times[k + 1];
        // cubic Hermite interpolation of V on [ta, tb]; slopes from one-sided or
        // central differences of the neighbouring samples
        const double hk = tb - ta;
        const EndMatrix2 va = velocities[k], vb = velocities[k + 1];
        const EndMatrix2 da = (k > 0)
            ? EndMatrix2(((velocities[k + 1] - velocities[k - 1]) / (times[k + 1] - times[k - 1])))
            : EndMatrix2((vb - va) / hk);
        const EndMatrix2 db = (k + 2 < n)
            ? EndMatrix2(((velocities[k + 2] - velocities[k]) / (times[k + 2] - times[k])))
            : EndMatrix2((vb - va) / hk);
        const VelocityField seg = [&](double t, const Eigen::Matrix4d&) -> EndMatrix2 {
            const double s = (t - ta) / hk;
            const double s2 = s * s, s3 = s2 * s;
            return (2 * s3 - 3 * s2 + 1) * va + (s3 - 2 * s2 + s) * hk * da
                 + (-2 * s3 + 3 * s2) * vb + (s3 - s2) * hk * db;
        };
        // fixed substeps keep the reconstruction deterministic
        const int sub = 8;
        Eigen::Matrix4d m = lifts[k];
        const double hs = hk / sub;
        for (int q = 0; q < sub; ++q) m = rkmk4_step(m, ta + q * hs, hs, seg);
        lifts[k + 1] = 1.5 * m - 0.5 * m * (m.transpose() * m);
    }
    return lifts;
}

} // namespace cliffmorse
