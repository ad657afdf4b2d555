#include "cliffmorse/dichotomy.hpp"

#include "stencil6.hpp"

#include "cliffmorse/curves.hpp"

#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseQR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cliffmorse {

namespace {

Eigen::Matrix4d flow_matrix_at(const AreaFunctional& f, const Eigen::Matrix4d& m,
                               int direction) {
    return -direction * kFlowMetricScale * f.hess_frame(m);
}

Eigen::MatrixXd sign_eigenspace(const Eigen::Matrix4d& sym, int sign) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(sym);
    std::vector<int> idx;
    for (int i = 0; i < 4; ++i)
        if ((sign > 0) == (es.eigenvalues()(i) > 0.0)) idx.push_back(i);
    Eigen::MatrixXd out(4, static_cast<int>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j)
        out.col(static_cast<int>(j)) = es.eigenvectors().col(idx[j]);
    return out;
}

// principal sines between two orthonormal families, descending
Eigen::VectorXd principal_sines(const Eigen::MatrixXd& u, const Eigen::MatrixXd& s) {
    const Eigen::MatrixXd b = s - u * (u.transpose() * s);
    return Eigen::JacobiSVD<Eigen::MatrixXd>(b).singularValues();
}

} // namespace

LinearizedFlow linearized_flow_matrix(const AreaFunctional& f, const FlowPath& path,
                                      const CliffordPoint* start_crit,
                                      const CliffordPoint* end_crit) {
    if (path.samples.empty())
        throw std::invalid_argument("linearized_flow_matrix: empty path");
    LinearizedFlow out;
    out.times.reserve(path.samples.size());
    for (const auto& s : path.samples) {
        out.times.push_back(s.t);
        out.m.push_back(flow_matrix_at(f, s.point.matrix(), path.direction));
        out.velocity.push_back(frame_coords(s.velocity));
    }
    out.limit_start =
        start_crit ? flow_matrix_at(f, start_crit->matrix(), path.direction) : out.m.front();
    out.limit_end =
        end_crit ? flow_matrix_at(f, end_crit->matrix(), path.direction) : out.m.back();
    return out;
}

MorseSmaleReport morse_smale_check(const AreaFunctional& f, const ConnectingOrbit& orbit,
                                   const CriticalSet& cs, const MorseSmaleOptions& opt) {
    MorseSmaleReport rep;
    const int dir = orbit.direction;
    const auto& crits = cs.points;
    const int start_id = dir == 1 ? orbit.from : orbit.to;
    const int end_id = dir == 1 ? orbit.to : orbit.from;
    rep.expected_dim = std::abs(crits[orbit.from].index - crits[orbit.to].index);

    const Eigen::Matrix4d m_start = flow_matrix_at(f, crits[start_id].torus.matrix(), dir);
    const Eigen::Matrix4d m_end = flow_matrix_at(f, crits[end_id].torus.matrix(), dir);

    // dense resampling of the orbit on a uniform grid with an even interval count
    const double t_end = orbit.path.t_end;
    int n_int = (t_end <= opt.grid_h)
        ? 0 : 2 * std::max(1, static_cast<int>(std::ceil(t_end / (2.0 * opt.grid_h))));
    const double h = n_int > 0 ? t_end / n_int : 0.0;
    std::vector<Eigen::Matrix4d> mm(n_int + 1);
    std::vector<Eigen::Vector4d> vel(n_int + 1);
    {
        const VelocityField field = [&](double, const Eigen::Matrix4d& y) {
            return flow_velocity(f, y, dir);
        };
        Eigen::Matrix4d x = orbit.path.samples.front().point.matrix();
        for (int i = 0; i <= n_int; ++i) {
            mm[i] = flow_matrix_at(f, x, dir);
            vel[i] = -dir * kFlowMetricScale * f.grad_frame(x);
            if (i < n_int) {
                x = rkmk4_step(x, i * h, h, field);
                if (i % 64 == 63) x = 1.5 * x - 0.5 * x * (x.transpose() * x);
            }
        }
    }
    int mid = 0;
    double vmax = -1.0;
    for (int i = 0; i <= n_int; ++i)
        if (vel[i].norm() > vmax) { vmax = vel[i].norm(); mid = i; }
    mid = std::clamp(2 * ((mid + 1) / 2), 0, n_int);

    // RK4 on pairs of grid intervals; a QR renormalization per step keeps the
    // family orthonormal and reports conditioning
    const auto propagate = [&](Eigen::MatrixXd g, int from, int to, double msign) {
        const int step = from <= to ? 2 : -2;
        const double hh = (from <= to ? h : -h);
        for (int i = from; i != to; i += step) {
            const Eigen::Matrix4d a1 = msign * mm[i];
            const Eigen::Matrix4d a2 = msign * mm[i + step / 2];
            const Eigen::Matrix4d a3 = msign * mm[i + step];
            const Eigen::MatrixXd k1 = a1 * g;
            const Eigen::MatrixXd k2 = a2 * (g + hh * k1);
            const Eigen::MatrixXd k3 = a2 * (g + hh * k2);
            const Eigen::MatrixXd k4 = a3 * (g + 2.0 * hh * k3);
            g += (hh / 3.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
            const int cols = static_cast<int>(g.cols());
            const Eigen::MatrixXd r = qr.matrixQR().topRows(cols);
            double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
            for (int c = 0; c < cols; ++c) {
                dmax = std::max(dmax, std::abs(r(c, c)));
                dmin = std::min(dmin, std::abs(r(c, c)));
            }
            rep.condition = std::max(rep.condition, dmin > 0 ? dmax / dmin : 1e300);
            g = qr.householderQ() * Eigen::MatrixXd::Identity(4, cols);
        }
        return g;
    };

    const Eigen::MatrixXd u = propagate(sign_eigenspace(m_start, +1), 0, mid, 1.0);
    const Eigen::MatrixXd s = propagate(sign_eigenspace(m_end, -1), n_int, mid, 1.0);
    if (u.cols() > 0 && s.cols() > 0) {
        const Eigen::VectorXd sv = principal_sines(u, s);
        rep.bounded_dim = static_cast<int>((sv.array() < opt.angle_tol).count());
        rep.smallest_sine = sv(sv.size() - 1);
        rep.separation_sine = sv.size() >= 2 ? sv(sv.size() - 2) : 1.0;
    }
    rep.verdict = rep.bounded_dim == rep.expected_dim;

    const Eigen::Vector4d vhat = vel[mid].normalized();
    if (u.cols() > 0)
        rep.velocity_defect = (vhat - u * (u.transpose() * vhat)).norm();
    if (s.cols() > 0)
        rep.velocity_defect =
            std::max(rep.velocity_defect, (vhat - s * (s.transpose() * vhat)).norm());

    // adjoint equation gdot = -M g: bounded families and their intersection
    const Eigen::MatrixXd ua_seed = sign_eigenspace(m_start, -1);
    const Eigen::MatrixXd sa_seed = sign_eigenspace(m_end, +1);
    if (ua_seed.cols() > 0 && sa_seed.cols() > 0) {
        const Eigen::MatrixXd ua = propagate(ua_seed, 0, mid, -1.0);
        const Eigen::MatrixXd sa = propagate(sa_seed, n_int, mid, -1.0);
        const Eigen::VectorXd sv = principal_sines(ua, sa);
        rep.adjoint_kernel_dim = static_cast<int>((sv.array() < opt.angle_tol).count());
        if (rep.adjoint_kernel_dim > 0) {
            const Eigen::MatrixXd b = sa - ua * (ua.transpose() * sa);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullV);
            for (int j = 0; j < sv.size(); ++j) {
                if (sv(j) >= opt.angle_tol) continue;
                const Eigen::Vector4d g = (sa * svd.matrixV().col(j)).normalized();
                rep.adjoint_orthogonality =
                    std::max(rep.adjoint_orthogonality, std::abs(g.dot(vhat)));
            }
        }
    }

    // adjoint solutions pair constantly with the velocity; seeded orthogonal,
    // the pairing measures how exactly the lemma is realized numerically
    if (ua_seed.cols() > 0 && n_int > 0) {
        for (int c = 0; c < ua_seed.cols(); ++c) {
            Eigen::Vector4d g = ua_seed.col(c);
            for (int i = 0; i + 2 <= n_int; i += 2) {
                const Eigen::Vector4d k1 = -mm[i] * g;
                const Eigen::Vector4d k2 = -mm[i + 1] * (g + h * k1);
                const Eigen::Vector4d k3 = -mm[i + 1] * (g + h * k2);
                const Eigen::Vector4d k4 = -mm[i + 2] * (g + 2.0 * h * k3);
                g += (h / 3.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                g.normalize();
                const double pair = std::abs(g.dot(vel[i + 2])) / vel[i + 2].norm();
                rep.adjoint_orthogonality = std::max(rep.adjoint_orthogonality, pair);
            }
        }
    }

    rep.ill_conditioned = rep.condition > opt.cond_limit;
    return rep;
}

BoundedSolveResult bounded_solution(const std::vector<double>& times,
                                    const std::vector<Eigen::Matrix4d>& a,
                                    const std::vector<Eigen::Vector4d>& w,
                                    const Eigen::Matrix4d& a_limit_start,
                                    const Eigen::Vector4d& eta_inf_start,
                                    const Eigen::Vector4d& gauge_dir, int gauge_node) {
    const int n = static_cast<int>(times.size());
    if (n < 8 || a.size() != times.size() || w.size() != times.size())
        throw std::invalid_argument("bounded_solution: bad grid");
    const double h = times[1] - times[0];
    for (int i = 1; i < n; ++i)
        if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("bounded_solution: grid must be uniform");

    std::vector<Eigen::Matrix4d> ad(n);
    for (int i = 0; i < n; ++i) ad[i] = detail::deriv6(a, i, h);

    // backward-growing components at the start must sit on the frozen equilibrium
    const Eigen::MatrixXd bc = sign_eigenspace(a_limit_start, -1);
    const int nb = static_cast<int>(bc.cols());
    const int rows = 4 * (n - 1) + nb + 1;
    const int cols = 4 * n;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * 36);
    const auto add_block = [&](int r0, int c0, const Eigen::Matrix4d& blk) {
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                if (blk(r, c) != 0.0) trip.emplace_back(r0 + r, c0 + c, blk(r, c));
    };
    for (int i = 0; i + 1 < n; ++i) {
        const Eigen::Matrix4d ci = -Eigen::Matrix4d::Identity() - (h / 2) * a[i] -
                                   (h * h / 12) * (ad[i] + a[i] * a[i]);
        const Eigen::Matrix4d di = Eigen::Matrix4d::Identity() - (h / 2) * a[i + 1] +
                                   (h * h / 12) * (ad[i + 1] + a[i + 1] * a[i + 1]);
        add_block(4 * i, 4 * i, ci);
        add_block(4 * i, 4 * (i + 1), di);
    }
    for (int b = 0; b < nb; ++b)
        for (int c = 0; c < 4; ++c)
            if (bc(c, b) != 0.0) trip.emplace_back(4 * (n - 1) + b, c, bc(c, b));
    {
        const Eigen::Vector4d g = gauge_dir.normalized();
        for (int c = 0; c < 4; ++c)
            if (g(c) != 0.0) trip.emplace_back(rows - 1, 4 * gauge_node + c, g(c));
    }
    Eigen::SparseMatrix<double> sys(rows, cols);
    sys.setFromTriplets(trip.begin(), trip.end());
    sys.makeCompressed();
    Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr(sys);
    if (qr.info() != Eigen::Success)
        throw std::runtime_error("bounded_solution: factorization failed");

    const auto rhs_for = [&](const std::vector<Eigen::Vector4d>& ww, bool with_bc) {
        std::vector<Eigen::Vector4d> wd(n);
        for (int i = 0; i < n; ++i) wd[i] = detail::deriv6(ww, i, h);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
        for (int i = 0; i + 1 < n; ++i)
            rhs.segment<4>(4 * i) = (h / 2) * (ww[i] + ww[i + 1]) +
                                    (h * h / 12) * (wd[i] + a[i] * ww[i] - wd[i + 1] -
                                                    a[i + 1] * ww[i + 1]);
        if (with_bc)
            for (int b = 0; b < nb; ++b)
                rhs(4 * (n - 1) + b) = bc.col(b).dot(eta_inf_start);
        return rhs;
    };

    const Eigen::VectorXd sol = qr.solve(rhs_for(w, true));
    std::vector<Eigen::Vector4d> eta(n);
    for (int i = 0; i < n; ++i) eta[i] = sol.segment<4>(4 * i);

    // one defect-correction pass against a sixth-order derivative of the solve
    const auto defect_of = [&](const std::vector<Eigen::Vector4d>& e) {
        std::vector<Eigen::Vector4d> d(n);
        for (int i = 0; i < n; ++i) d[i] = detail::deriv6(e, i, h) - (a[i] * e[i] + w[i]);
        return d;
    };
    {
        std::vector<Eigen::Vector4d> d = defect_of(eta);
        for (auto& v : d) v = -v;
        const Eigen::VectorXd fix = qr.solve(rhs_for(d, false));
        for (int i = 0; i < n; ++i) eta[i] += fix.segment<4>(4 * i);
    }

    BoundedSolveResult out;
    out.eta = std::move(eta);
    out.eta_dot.resize(n);
    double worst = 0.0;
    const auto d = defect_of(out.eta);
    for (int i = 0; i < n; ++i) {
        out.eta_dot[i] = a[i] * out.eta[i] + w[i];
        worst = std::max(worst, d[i].norm());
    }
    out.collocation_defect = worst;
    return out;
}

} // namespace cliffmorse
