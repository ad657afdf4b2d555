#include "cliffmorse/mcf.hpp"

#include "cliffmorse/end2.hpp"
#include "cliffmorse/fermi.hpp"
#include "cliffmorse/io.hpp"
#include "cliffmorse/kernel.hpp"
#include "cliffmorse/parallel.hpp"
#include "stencil6.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <utility>

namespace cliffmorse {

namespace {

// Residual of the flow equation for one slice, in the chart of its base torus:
//   s e^c (x_r + fdot - f_theta x_theta - f_phi x_phi) / sqrt(Q) + H(f),
// where x is the chart velocity of the rotation omega at the graph point and
// H the mean curvature of the graph in e^{2 s (u . n)} g.
TorusField slice_residual(const AmbientFunction& u, double s, const Eigen::Matrix4d& n_base,
                          const Eigen::Matrix4d& omega, const TorusField& f,
                          const TorusField& fdot) {
    const AmbientFunction w = u.compose_linear(n_base);
    TorusField out = mean_curvature(f, w, s);
    if (s == 0.0) return out;
    const TorusField fth = f.deriv_theta();
    const TorusField fph = f.deriv_phi();
    const PolyEvaluator pw(w);
    const int n = f.n();
    constexpr double quarter_pi = std::numbers::pi / 4.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const FermiPoint p{f.theta(i), f.phi(j), f(i, j)};
            const Eigen::Vector3d x = killing_field_so4(omega, p);
            const double a = std::sin(quarter_pi + p.r);
            const double b = std::sin(quarter_pi - p.r);
            const double dth = fth(i, j), dph = fph(i, j);
            const double q = 1.0 + dth * dth / (a * a) + dph * dph / (b * b);
            const double c = pw.empty() ? 0.0 : s * pw(fermi_embed(p));
            const double wr = x(2) + fdot(i, j);
            out(i, j) += s * std::exp(c) * (wr - dth * x(0) - dph * x(1)) / std::sqrt(q);
        }
    }
    return out;
}

std::vector<TorusField> fd6_fields(const std::vector<TorusField>& f, double h) {
    std::vector<Eigen::MatrixXd> vals(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) vals[i] = f[i].values();
    std::vector<TorusField> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = TorusField(detail::deriv6(vals, i, h));
    return out;
}

// Newton refinement onto the nearby critical point of the area derivative
Eigen::Matrix4d newton_to_crit(const AreaFunctional& f, Eigen::Matrix4d m) {
    for (int it = 0; it < 60; ++it) {
        const Eigen::Vector4d g = f.grad_frame(m);
        if (g.norm() < 1e-13) break;
        const Eigen::Matrix4d h = f.hess_frame(m);
        Eigen::Vector4d step = -h.fullPivLu().solve(g);
        if (!step.allFinite()) step = -g;
        if (step.norm() > 0.3) step *= 0.3 / step.norm();
        m = m * exp_xi(from_frame_coords(step));
        if (step.norm() < 1e-14) break;
    }
    return m;
}

// descent time from start until the gradient norm settles below grad_tol
// (after first leaving the quiet zone around the starting critical point)
double forward_quiet_time(const AreaFunctional& f, const Eigen::Matrix4d& start,
                          double grad_tol, double cap) {
    const VelocityField field = [&](double, const Eigen::Matrix4d& mm) {
        return flow_velocity(f, mm, 1);
    };
    Eigen::Matrix4d m = start;
    double t = 0.0;
    bool left = false;
    const double chunk = 0.25;
    while (t < cap) {
        m = rkmk4_integrate(m, t, t + chunk, field, IntegrateOptions{});
        t += chunk;
        const double g = f.grad_norm(m);
        if (!left && g > 10.0 * grad_tol) left = true;
        if (left && g < grad_tol) return t;
    }
    return cap;
}

// rebuild the slice view (every stride-th fine node) and the slice-time path
void assemble_slices(EternalFlowCandidate& cand, const AreaFunctional& f, int stride) {
    const int n_fine = static_cast<int>(cand.fine_times.size());
    const int n_sl = (n_fine - 1) / stride + 1;
    cand.slices.clear();
    cand.slices.reserve(n_sl);
    const int old_source = cand.gamma.source, old_sink = cand.gamma.sink;
    cand.gamma = FlowPath{};
    cand.gamma.direction = 1;
    cand.gamma.source = old_source;
    cand.gamma.sink = old_sink;
    for (int k = 0; k < n_sl; ++k) {
        const int j = k * stride;
        FlowSlice sl;
        sl.t = cand.fine_times[j];
        sl.n = cand.fine_n[j];
        sl.omega = cand.fine_omega[j];
        sl.f = cand.fine_f[j];
        sl.fdot = cand.fine_fdot[j];
        cand.slices.push_back(std::move(sl));

        FlowSample fs;
        fs.t = cand.fine_times[j];
        fs.point = CliffordPoint(cand.fine_n[j]);
        fs.velocity = cand.fine_velocity[j];
        fs.value = f.value(cand.fine_n[j]);
        fs.grad_norm = f.grad_norm(cand.fine_n[j]);
        cand.gamma.samples.push_back(std::move(fs));
    }
    cand.gamma.t_end = cand.fine_times.back();
    if (static_cast<int>(cand.eta.size()) != n_sl) {
        cand.eta.assign(n_sl, EndMatrix2::Zero());
        cand.eta_dot.assign(n_sl, EndMatrix2::Zero());
    }
}

} // namespace

TorusField mcf_operator_slice(const AmbientFunction& u, const EternalFlowCandidate& cand,
                              int slice) {
    if (slice < 0 || slice >= static_cast<int>(cand.slices.size()))
        throw std::invalid_argument("mcf_operator_slice: slice out of range");
    const FlowSlice& sl = cand.slices[slice];
    return slice_residual(u, cand.s, sl.n, sl.omega, sl.f, sl.fdot);
}

TorusField mcf_operator(const AmbientFunction& u, const EternalFlowCandidate& cand, double t) {
    if (cand.slices.empty()) throw std::invalid_argument("mcf_operator: no slices");
    int best = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cand.slices.size(); ++k) {
        const double d = std::abs(cand.slices[k].t - t);
        if (d < gap) {
            gap = d;
            best = static_cast<int>(k);
        }
    }
    return mcf_operator_slice(u, cand, best);
}

void refresh_residuals(const AmbientFunction& u, EternalFlowCandidate& cand, unsigned threads) {
    const std::size_t n = cand.slices.size();
    std::vector<double> sup(n, 0.0), l2(n, 0.0);
    parallel_for(
        n,
        [&](std::size_t j) {
            const TorusField r = mcf_operator_slice(u, cand, static_cast<int>(j));
            sup[j] = r.sup_norm();
            l2[j] = r.l2_norm();
        },
        threads);
    cand.slice_residual.assign(sup.begin(), sup.end());
    cand.residual_sup = n ? *std::max_element(sup.begin(), sup.end()) : 0.0;
    cand.residual_l2 = n ? *std::max_element(l2.begin(), l2.end()) : 0.0;
}

EternalFlowCandidate build_ansatz_flow(const AmbientFunction& u, const FlowPath& gamma,
                                       double s, const AnsatzOptions& opt) {
    if (std::abs(s) > kWhiteSMax)
        throw std::invalid_argument("build_ansatz_flow: |s| outside the contraction range");
    if (gamma.direction != 1)
        throw std::invalid_argument("build_ansatz_flow: descent paths only");
    if (gamma.samples.empty()) throw std::invalid_argument("build_ansatz_flow: empty path");
    if (opt.n_slices < 9 || opt.n_slices % 2 == 0 || opt.refine < 1)
        throw std::invalid_argument("build_ansatz_flow: need an odd slice count >= 9");

    const AreaFunctional f(u);
    const int n_fine = (opt.n_slices - 1) * opt.refine + 1;
    EternalFlowCandidate cand;
    cand.s = s;
    cand.gamma.source = gamma.source;
    cand.gamma.sink = gamma.sink;
    cand.fine_times.resize(n_fine);
    cand.fine_n.resize(n_fine);

    const CliffordPoint& front = gamma.samples.front().point;
    const CliffordPoint& rear = gamma.samples.back().point;
    double t_half = opt.t_floor;

    if (cl_distance(front, rear) < 1e-7) {
        // path pinned at one torus; only a critical point gives a valid ansatz
        const Eigen::Matrix4d p = newton_to_crit(f, front.matrix());
        std::fill(cand.fine_n.begin(), cand.fine_n.end(), p);
    } else {
        const Eigen::Matrix4d p = newton_to_crit(f, front.matrix());
        // exit direction: kernel part of the offset, projected on the unstable space
        const Eigen::Matrix4d rel = p.transpose() * front.matrix();
        const Eigen::Vector4d off =
            frame_coords(xi_k_part(0.5 * (rel - rel.transpose())));
        const Eigen::Matrix4d h = f.hess_frame(p);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
        Eigen::Vector4d v = Eigen::Vector4d::Zero();
        for (int a = 0; a < 4; ++a)
            if (es.eigenvalues()(a) < 0.0)
                v += es.eigenvectors().col(a).dot(off) * es.eigenvectors().col(a);
        if (v.norm() < 1e-12) v = es.eigenvectors().col(0);
        v.normalize();
        const double rate = std::abs(v.dot(h * v));
        double eps = 0.5 * opt.grad_tol / std::max(rate, 1e-6);
        Eigen::Matrix4d start = p * exp_xi(from_frame_coords(eps * v));
        for (int guard = 0; guard < 40 && f.grad_norm(start) > opt.grad_tol; ++guard) {
            eps *= 0.5;
            start = p * exp_xi(from_frame_coords(eps * v));
        }
        t_half = std::max(0.5 * forward_quiet_time(f, start, opt.grad_tol, 1000.0),
                          opt.t_floor);
        cand.fine_n[0] = start;
        const VelocityField field = [&](double, const Eigen::Matrix4d& mm) {
            return flow_velocity(f, mm, 1);
        };
        const double ht = 2.0 * t_half / (n_fine - 1);
        for (int j = 0; j + 1 < n_fine; ++j)
            cand.fine_n[j + 1] = rkmk4_integrate(cand.fine_n[j], -t_half + j * ht,
                                                 -t_half + (j + 1) * ht, field,
                                                 IntegrateOptions{});
    }
    const double ht = 2.0 * t_half / (n_fine - 1);
    for (int j = 0; j < n_fine; ++j) cand.fine_times[j] = -t_half + j * ht;

    cand.fine_velocity.resize(n_fine);
    cand.fine_omega.resize(n_fine);
    for (int j = 0; j < n_fine; ++j) {
        cand.fine_velocity[j] = flow_velocity(f, cand.fine_n[j], 1);
        cand.fine_omega[j] = xi(cand.fine_velocity[j]);
    }

    cand.fine_f.resize(n_fine);
    WhiteOptions wopt;
    wopt.grid_n = opt.grid_n;
    wopt.tol = opt.white_tol;
    parallel_for(
        static_cast<std::size_t>(n_fine),
        [&](std::size_t j) {
            cand.fine_f[j] = solve_white(u, CliffordPoint(cand.fine_n[j]), s, wopt).f_perp;
        },
        opt.threads);
    cand.fine_fdot = fd6_fields(cand.fine_f, ht);

    assemble_slices(cand, f, opt.refine);
    refresh_residuals(u, cand, opt.threads);
    return cand;
}

EternalFlowCandidate correct_ansatz(const AmbientFunction& u, const EternalFlowCandidate& cand,
                                    const AnsatzOptions& opt) {
    if (cand.s == 0.0) return cand;
    const int nf = static_cast<int>(cand.fine_times.size());
    if (nf < 8 || cand.fine_f.size() != cand.fine_times.size())
        throw std::invalid_argument("correct_ansatz: candidate lacks its fine track");
    const double s = cand.s;
    const double ht = cand.fine_times[1] - cand.fine_times[0];
    const int stride = (nf - 1) / (static_cast<int>(cand.slices.size()) - 1);
    const AreaFunctional f(u);

    // residual along the fine track, split into kernel and kernel-free parts
    std::vector<KernelCoords> rk(nf);
    std::vector<TorusField> rho(nf);
    parallel_for(
        static_cast<std::size_t>(nf),
        [&](std::size_t j) {
            const TorusField r = slice_residual(u, s, cand.fine_n[j], cand.fine_omega[j],
                                                cand.fine_f[j], cand.fine_fdot[j]);
            auto split = kernel_project(r);
            rk[j] = split.first;
            rho[j] = std::move(split.second);
        },
        opt.threads);

    // kernel part: bounded solution of etadot = -8 Hess eta - (kernel residual)/s
    std::vector<Eigen::Matrix4d> a(nf);
    parallel_for(
        static_cast<std::size_t>(nf),
        [&](std::size_t j) { a[j] = -kFlowMetricScale * f.hess_frame(cand.fine_n[j]); },
        opt.threads);
    std::vector<Eigen::Vector4d> w(nf);
    for (int j = 0; j < nf; ++j) w[j] = -frame_coords(rk[j]) / s;

    std::vector<Eigen::Vector4d> eta(nf), eta_dot(nf);
    int gauge = 0;
    for (int j = 1; j < nf; ++j)
        if (end_norm(cand.fine_velocity[j]) > end_norm(cand.fine_velocity[gauge])) gauge = j;
    if (end_norm(cand.fine_velocity[gauge]) < 1e-12) {
        // pinned at a critical point: the equilibrium correction is exact
        for (int j = 0; j < nf; ++j) {
            eta[j] = -a[j].fullPivLu().solve(w[j]);
            eta_dot[j].setZero();
        }
    } else {
        const Eigen::Matrix4d a_left = a[0];
        const Eigen::Vector4d eta_inf = -a_left.fullPivLu().solve(w[0]);
        const Eigen::Vector4d gdir = frame_coords(cand.fine_velocity[gauge]).normalized();
        const BoundedSolveResult sol =
            bounded_solution(cand.fine_times, a, w, a_left, eta_inf, gdir, gauge);
        eta = sol.eta;
        eta_dot = sol.eta_dot;
    }

    const std::vector<TorusField> delta_f = quasi_static_correction(rho, s, ht, opt.threads);
    rho.clear();

    // rebuild the track with the corrected base and graph
    EternalFlowCandidate out = cand;
    out.corrections = cand.corrections + 1;
    WhiteOptions wopt;
    wopt.grid_n = cand.fine_f[0].n();
    wopt.tol = opt.white_tol;
    for (int j = 0; j < nf; ++j) {
        const EndMatrix2 ek = from_frame_coords(eta[j]);
        const EndMatrix2 ekd = from_frame_coords(eta_dot[j]);
        const Eigen::Matrix4d e = exp_xi(ek);
        out.fine_n[j] = cand.fine_n[j] * e;
        out.fine_omega[j] =
            e.transpose() * cand.fine_omega[j] * e + dexp_left(xi(ek), xi(ekd));
        out.fine_velocity[j] = flow_velocity(f, out.fine_n[j], 1);
    }
    parallel_for(
        static_cast<std::size_t>(nf),
        [&](std::size_t j) {
            out.fine_f[j] =
                solve_white(u, CliffordPoint(out.fine_n[j]), s, wopt).f_perp + delta_f[j];
        },
        opt.threads);
    out.fine_fdot = fd6_fields(out.fine_f, ht);

    assemble_slices(out, f, stride);
    const int n_sl = static_cast<int>(out.slices.size());
    out.eta.resize(n_sl);
    out.eta_dot.resize(n_sl);
    for (int k = 0; k < n_sl; ++k) {
        out.eta[k] = from_frame_coords(eta[k * stride]);
        out.eta_dot[k] = from_frame_coords(eta_dot[k * stride]);
    }
    refresh_residuals(u, out, opt.threads);
    if (2.0 * out.residual_sup > cand.residual_sup)
        throw NoProgress("correct_ansatz: residual did not drop by 2x");
    return out;
}

std::vector<TorusField> quasi_static_correction(const std::vector<TorusField>& rho,
                                                double s, double ht, unsigned threads) {
    const int nf = static_cast<int>(rho.size());
    if (nf < 7) throw std::invalid_argument("quasi_static_correction: grid too short");
    const int ng = rho[0].n();
    std::vector<Eigen::MatrixXcd> spec(nf);
    parallel_for(
        static_cast<std::size_t>(nf),
        [&](std::size_t j) { spec[j] = rho[j].spectrum(); }, threads);

    // per theta-frequency row: slow-time derivative stacks, then the series
    std::vector<Eigen::MatrixXcd> dspec(nf, Eigen::MatrixXcd::Zero(ng, ng));
    parallel_for(
        static_cast<std::size_t>(ng),
        [&](std::size_t ai) {
            const int m = TorusField::signed_freq(static_cast<int>(ai), ng);
            std::vector<Eigen::RowVectorXcd> r0(nf), r1(nf), r2(nf), r3(nf);
            for (int j = 0; j < nf; ++j) r0[j] = spec[j].row(static_cast<int>(ai));
            for (int j = 0; j < nf; ++j) r1[j] = detail::deriv6(r0, j, ht);
            for (int j = 0; j < nf; ++j) r2[j] = detail::deriv6(r1, j, ht);
            for (int j = 0; j < nf; ++j) r3[j] = detail::deriv6(r2, j, ht);
            for (int b = 0; b < ng; ++b) {
                const int k = TorusField::signed_freq(b, ng);
                const int mu = m * m + k * k;
                if (mu == 2) continue;
                const double lam = 2.0 * (2.0 - mu);
                const double sl = s / lam;
                for (int j = 0; j < nf; ++j)
                    dspec[j](static_cast<int>(ai), b) =
                        (r0[j](b) + sl * (r1[j](b) + sl * (r2[j](b) + sl * r3[j](b)))) / lam;
            }
        },
        threads);
    spec.clear();

    std::vector<TorusField> out(nf);
    parallel_for(
        static_cast<std::size_t>(nf),
        [&](std::size_t j) {
            out[j] = TorusField::from_spectrum(dspec[j]);
            dspec[j].resize(0, 0);
        },
        threads);
    return out;
}

TorusField linear_mcf_evolve(const TorusField& f0, double t) {
    const auto split = kernel_project(f0);
    const double scale = std::max(1.0, f0.sup_norm());
    if (split.first.norm() > 1e-10 * scale)
        throw std::invalid_argument("linear_mcf_evolve: field has kernel content");
    Eigen::MatrixXcd c = f0.spectrum();
    const int n = f0.n();
    for (int a = 0; a < n; ++a) {
        const int m = TorusField::signed_freq(a, n);
        for (int b = 0; b < n; ++b) {
            const int k = TorusField::signed_freq(b, n);
            c(a, b) *= std::exp(2.0 * (2.0 - m * m - k * k) * t);
        }
    }
    return TorusField::from_spectrum(c);
}

TorusField graph_mcf_velocity(const TorusField& f, const AmbientFunction& u, double s) {
    TorusField h = mean_curvature(f, u, s);
    const TorusField fth = f.deriv_theta();
    const TorusField fph = f.deriv_phi();
    const PolyEvaluator pu(u);
    const int n = f.n();
    constexpr double quarter_pi = std::numbers::pi / 4.0;
    TorusField out(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const FermiPoint p{f.theta(i), f.phi(j), f(i, j)};
            const double a = std::sin(quarter_pi + p.r);
            const double b = std::sin(quarter_pi - p.r);
            const double dth = fth(i, j), dph = fph(i, j);
            const double q = 1.0 + dth * dth / (a * a) + dph * dph / (b * b);
            const double c = (s == 0.0 || pu.empty()) ? 0.0 : s * pu(fermi_embed(p));
            out(i, j) = -std::exp(-c) * std::sqrt(q) * h(i, j);
        }
    }
    return out;
}

TorusField graph_mcf_evolve(const TorusField& f0, const AmbientFunction& u, double s,
                            double t_final, double dt) {
    if (t_final <= 0.0 || dt <= 0.0)
        throw std::invalid_argument("graph_mcf_evolve: need positive times");
    const int steps = std::max(1, static_cast<int>(std::llround(t_final / dt)));
    const double h = t_final / steps;
    const int n = f0.n();
    Eigen::MatrixXd fac(n, n);
    for (int a = 0; a < n; ++a) {
        const int m = TorusField::signed_freq(a, n);
        for (int b = 0; b < n; ++b) {
            const int k = TorusField::signed_freq(b, n);
            fac(a, b) = 1.0 / (1.0 - h * 2.0 * (2.0 - m * m - k * k));
        }
    }
    TorusField f = f0;
    for (int step = 0; step < steps; ++step) {
        const TorusField vel = graph_mcf_velocity(f, u, s);
        const TorusField lin = 2.0 * f.laplacian() + 4.0 * f;
        const TorusField expl = vel - lin;
        Eigen::MatrixXcd c = (f + h * expl).spectrum();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) c(a, b) *= fac(a, b);
        f = TorusField::from_spectrum(c);
    }
    return f;
}

void write_candidate(const EternalFlowCandidate& cand, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json man;
    man["s"] = cand.s;
    man["corrections"] = cand.corrections;
    man["residual_sup"] = cand.residual_sup;
    man["residual_l2"] = cand.residual_l2;
    auto times = nlohmann::json::array();
    auto bases = nlohmann::json::array();
    auto residuals = nlohmann::json::array();
    for (std::size_t k = 0; k < cand.slices.size(); ++k) {
        const FlowSlice& sl = cand.slices[k];
        times.push_back(sl.t);
        auto row = nlohmann::json::array();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) row.push_back(sl.n(i, j));
        bases.push_back(std::move(row));
        residuals.push_back(k < cand.slice_residual.size() ? cand.slice_residual[k] : 0.0);

        char name[32];
        std::snprintf(name, sizeof name, "slice_%04zu.csv", k);
        write_file(dir / name, sl.f.to_csv());
    }
    man["times"] = std::move(times);
    man["base_matrices"] = std::move(bases);
    man["residuals"] = std::move(residuals);
    write_file(dir / "manifest.json", man.dump(2) + "\n");
}

EternalFlowCandidate read_candidate_summary(const std::filesystem::path& dir) {
    const nlohmann::json man = nlohmann::json::parse(read_file(dir / "manifest.json"));
    EternalFlowCandidate cand;
    cand.s = man.at("s").get<double>();
    cand.corrections = man.value("corrections", 0);
    cand.residual_sup = man.value("residual_sup", 0.0);
    cand.residual_l2 = man.value("residual_l2", 0.0);
    const auto& times = man.at("times");
    const auto& bases = man.at("base_matrices");
    const auto& residuals = man.at("residuals");
    cand.slices.resize(times.size());
    cand.slice_residual.resize(times.size());
    for (std::size_t k = 0; k < cand.slices.size(); ++k) {
        FlowSlice& sl = cand.slices[k];
        sl.t = times[k].get<double>();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) sl.n(i, j) = bases[k][4 * i + j].get<double>();
        cand.slice_residual[k] = residuals[k].get<double>();
        char name[32];
        std::snprintf(name, sizeof name, "slice_%04zu.csv", k);
        sl.f = TorusField::from_csv(read_file(dir / name));
        sl.fdot = TorusField(sl.f.n());
    }
    return cand;
}

} // namespace cliffmorse
