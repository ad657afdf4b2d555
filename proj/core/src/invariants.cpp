#include "cliffmorse/invariants.hpp"

#include "cliffmorse/ambient.hpp"
#include "cliffmorse/area_functional.hpp"
#include "cliffmorse/clifford.hpp"
#include "cliffmorse/curves.hpp"
#include "cliffmorse/dichotomy.hpp"
#include "cliffmorse/end2.hpp"
#include "cliffmorse/fermi.hpp"
#include "cliffmorse/flow.hpp"
#include "cliffmorse/kernel.hpp"
#include "cliffmorse/mcf.hpp"
#include "cliffmorse/morse.hpp"
#include "cliffmorse/parallel.hpp"
#include "cliffmorse/rng.hpp"
#include "cliffmorse/torus_field.hpp"
#include "cliffmorse/white.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string_view>
#include <utility>

namespace cliffmorse {

namespace {

constexpr double kPi = std::numbers::pi;

struct Panel {
    std::vector<CheckResult> out;
    double scale = 1.0;
    std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

    void add(const char* suite, const char* name, double value, double tol,
             std::string details = {}) {
        const auto now = std::chrono::steady_clock::now();
        CheckResult r;
        r.suite = suite;
        r.name = name;
        r.value = value;
        r.tolerance = tol * scale;
        r.pass = std::isfinite(value) && value <= r.tolerance;
        r.seconds = std::chrono::duration<double>(now - mark).count();
        r.details = std::move(details);
        out.push_back(std::move(r));
        mark = now;
    }
};

bool suite_enabled(const std::string& filter, std::string_view name) {
    if (filter.empty()) return true;
    const std::string_view hay(filter);
    std::size_t pos = 0;
    while (pos <= hay.size()) {
        std::size_t e = hay.find(',', pos);
        if (e == std::string_view::npos) e = hay.size();
        if (hay.substr(pos, e - pos) == name) return true;
        pos = e + 1;
    }
    return false;
}

double wrap_pi(double d) {
    while (d > kPi) d -= 2.0 * kPi;
    while (d < -kPi) d += 2.0 * kPi;
    return d;
}

Eigen::Vector3d as_vec(const FermiPoint& p) { return {p.theta, p.phi, p.r}; }

FermiPoint bump(FermiPoint p, int c, double d) {
    if (c == 0) p.theta += d;
    else if (c == 1) p.phi += d;
    else p.r += d;
    return p;
}

Eigen::Vector3d chart_diff(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return {wrap_pi(a(0) - b(0)), wrap_pi(a(1) - b(1)), a(2) - b(2)};
}

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

FermiPoint random_point(Rng& rng) {
    return {rng.uniform(0.0, 2.0 * kPi), rng.uniform(0.0, 2.0 * kPi),
            rng.uniform(-0.5, 0.5)};
}

// smooth test field from a handful of low harmonics
TorusField harmonic_sample(int n, Rng& rng, double amp) {
    TorusField f(n);
    struct Mode {
        int m, k;
        double c, s;
    };
    std::vector<Mode> modes;
    for (int m = 0; m <= 3; ++m)
        for (int k = -3; k <= 3; ++k) {
            if (m == 0 && k < 0) continue;
            modes.push_back({m, k, amp * rng.gaussian(), amp * rng.gaussian()});
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            for (const Mode& md : modes) {
                const double a = md.m * f.theta(i) + md.k * f.phi(j);
                v += md.c * std::cos(a) + md.s * std::sin(a);
            }
            f(i, j) = v;
        }
    return f;
}

double killing_formula_error(const Eigen::Matrix4d& omega, const FermiPoint& p) {
    const double h = 1e-4;
    const Eigen::Vector3d vp =
        as_vec(fermi_chart_inverse(so4_exp(h * omega) * fermi_embed(p)));
    const Eigen::Vector3d vm =
        as_vec(fermi_chart_inverse(so4_exp(-h * omega) * fermi_embed(p)));
    const Eigen::Vector3d fd = chart_diff(vp, vm) / (2.0 * h);
    return (fd - killing_field_so4(omega, p)).lpNorm<Eigen::Infinity>();
}

double killing_isometry_error(const EndMatrix2& a, const FermiPoint& p) {
    const double h = 1e-4, d = 1e-5;
    const Eigen::Matrix4d rot = so4_exp(h * xi(a));
    const auto flow = [&](const FermiPoint& q) {
        return fermi_chart_inverse(rot * fermi_embed(q));
    };
    Eigen::Matrix3d jac;
    for (int c = 0; c < 3; ++c)
        jac.col(c) =
            chart_diff(as_vec(flow(bump(p, c, d))), as_vec(flow(bump(p, c, -d)))) /
            (2.0 * d);
    const Eigen::Matrix3d pulled = jac.transpose() * fermi_metric(flow(p)) * jac;
    return (pulled - fermi_metric(p)).cwiseAbs().maxCoeff() / h;
}

std::string count_note(std::size_t n, const char* what) {
    std::ostringstream os;
    os << n << " " << what;
    return os.str();
}

} // namespace

std::vector<CheckResult> run_invariant_checks(const CheckOptions& opt) {
    Panel panel;
    panel.scale = opt.tol_scale;
    const int n = opt.grid_n;
    const auto want = [&](std::string_view s) { return suite_enabled(opt.suites, s); };

    // ---- kernel fields and quadrature ----
    if (want("torus-fields")) {
    {
        double worst = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                KernelCoords ka = KernelCoords::Zero(), kb = KernelCoords::Zero();
                ka(a / 2, a % 2) = 1.0;
                kb(b / 2, b % 2) = 1.0;
                const TorusField pa = kernel_field(ka, n), pb = kernel_field(kb, n);
                const double got = pa.cwise_mul(pb).quadrature();
                const double want = kPi * kPi * (ka.transpose() * kb).trace();
                worst = std::max(worst, std::abs(got - want));
            }
        panel.add("torus-fields", "psi-inner-products", worst, 1e-10);
    }
    {
        Rng rng(opt.seed * 1000 + 1);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const TorusField g = kernel_field(random_end(rng), n);
            worst = std::max(worst, (g.laplacian() + 2.0 * g).sup_norm());
        }
        panel.add("torus-fields", "psi-harmonic", worst, 1e-10);
    }
    {
        Rng rng(opt.seed * 1000 + 2);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const KernelCoords a = random_end(rng);
            const auto split = kernel_project(kernel_field(a, n));
            worst = std::max(worst, (split.first - a).cwiseAbs().maxCoeff());
            worst = std::max(worst, split.second.sup_norm());
        }
        panel.add("torus-fields", "kernel-roundtrip", worst, 1e-12);
    }
    {
        Rng rng(opt.seed * 1000 + 3);
        TorusField f(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) f(i, j) = rng.gaussian();
        const double quad = f.cwise_mul(f).quadrature();
        const double spec = 4.0 * kPi * kPi * f.spectrum().squaredNorm();
        panel.add("torus-fields", "parseval", std::abs(quad - spec) / std::max(1.0, quad),
                  1e-10);
    }
    }

    // ---- chart geometry ----
    if (want("sphere-geometry")) {
    {
        Rng rng(opt.seed * 1000 + 4);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k)
            worst = std::max(worst, killing_formula_error(random_so4(rng), random_point(rng)));
        panel.add("sphere-geometry", "killing-chart-formula", worst, 1e-6);
    }
    {
        Rng rng(opt.seed * 1000 + 5);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k)
            worst = std::max(worst, killing_isometry_error(random_end(rng), random_point(rng)));
        panel.add("sphere-geometry", "killing-isometry", worst, 1e-6);
    }
    {
        Rng rng(opt.seed * 1000 + 6);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const FermiPoint p = random_point(rng);
            Eigen::Matrix<double, 4, 3> t;
            t.col(0) = fermi_tangent_theta(p);
            t.col(1) = fermi_tangent_phi(p);
            t.col(2) = fermi_tangent_r(p);
            worst = std::max(
                worst,
                (t.transpose() * t - fermi_metric(p)).cwiseAbs().maxCoeff());
        }
        panel.add("sphere-geometry", "fermi-embed-isometric", worst, 1e-9);
    }
    {
        Rng rng(opt.seed * 1000 + 7);
        const TorusField f = harmonic_sample(n, rng, 0.02);
        const TorusField fs = TorusField(Eigen::MatrixXd(-f.values().transpose()));
        const AmbientFunction none;
        const Eigen::MatrixXd hs = mean_curvature(fs, none, 0.0).values();
        const Eigen::MatrixXd h = mean_curvature(f, none, 0.0).values();
        panel.add("sphere-geometry", "chart-swap-symmetry",
                  (hs + h.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    }
    {
        const double a0 = graph_area(TorusField(n), AmbientFunction(), 0.0);
        panel.add("sphere-geometry", "flat-graph-area", std::abs(a0 - 2.0 * kPi * kPi),
                  1e-10);
    }
    }

    // ---- symmetric-space identities ----
    if (want("clifford-space")) {
    {
        Rng rng(opt.seed * 1000 + 8);
        double iso = 0.0, det = 0.0;
        for (int k = 0; k < 1000; ++k) {
            EndMatrix2 a = random_end(rng);
            a /= a.norm();
            const double np = theta_plus(a).squaredNorm();
            const double nm = theta_minus(a).squaredNorm();
            iso = std::max(iso, std::abs(np + nm - 2.0 * kPi * kPi * a.squaredNorm()));
            det = std::max(det,
                           std::abs(np - nm - 4.0 * kPi * kPi * a.determinant()));
        }
        panel.add("clifford-space", "theta-isometry", iso, 1e-12);
        panel.add("clifford-space", "theta-det-identity", det, 1e-12);
    }
    {
        Rng rng(opt.seed * 1000 + 9);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            Eigen::Vector2d u{rng.gaussian(), rng.gaussian()};
            Eigen::Vector2d v{rng.gaussian(), rng.gaussian()};
            EndMatrix2 a = u * v.transpose();
            a /= a.norm();
            worst = std::max(worst,
                             std::abs(theta_plus(a).norm() - theta_minus(a).norm()));
        }
        panel.add("clifford-space", "theta-rank-one-balance", worst, 1e-12);
    }
    {
        Rng rng(opt.seed * 1000 + 10);
        const CliffordPoint base;
        double worst = 0.0;
        const double t = 1e-2;
        for (int k = 0; k < 50; ++k) {
            const EndMatrix2 a = random_end(rng);
            const double d = cl_distance(base, exp_map(base, t * a));
            worst = std::max(worst, std::abs(d / (t * end_norm(a)) - 1.0));
        }
        panel.add("clifford-space", "exp-ray-isometry", worst, 1e-2);
    }
    {
        Rng rng(opt.seed * 1000 + 11);
        double orbit = 0.0;
        for (int k = 0; k < 20; ++k) {
            const Eigen::Matrix4d m = random_rotation(rng);
            const CliffordPoint p(m);
            const double al = rng.uniform(0.0, 2.0 * kPi);
            const double be = rng.uniform(0.0, 2.0 * kPi);
            orbit = std::max(orbit,
                             cl_distance(p, CliffordPoint(m * stab_rotation(al, be))));
            orbit = std::max(
                orbit,
                cl_distance(p, CliffordPoint(m * stab_swap() * stab_rotation(al, be))));
        }
        // acos near 1 turns roundoff into ~sqrt(eps), so 1e-6 is the real floor
        panel.add("clifford-space", "invariant-stabiliser", orbit, 1e-6);

        int collisions = 0;
        double min_dist = std::numeric_limits<double>::infinity();
        std::vector<CliffordPoint> pts;
        for (int k = 0; k < 200; ++k) pts.emplace_back(random_rotation(rng));
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                const double d = cl_distance(pts[i], pts[j]);
                min_dist = std::min(min_dist, d);
                if (d < 1e-6) ++collisions;
            }
        std::ostringstream os;
        os << "min pairwise distance " << min_dist;
        panel.add("clifford-space", "invariant-separates", collisions, 0.5, os.str());
    }
    {
        Rng rng(opt.seed * 1000 + 12);
        const EndMatrix2 a = random_end(rng), b = random_end(rng);
        const auto err = [&](double t) {
            const Eigen::Matrix4d m = so4_exp(t * xi(a) + 0.5 * t * t * xi(b));
            const TorusField got = graph_of_torus(m, n);
            return (got - curve_expansion(a, b, t, n)).sup_norm();
        };
        const double t = 1e-2;
        const double ratio = err(t) / err(t / 2.0);
        std::ostringstream os;
        os << "halving ratio " << ratio;
        panel.add("clifford-space", "curve-expansion-order", std::abs(ratio - 8.0), 1.0,
                  os.str());
    }
    }

    // ---- the area-derivative functional ----
    // default quadrature: exact for these trigonometric-polynomial integrands
    const AmbientFunction u = AmbientFunction::random(opt.seed, opt.degree);
    const AreaFunctional func(u);

    std::optional<CriticalSet> cs_store;
    const auto critical = [&]() -> const CriticalSet& {
        if (!cs_store) {
            SearchOptions sopt;
            sopt.threads = opt.threads;
            cs_store = find_critical_points(func, sopt);
        }
        return *cs_store;
    };
    ComplexOptions copt;
    copt.threads = opt.threads;
    std::optional<MorseComplexData> cx_store;
    const auto the_complex = [&]() -> const MorseComplexData& {
        if (!cx_store) cx_store = build_complex(func, critical(), copt);
        return *cx_store;
    };
    std::optional<std::vector<ConnectingOrbit>> orb_store;
    const auto the_orbits = [&]() -> const std::vector<ConnectingOrbit>& {
        if (!orb_store) orb_store = connecting_orbits(func, critical(), the_complex(), copt);
        return *orb_store;
    };

    if (want("area-functional")) {
    {
        Rng rng(opt.seed * 1000 + 13);
        double worst = 0.0;
        const double h = 1e-3;
        for (int k = 0; k < 20; ++k) {
            const Eigen::Matrix4d m = random_rotation(rng);
            const Eigen::Vector4d g = func.grad_frame(m);
            Eigen::Vector4d fd;
            for (int c = 0; c < 4; ++c) {
                const Eigen::Vector4d e = Eigen::Vector4d::Unit(c);
                const auto at = [&](double t) {
                    return func.value(m * exp_xi(from_frame_coords(t * e)));
                };
                const double d1 = (at(h) - at(-h)) / (2.0 * h);
                const double d2 = (at(h / 2.0) - at(-h / 2.0)) / h;
                fd(c) = (4.0 * d2 - d1) / 3.0;
            }
            worst = std::max(worst, (g - fd).norm() / std::max(1e-12, fd.norm()));
        }
        panel.add("area-functional", "gradient-fd", worst, 1e-6);
    }

    {
        const CriticalSet& cs = critical();
        double worst = 0.0;
        for (const CriticalPoint& p : cs.points) worst = std::max(worst, p.grad_norm);
        std::ostringstream os;
        os << cs.points.size() << " points, min |eig| " << cs.min_abs_eigenvalue;
        panel.add("area-functional", "critical-grad-norm", worst, 1e-10, os.str());
        panel.add("area-functional", "morse-nondegenerate", cs.degenerate ? 1.0 : 0.0, 0.5,
                  os.str());
        panel.add("area-functional", "census-counts", cs.counts_ok ? 0.0 : 1.0, 0.5,
                  count_note(cs.rounds, "rounds"));
    }
    {
        Rng rng(opt.seed * 1000 + 14);
        const CriticalSet& cs = critical();
        const Eigen::Matrix4d r = random_rotation(rng);
        const AreaFunctional func_r(u.compose_linear(r));
        SearchOptions sopt;
        sopt.threads = opt.threads;
        const CriticalSet cs_r = find_critical_points(func_r, sopt);
        double worst = 0.0;
        if (cs_r.points.size() != cs.points.size()) {
            worst = 1.0;
        } else {
            for (const CriticalPoint& q : cs_r.points) {
                double best = std::numeric_limits<double>::infinity();
                int best_index = -1;
                for (const CriticalPoint& p : cs.points) {
                    const double d = cl_distance(
                        q.torus, CliffordPoint(r.transpose() * p.torus.matrix()));
                    if (d < best) {
                        best = d;
                        best_index = p.index;
                    }
                }
                worst = std::max(worst, best);
                if (best_index != q.index) worst = std::max(worst, 1.0);
            }
        }
        panel.add("area-functional", "equivariance", worst, 1e-6,
                  count_note(cs_r.points.size(), "rotated critical points"));
    }
    {
        const CriticalSet& cs = critical();
        SearchOptions alt;
        alt.starts_per_sphere = 27;
        alt.threads = opt.threads;
        const CriticalSet cs2 = find_critical_points(func, alt);
        double worst = 0.0;
        if (cs2.points.size() != cs.points.size()) {
            worst = 1.0;
        } else {
            for (const CriticalPoint& q : cs2.points) {
                double best = std::numeric_limits<double>::infinity();
                const CriticalPoint* match = nullptr;
                for (const CriticalPoint& p : cs.points) {
                    const double d = cl_distance(q.torus, p.torus);
                    if (d < best) {
                        best = d;
                        match = &p;
                    }
                }
                if (!match || best > 1e-6) worst = std::max(worst, 1.0);
                else
                    worst = std::max(worst, (q.eigenvalues - match->eigenvalues)
                                                .cwiseAbs()
                                                .maxCoeff());
            }
        }
        panel.add("area-functional", "hessian-start-stability", worst, 1e-6);
    }
    }

    // ---- gradient flow, complex, transversality ----
    if (want("morse-dynamics")) {
    {
        Rng rng(opt.seed * 1000 + 15);
        const FlowPath path =
            integrate_flow(func, CliffordPoint(random_rotation(rng)), 1, critical().points);
        double peak = 0.0;
        for (const FlowSample& smp : path.samples)
            peak = std::max(peak, smp.grad_norm * smp.grad_norm);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < path.samples.size(); ++i) {
            const FlowSample& lo = path.samples[i - 1];
            const FlowSample& mid = path.samples[i];
            const FlowSample& hi = path.samples[i + 1];
            const double g2 = mid.grad_norm * mid.grad_norm;
            if (g2 < 1e-2 * peak) continue;
            const double lhs = (hi.value - lo.value) / (hi.t - lo.t);
            const double rhs = -kFlowMetricScale * g2;
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
        }
        panel.add("morse-dynamics", "flow-energy-identity", worst, 5e-2,
                  count_note(path.samples.size(), "samples"));
    }

    {
        const MorseComplexData& complex = the_complex();
        panel.add("morse-dynamics", "boundary-squared",
                  complex.d_squared_zero ? 0.0 : 1.0, 0.5,
                  count_note(complex.unresolved, "unresolved shots"));
        const std::array<int, 5> target{1, 2, 3, 2, 1};
        double dev = std::abs(complex.euler - 1);
        for (int k = 0; k < 5; ++k) dev += std::abs(complex.betti[k] - target[k]);
        std::ostringstream os;
        os << "betti";
        for (int k = 0; k < 5; ++k) os << " " << complex.betti[k];
        os << ", euler " << complex.euler;
        panel.add("morse-dynamics", "betti-numbers", dev, 0.5, os.str());
    }

    {
        const CriticalSet& cs = critical();
        const std::vector<ConnectingOrbit>& orbits = the_orbits();
        std::vector<MorseSmaleReport> reports(orbits.size());
        parallel_for(
            orbits.size(),
            [&](std::size_t i) { reports[i] = morse_smale_check(func, orbits[i], cs); },
            opt.threads);
        double dim_dev = 0.0, ortho = 0.0;
        for (const MorseSmaleReport& r : reports) {
            dim_dev = std::max(dim_dev,
                               static_cast<double>(std::abs(r.bounded_dim - r.expected_dim)));
            ortho = std::max(ortho, r.adjoint_orthogonality);
        }
        panel.add("morse-dynamics", "orbit-bounded-dimension", dim_dev, 0.5,
                  count_note(orbits.size(), "orbits"));
        // orbits start epsilon off the saddle, so the conserved pairing keeps
        // an O(epsilon) seed overlap; the tolerance sits well above that floor
        panel.add("morse-dynamics", "adjoint-orthogonality", ortho, 1e-3);

        if (!orbits.empty()) {
            MorseSmaleOptions fine;
            fine.grid_h = 0.005;
            const MorseSmaleReport r2 = morse_smale_check(func, orbits[0], cs, fine);
            panel.add("morse-dynamics", "subspace-rank-stability",
                      std::abs(r2.bounded_dim - reports[0].bounded_dim), 0.5);
        }
    }
    }

    // ---- graph solver and flow residuals ----
    if (want("mcf-white")) {
    {
        Rng rng(opt.seed * 1000 + 16);
        const CliffordPoint m(random_rotation(rng));
        WhiteOptions wopt;
        wopt.grid_n = n;
        const WhiteSolution at0 = solve_white(u, m, 0.0, wopt);
        panel.add("mcf-white", "white-zero-s",
                  at0.f_perp.sup_norm() + at0.h_k.cwiseAbs().maxCoeff(), 1e-14);

        const double s = 1e-3;
        const WhiteSolution sol = solve_white(u, m, s, wopt);
        panel.add("mcf-white", "white-kernel-free",
                  kernel_project(sol.f_perp).first.cwiseAbs().maxCoeff(), 1e-12);

        const Eigen::Matrix4d r = random_rotation(rng);
        const WhiteSolution left_a = solve_white(u.compose_linear(r), m, s, wopt);
        const WhiteSolution left_b =
            solve_white(u, CliffordPoint(r * m.matrix()), s, wopt);
        double worst = (left_a.f_perp - left_b.f_perp).sup_norm();

        const int shift_i = 5, shift_j = 11;
        const double al = 2.0 * kPi * shift_i / n, be = 2.0 * kPi * shift_j / n;
        const WhiteSolution right =
            solve_white(u, CliffordPoint(m.matrix() * stab_rotation(al, be)), s, wopt);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst,
                                 std::abs(right.f_perp(i, j) -
                                          sol.f_perp((i + shift_i) % n, (j + shift_j) % n)));

        const WhiteSolution swapped =
            solve_white(u, CliffordPoint(m.matrix() * stab_swap()), s, wopt);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst,
                                 std::abs(swapped.f_perp(i, j) + sol.f_perp(j, i)));
        panel.add("mcf-white", "white-invariance", worst, 1e-8);

        AmbientFunction nu = u;
        nu *= -1.0;
        const WhiteSolution flip = solve_white(nu, m, -s, wopt);
        panel.add("mcf-white", "conformal-flip-exact", std::abs(flip.area - sol.area),
                  1e-10);

        const double a0 = solve_white(u, m, 0.0, wopt).area;
        const auto even = [&](double sv) {
            return solve_white(u, m, sv, wopt).area +
                   solve_white(nu, m, sv, wopt).area - 2.0 * a0;
        };
        const double ratio = even(2.0 * s) / even(s);
        std::ostringstream os;
        os << "halving ratio " << ratio;
        panel.add("mcf-white", "conformal-even-part-order", std::abs(ratio - 4.0), 1.0,
                  os.str());
    }
    {
        const int gn = 16;
        TorusField f0(gn);
        const double eps = 1e-3;
        for (int i = 0; i < gn; ++i)
            for (int j = 0; j < gn; ++j) f0(i, j) = eps * std::cos(2.0 * f0.theta(i));
        const double t = 0.25;
        const TorusField ft = graph_mcf_evolve(f0, AmbientFunction(), 0.0, t, 2e-4);
        const double rate = std::log(ft.sup_norm() / f0.sup_norm()) / t;
        std::ostringstream os;
        os << "observed rate " << rate;
        panel.add("mcf-white", "graph-decay-rate", std::abs(rate + 4.0) / 4.0, 5e-2,
                  os.str());

        const TorusField lin = linear_mcf_evolve(f0, t);
        panel.add("mcf-white", "linear-evolve-oracle",
                  std::abs(lin.sup_norm() - eps * std::exp(-4.0 * t)), 1e-12);
    }
    {
        const CriticalSet& cs = critical();
        const ConnectingOrbit* pick = nullptr;
        for (const ConnectingOrbit& orb : the_orbits())
            if (cs.points[orb.from].index == 1 && cs.points[orb.to].index == 0) {
                pick = &orb;
                break;
            }
        if (!pick) {
            panel.add("mcf-white", "mcf-residual-order",
                      std::numeric_limits<double>::infinity(), 0.5,
                      "no index 1 -> 0 orbit found");
        } else {
            AnsatzOptions aopt;
            aopt.n_slices = opt.n_slices;
            aopt.grid_n = n;
            aopt.threads = opt.threads;
            double res[3];
            const double svals[3] = {2e-2, 1e-2, 5e-3};
            for (int k = 0; k < 3; ++k)
                res[k] = build_ansatz_flow(u, pick->path, svals[k], aopt).residual_sup;
            const double r1 = res[0] / res[1], r2 = res[1] / res[2];
            std::ostringstream os;
            os << "ratios " << r1 << " " << r2;
            panel.add("mcf-white", "mcf-residual-order",
                      std::max(std::abs(r1 - 4.0), std::abs(r2 - 4.0)), 0.5, os.str());
        }
    }
    }

    // ---- serialization ----
    if (want("cli")) {
    {
        Rng rng(opt.seed * 1000 + 17);
        TorusField f(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) f(i, j) = rng.gaussian();
        const TorusField back = TorusField::from_csv(f.to_csv());
        double worst = (back.values() - f.values()).cwiseAbs().maxCoeff();
        const TorusField jback = TorusField::from_json(f.to_json());
        worst = std::max(worst, (jback.values() - f.values()).cwiseAbs().maxCoeff());
        const AmbientFunction uu = AmbientFunction::from_json(u.to_json());
        Rng probe(opt.seed * 1000 + 18);
        for (int k = 0; k < 10; ++k) {
            Eigen::Vector4d x{probe.gaussian(), probe.gaussian(), probe.gaussian(),
                              probe.gaussian()};
            x.normalize();
            worst = std::max(worst, std::abs(uu.eval(x) - u.eval(x)));
        }
        panel.add("cli", "serialization-roundtrip", worst, 1e-15);
    }
    }

    return panel.out;
}

} // namespace cliffmorse
