#include "cliffmorse/area_functional.hpp"

#include "cliffmorse/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace cliffmorse {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / (std::numbers::sqrt2 * kPi);

int pick_quad_n(const AmbientFunction& u, int requested) {
    if (requested > 0) {
        if (requested < 4) throw std::invalid_argument("AreaFunctional: quad_n too small");
        return requested + (requested % 2);
    }
    // integrands are trigonometric polynomials of degree <= deg(u) + 1 in each
    // angle; the trapezoid rule is exact once n exceeds that
    int n = std::max(8, u.degree() + 4);
    return n + (n % 2);
}

} // namespace

AreaFunctional::AreaFunctional(AmbientFunction u, int quad_n)
    : u_(std::move(u)),
      pu_(u_),
      px_(u_.partial(0)),
      py_(u_.partial(1)),
      pz_(u_.partial(2)),
      pw_(u_.partial(3)),
      nq_(pick_quad_n(u_, quad_n)) {
    const double h = 2.0 * kPi / nq_;
    weight_ = 0.5 * h * h;
    const double is2 = 1.0 / std::numbers::sqrt2;
    x0_.resize(static_cast<size_t>(nq_) * nq_);
    nu0_.resize(x0_.size());
    psi_.resize(x0_.size());
    for (int i = 0; i < nq_; ++i) {
        const double ct = std::cos(h * i), st = std::sin(h * i);
        for (int j = 0; j < nq_; ++j) {
            const double cp = std::cos(h * j), sp = std::sin(h * j);
            const size_t k = static_cast<size_t>(i) * nq_ + j;
            x0_[k] = Eigen::Vector4d(is2 * ct, is2 * st, is2 * cp, is2 * sp);
            nu0_[k] = Eigen::Vector4d(is2 * ct, is2 * st, -is2 * cp, -is2 * sp);
            psi_[k] = kInvSqrt2Pi * Eigen::Vector4d(ct * cp, ct * sp, st * cp, st * sp);
        }
    }
}

double AreaFunctional::value(const Eigen::Matrix4d& m) const {
    double acc = 0.0;
    for (const auto& x : x0_) acc += pu_(m * x);
    return acc * weight_;
}

Eigen::Vector4d AreaFunctional::grad_frame(const Eigen::Matrix4d& m) const {
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    for (size_t k = 0; k < x0_.size(); ++k) {
        const Eigen::Vector4d y = m * x0_[k];
        const Eigen::Vector4d grad(px_(y), py_(y), pz_(y), pw_(y));
        acc += (grad.dot(m * nu0_[k])) * psi_[k];
    }
    return acc * weight_;
}

Eigen::Matrix4d AreaFunctional::hess_frame(const Eigen::Matrix4d& m) const {
    const double v0 = value(m);
    const double h = 1e-3;
    const auto second = [&](const Eigen::Vector4d& dir) {
        const auto d2 = [&](double step) {
            const Eigen::Matrix4d g = exp_xi(from_frame_coords(step * dir));
            return (value(m * g) - 2.0 * v0 + value(m * g.transpose())) / (step * step);
        };
        // exp(-x) of the block form is the transpose, reusing one exponential;
        // Richardson halving lifts the stencil to fourth order
        return (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
    };
    Eigen::Matrix4d out;
    for (int a = 0; a < 4; ++a)
        out(a, a) = second(Eigen::Vector4d::Unit(a));
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            const double plus = second(Eigen::Vector4d::Unit(a) + Eigen::Vector4d::Unit(b));
            const double minus = second(Eigen::Vector4d::Unit(a) - Eigen::Vector4d::Unit(b));
            out(a, b) = out(b, a) = 0.25 * (plus - minus);
        }
    return out;
}

double eval_I(const AmbientFunction& u, const CliffordPoint& m) {
    return AreaFunctional(u).value(m.matrix());
}

EndMatrix2 grad_I(const AmbientFunction& u, const CliffordPoint& m) {
    return from_frame_coords(AreaFunctional(u).grad_frame(m.matrix()));
}

Eigen::Matrix4d hess_I(const AmbientFunction& u, const CliffordPoint& m) {
    return AreaFunctional(u).hess_frame(m.matrix());
}

namespace {

std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(n);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        pts.emplace_back(r * std::cos(golden * k), r * std::sin(golden * k), z);
    }
    return pts;
}

struct NewtonResult {
    Eigen::Matrix4d m;
    double grad_norm;
    double value;
};

std::optional<NewtonResult> newton_polish(const AreaFunctional& f, Eigen::Matrix4d m,
                                          const SearchOptions& opt) {
    int bad = 0;
    for (int iter = 0; iter < opt.max_newton; ++iter) {
        const Eigen::Vector4d g = f.grad_frame(m);
        const double gn = g.norm();
        if (!std::isfinite(gn)) return std::nullopt;
        if (gn <= opt.tol_crit)
            return NewtonResult{m, gn, f.value(m)};
        const Eigen::Matrix4d hess = f.hess_frame(m);
        Eigen::Vector4d step = hess.ldlt().solve(-g);
        if (!step.allFinite() || step.norm() > 1e3)
            step = -g; // Hessian effectively singular here; fall back on descent
        if (step.norm() > opt.max_step) step *= opt.max_step / step.norm();
        bool accepted = false;
        double lam = 1.0;
        for (int t = 0; t < 11; ++t, lam *= 0.5) {
            const Eigen::Matrix4d cand = m * exp_xi(from_frame_coords(lam * step));
            if (f.grad_frame(cand).norm() <= (1.0 - 0.1 * lam) * gn) {
                m = cand;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // full step anyway; Newton may pass through a gradient-norm ridge
            m = m * exp_xi(from_frame_coords(step));
            if (++bad > 15) return std::nullopt;
        } else {
            bad = 0;
        }
    }
    return std::nullopt;
}

bool invariant_less(const CliffordPoint& a, const CliffordPoint& b) {
    for (int i = 0; i < 3; ++i) {
        if (a.inv_p()(i) != b.inv_p()(i)) return a.inv_p()(i) < b.inv_p()(i);
    }
    for (int i = 0; i < 3; ++i) {
        if (a.inv_q()(i) != b.inv_q()(i)) return a.inv_q()(i) < b.inv_q()(i);
    }
    return false;
}

// The torus family is a product of two projective planes (a sign-ambiguous
// invariant vector per factor), so a complete Morse census has alternating sum
// 1 and dominates the mod-2 Betti numbers 1,2,3,2,1. A miss here usually means
// a multistart round skipped a small Newton basin.
bool counts_admissible(const std::vector<CriticalPoint>& pts) {
    static constexpr int betti[5] = {1, 2, 3, 2, 1};
    int c[5] = {0, 0, 0, 0, 0};
    for (const auto& p : pts) ++c[p.index];
    if (c[0] - c[1] + c[2] - c[3] + c[4] != 1) return false;
    for (int i = 0; i < 5; ++i) {
        if (c[i] < betti[i]) return false;
    }
    return true;
}

} // namespace

CriticalSet find_critical_points(const AreaFunctional& f, const SearchOptions& opt) {
    CriticalSet out;
    std::vector<CriticalPoint> found;

    const auto run_round = [&](int density) {
        const auto sphere = fibonacci_sphere(density);
        const int n_starts = density * density;
        std::vector<std::optional<NewtonResult>> results(n_starts);
        parallel_for(static_cast<size_t>(n_starts), [&](size_t k) {
            const auto& p = sphere[k / density];
            const auto& q = sphere[k % density];
            results[k] = newton_polish(f, matrix_from_invariant(p, q), opt);
        }, opt.threads);

        for (const auto& r : results) {
            if (!r) continue;
            ++out.starts_converged;
            CliffordPoint pt(r->m);
            bool dup = false;
            for (auto& existing : found) {
                if (cl_distance(existing.torus, pt) < opt.dedup_tol) {
                    if (r->grad_norm < existing.grad_norm) {
                        existing.torus = pt;
                        existing.grad_norm = r->grad_norm;
                        existing.value = r->value;
                    }
                    dup = true;
                    break;
                }
            }
            if (dup) continue;
            CriticalPoint cp;
            cp.torus = pt;
            cp.value = r->value;
            cp.grad_norm = r->grad_norm;
            found.push_back(cp);
        }
    };

    const auto refresh_spectra = [&] {
        out.degenerate = false;
        out.min_abs_eigenvalue = std::numeric_limits<double>::infinity();
        for (auto& cp : found) {
            const Eigen::Matrix4d hess = f.hess_frame(cp.torus.matrix());
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(hess);
            cp.eigenvalues = es.eigenvalues();
            cp.index = static_cast<int>((cp.eigenvalues.array() < 0.0).count());
            const double small = cp.eigenvalues.array().abs().minCoeff();
            out.min_abs_eigenvalue = std::min(out.min_abs_eigenvalue, small);
            if (small < opt.morse_cut) out.degenerate = true;
        }
        if (found.empty()) out.min_abs_eigenvalue = 0.0;
    };

    int density = opt.starts_per_sphere;
    for (int round = 0; round < std::max(1, opt.max_rounds); ++round) {
        run_round(density);
        refresh_spectra();
        ++out.rounds;
        out.counts_ok = !found.empty() && counts_admissible(found);
        // escalation cannot repair a degenerate landscape, only sparse coverage
        if (out.counts_ok || out.degenerate) break;
        density += (density + 1) / 2;
    }

    std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.value != b.value) return a.value < b.value;
        return invariant_less(a.torus, b.torus);
    });
    out.points = std::move(found);
    return out;
}

} // namespace cliffmorse
