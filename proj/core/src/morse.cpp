#include "cliffmorse/morse.hpp"

#include "cliffmorse/curves.hpp"
#include "cliffmorse/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace cliffmorse {

int rank_mod2(Eigen::MatrixXi m) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (m(r, c) & 1) { pivot = r; break; }
        if (pivot < 0) continue;
        m.row(pivot).swap(m.row(rank));
        for (int r = 0; r < rows; ++r)
            if (r != rank && (m(r, c) & 1)) m.row(r) += m.row(rank);
        ++rank;
    }
    return rank;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct EigenData {
    Eigen::Matrix4d vecs;
    Eigen::Vector4d vals;
};

std::vector<EigenData> eigen_data(const AreaFunctional& f, const CriticalSet& cs) {
    std::vector<EigenData> out(cs.points.size());
    for (size_t i = 0; i < cs.points.size(); ++i) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(
            f.hess_frame(cs.points[i].torus.matrix()));
        out[i] = {es.eigenvectors(), es.eigenvalues()};
    }
    return out;
}

CliffordPoint offset_start(const CliffordPoint& base, const Eigen::Vector4d& dir_frame,
                           double eps) {
    return CliffordPoint(base.matrix() * exp_xi(from_frame_coords(eps * dir_frame)));
}

struct Shot {
    int label = -1;                // sink critical point, -1 unresolved
    std::vector<double> closest;   // per critical point
};

Shot shoot(const AreaFunctional& f, const CliffordPoint& start, int direction,
           const std::vector<CriticalPoint>& crits, const ComplexOptions& opt) {
    FlowOptions fo = opt.flow;
    fo.record = false;
    fo.sinks_only = true;
    FlowPath p = integrate_flow(f, start, direction, crits, fo);
    return {p.no_convergence ? -1 : p.sink, std::move(p.closest_approach)};
}

struct Interval {
    double a, b;
    int la, lb;
    std::vector<double> closest; // elementwise min over all shots inside
    bool frozen = false;         // an unresolved midpoint stopped refinement
    // widest recent bracket, kept for the edge tracker: fully refined endpoints
    // sit below rounding noise of each other and carry no straddle information
    double ta = 0.0, tb = 0.0;
};

// snapshot brackets stay at least this wide (circle starts sit 1e-4 out, so
// the bracket chord stays far above rounding noise)
constexpr double kSnapAngle = 1e-5;

void merge_min(std::vector<double>& into, const std::vector<double>& from) {
    for (size_t i = 0; i < into.size(); ++i) into[i] = std::min(into[i], from[i]);
}

// isolate basin transitions on the eigen-circle around an index-2 point
std::vector<Interval> bisect_circle(const AreaFunctional& f,
                                    const std::vector<CriticalPoint>& crits,
                                    const CliffordPoint& base, const Eigen::Vector4d& v1,
                                    const Eigen::Vector4d& v2, int direction,
                                    const ComplexOptions& opt, int depth, int* unresolved) {
    const auto start_at = [&](double ang) {
        return offset_start(base, std::cos(ang) * v1 + std::sin(ang) * v2, opt.epsilon);
    };
    const int s = opt.circle_samples;
    std::vector<Shot> shots(s);
    parallel_for(static_cast<size_t>(s), [&](size_t i) {
        shots[i] = shoot(f, start_at(kTwoPi * i / s), direction, crits, opt);
    }, opt.threads);

    // walk resolved samples only, so a transition spanning an unresolved gap
    // still yields a bracket (a wide one; refinement narrows it)
    std::vector<int> res;
    for (int i = 0; i < s; ++i) {
        if (shots[i].label < 0) ++*unresolved;
        else res.push_back(i);
    }
    std::vector<Interval> work;
    for (size_t r = 0; r < res.size(); ++r) {
        const int i = res[r];
        const int j = res[(r + 1) % res.size()];
        if (i == j || shots[i].label == shots[j].label) continue;
        const double hi = r + 1 < res.size() ? kTwoPi * j / s : kTwoPi * (j + s) / s;
        Interval iv{kTwoPi * i / s, hi, shots[i].label, shots[j].label, shots[i].closest};
        merge_min(iv.closest, shots[j].closest);
        iv.ta = iv.a;
        iv.tb = iv.b;
        work.push_back(std::move(iv));
    }

    const auto child = [](double a, double b, int la, int lb, const Interval& parent) {
        Interval c{a, b, la, lb, parent.closest};
        c.ta = parent.ta;
        c.tb = parent.tb;
        if (b - a >= kSnapAngle) {
            c.ta = a;
            c.tb = b;
        }
        return c;
    };

    for (int d = 0; d < depth; ++d) {
        std::vector<Shot> mids(work.size());
        parallel_for(work.size(), [&](size_t i) {
            if (work[i].frozen || work[i].b - work[i].a < 3e-14) return;
            mids[i] = shoot(f, start_at(0.5 * (work[i].a + work[i].b)), direction, crits, opt);
        }, opt.threads);
        std::vector<Interval> next;
        next.reserve(work.size());
        for (size_t i = 0; i < work.size(); ++i) {
            Interval& iv = work[i];
            if (iv.frozen || iv.b - iv.a < 3e-14) { next.push_back(std::move(iv)); continue; }
            const double m = 0.5 * (iv.a + iv.b);
            merge_min(iv.closest, mids[i].closest);
            const int lm = mids[i].label;
            if (lm < 0) {
                // keep the coarse bracket; wall attribution still sees its shots
                ++*unresolved;
                iv.frozen = true;
                next.push_back(std::move(iv));
            } else if (lm == iv.la) {
                next.push_back(child(m, iv.b, lm, iv.lb, iv));
            } else if (lm == iv.lb) {
                next.push_back(child(iv.a, m, iv.la, lm, iv));
            } else {
                next.push_back(child(iv.a, m, iv.la, lm, iv));
                next.push_back(child(m, iv.b, lm, iv.lb, iv));
            }
        }
        work = std::move(next);
    }
    return work;
}

// point on the invariant-sphere chord between two nearby torus configurations
CliffordPoint chord_point(const CliffordPoint& a, const CliffordPoint& b, double s) {
    auto [pa, qa] = canonical_invariant(a.matrix());
    auto [pb, qb] = canonical_invariant(b.matrix());
    if (pa.dot(pb) < 0.0) pb = -pb;
    if (qa.dot(qb) < 0.0) qb = -qb;
    return CliffordPoint(matrix_from_invariant((1.0 - s) * pa + s * pb,
                                               (1.0 - s) * qa + s * qb));
}

// Follow the basin boundary bracketed by two straddling starts until it
// settles next to one candidate wall point. A single shot peels off the
// boundary once amplified rounding noise takes over, and at a strongly
// anisotropic saddle it peels while still far away, so no closest-approach
// cut can attribute the wall there. Re-bracketing along the chord between the
// two shadows every time they spread resets the amplified error and lets the
// pair ride the boundary for as long as the descent to the wall takes.
int track_edge(const AreaFunctional& f, const std::vector<CriticalPoint>& crits,
               const std::vector<int>& candidates,
               const std::vector<std::array<int, 2>>& ray_sinks,
               const CliffordPoint& a0, const CliffordPoint& b0, int la,
               int direction, const FlowOptions& fopt) {
    if (candidates.empty()) return -1;
    const VelocityField field = [&](double, const Eigen::Matrix4d& m) {
        return flow_velocity(f, m, direction);
    };
    constexpr double kWide = 0.05;   // spread that triggers re-bracketing
    constexpr double kTight = 1e-6;  // bracket width restored by re-bracketing
    constexpr double kArrive = 0.05; // attribution ball around a wall point
    constexpr double kTMax = 400.0;
    constexpr int kMaxRebrackets = 100;
    const double tol = fopt.rel_tol * 2.0;

    // one accepted step advances both shadows with a shared step size; steps
    // that would let the spread jump past the linear regime are rejected
    const auto co_step = [&](Eigen::Matrix4d& xa, Eigen::Matrix4d& xb, double& tt,
                             double& hh) -> bool {
        const Eigen::Matrix4d fa = rkmk4_step(xa, tt, hh, field);
        const Eigen::Matrix4d fb = rkmk4_step(xb, tt, hh, field);
        const Eigen::Matrix4d ga = rkmk4_step(rkmk4_step(xa, tt, 0.5 * hh, field),
                                              tt + 0.5 * hh, 0.5 * hh, field);
        const Eigen::Matrix4d gb = rkmk4_step(rkmk4_step(xb, tt, 0.5 * hh, field),
                                              tt + 0.5 * hh, 0.5 * hh, field);
        const double err = std::max((fa - ga).norm(), (fb - gb).norm()) / 15.0;
        const double cap = std::max(4.0 * cl_distance(CliffordPoint(xa), CliffordPoint(xb)),
                                    1e-6);
        const double spread = cl_distance(CliffordPoint(ga), CliffordPoint(gb));
        const bool accept = (err <= tol && spread <= cap) || hh <= fopt.h_min;
        if (accept) {
            tt += hh;
            xa = ga;
            xb = gb;
        }
        double fac = err > 0 ? std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 4.0) : 4.0;
        if (spread > cap) fac = std::min(fac, 0.4);
        hh = std::clamp(hh * fac, fopt.h_min, 2.0);
        return accept;
    };

    // the la side of the straddle is locally one ray of the limiting wall, so
    // a dominant near approach to a wall that does not reach la at all is a
    // transient pass, not an arrival
    const auto arrived = [&](const CliffordPoint& mid) -> int {
        double best_d = std::numeric_limits<double>::infinity();
        double second = best_d;
        int best = -1;
        for (int wid : candidates) {
            const double d = cl_distance(mid, crits[wid].torus);
            if (d < best_d) {
                second = best_d;
                best_d = d;
                best = wid;
            } else {
                second = std::min(second, d);
            }
        }
        if (best < 0 || best_d >= kArrive || second <= 2.0 * best_d) return -1;
        const auto& rs = ray_sinks[best];
        if (rs[0] >= 0 && rs[1] >= 0 && rs[0] != la && rs[1] != la) return -1;
        return best;
    };

    // basin membership decides which side of the boundary a probe is on; the
    // endpoint labels are flow invariants, so every sign change of this
    // classifier is a genuine boundary crossing (a fixed-horizon distance
    // comparison is not: probes inside the boundary layer lag near the wall
    // and compare arbitrarily, which parks the bisection off the boundary)
    FlowOptions cls = fopt;
    cls.record = false;
    cls.sinks_only = true;
    cls.terminate_radius = std::max(fopt.terminate_radius, 0.02);
    const auto on_a_side = [&](const CliffordPoint& z) -> int {
        const FlowPath p = integrate_flow(f, z, direction, crits, cls);
        if (p.no_convergence) return -1;
        // a pocket of some third basin on the chord still counts as "not la";
        // if the bisection then hugs the wrong boundary, arrival at an
        // incompatible wall never fires and the interval stays unresolved
        return p.sink == la ? 1 : 0;
    };

    Eigen::Matrix4d a = a0.matrix(), b = b0.matrix();
    double t = 0.0, h = fopt.h0;
    int rebrackets = 0;
    while (t < kTMax && rebrackets < kMaxRebrackets) {
        if (!co_step(a, b, t, h)) continue;
        const CliffordPoint ca(a), cb(b);
        const CliffordPoint mid = chord_point(ca, cb, 0.5);
        const int hit = arrived(mid);
        if (hit >= 0) return hit;
        if (cl_distance(ca, cb) < kWide) continue;

        // the boundary flow can converge to a stationary point the census
        // missed; stop early instead of re-bracketing against it forever
        if (f.grad_frame(mid.matrix()).norm() < 1e-6) return -1;

        // re-bracket on the frozen leg-end chord back down to a tight
        // straddle, far above the rounding-noise floor
        ++rebrackets;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 40; ++it) {
            if (cl_distance(chord_point(ca, cb, lo), chord_point(ca, cb, hi)) <= kTight)
                break;
            const double s = 0.5 * (lo + hi);
            const int cl = on_a_side(chord_point(ca, cb, s));
            if (cl < 0) return -1;
            if (cl == 1) lo = s;
            else hi = s;
        }
        a = chord_point(ca, cb, lo).matrix();
        b = chord_point(ca, cb, hi).matrix();
        h = fopt.h0;
    }
    return -1;
}

void add_count(std::vector<BoundaryCount>& counts, int from, int to) {
    for (auto& c : counts)
        if (c.from == from && c.to == to) { ++c.count; return; }
    counts.push_back({from, to, 1});
}

} // namespace

MorseComplexData build_complex(const AreaFunctional& f, const CriticalSet& cs,
                               const ComplexOptions& opt) {
    const auto& crits = cs.points;
    MorseComplexData out;
    for (size_t i = 0; i < crits.size(); ++i)
        out.cells[std::clamp(crits[i].index, 0, 4)].push_back(static_cast<int>(i));
    std::vector<int> pos(crits.size(), -1);
    for (int k = 0; k <= 4; ++k) {
        out.euler += (k % 2 ? -1 : 1) * static_cast<int>(out.cells[k].size());
        for (size_t j = 0; j < out.cells[k].size(); ++j)
            pos[out.cells[k][j]] = static_cast<int>(j);
    }
    for (int k = 1; k <= 4; ++k)
        out.partial[k] = Eigen::MatrixXi::Zero(
            static_cast<int>(out.cells[k - 1].size()), static_cast<int>(out.cells[k].size()));

    const auto sat = eigen_data(f, cs);

    // index-1 saddles emit two descent rays along the negative eigenvector;
    // index-3 saddles emit two ascent rays along the positive one
    struct RayJob { int owner; Eigen::Vector4d v; int direction; };
    std::vector<RayJob> rays;
    for (int id : out.cells[1]) {
        rays.push_back({id, sat[id].vecs.col(0), 1});
        rays.push_back({id, -sat[id].vecs.col(0), 1});
    }
    for (int id : out.cells[3]) {
        rays.push_back({id, sat[id].vecs.col(3), -1});
        rays.push_back({id, -sat[id].vecs.col(3), -1});
    }
    std::vector<Shot> ray_shots(rays.size());
    parallel_for(rays.size(), [&](size_t i) {
        ray_shots[i] = shoot(f, offset_start(crits[rays[i].owner].torus, rays[i].v, opt.epsilon),
                             rays[i].direction, crits, opt);
    }, opt.threads);
    for (size_t i = 0; i < rays.size(); ++i) {
        const int s = ray_shots[i].label;
        if (s < 0) { ++out.unresolved; continue; }
        if (rays[i].direction == 1) {
            out.partial[1](pos[s], pos[rays[i].owner]) += 1;
            add_count(out.counts, rays[i].owner, s);
        } else {
            out.partial[4](pos[rays[i].owner], pos[s]) += 1;
            add_count(out.counts, s, rays[i].owner);
        }
    }

    // a wall saddle separates exactly the two sinks its own rays reach, so a
    // circle crossing can only be attributed to a wall matching its labels
    std::vector<std::array<int, 2>> ray_sinks(crits.size(), std::array<int, 2>{-1, -1});
    for (size_t i = 0; i < rays.size(); ++i)
        ray_sinks[rays[i].owner][i % 2] = ray_shots[i].label;
    const auto compatible = [&](int wid, int la, int lb) {
        const auto& rs = ray_sinks[wid];
        if (rs[0] < 0 || rs[1] < 0) return true; // unresolved rays cannot exclude
        return (rs[0] == la && rs[1] == lb) || (rs[0] == lb && rs[1] == la);
    };

    // index-2 points own one descent circle (walls at index 1) and one ascent
    // circle (walls at index 3)
    for (int id : out.cells[2]) {
        for (int direction : {1, -1}) {
            const Eigen::Vector4d v1 = direction == 1 ? sat[id].vecs.col(0) : sat[id].vecs.col(2);
            const Eigen::Vector4d v2 = direction == 1 ? sat[id].vecs.col(1) : sat[id].vecs.col(3);
            const int wall_index = direction == 1 ? 1 : 3;
            const auto found = bisect_circle(f, crits, crits[id].torus, v1, v2, direction, opt,
                                             opt.bisect_depth, &out.unresolved);
            for (const auto& iv : found) {
                std::vector<int> cands;
                for (int wid : out.cells[wall_index])
                    if (compatible(wid, iv.la, iv.lb)) cands.push_back(wid);
                // Rounding noise floors the transverse offset near the separating
                // orbit, so the pass distance at the wall point only shrinks like
                // a small power of the bracket width; a dominant nearest candidate
                // within the cut is trusted, anything else goes to the tracker.
                int best = -1;
                double best_d = std::numeric_limits<double>::infinity();
                double second = best_d;
                for (int wid : cands) {
                    const double d = iv.closest[wid];
                    if (d < best_d) {
                        second = best_d;
                        best_d = d;
                        best = wid;
                    } else {
                        second = std::min(second, d);
                    }
                }
                std::vector<int> hit;
                if (best >= 0 && best_d <= opt.wall_radius && second >= 1.5 * best_d) {
                    hit.push_back(best);
                } else {
                    // The crossing can hide a band of a third basin thinner
                    // than the label noise floor, in which case it carries two
                    // walls: one bounding each endpoint basin. Track the side
                    // of each label and let the ray sinks of the first wall
                    // reveal whether the far side is a different basin.
                    const Eigen::Vector4d da =
                        std::cos(iv.ta) * v1 + std::sin(iv.ta) * v2;
                    const Eigen::Vector4d db =
                        std::cos(iv.tb) * v1 + std::sin(iv.tb) * v2;
                    const CliffordPoint pa = offset_start(crits[id].torus, da, opt.epsilon);
                    const CliffordPoint pb = offset_start(crits[id].torus, db, opt.epsilon);
                    const int w1 = track_edge(f, crits, out.cells[wall_index], ray_sinks,
                                              pa, pb, iv.la, direction, opt.flow);
                    if (w1 < 0) {
                        ++out.unresolved;
                        continue;
                    }
                    hit.push_back(w1);
                    const auto& r1 = ray_sinks[w1];
                    const int lc = r1[0] == iv.la ? r1[1] : r1[0];
                    if (lc >= 0 && lc != iv.lb) {
                        const int w2 = track_edge(f, crits, out.cells[wall_index], ray_sinks,
                                                  pb, pa, iv.lb, direction, opt.flow);
                        if (w2 < 0) {
                            ++out.unresolved;
                        } else {
                            hit.push_back(w2);
                            const auto& r2 = ray_sinks[w2];
                            const int ld = r2[0] == iv.lb ? r2[1] : r2[0];
                            // bands inside bands stay unmapped
                            if (ld != lc) ++out.unresolved;
                        }
                    }
                }
                for (const int w : hit) {
                    out.walls.push_back({id, w, direction, iv.a, iv.b, iv.la, iv.lb});
                    if (direction == 1) {
                        out.partial[2](pos[w], pos[id]) += 1;
                        add_count(out.counts, id, w);
                    } else {
                        out.partial[3](pos[id], pos[w]) += 1;
                        add_count(out.counts, w, id);
                    }
                }
            }
        }
    }

    out.d_squared_zero = true;
    for (int k = 2; k <= 4; ++k) {
        const Eigen::MatrixXi prod = out.partial[k - 1] * out.partial[k];
        for (int r = 0; r < prod.rows(); ++r)
            for (int c = 0; c < prod.cols(); ++c)
                if (prod(r, c) % 2 != 0) out.d_squared_zero = false;
    }

    const auto rank_or_zero = [&](int k) {
        if (k < 1 || k > 4) return 0;
        return rank_mod2(out.partial[k]);
    };
    for (int k = 0; k <= 4; ++k)
        out.betti[k] = static_cast<int>(out.cells[k].size()) - rank_or_zero(k) - rank_or_zero(k + 1);
    return out;
}

std::vector<ConnectingOrbit> connecting_orbits(const AreaFunctional& f, const CriticalSet& cs,
                                               const MorseComplexData& data,
                                               const ComplexOptions& opt) {
    const auto& crits = cs.points;
    const auto sat = eigen_data(f, cs);
    std::vector<ConnectingOrbit> out;

    const auto ray_orbit = [&](int owner, const Eigen::Vector4d& v, int direction) {
        FlowOptions fo = opt.flow;
        fo.record = true;
        fo.sinks_only = true;
        fo.source = owner;
        FlowPath p = integrate_flow(f, offset_start(crits[owner].torus, v, opt.epsilon),
                                    direction, crits, fo);
        if (p.no_convergence || p.sink < 0) return;
        ConnectingOrbit orb;
        orb.direction = direction;
        orb.from = direction == 1 ? owner : p.sink;
        orb.to = direction == 1 ? p.sink : owner;
        orb.path = std::move(p);
        out.push_back(std::move(orb));
    };
    for (int id : data.cells[1]) {
        ray_orbit(id, sat[id].vecs.col(0), 1);
        ray_orbit(id, -sat[id].vecs.col(0), 1);
    }
    for (int id : data.cells[3]) {
        ray_orbit(id, sat[id].vecs.col(3), -1);
        ray_orbit(id, -sat[id].vecs.col(3), -1);
    }

    for (const auto& w : data.walls) {
        const Eigen::Vector4d v1 =
            w.direction == 1 ? sat[w.owner].vecs.col(0) : sat[w.owner].vecs.col(2);
        const Eigen::Vector4d v2 =
            w.direction == 1 ? sat[w.owner].vecs.col(1) : sat[w.owner].vecs.col(3);
        const auto start_at = [&](double ang) {
            return offset_start(crits[w.owner].torus, std::cos(ang) * v1 + std::sin(ang) * v2,
                                opt.epsilon);
        };
        // refine the recorded bracket until the angle pins the separating orbit
        double a = w.angle_lo, b = w.angle_hi;
        const int la = w.label_lo;
        for (int d = 0; d < 24 && b - a > 3e-14; ++d) {
            const double m = 0.5 * (a + b);
            const Shot sh = shoot(f, start_at(m), w.direction, crits, opt);
            if (sh.label < 0) break;
            if (sh.label == la) a = m;
            else b = m;
        }
        FlowOptions fo = opt.flow;
        fo.record = true;
        fo.sinks_only = true;
        fo.source = w.owner;
        FlowPath p = integrate_flow(f, start_at(0.5 * (a + b)), w.direction, crits, fo);
        // keep the stretch between the circle owner and the wall point
        size_t cut = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < p.samples.size(); ++i) {
            const double d = cl_distance(p.samples[i].point, crits[w.wall].torus);
            if (d < best) { best = d; cut = i; }
        }
        p.samples.resize(cut + 1);
        if (p.samples.size() < 2) continue;
        p.t_end = p.samples.back().t;
        p.sink = w.wall;
        p.no_convergence = false;
        ConnectingOrbit orb;
        orb.direction = w.direction;
        orb.from = w.direction == 1 ? w.owner : w.wall;
        orb.to = w.direction == 1 ? w.wall : w.owner;
        orb.path = std::move(p);
        out.push_back(std::move(orb));
    }
    return out;
}

} // namespace cliffmorse
