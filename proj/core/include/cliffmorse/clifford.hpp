#pragma once

#include "cliffmorse/end2.hpp"

#include <Eigen/Dense>
#include <string>
#include <utility>

namespace cliffmorse {

// A torus in the family M . T0, stored as an orthogonal representative plus
// the cached pair of unit 3-vectors that pins the torus itself: the self-dual
// and anti-self-dual parts of the 2-form of span(col 0, col 1). Two matrices
// give the same torus exactly when the pairs agree up to independent signs,
// which realizes the quotient as RP^2 x RP^2 and absorbs the full stabiliser
// (both plane rotations, reflections, and the factor swap).
class CliffordPoint {
public:
    CliffordPoint();
    explicit CliffordPoint(const Eigen::Matrix4d& m);

    const Eigen::Matrix4d& matrix() const { return m_; }
    const Eigen::Vector3d& inv_p() const { return p_; }
    const Eigen::Vector3d& inv_q() const { return q_; }

    std::string to_json() const;
    static CliffordPoint from_json(const std::string& text);

private:
    Eigen::Matrix4d m_;
    Eigen::Vector3d p_, q_;
};

// invariant pair of an orthogonal matrix, each vector sign-canonicalized
std::pair<Eigen::Vector3d, Eigen::Vector3d> canonical_invariant(const Eigen::Matrix4d& m);

// Geodesic distance on the invariant quotient: pi * sqrt(acos|p.p'|^2 +
// acos|q.q'|^2). Along exponential rays it reproduces t ||A|| exactly (below
// the cut locus of the sphere factors) and it is globally defined.
double cl_distance(const CliffordPoint& a, const CliffordPoint& b);

CliffordPoint exp_map(const CliffordPoint& base, const EndMatrix2& a);

// a representative matrix whose invariant pair is (p, q); inputs need not be
// exactly unit, they are normalized
Eigen::Matrix4d matrix_from_invariant(Eigen::Vector3d p, Eigen::Vector3d q);

Eigen::Matrix4d stab_rotation(double alpha, double beta); // blockdiag(rot a, rot b)
Eigen::Matrix4d stab_swap();                              // (x, y) -> (y, x)

} // namespace cliffmorse
