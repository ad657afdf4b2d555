#include "cliffmorse/clifford.hpp"

#include "cliffmorse/io.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cliffmorse {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector3d sign_canonical(Eigen::Vector3d v) {
    for (int i = 0; i < 3; ++i) {
        if (std::abs(v(i)) > 1e-12) {
            if (v(i) < 0.0) v = -v;
            break;
        }
    }
    return v;
}

double sphere_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    double d = std::min(1.0, std::abs(a.dot(b)));
    return std::acos(d);
}

} // namespace

CliffordPoint::CliffordPoint() : CliffordPoint(Eigen::Matrix4d::Identity()) {}

CliffordPoint::CliffordPoint(const Eigen::Matrix4d& m) : m_(m) {
    if ((m.transpose() * m - Eigen::Matrix4d::Identity()).norm() > 1e-10)
        throw std::invalid_argument("CliffordPoint: matrix not orthogonal");
    auto [p, q] = canonical_invariant(m_);
    p_ = p;
    q_ = q;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> canonical_invariant(const Eigen::Matrix4d& m) {
    Eigen::Vector4d c1 = m.col(0), c2 = m.col(1);
    Eigen::Matrix4d w = c1 * c2.transpose() - c2 * c1.transpose();
    SelfDualSplit s = selfdual_split(w);
    // For a unit decomposable 2-form both halves are unit up to the factor 2,
    // but only up to roundoff, and sphere_angle turns a norm deficit delta
    // into an acos step of sqrt(2 delta). Normalizing keeps angles between
    // equal tori at the linear roundoff scale instead.
    return {sign_canonical(s.plus.normalized()), sign_canonical(s.minus.normalized())};
}

double cl_distance(const CliffordPoint& a, const CliffordPoint& b) {
    double ap = sphere_angle(a.inv_p(), b.inv_p());
    double aq = sphere_angle(a.inv_q(), b.inv_q());
    return kPi * std::hypot(ap, aq);
}

CliffordPoint exp_map(const CliffordPoint& base, const EndMatrix2& a) {
    return CliffordPoint(base.matrix() * exp_xi(a));
}

Eigen::Matrix4d matrix_from_invariant(Eigen::Vector3d p, Eigen::Vector3d q) {
    if (p.norm() < 1e-12 || q.norm() < 1e-12)
        throw std::invalid_argument("matrix_from_invariant: zero vector");
    p.normalize();
    q.normalize();
    Eigen::Matrix4d w = 0.5 * (selfdual_matrix(p) + antiselfdual_matrix(q));
    // w is the 2-form of a plane; extract an orthonormal basis of its range
    int k = 0;
    double best = -1.0;
    for (int i = 0; i < 4; ++i) {
        double nn = w.col(i).norm();
        if (nn > best) { best = nn; k = i; }
    }
    Eigen::Vector4d u1 = w.col(k).normalized();
    Eigen::Matrix4d m;
    m.col(0) = u1;
    m.col(1) = (-(w * u1)).normalized(); // orientation makes col0 ^ col1 = w

    // complete with any orthonormal basis of the complement
    int filled = 2;
    for (int i = 0; i < 4 && filled < 4; ++i) {
        Eigen::Vector4d v = Eigen::Vector4d::Unit(i);
        for (int c = 0; c < filled; ++c) v -= m.col(c).dot(v) * m.col(c);
        if (v.norm() > 1e-6) {
            m.col(filled) = v.normalized();
            ++filled;
        }
    }
    if (filled < 4) throw std::runtime_error("matrix_from_invariant: completion failed");
    if (m.determinant() < 0.0) m.col(3) = -m.col(3);
    return m;
}

Eigen::Matrix4d stab_rotation(double alpha, double beta) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.block<2, 2>(0, 0) = rot2(alpha);
    m.block<2, 2>(2, 2) = rot2(beta);
    return m;
}

Eigen::Matrix4d stab_swap() {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 2) = m(1, 3) = m(2, 0) = m(3, 1) = 1.0;
    return m;
}

std::string CliffordPoint::to_json() const {
    std::string out = "{\"matrix\": [";
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i || j) out += ", ";
            out += format_double(m_(i, j));
        }
    out += "], \"invariant_p\": [";
    for (int i = 0; i < 3; ++i) {
        if (i) out += ", ";
        out += format_double(p_(i));
    }
    out += "], \"invariant_q\": [";
    for (int i = 0; i < 3; ++i) {
        if (i) out += ", ";
        out += format_double(q_(i));
    }
    out += "]}";
    return out;
}

CliffordPoint CliffordPoint::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    const auto& vals = j.at("matrix");
    if (vals.size() != 16) throw std::runtime_error("CliffordPoint json: need 16 entries");
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) m(i, k) = vals[i * 4 + k].get<double>();
    return CliffordPoint(m);
}

} // namespace cliffmorse
