#include "cliffmorse/ambient.hpp"

#include "cliffmorse/io.hpp"
#include "cliffmorse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cliffmorse {

namespace {

using ExpKey = std::array<int, 4>;
using PolyMap = std::map<ExpKey, double>;

PolyMap to_map(const std::vector<MonomialTerm>& terms) {
    PolyMap m;
    for (const auto& t : terms) m[t.exponents] += t.coeff;
    return m;
}

std::vector<MonomialTerm> from_map(const PolyMap& m) {
    std::vector<MonomialTerm> out;
    for (const auto& [e, c] : m)
        if (c != 0.0) out.push_back({e, c});
    return out;
}

double int_pow(double x, int e) {
    double p = 1.0;
    for (int i = 0; i < e; ++i) p *= x;
    return p;
}

} // namespace

AmbientFunction::AmbientFunction(std::vector<MonomialTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_)
        for (int e : t.exponents)
            if (e < 0) throw std::invalid_argument("AmbientFunction: negative exponent");
    normalize();
}

void AmbientFunction::normalize() { terms_ = from_map(to_map(terms_)); }

AmbientFunction AmbientFunction::random(std::uint64_t seed, int degree) {
    if (degree < 0 || degree > 12) throw std::invalid_argument("AmbientFunction: bad degree");
    Rng rng(seed);
    std::vector<MonomialTerm> terms;
    for (int e0 = 0; e0 <= degree; ++e0)
        for (int e1 = 0; e1 <= degree - e0; ++e1)
            for (int e2 = 0; e2 <= degree - e0 - e1; ++e2)
                for (int e3 = 0; e3 <= degree - e0 - e1 - e2; ++e3)
                    terms.push_back({{e0, e1, e2, e3}, rng.gaussian()});
    return AmbientFunction(std::move(terms));
}

double AmbientFunction::eval(const Eigen::Vector4d& x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double p = t.coeff;
        for (int i = 0; i < 4; ++i) p *= int_pow(x(i), t.exponents[i]);
        s += p;
    }
    return s;
}

AmbientFunction AmbientFunction::partial(int axis) const {
    if (axis < 0 || axis > 3) throw std::invalid_argument("partial: bad axis");
    std::vector<MonomialTerm> out;
    for (const auto& t : terms_) {
        if (t.exponents[axis] == 0) continue;
        MonomialTerm d = t;
        d.coeff *= d.exponents[axis];
        d.exponents[axis] -= 1;
        out.push_back(d);
    }
    return AmbientFunction(std::move(out));
}

Eigen::Vector4d AmbientFunction::gradient(const Eigen::Vector4d& x) const {
    Eigen::Vector4d g = Eigen::Vector4d::Zero();
    for (const auto& t : terms_)
        for (int axis = 0; axis < 4; ++axis) {
            if (t.exponents[axis] == 0) continue;
            double p = t.coeff * t.exponents[axis];
            for (int i = 0; i < 4; ++i)
                p *= int_pow(x(i), i == axis ? t.exponents[i] - 1 : t.exponents[i]);
            g(axis) += p;
        }
    return g;
}

AmbientFunction AmbientFunction::compose_linear(const Eigen::Matrix4d& m) const {
    PolyMap acc;
    for (const auto& t : terms_) {
        // expand prod_i (sum_j m(i,j) x_j)^{e_i} term by term
        PolyMap poly;
        poly[{0, 0, 0, 0}] = t.coeff;
        for (int i = 0; i < 4; ++i)
            for (int rep = 0; rep < t.exponents[i]; ++rep) {
                PolyMap next;
                for (const auto& [e, c] : poly)
                    for (int j = 0; j < 4; ++j) {
                        if (m(i, j) == 0.0) continue;
                        ExpKey e2 = e;
                        e2[j] += 1;
                        next[e2] += c * m(i, j);
                    }
                poly = std::move(next);
            }
        for (const auto& [e, c] : poly) acc[e] += c;
    }
    return AmbientFunction(from_map(acc));
}

AmbientFunction AmbientFunction::even_part() const {
    std::vector<MonomialTerm> out;
    for (const auto& t : terms_) {
        int d = t.exponents[0] + t.exponents[1] + t.exponents[2] + t.exponents[3];
        if (d % 2 == 0) out.push_back(t);
    }
    return AmbientFunction(std::move(out));
}

AmbientFunction AmbientFunction::odd_part() const {
    std::vector<MonomialTerm> out;
    for (const auto& t : terms_) {
        int d = t.exponents[0] + t.exponents[1] + t.exponents[2] + t.exponents[3];
        if (d % 2 == 1) out.push_back(t);
    }
    return AmbientFunction(std::move(out));
}

AmbientFunction& AmbientFunction::operator+=(const AmbientFunction& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    normalize();
    return *this;
}

AmbientFunction& AmbientFunction::operator*=(double c) {
    for (auto& t : terms_) t.coeff *= c;
    normalize();
    return *this;
}

int AmbientFunction::degree() const {
    int d = 0;
    for (const auto& t : terms_)
        d = std::max(d, t.exponents[0] + t.exponents[1] + t.exponents[2] + t.exponents[3]);
    return d;
}

std::string AmbientFunction::to_json() const {
    std::string out = "[";
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) out += ", ";
        first = false;
        out += "{\"exponents\": [" + std::to_string(t.exponents[0]) + ", " +
               std::to_string(t.exponents[1]) + ", " + std::to_string(t.exponents[2]) + ", " +
               std::to_string(t.exponents[3]) + "], \"coeff\": " + format_double(t.coeff) + "}";
    }
    out += "]";
    return out;
}

PolyEvaluator::PolyEvaluator(const AmbientFunction& f) {
    for (const auto& t : f.terms()) {
        Term ft;
        for (int i = 0; i < 4; ++i) {
            ft.e[i] = static_cast<std::uint8_t>(t.exponents[i]);
            max_e_ = std::max(max_e_, t.exponents[i]);
        }
        ft.c = t.coeff;
        terms_.push_back(ft);
    }
}

double PolyEvaluator::operator()(const Eigen::Vector4d& x) const {
    double pw[4][13];
    for (int i = 0; i < 4; ++i) {
        pw[i][0] = 1.0;
        for (int e = 1; e <= max_e_; ++e) pw[i][e] = pw[i][e - 1] * x(i);
    }
    double s = 0.0;
    for (const auto& t : terms_)
        s += t.c * pw[0][t.e[0]] * pw[1][t.e[1]] * pw[2][t.e[2]] * pw[3][t.e[3]];
    return s;
}

AmbientFunction AmbientFunction::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw std::runtime_error("AmbientFunction json: expected a list");
    std::vector<MonomialTerm> terms;
    for (const auto& item : j) {
        MonomialTerm t;
        const auto& e = item.at("exponents");
        if (e.size() != 4) throw std::runtime_error("AmbientFunction json: need 4 exponents");
        for (int i = 0; i < 4; ++i) t.exponents[i] = e[i].get<int>();
        t.coeff = item.at("coeff").get<double>();
        terms.push_back(t);
    }
    return AmbientFunction(std::move(terms));
}

} // namespace cliffmorse
