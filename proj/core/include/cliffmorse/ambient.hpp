#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cliffmorse {

struct MonomialTerm {
    std::array<int, 4> exponents{0, 0, 0, 0};
    double coeff = 0.0;
};

// Real polynomial in the four ambient coordinates, used as a conformal factor
// on the 3-sphere. Polynomials are closed under differentiation and linear
// changes of variables, and integrate exactly on trig grids, which is why the
// library admits nothing more general.
class AmbientFunction {
public:
    AmbientFunction() = default;
    explicit AmbientFunction(std::vector<MonomialTerm> terms);

    // iid standard gaussian coefficient on every monomial of total degree <=
    // degree, in a fixed enumeration order, so a seed fully determines u
    static AmbientFunction random(std::uint64_t seed, int degree);

    double eval(const Eigen::Vector4d& x) const;
    Eigen::Vector4d gradient(const Eigen::Vector4d& x) const;
    AmbientFunction partial(int axis) const;

    // v with v(x) = u(m x)
    AmbientFunction compose_linear(const Eigen::Matrix4d& m) const;

    AmbientFunction even_part() const;
    AmbientFunction odd_part() const;

    AmbientFunction& operator+=(const AmbientFunction& o);
    AmbientFunction& operator*=(double c);

    int degree() const;
    bool empty() const { return terms_.empty(); }
    const std::vector<MonomialTerm>& terms() const { return terms_; }

    // list of {exponents:[e1,e2,e3,e4], coeff:c}
    std::string to_json() const;
    static AmbientFunction from_json(const std::string& text);

private:
    void normalize();
    std::vector<MonomialTerm> terms_;
};

// Flattened form for tight loops: one shared power table per evaluation point
// instead of per-term int pow chains.
class PolyEvaluator {
public:
    PolyEvaluator() = default;
    explicit PolyEvaluator(const AmbientFunction& f);
    double operator()(const Eigen::Vector4d& x) const;
    bool empty() const { return terms_.empty(); }

private:
    struct Term {
        std::array<std::uint8_t, 4> e;
        double c;
    };
    std::vector<Term> terms_;
    int max_e_ = 0;
};

} // namespace cliffmorse
