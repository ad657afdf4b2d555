#pragma once

#include <Eigen/Dense>
#include <functional>
#include <numbers>
#include <string>

namespace cliffmorse {

// Scalar field sampled on the uniform n x n grid of the flat square torus
// [0,2pi)^2. Row index i is the theta direction, column index j is phi.
// All calculus is spectral: fields are treated as trigonometric interpolants,
// so derivatives and quadrature are exact for band-limited data.
class TorusField {
public:
    TorusField() = default;
    explicit TorusField(int n) : v_(Eigen::MatrixXd::Zero(n, n)) { check_size(n); }
    explicit TorusField(Eigen::MatrixXd values);

    static TorusField constant(int n, double c);
    static TorusField sample(int n, const std::function<double(double, double)>& f);

    int n() const { return static_cast<int>(v_.rows()); }
    bool empty() const { return v_.size() == 0; }

    double theta(int i) const { return 2.0 * std::numbers::pi * i / n(); }
    double phi(int j) const { return 2.0 * std::numbers::pi * j / n(); }

    double operator()(int i, int j) const { return v_(i, j); }
    double& operator()(int i, int j) { return v_(i, j); }
    const Eigen::MatrixXd& values() const { return v_; }
    Eigen::MatrixXd& values() { return v_; }

    TorusField& operator+=(const TorusField& o);
    TorusField& operator-=(const TorusField& o);
    TorusField& operator*=(double c);
    friend TorusField operator+(TorusField a, const TorusField& b) { return a += b; }
    friend TorusField operator-(TorusField a, const TorusField& b) { return a -= b; }
    friend TorusField operator*(double c, TorusField a) { return a *= c; }
    friend TorusField operator*(TorusField a, double c) { return a *= c; }
    TorusField cwise_mul(const TorusField& o) const;

    // spectral calculus
    TorusField deriv_theta() const;
    TorusField deriv_phi() const;
    TorusField deriv_theta2() const;
    TorusField deriv_phi2() const;
    TorusField deriv_theta_phi() const;
    TorusField laplacian() const;

    // trapezoidal quadrature (2pi/n)^2 * sum, exact for trig polynomials of
    // degree < n/2 per axis
    double quadrature() const;
    double l2_norm() const;   // sqrt(quadrature(f^2))
    double sup_norm() const;
    double min() const { return v_.minCoeff(); }
    double max() const { return v_.maxCoeff(); }

    // complex Fourier coefficients c(m,k), raw index order; f = sum c e^{i(m th + k ph)}
    Eigen::MatrixXcd spectrum() const;
    static TorusField from_spectrum(const Eigen::MatrixXcd& c);
    static int signed_freq(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

    // serialization: CSV (row-major, one theta row per line) and JSON {n, values}.
    // Doubles are printed with shortest round-trip formatting so load(save(f)) == f.
    std::string to_csv() const;
    static TorusField from_csv(const std::string& text);
    std::string to_json() const;
    static TorusField from_json(const std::string& text);

private:
    static void check_size(int n);
    Eigen::MatrixXd v_;
};

} // namespace cliffmorse
