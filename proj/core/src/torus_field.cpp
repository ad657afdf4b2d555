#include "cliffmorse/torus_field.hpp"

#include "cliffmorse/io.hpp"

#include <complex>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cliffmorse {

namespace {

using Cplx = std::complex<double>;

// Dense DFT matrices, cached per grid size. A matrix product against a
// precomputed F is byte-deterministic and thread safe, which matters more
// here than asymptotics: grids stay at n <= 256.
struct DftPair {
    Eigen::MatrixXcd fwd;  // F(a,b)   = exp(-2 pi i a b / n)
    Eigen::MatrixXcd inv;  // conj(F)
};

const DftPair& dft(int n) {
    static std::mutex mu;
    static std::map<int, DftPair> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    DftPair p;
    p.fwd.resize(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            // reduce the phase index mod n before trig for reproducibility
            long idx = (static_cast<long>(a) * b) % n;
            double ang = -2.0 * std::numbers::pi * static_cast<double>(idx) / n;
            p.fwd(a, b) = Cplx(std::cos(ang), std::sin(ang));
        }
    p.inv = p.fwd.conjugate();
    return cache.emplace(n, std::move(p)).first->second;
}

// multiplier(m, k) applied to the spectrum; m, k are signed frequencies
template <class Mult>
TorusField apply_multiplier(const TorusField& f, Mult mult) {
    const int n = f.n();
    Eigen::MatrixXcd c = f.spectrum();
    for (int a = 0; a < n; ++a) {
        int m = TorusField::signed_freq(a, n);
        for (int b = 0; b < n; ++b) {
            int k = TorusField::signed_freq(b, n);
            c(a, b) *= mult(m, k, a, b);
        }
    }
    return TorusField::from_spectrum(c);
}

// the unmatched Nyquist mode has no well-defined odd derivative; drop it
bool nyquist(int idx, int n) { return n % 2 == 0 && idx == n / 2; }

} // namespace

TorusField::TorusField(Eigen::MatrixXd values) : v_(std::move(values)) {
    if (v_.rows() != v_.cols()) throw std::invalid_argument("TorusField: grid must be square");
    check_size(static_cast<int>(v_.rows()));
}

void TorusField::check_size(int n) {
    if (n < 2 || n > 4096) throw std::invalid_argument("TorusField: grid size out of range");
}

TorusField TorusField::constant(int n, double c) {
    TorusField f(n);
    f.v_.setConstant(c);
    return f;
}

TorusField TorusField::sample(int n, const std::function<double(double, double)>& f) {
    TorusField out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.v_(i, j) = f(out.theta(i), out.phi(j));
    return out;
}

TorusField& TorusField::operator+=(const TorusField& o) {
    if (o.n() != n()) throw std::invalid_argument("TorusField: size mismatch");
    v_ += o.v_;
    return *this;
}

TorusField& TorusField::operator-=(const TorusField& o) {
    if (o.n() != n()) throw std::invalid_argument("TorusField: size mismatch");
    v_ -= o.v_;
    return *this;
}

TorusField& TorusField::operator*=(double c) {
    v_ *= c;
    return *this;
}

TorusField TorusField::cwise_mul(const TorusField& o) const {
    if (o.n() != n()) throw std::invalid_argument("TorusField: size mismatch");
    return TorusField((v_.array() * o.v_.array()).matrix());
}

Eigen::MatrixXcd TorusField::spectrum() const {
    const auto& d = dft(n());
    return (d.fwd * v_ * d.fwd.transpose()) / (static_cast<double>(n()) * n());
}

TorusField TorusField::from_spectrum(const Eigen::MatrixXcd& c) {
    if (c.rows() != c.cols()) throw std::invalid_argument("from_spectrum: square input required");
    const int n = static_cast<int>(c.rows());
    const auto& d = dft(n);
    Eigen::MatrixXcd v = d.inv * c * d.inv.transpose();
    return TorusField(v.real());
}

TorusField TorusField::deriv_theta() const {
    return apply_multiplier(*this, [this](int m, int, int a, int) {
        return nyquist(a, n()) ? Cplx(0, 0) : Cplx(0, m);
    });
}

TorusField TorusField::deriv_phi() const {
    return apply_multiplier(*this, [this](int, int k, int, int b) {
        return nyquist(b, n()) ? Cplx(0, 0) : Cplx(0, k);
    });
}

TorusField TorusField::deriv_theta2() const {
    return apply_multiplier(*this,
                            [](int m, int, int, int) { return Cplx(-double(m) * m, 0); });
}

TorusField TorusField::deriv_phi2() const {
    return apply_multiplier(*this,
                            [](int, int k, int, int) { return Cplx(-double(k) * k, 0); });
}

TorusField TorusField::deriv_theta_phi() const {
    return apply_multiplier(*this, [this](int m, int k, int a, int b) {
        if (nyquist(a, n()) || nyquist(b, n())) return Cplx(0, 0);
        return Cplx(-double(m) * k, 0);
    });
}

TorusField TorusField::laplacian() const {
    return apply_multiplier(
        *this, [](int m, int k, int, int) { return Cplx(-double(m) * m - double(k) * k, 0); });
}

double TorusField::quadrature() const {
    double h = 2.0 * std::numbers::pi / n();
    return h * h * v_.sum();
}

double TorusField::l2_norm() const {
    double h = 2.0 * std::numbers::pi / n();
    return std::sqrt(h * h * v_.squaredNorm());
}

double TorusField::sup_norm() const { return v_.cwiseAbs().maxCoeff(); }

std::string TorusField::to_csv() const {
    std::string out;
    for (int i = 0; i < n(); ++i) {
        for (int j = 0; j < n(); ++j) {
            if (j) out += ',';
            out += format_double(v_(i, j));
        }
        out += '\n';
    }
    return out;
}

TorusField TorusField::from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t comma = line.find(',', pos);
            size_t end = comma == std::string::npos ? line.size() : comma;
            row.push_back(parse_double(std::string_view(line).substr(pos, end - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd v(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::runtime_error("TorusField csv: ragged rows");
        for (int j = 0; j < n; ++j) v(i, j) = rows[i][j];
    }
    return TorusField(std::move(v));
}

std::string TorusField::to_json() const {
    std::string out = "{\"n\": " + std::to_string(n()) + ", \"values\": [";
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j) {
            if (i || j) out += ", ";
            out += format_double(v_(i, j));
        }
    out += "]}";
    return out;
}

TorusField TorusField::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    const int n = j.at("n").get<int>();
    const auto& vals = j.at("values");
    if (static_cast<int>(vals.size()) != n * n)
        throw std::runtime_error("TorusField json: values length != n*n");
    Eigen::MatrixXd v(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) v(i, k) = vals[i * n + k].get<double>();
    return TorusField(std::move(v));
}

} // namespace cliffmorse
