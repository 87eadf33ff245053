#include "crnforge/linalg.hpp"

#include "crnforge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace crnforge {

std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("characteristic polynomial of a non-square matrix");
    const Eigen::Index n = m.rows();
    // Faddeev-LeVerrier.
    std::vector<double> c(n + 1, 0.0);
    c[n] = 1.0;
    Eigen::MatrixXd mk = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        mk = m * mk + c[n - k + 1] * id;
        c[n - k] = -(m * mk).trace() / static_cast<double>(k);
    }
    return c;
}

double horner(std::span<const double> coeffs, double x) {
    double r = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
    return r;
}

namespace {

std::complex<double> horner_c(std::span<const double> c, std::complex<double> z, std::complex<double>& deriv) {
    std::complex<double> p = 0.0, dp = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
    deriv = dp;
    return p;
}

}  // namespace

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
    std::size_t d = coeffs.size();
    while (d > 0 && coeffs[d - 1] == 0.0) --d;
    if (d <= 1) return {};
    std::span<const double> c = coeffs.first(d);
    const std::size_t deg = d - 1;

    // Roots at zero are split off exactly.
    std::size_t zeros = 0;
    while (zeros < deg && c[zeros] == 0.0) ++zeros;
    std::vector<std::complex<double>> roots(zeros, 0.0);
    std::span<const double> r = c.subspan(zeros);
    const std::size_t rdeg = r.size() - 1;
    if (rdeg == 0) return roots;

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(rdeg, rdeg);
    const double lead = r[rdeg];
    for (std::size_t i = 0; i < rdeg; ++i) comp(0, i) = -r[rdeg - 1 - i] / lead;
    for (std::size_t i = 1; i < rdeg; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    const auto ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        std::complex<double> z = ev(i);
        for (int it = 0; it < 8; ++it) {
            std::complex<double> dp;
            const std::complex<double> p = horner_c(r, z, dp);
            if (std::abs(dp) == 0.0) break;
            const std::complex<double> step = p / dp;
            const std::complex<double> zn = z - step;
            std::complex<double> dpn;
            // Only accept the step if it reduces the residual; multiple roots stall Newton.
            if (std::abs(horner_c(r, zn, dpn)) > std::abs(p)) break;
            z = zn;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
        }
        roots.push_back(z);
    }
    return roots;
}

std::vector<double> real_roots(std::span<const double> coeffs, double imag_tol) {
    std::vector<double> out;
    for (const auto& z : polynomial_roots(coeffs))
        if (std::abs(z.imag()) <= imag_tol * std::max(1.0, std::abs(z.real()))) out.push_back(z.real());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("eigenvalues of a non-square matrix");
    std::vector<std::complex<double>> out;
    if (m.rows() == 0) return out;
    if (m.rows() <= 4) {
        const auto c = characteristic_polynomial(m);
        out = polynomial_roots(c);
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    }
    std::sort(out.begin(), out.end(), [](auto a, auto b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

std::string to_string(FixedPointType t) {
    switch (t) {
        case FixedPointType::saddle: return "saddle";
        case FixedPointType::stable_node: return "stable_node";
        case FixedPointType::unstable_node: return "unstable_node";
        case FixedPointType::stable_spiral: return "stable_spiral";
        case FixedPointType::unstable_spiral: return "unstable_spiral";
        case FixedPointType::degenerate: return "degenerate";
    }
    return "degenerate";
}

FixedPointType fixed_point_type_from_string(const std::string& s) {
    for (auto t : {FixedPointType::saddle, FixedPointType::stable_node, FixedPointType::unstable_node,
                   FixedPointType::stable_spiral, FixedPointType::unstable_spiral, FixedPointType::degenerate})
        if (to_string(t) == s) return t;
    throw Error("unknown fixed point type: " + s);
}

bool is_stable(FixedPointType t) {
    return t == FixedPointType::stable_node || t == FixedPointType::stable_spiral;
}

bool is_node(FixedPointType t) {
    return t == FixedPointType::stable_node || t == FixedPointType::unstable_node;
}

FixedPointType classify_eigenvalues(const std::vector<std::complex<double>>& eig, double complex_tol,
                                    double zero_tol) {
    if (eig.empty()) return FixedPointType::degenerate;
    bool neg = false, pos = false, cplx = false;
    double scale = 0.0;
    for (const auto& z : eig) scale = std::max(scale, std::abs(z));
    for (const auto& z : eig) {
        if (std::abs(z.real()) <= zero_tol * std::max(1.0, scale)) return FixedPointType::degenerate;
        (z.real() < 0 ? neg : pos) = true;
        if (std::abs(z.imag()) > complex_tol) cplx = true;
    }
    if (neg && pos) return FixedPointType::saddle;
    if (neg) return cplx ? FixedPointType::stable_spiral : FixedPointType::stable_node;
    return cplx ? FixedPointType::unstable_spiral : FixedPointType::unstable_node;
}

FixedPointType classify_planar(double trace, double det, double tol) {
    if (det < -tol) return FixedPointType::saddle;
    if (std::abs(det) <= tol || std::abs(trace) <= tol) return FixedPointType::degenerate;
    const double disc = trace * trace - 4.0 * det;
    if (trace < 0) return disc >= 0 ? FixedPointType::stable_node : FixedPointType::stable_spiral;
    return disc >= 0 ? FixedPointType::unstable_node : FixedPointType::unstable_spiral;
}

}  // namespace crnforge
