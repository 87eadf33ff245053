#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace crnforge {

// Coefficients lowest order first: c[0] + c[1] λ + ... + λ^n (monic).
std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& m);

// All complex roots of c[0] + c[1] z + ... + c[d] z^d via companion-matrix
// eigenvalues, each polished by Newton steps. Leading zeros are stripped.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

// Real roots (imaginary part below imag_tol after polishing), sorted ascending.
std::vector<double> real_roots(std::span<const double> coeffs, double imag_tol = 1e-9);

double horner(std::span<const double> coeffs, double x);

// n <= 4 goes through the characteristic polynomial; larger matrices use Eigen.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

enum class FixedPointType { saddle, stable_node, unstable_node, stable_spiral, unstable_spiral, degenerate };

std::string to_string(FixedPointType t);
FixedPointType fixed_point_type_from_string(const std::string& s);
bool is_stable(FixedPointType t);
bool is_node(FixedPointType t);

// Imaginary parts above complex_tol count as a complex pair; real parts with
// magnitude below zero_tol make the point degenerate.
FixedPointType classify_eigenvalues(const std::vector<std::complex<double>>& eig, double complex_tol = 1e-9,
                                    double zero_tol = 1e-12);

// trace/determinant rule in the plane.
FixedPointType classify_planar(double trace, double det, double tol = 1e-12);

}  // namespace crnforge
