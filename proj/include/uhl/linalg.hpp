#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

namespace uhl {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;

Mat kron(const Mat& a, const Mat& b);

inline Mat dag(const Mat& m) { return m.adjoint(); }

// max-norm unitarity defect ||U^dag U - I||_max
double unitarity_defect(const Mat& u);
bool is_unitary(const Mat& u, double tol = 1e-12);
bool is_hermitian(const Mat& m, double tol = 1e-12);

// exp(-i t H) for Hermitian H, via eigen-decomposition
Mat expi_hermitian(const Mat& h, double t);

// Haar-ish random unitary from a seeded generator (QR of Ginibre matrix)
Mat random_unitary(int dim, std::mt19937_64& rng);

// phase-invariant comparison: min over phase of max-norm difference
double phase_dist(const Mat& a, const Mat& b);

}  // namespace uhl
