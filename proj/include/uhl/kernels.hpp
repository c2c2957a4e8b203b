#pragma once

#include <vector>

#include "uhl/linalg.hpp"

namespace uhl::kernels {

// Apply a 2^k x 2^k unitary to the statevector on the given qubits
// (qubits[i] = i-th least significant local bit). The serial version is the
// reference implementation; the OpenMP version must match it bit-for-bit in
// exact arithmetic ordering per amplitude group.
void apply_unitary_serial(Vec& amps, const Mat& u, const std::vector<int>& qubits);
void apply_unitary_omp(Vec& amps, const Mat& u, const std::vector<int>& qubits);

// dispatch: OpenMP for large state spaces, serial otherwise
void apply_unitary(Vec& amps, const Mat& u, const std::vector<int>& qubits);

// rho -> sum_i K_i rho K_i^dag with each K acting on `qubits`
void apply_kraus_serial(Mat& rho, const std::vector<Mat>& kraus,
                        const std::vector<int>& qubits);
void apply_kraus_omp(Mat& rho, const std::vector<Mat>& kraus,
                     const std::vector<int>& qubits);
void apply_kraus(Mat& rho, const std::vector<Mat>& kraus, const std::vector<int>& qubits);

}  // namespace uhl::kernels
