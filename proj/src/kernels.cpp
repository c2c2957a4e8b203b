#include "uhl/kernels.hpp"

#include <algorithm>

namespace uhl::kernels {

namespace {

// insert zeros into `g` at the (ascending) bit positions in `sorted_bits`
inline long expand_index(long g, const std::vector<int>& sorted_bits) {
    long idx = g;
    for (int b : sorted_bits) {
        long low = idx & ((1L << b) - 1);
        idx = ((idx >> b) << (b + 1)) | low;
    }
    return idx;
}

template <bool Parallel>
void apply_unitary_impl(Vec& amps, const Mat& u, const std::vector<int>& qubits) {
    const int k = static_cast<int>(qubits.size());
    const long dim_local = 1L << k;
    const long groups = amps.size() >> k;
    std::vector<int> sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    std::vector<long> offset(dim_local);
    for (long l = 0; l < dim_local; ++l) {
        long off = 0;
        for (int i = 0; i < k; ++i)
            if ((l >> i) & 1) off |= 1L << qubits[i];
        offset[l] = off;
    }
#pragma omp parallel for schedule(static) if (Parallel)
    for (long g = 0; g < groups; ++g) {
        long base = expand_index(g, sorted);
        Vec x(dim_local);
        for (long l = 0; l < dim_local; ++l) x(l) = amps(base | offset[l]);
        Vec y = u * x;
        for (long l = 0; l < dim_local; ++l) amps(base | offset[l]) = y(l);
    }
}

template <bool Parallel>
void apply_kraus_impl(Mat& rho, const std::vector<Mat>& kraus,
                      const std::vector<int>& qubits) {
    const long dim = rho.rows();
    Mat out = Mat::Zero(dim, dim);
    for (const Mat& kmat : kraus) {
        Mat term = rho;
        // K rho: act on every column
#pragma omp parallel for schedule(static) if (Parallel)
        for (long c = 0; c < dim; ++c) {
            Vec col = term.col(c);
            apply_unitary_serial(col, kmat, qubits);
            term.col(c) = col;
        }
        // (K rho) K^dag: act on every row with K*
        Mat kconj = kmat.conjugate();
#pragma omp parallel for schedule(static) if (Parallel)
        for (long r = 0; r < dim; ++r) {
            Vec row = term.row(r).transpose();
            apply_unitary_serial(row, kconj, qubits);
            term.row(r) = row.transpose();
        }
        out += term;
    }
    rho = out;
}

}  // namespace

void apply_unitary_serial(Vec& amps, const Mat& u, const std::vector<int>& qubits) {
    apply_unitary_impl<false>(amps, u, qubits);
}

void apply_unitary_omp(Vec& amps, const Mat& u, const std::vector<int>& qubits) {
    apply_unitary_impl<true>(amps, u, qubits);
}

void apply_unitary(Vec& amps, const Mat& u, const std::vector<int>& qubits) {
    if (amps.size() >= (1L << 12)) apply_unitary_omp(amps, u, qubits);
    else apply_unitary_serial(amps, u, qubits);
}

void apply_kraus_serial(Mat& rho, const std::vector<Mat>& kraus,
                        const std::vector<int>& qubits) {
    apply_kraus_impl<false>(rho, kraus, qubits);
}

void apply_kraus_omp(Mat& rho, const std::vector<Mat>& kraus,
                     const std::vector<int>& qubits) {
    apply_kraus_impl<true>(rho, kraus, qubits);
}

void apply_kraus(Mat& rho, const std::vector<Mat>& kraus, const std::vector<int>& qubits) {
    if (rho.rows() >= (1L << 6)) apply_kraus_omp(rho, kraus, qubits);
    else apply_kraus_serial(rho, kraus, qubits);
}

}  // namespace uhl::kernels
