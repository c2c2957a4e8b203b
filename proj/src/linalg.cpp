#include "uhl/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace uhl {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double unitarity_defect(const Mat& u) {
    Mat d = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

bool is_unitary(const Mat& u, double tol) {
    return u.rows() == u.cols() && unitarity_defect(u) < tol;
}

bool is_hermitian(const Mat& m, double tol) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() < tol;
}

Mat expi_hermitian(const Mat& h, double t) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases = (cd(0, -t) * es.eigenvalues().cast<cd>().array()).exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat random_unitary(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cd(n(rng), n(rng));
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    // fix the R-diagonal phase ambiguity so the distribution is Haar
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        cd d = r(j, j);
        q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : cd(1, 0);
    }
    return q;
}

double phase_dist(const Mat& a, const Mat& b) {
    cd tr = (a.adjoint() * b).trace();
    cd ph = (std::abs(tr) > 1e-14) ? tr / std::abs(tr) : cd(1, 0);
    return (a * ph - b).cwiseAbs().maxCoeff();
}

}  // namespace uhl
