#include "uhl/spinsys.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace uhl::spinsys {

AngularMomentumOps angular_momentum(double j) {
    if (j != 0.5 && j != 1.0)
        throw std::invalid_argument("angular_momentum: only j = 1/2 and j = 1 are supported");
    int d = static_cast<int>(std::lround(2 * j + 1));
    // basis ordered m = j, j-1, ..., -j
    Mat jp = Mat::Zero(d, d);
    for (int k = 1; k < d; ++k) {
        double m = j - k;
        jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    Mat jm = jp.adjoint();
    AngularMomentumOps ops;
    ops.dim = d;
    ops.jx = (jp + jm) / 2.0;
    ops.jy = (jp - jm) / cd(0, 2);
    ops.jz = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) ops.jz(k, k) = j - k;
    return ops;
}

Mat hamiltonian(const SpinParams& params, double theta) {
    if (params.omega0 <= 0) throw std::invalid_argument("hamiltonian: omega0 must be > 0");
    auto ops = angular_momentum(params.j);
    return params.omega0 * (std::sin(theta) * std::cos(params.psi) * ops.jx +
                            std::sin(theta) * std::sin(params.psi) * ops.jy +
                            std::cos(theta) * ops.jz);
}

namespace {

// deterministic eigenbasis: ascending energy, first nonzero component real positive
void fix_phases(Mat& vecs) {
    for (int c = 0; c < vecs.cols(); ++c) {
        for (int r = 0; r < vecs.rows(); ++r) {
            cd v = vecs(r, c);
            if (std::abs(v) > 1e-12) {
                vecs.col(c) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
}

ThermalSpinState from_weights(const SpinParams& params, const Mat& h, double beta,
                              const Eigen::VectorXd& energies, const Mat& vecs,
                              Eigen::VectorXd lambdas) {
    ThermalSpinState st;
    st.params = params;
    st.beta = beta;
    st.hamiltonian = h;
    st.energies = energies;
    st.lambdas = std::move(lambdas);
    st.eigenvectors = vecs;
    return st;
}

}  // namespace

ThermalSpinState thermal_state(const SpinParams& params, const Mat& h, double beta) {
    if (!(beta > 0) || !std::isfinite(beta))
        throw std::invalid_argument("thermal_state: beta must be finite and > 0");
    if (!is_hermitian(h, 1e-10)) throw std::invalid_argument("thermal_state: H not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Mat vecs = es.eigenvectors();
    fix_phases(vecs);
    Eigen::VectorXd e = es.eigenvalues();
    Eigen::VectorXd lam = (-beta * (e.array() - e.minCoeff())).exp();
    lam /= lam.sum();
    return from_weights(params, h, beta, e, vecs, lam);
}

ThermalSpinState infinite_temperature_state(const SpinParams& params, const Mat& h) {
    if (!is_hermitian(h, 1e-10))
        throw std::invalid_argument("infinite_temperature_state: H not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Mat vecs = es.eigenvectors();
    fix_phases(vecs);
    int d = static_cast<int>(h.rows());
    Eigen::VectorXd lam = Eigen::VectorXd::Constant(d, 1.0 / d);
    return from_weights(params, h, 0.0, es.eigenvalues(), vecs, lam);
}

Mat ThermalSpinState::rho() const {
    return eigenvectors * lambdas.cast<cd>().asDiagonal() * eigenvectors.adjoint();
}

PurifiedState purify(const ThermalSpinState& state) {
    int d = state.dim();
    PurifiedState ps;
    ps.d = d;
    ps.amplitudes = Vec::Zero(d * d);
    for (int k = 0; k < d; ++k) ps.amplitudes(k * d + k) = std::sqrt(state.lambdas(k));
    return ps;
}

double eta(double beta, double omega0) {
    return 1.0 / std::cosh(beta * omega0 / 2.0);
}

UhlmannProcess uhlmann_process(const ThermalSpinState& state) {
    auto ops = angular_momentum(state.params.j);
    UhlmannProcess p;
    p.eta = eta(state.beta, state.params.omega0);
    p.theta_total_system = 2 * pi;
    p.theta_total_ancilla = p.eta * 2 * pi;
    p.us = expi_hermitian(ops.jy, p.theta_total_system);
    p.ua = expi_hermitian(ops.jy, p.theta_total_ancilla);
    return p;
}

cd loschmidt_amplitude(const ThermalSpinState& state, const UhlmannProcess& proc) {
    int d = state.dim();
    if (proc.us.rows() != d)
        throw std::invalid_argument("loschmidt_amplitude: dimension mismatch");
    // matrix elements in the energy eigenbasis
    Mat us = state.eigenvectors.adjoint() * proc.us * state.eigenvectors;
    Mat ua = state.eigenvectors.adjoint() * proc.ua * state.eigenvectors;
    cd g = 0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            g += std::sqrt(state.lambdas(a) * state.lambdas(b)) * us(b, a) * ua(b, a);
    return g;
}

namespace {
PhaseResult phase_of(cd g) {
    PhaseResult r;
    if (std::abs(g) < kAmplitudeFloor) {
        r.critical = true;
        return r;
    }
    r.theta = std::arg(g);
    return r;
}
}  // namespace

PhaseResult uhlmann_phase(const ThermalSpinState& state, const UhlmannProcess& proc) {
    return phase_of(loschmidt_amplitude(state, proc));
}

cd holonomy_amplitude(const ThermalSpinState& state, int steps) {
    if (steps < 100) throw std::invalid_argument("holonomy_oracle: steps must be >= 100");
    auto ops = angular_momentum(state.params.j);
    int d = state.dim();
    Mat sqrt0 = state.eigenvectors * state.lambdas.cwiseSqrt().cast<cd>().asDiagonal() *
                state.eigenvectors.adjoint();
    // sqrt(rho(theta)) = u(theta) sqrt(rho0) u(theta)^dag along the longitude loop;
    // left-to-right accumulation of the parallel-transport factors in increasing t
    Mat holo = Mat::Identity(d, d);
    Mat prev = sqrt0;
    for (int i = 1; i <= steps; ++i) {
        double th = 2 * pi * i / steps;
        Mat u = expi_hermitian(ops.jy, th);
        Mat cur = u * sqrt0 * u.adjoint();
        // polar part of x = P |x|
        Mat x = prev * cur;
        Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Mat p = svd.matrixU() * svd.matrixV().adjoint();
        holo = p.adjoint() * holo;
        prev = cur;
    }
    return (state.rho() * holo).trace();
}

PhaseResult holonomy_oracle(const ThermalSpinState& state, int steps) {
    return phase_of(holonomy_amplitude(state, steps));
}

double loschmidt_real(double j, double temperature, double omega0) {
    SpinParams p{j, omega0, 0.0};
    auto st = thermal_state(p, hamiltonian(p, 0.0), 1.0 / temperature);
    return loschmidt_amplitude(st, uhlmann_process(st)).real();
}

std::vector<double> critical_temperatures(double j, double t_min, double t_max,
                                          double resolution, double omega0) {
    if (!(t_min > 0) || !(t_max > t_min))
        throw std::invalid_argument("critical_temperatures: bad range");
    std::vector<double> roots;
    int coarse = std::max(64, static_cast<int>((t_max - t_min) / resolution / 4));
    double prev_t = t_min, prev_g = loschmidt_real(j, t_min, omega0);
    for (int i = 1; i <= coarse; ++i) {
        double t = t_min + (t_max - t_min) * i / coarse;
        double g = loschmidt_real(j, t, omega0);
        if ((prev_g < 0) != (g < 0)) {
            double lo = prev_t, hi = t, glo = prev_g;
            while (hi - lo > resolution) {
                double mid = (lo + hi) / 2, gm = loschmidt_real(j, mid, omega0);
                if ((glo < 0) != (gm < 0)) hi = mid;
                else { lo = mid; glo = gm; }
            }
            roots.push_back((lo + hi) / 2);
        }
        prev_t = t;
        prev_g = g;
    }
    return roots;
}

}  // namespace uhl::spinsys
