#include "uhl/synth.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <bit>
#include <ceres/ceres.h>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace uhl::synth {

using circuit::Circuit;
using circuit::Gate;
using circuit::GateKind;

GateSet eagle_gateset() {
    return {"Eagle", {GateKind::ECR, GateKind::RZ, GateKind::X, GateKind::SX}};
}

GateSet heron_gateset() {
    return {"Heron", {GateKind::RZ, GateKind::RX, GateKind::CNOT, GateKind::SX,
                      GateKind::X, GateKind::RZZ}};
}

GateSet generic_gateset() { return {"Generic", {GateKind::U3, GateKind::CNOT}}; }

GateSet gateset_by_name(const std::string& name) {
    std::string s;
    for (char c : name) s += static_cast<char>(std::tolower(c));
    if (s == "eagle") return eagle_gateset();
    if (s == "heron") return heron_gateset();
    if (s == "generic") return generic_gateset();
    throw std::invalid_argument("unknown gate set '" + name + "'");
}

double hs_distance(const Mat& u, const Mat& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("hs_distance: dimension mismatch");
    double n = static_cast<double>(u.rows());
    Mat w = u.adjoint() * v;
    cd tr = w.trace();
    if (std::abs(tr) < 1e-12)
        return std::sqrt(std::max(0.0, 1.0 - std::abs(tr) / n));
    // same quantity through the deviation from the phase-aligned identity:
    // 1 - |tr|/N = ||e^{-i arg tr} w - I||_F^2 / 2N, which stays meaningful
    // far below the double-precision floor of the direct difference
    Mat dev = w / (tr / std::abs(tr)) - Mat::Identity(w.rows(), w.cols());
    return std::sqrt(dev.squaredNorm() / (2.0 * n));
}

namespace {

double mod2pi(double x) {
    double y = std::fmod(x, 2 * pi);
    if (y < 0) y += 2 * pi;
    return y;
}

bool zero_mod_2pi(double x, double tol = 1e-12) {
    double y = mod2pi(x);
    return y < tol || 2 * pi - y < tol;
}

const Mat& magic_basis() {
    static const Mat b = [] {
        Mat m(4, 4);
        double s = 1.0 / std::sqrt(2.0);
        m << s, cd(0, s), 0, 0,
             0, 0, cd(0, s), s,
             0, 0, cd(0, s), -s,
             s, cd(0, -s), 0, 0;
        return m;
    }();
    return b;
}

struct LocalFactor {
    Mat l, r;
    double phase;
};

// split a (determinant-one) tensor product k = l (x) r into its factors
LocalFactor factor_local(const Mat& k) {
    Mat r = k.block(0, 0, 2, 2);
    if (std::abs(r.determinant()) < 0.1) r = k.block(2, 0, 2, 2);
    r /= std::sqrt(r.determinant());
    Mat temp = k * kron(Mat::Identity(2, 2), r.adjoint());
    Mat l(2, 2);
    l << temp(0, 0), temp(0, 2), temp(2, 0), temp(2, 2);
    cd detl = l.determinant();
    l /= std::sqrt(detl);
    return {l, r, std::arg(detl) / 2};
}

}  // namespace

Mat canonical_gate(double a, double b, double c) {
    Mat x = circuit::gate_matrix(GateKind::X, {});
    Mat y = circuit::gate_matrix(GateKind::Y, {});
    Mat z = circuit::gate_matrix(GateKind::Z, {});
    Mat h = a * kron(x, x) + b * kron(y, y) + c * kron(z, z);
    return expi_hermitian(h, -1.0);  // exp(+i h)
}

WeylDecomposition weyl_decompose(const Mat& u) {
    if (u.rows() != 4 || u.cols() != 4 || !is_unitary(u, 1e-9))
        throw std::invalid_argument("weyl_decompose: need a 4x4 unitary");
    const Mat& B = magic_basis();
    cd det = u.determinant();
    Mat un = u * std::pow(det, cd(-0.25));
    double gphase = std::arg(det) / 4;
    Mat up = B.adjoint() * un * B;
    Mat m2 = up.transpose() * up;

    // simultaneous diagonalization of Re(m2), Im(m2) by a random real
    // combination; the first pair of coefficients almost always works
    std::mt19937 rs(2023);
    std::normal_distribution<double> nd;
    Eigen::Matrix4d p;
    Eigen::Vector4cd d;
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
        double ra = it == 0 ? 1.26020661 : nd(rs);
        double rb = it == 0 ? 0.22317849 : nd(rs);
        Eigen::Matrix4d mr = ra * m2.real() + rb * m2.imag();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(mr);
        p = es.eigenvectors();
        Mat pc = p.cast<cd>();
        d = (pc.transpose() * m2 * pc).diagonal();
        if ((pc * d.asDiagonal() * pc.transpose() - m2).cwiseAbs().maxCoeff() < 1e-11) {
            ok = true;
            break;
        }
    }
    if (!ok) throw std::runtime_error("weyl_decompose: diagonalization failed");

    Eigen::Vector4d dr;
    for (int i = 0; i < 4; ++i) dr(i) = -std::arg(d(i)) / 2;
    dr(3) = -dr(0) - dr(1) - dr(2);
    std::array<double, 3> cs{}, cst{};
    for (int i = 0; i < 3; ++i) {
        cs[i] = mod2pi((dr(i) + dr(3)) / 2);
        double m = std::fmod(cs[i], pi / 2);
        cst[i] = std::min(m, pi / 2 - m);
    }
    std::array<int, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return cst[a] < cst[b]; });
    std::array<int, 3> order{idx[1], idx[2], idx[0]};
    std::array<double, 3> cs2{cs[order[0]], cs[order[1]], cs[order[2]]};
    Eigen::Vector4d dr2 = dr;
    for (int i = 0; i < 3; ++i) dr2(i) = dr(order[i]);
    Eigen::Matrix4d p2;
    for (int i = 0; i < 3; ++i) p2.col(i) = p.col(order[i]);
    p2.col(3) = p.col(3);
    if (p2.determinant() < 0) p2.col(3) *= -1;

    Vec ex(4);
    for (int i = 0; i < 4; ++i) ex(i) = std::exp(cd(0, dr2(i)));
    Mat pc = p2.cast<cd>();
    Mat k1 = B * (up * pc * ex.asDiagonal()) * B.adjoint();
    Mat k2 = B * pc.transpose() * B.adjoint();
    LocalFactor f1 = factor_local(k1);
    LocalFactor f2 = factor_local(k2);
    gphase += f1.phase + f2.phase;
    Mat K1l = f1.l, K1r = f1.r, K2l = f2.l, K2r = f2.r;

    Mat ipx(2, 2), ipy(2, 2), ipz(2, 2);
    ipx << 0, cd(0, 1), cd(0, 1), 0;
    ipy << 0, 1, -1, 0;
    ipz << cd(0, 1), 0, 0, cd(0, -1);
    const double PI2 = pi / 2, PI4 = pi / 4;
    int conjs = 0;
    if (cs2[0] > PI2) {
        cs2[0] -= 3 * PI2;
        K1l = K1l * ipy; K1r = K1r * ipy; gphase += PI2;
    }
    if (cs2[1] > PI2) {
        cs2[1] -= 3 * PI2;
        K1l = K1l * ipx; K1r = K1r * ipx; gphase += PI2;
    }
    if (cs2[0] > PI4) {
        cs2[0] = PI2 - cs2[0];
        K1l = K1l * ipy; K2r = ipy * K2r; conjs += 1; gphase -= PI2;
    }
    if (cs2[1] > PI4) {
        cs2[1] = PI2 - cs2[1];
        K1l = K1l * ipx; K2r = ipx * K2r; conjs += 1; gphase += PI2;
        if (conjs == 1) gphase -= pi;
    }
    if (cs2[2] > PI2) {
        cs2[2] -= 3 * PI2;
        K1l = K1l * ipz; K1r = K1r * ipz; gphase += PI2;
        if (conjs == 1) gphase -= pi;
    }
    if (conjs == 1) {
        cs2[2] = PI2 - cs2[2];
        K1l = K1l * ipz; K2r = ipz * K2r; gphase += PI2;
    }
    if (cs2[2] > PI4) {
        cs2[2] -= PI2;
        K1l = K1l * ipz; K1r = K1r * ipz; gphase -= PI2;
    }
    // on the chamber face a = pi/4 the classes (a,b,c) and (a,b,-c) coincide;
    // pick c >= 0 so equal classes always fold to identical coordinates
    if (cs2[1] > PI4 - 1e-12 && cs2[2] < 0) {
        Mat x = circuit::gate_matrix(GateKind::X, {});
        Mat z = circuit::gate_matrix(GateKind::Z, {});
        K1l = K1l * (x * z);
        K2l = z * K2l;
        K2r = x * K2r;
        gphase += PI2;
        cs2[2] = -cs2[2];
    }
    return {gphase, K1l, K1r, K2l, K2r, cs2[1], cs2[0], cs2[2]};
}

Euler zyz_angles(const Mat& u) {
    if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, 1e-9))
        throw std::invalid_argument("zyz_angles: need a 2x2 unitary");
    Mat s = u / std::sqrt(u.determinant());
    double th = 2 * std::atan2(std::abs(s(1, 0)), std::abs(s(0, 0)));
    double pl = 2 * std::arg(s(1, 1));
    double mi = 2 * std::arg(s(1, 0));
    double phi = (pl + mi) / 2, lam = (pl - mi) / 2;
    Mat r = circuit::gate_matrix(GateKind::RZ, {phi}) *
            circuit::gate_matrix(GateKind::RY, {th}) *
            circuit::gate_matrix(GateKind::RZ, {lam});
    double alpha = std::arg((u * r.adjoint()).trace());
    return {th, phi, lam, alpha};
}

namespace {

void emit_u3(Circuit& c, int q, const Mat& m, bool prune) {
    if (prune && phase_dist(m, Mat::Identity(2, 2)) < 1e-12) return;
    Euler e = zyz_angles(m);
    c.add(Gate::u3(q, e.theta, e.phi, e.lambda));
}

// canonical-class core templates over {CNOT, RZ, RY} on local qubits 0,1
std::vector<Gate> core_gates(double a, double b, double c, bool force_full) {
    const double tol = 1e-9;
    if (!force_full) {
        if (std::abs(a) < tol && std::abs(b) < tol && std::abs(c) < tol) return {};
        if (std::abs(c) < tol && std::abs(b) < tol && std::abs(a - pi / 4) < tol)
            return {Gate::cnot(0, 1)};
        if (std::abs(c) < tol)
            return {Gate::cnot(1, 0), Gate::rz(0, 2 * a), Gate::ry(1, 2 * b),
                    Gate::cnot(1, 0)};
    }
    return {Gate::cnot(1, 0), Gate::rz(0, pi / 2 - 2 * a), Gate::ry(1, pi / 2 - 2 * b),
            Gate::cnot(0, 1), Gate::ry(1, pi / 2 + 2 * c), Gate::cnot(1, 0)};
}

// exact emission of x on qubits (0,1), up to global phase
void emit_two_qubit(Circuit& c, const Mat& x, bool force_full) {
    WeylDecomposition t = weyl_decompose(x);
    std::vector<Gate> cg = core_gates(t.a, t.b, t.c, force_full);
    Circuit corec(2);
    for (const auto& g : cg) corec.add(g);
    Mat coreM = circuit::unitary_of_circuit(corec);
    WeylDecomposition tc = weyl_decompose(coreM);
    if (std::abs(t.a - tc.a) > 1e-7 || std::abs(t.b - tc.b) > 1e-7 ||
        std::abs(t.c - tc.c) > 1e-7)
        throw std::logic_error("emit_two_qubit: core template class mismatch");
    Mat pre_l = tc.k2l.adjoint() * t.k2l, pre_r = tc.k2r.adjoint() * t.k2r;
    Mat post_l = t.k1l * tc.k1l.adjoint(), post_r = t.k1r * tc.k1r.adjoint();
    bool prune = !force_full;
    emit_u3(c, 0, pre_r, prune);
    emit_u3(c, 1, pre_l, prune);
    for (const auto& g : cg) c.add(g);
    emit_u3(c, 0, post_r, prune);
    emit_u3(c, 1, post_l, prune);
}

Mat delta_mat(double r) {
    Mat d = Mat::Zero(4, 4);
    d(0, 0) = d(3, 3) = std::exp(cd(0, r));
    d(1, 1) = d(2, 2) = std::exp(cd(0, -r));
    return d;
}

cd gamma_tr(const Mat& u) {
    Mat un = u * std::pow(u.determinant(), cd(-0.25));
    const Mat& B = magic_basis();
    Mat um = B.adjoint() * un * B;
    return (um * um.transpose()).trace();
}

// phase r of the ZZ diagonal Delta(r) killing the third canonical coordinate
// of Delta(r)^dag u: Im tr gamma is a sinusoid in 2r, fitted from 3 samples
double find_r(const Mat& u) {
    cd t0 = gamma_tr(u);
    cd t1 = gamma_tr(delta_mat(pi / 4).adjoint() * u);
    cd t2 = gamma_tr(delta_mat(pi / 8).adjoint() * u);
    Mat a(3, 3);
    a << 1, 1, 1,
         1, cd(0, 1), cd(0, -1),
         1, std::exp(cd(0, pi / 4)), std::exp(cd(0, -pi / 4));
    Vec rhs(3);
    rhs << t0, t1, t2;
    Vec pqs = a.fullPivLu().solve(rhs);
    cd p = pqs(0), q = pqs(1), s = pqs(2);
    double al = q.imag() + s.imag(), be = q.real() - s.real();
    double rm = std::hypot(al, be);
    if (rm < 1e-14) return 0.0;
    double val = std::clamp(-p.imag() / rm, -1.0, 1.0);
    return (std::asin(val) - std::atan2(al, be)) / 2;
}

// emits Delta(r)^dag x with at most 2 CNOTs and returns r
double emit_two_qubit_diag(Circuit& c, const Mat& x) {
    double r = find_r(x);
    emit_two_qubit(c, delta_mat(r).adjoint() * x, false);
    return r;
}

struct Demux {
    Mat v, w;
    std::vector<double> ang;
};

// diag(w1, w2) (select = MSB) = (I (x) v) mRz(ang) (I (x) w)
Demux demux(const Mat& w1, const Mat& w2) {
    Eigen::ComplexSchur<Mat> schur(w1 * w2.adjoint());
    long h = w1.rows();
    Vec dphase(h);
    std::vector<double> ang(h);
    for (long i = 0; i < h; ++i) {
        double phi = std::arg(schur.matrixT()(i, i)) / 2;
        dphase(i) = std::exp(cd(0, -phi));
        ang[i] = -2 * phi;
    }
    Mat v = schur.matrixU();
    Mat w = dphase.asDiagonal() * v.adjoint() * w1;
    return {v, w, ang};
}

struct Csd {
    Mat u1, u2, v1h, v2h;
    std::vector<double> theta_ry;
};

Csd cosine_sine(const Mat& u) {
    int m = static_cast<int>(u.rows()), h = m / 2;
    Mat x11 = u.topLeftCorner(h, h), x12 = u.topRightCorner(h, h);
    Mat x21 = u.bottomLeftCorner(h, h), x22 = u.bottomRightCorner(h, h);
    Csd out;
    out.u1.resize(h, h); out.u2.resize(h, h);
    out.v1h.resize(h, h); out.v2h.resize(h, h);
    std::vector<double> theta(h);
    int info = LAPACKE_zuncsd(
        LAPACK_COL_MAJOR, 'Y', 'Y', 'Y', 'Y', 'N', 'D', m, h, h,
        (lapack_complex_double*)x11.data(), h, (lapack_complex_double*)x12.data(), h,
        (lapack_complex_double*)x21.data(), h, (lapack_complex_double*)x22.data(), h,
        theta.data(),
        (lapack_complex_double*)out.u1.data(), h,
        (lapack_complex_double*)out.u2.data(), h,
        (lapack_complex_double*)out.v1h.data(), h,
        (lapack_complex_double*)out.v2h.data(), h);
    if (info != 0)
        throw std::runtime_error("cosine_sine: zuncsd failed, info=" +
                                 std::to_string(info));
    out.theta_ry.resize(h);
    for (int i = 0; i < h; ++i) out.theta_ry[i] = 2 * theta[i];
    return out;
}

int gray(int i) { return i ^ (i >> 1); }

std::vector<double> walsh_angles(const std::vector<double>& angles) {
    int n = static_cast<int>(angles.size());
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int sign = std::popcount(static_cast<unsigned>(gray(i) & j)) % 2 ? -1 : 1;
            out[i] += sign * angles[j];
        }
        out[i] /= n;
    }
    return out;
}

// uniformly controlled rotation; with absorb_final_cz the trailing entangler
// (a CZ in this variant) is omitted and must be folded into what follows
void emit_mux(Circuit& c, GateKind axis, std::vector<double> angles, int target,
              const std::vector<int>& selects, bool absorb_final_cz) {
    int k = static_cast<int>(selects.size());
    int n = static_cast<int>(angles.size());
    if (n != (1 << k))
        throw std::invalid_argument("multiplexed rotation: need 2^selects angles");
    if (k == 0) {
        c.add(axis == GateKind::RY ? Gate::ry(target, angles[0])
                                   : Gate::rz(target, angles[0]));
        return;
    }
    if (absorb_final_cz) {
        int cbit = k - 1;
        for (int s = 0; s < n; ++s)
            if ((s >> cbit) & 1) angles[s] += pi;
    }
    std::vector<double> th = walsh_angles(angles);
    for (int i = 0; i < n; ++i) {
        c.add(axis == GateKind::RY ? Gate::ry(target, th[i])
                                   : Gate::rz(target, th[i]));
        int diff = gray(i) ^ gray((i + 1) % n);
        int ctrl_bit = std::bit_width(static_cast<unsigned>(diff)) - 1;
        if (absorb_final_cz && i == n - 1) break;  // entangler absorbed
        c.add(Gate::cnot(selects[ctrl_bit], target));
    }
}

// Z on local qubit `bit` of a 2^k block
Mat z_on_bit(int dim, int bit) {
    Mat z = Mat::Identity(dim, dim);
    for (int b = 0; b < dim; ++b)
        if ((b >> bit) & 1) z(b, b) = -1;
    return z;
}

void qsd_rec(const Mat& u, Circuit& c, bool optimize) {
    long dim = u.rows();
    if (dim == 2) {
        if (optimize && phase_dist(u, Mat::Identity(2, 2)) < 1e-12) return;
        emit_u3(c, 0, u, false);
        return;
    }
    if (dim == 4) {
        emit_two_qubit(c, u, /*force_full=*/!optimize);
        return;
    }
    int n_loc = std::bit_width(static_cast<unsigned long>(dim)) - 1;
    int top = n_loc - 1, h = static_cast<int>(dim) / 2;
    std::vector<int> selects(top);
    for (int i = 0; i < top; ++i) selects[i] = i;
    Csd cs = cosine_sine(u);

    Demux db = demux(cs.v1h, cs.v2h);
    if (dim == 8 && optimize) {
        // daisy-chain: each 2q block emitted up to a ZZ diagonal that is
        // folded into the next block; the central multiplexor trades its last
        // CNOT for a CZ which is absorbed into the following multiplexed u
        double r1 = emit_two_qubit_diag(c, db.w);
        emit_mux(c, GateKind::RZ, db.ang, top, selects, false);
        double r2 = emit_two_qubit_diag(c, db.v * delta_mat(r1));
        emit_mux(c, GateKind::RY, cs.theta_ry, top, selects, true);
        Mat a1 = cs.u1 * delta_mat(r2);
        Mat a2 = cs.u2 * z_on_bit(h, top - 1) * delta_mat(r2);
        Demux da = demux(a1, a2);
        double r3 = emit_two_qubit_diag(c, da.w);
        emit_mux(c, GateKind::RZ, da.ang, top, selects, false);
        emit_two_qubit(c, da.v * delta_mat(r3), false);
        return;
    }
    qsd_rec(db.w, c, optimize);
    emit_mux(c, GateKind::RZ, db.ang, top, selects, false);
    qsd_rec(db.v, c, optimize);
    Mat a1 = cs.u1, a2 = cs.u2;
    if (optimize) {
        emit_mux(c, GateKind::RY, cs.theta_ry, top, selects, true);
        a2 = a2 * z_on_bit(h, top - 1);
    } else {
        emit_mux(c, GateKind::RY, cs.theta_ry, top, selects, false);
    }
    Demux da = demux(a1, a2);
    qsd_rec(da.w, c, optimize);
    emit_mux(c, GateKind::RZ, da.ang, top, selects, false);
    qsd_rec(da.v, c, optimize);
}

}  // namespace

circuit::Circuit kak_decompose(const Mat& u) {
    if (u.rows() != 4 || u.cols() != 4 || !is_unitary(u, 1e-9))
        throw std::invalid_argument("kak_decompose: need a 4x4 unitary");
    Circuit c(2);
    emit_two_qubit(c, u, false);
    return c;
}

circuit::Circuit qsd_decompose(const Mat& u, const QsdConfig& cfg) {
    long dim = u.rows();
    if (dim != u.cols() || dim < 2 || dim > 16 || (dim & (dim - 1)) != 0)
        throw std::invalid_argument("qsd_decompose: need a 2^n x 2^n matrix, n <= 4");
    if (!is_unitary(u, 1e-9))
        throw std::invalid_argument("qsd_decompose: input not unitary");
    int n = std::bit_width(static_cast<unsigned long>(dim)) - 1;
    Circuit c(n);
    qsd_rec(u, c, cfg.optimize);
    return c;
}

void emit_multiplexed_ry(Circuit& c, const std::vector<double>& angles, int target,
                         const std::vector<int>& selects) {
    emit_mux(c, GateKind::RY, angles, target, selects, false);
}

void emit_multiplexed_rz(Circuit& c, const std::vector<double>& angles, int target,
                         const std::vector<int>& selects) {
    emit_mux(c, GateKind::RZ, angles, target, selects, false);
}

// ---------------------------------------------------------------------------
// transpilation

namespace {

enum class OneQStyle { U3, EagleZSZSZ, HeronZXZ };

OneQStyle style_of(const GateSet& gs) {
    if (gs.contains(GateKind::U3)) return OneQStyle::U3;
    if (gs.contains(GateKind::RX)) return OneQStyle::HeronZXZ;
    if (gs.contains(GateKind::SX) && gs.contains(GateKind::RZ))
        return OneQStyle::EagleZSZSZ;
    throw std::invalid_argument("transpile: gate set cannot express 1q rotations");
}

void emit_1q_basis(Circuit& out, int q, const Mat& m, OneQStyle style) {
    if (phase_dist(m, Mat::Identity(2, 2)) < 1e-12) return;
    Euler e = zyz_angles(m);
    switch (style) {
        case OneQStyle::U3:
            out.add(Gate::u3(q, e.theta, e.phi, e.lambda));
            break;
        case OneQStyle::EagleZSZSZ:
            if (std::abs(e.theta) < 1e-10) {
                if (!zero_mod_2pi(e.phi + e.lambda))
                    out.add(Gate::rz(q, e.phi + e.lambda));
            } else if (std::abs(e.theta - pi / 2) < 1e-10) {
                // single-SX form: U ~ Rz(phi+pi/2) SX Rz(lambda-pi/2)
                if (!zero_mod_2pi(e.lambda - pi / 2))
                    out.add(Gate::rz(q, e.lambda - pi / 2));
                out.add(Gate::sx(q));
                if (!zero_mod_2pi(e.phi + pi / 2))
                    out.add(Gate::rz(q, e.phi + pi / 2));
            } else {
                if (!zero_mod_2pi(e.lambda)) out.add(Gate::rz(q, e.lambda));
                out.add(Gate::sx(q));
                if (!zero_mod_2pi(e.theta + pi)) out.add(Gate::rz(q, e.theta + pi));
                out.add(Gate::sx(q));
                if (!zero_mod_2pi(e.phi + pi)) out.add(Gate::rz(q, e.phi + pi));
            }
            break;
        case OneQStyle::HeronZXZ:
            if (std::abs(e.theta) < 1e-10) {
                if (!zero_mod_2pi(e.phi + e.lambda))
                    out.add(Gate::rz(q, e.phi + e.lambda));
            } else {
                if (!zero_mod_2pi(e.lambda - pi / 2))
                    out.add(Gate::rz(q, e.lambda - pi / 2));
                out.add(Gate::rx(q, e.theta));
                if (!zero_mod_2pi(e.phi + pi / 2))
                    out.add(Gate::rz(q, e.phi + pi / 2));
            }
            break;
    }
}

struct Dressing {
    Mat pre_r, pre_l, post_r, post_l;
};

// rewrite gate a as locals * b * locals; requires equal canonical class
Dressing express_as(const Mat& a, const Mat& b) {
    WeylDecomposition wa = weyl_decompose(a);
    WeylDecomposition wb = weyl_decompose(b);
    if (std::abs(wa.a - wb.a) > 1e-9 || std::abs(wa.b - wb.b) > 1e-9 ||
        std::abs(wa.c - wb.c) > 1e-9)
        throw std::logic_error("express_as: canonical class mismatch");
    return {wb.k2r.adjoint() * wa.k2r, wb.k2l.adjoint() * wa.k2l,
            wa.k1r * wb.k1r.adjoint(), wa.k1l * wb.k1l.adjoint()};
}

struct Transpiler {
    const GateSet& gs;
    OneQStyle style;
    Circuit out;
    std::vector<std::vector<Gate>> runs;

    Transpiler(const Circuit& c, const GateSet& g)
        : gs(g), style(style_of(g)), out(c.n_qubits), runs(c.n_qubits) {}

    void push1q(const Gate& g) { runs[g.qubits[0]].push_back(g); }

    void flush(int q) {
        auto& run = runs[q];
        if (run.empty()) return;
        if (run.size() == 1 && gs.contains(run[0].kind)) {
            out.add(run[0]);
        } else {
            Mat m = Mat::Identity(2, 2);
            for (const auto& g : run) m = g.matrix * m;
            emit_1q_basis(out, q, m, style);
        }
        run.clear();
    }

    void flush_all() {
        for (int q = 0; q < out.n_qubits; ++q) flush(q);
    }

    const Dressing& cnot_as_ecr() {
        static const Dressing d = express_as(
            circuit::gate_matrix(GateKind::CNOT, {}),
            circuit::gate_matrix(GateKind::ECR, {}));
        return d;
    }

    const Dressing& ecr_as_cnot() {
        static const Dressing d = express_as(
            circuit::gate_matrix(GateKind::ECR, {}),
            circuit::gate_matrix(GateKind::CNOT, {}));
        return d;
    }

    void emit_dressed(int q0, int q1, const Dressing& d, Gate native) {
        push1q(Gate::unitary({q0}, d.pre_r));
        push1q(Gate::unitary({q1}, d.pre_l));
        flush(q0);
        flush(q1);
        out.add(std::move(native));
        push1q(Gate::unitary({q0}, d.post_r));
        push1q(Gate::unitary({q1}, d.post_l));
    }

    void handle_cnot(int ctl, int tgt) {
        if (gs.contains(GateKind::CNOT)) {
            flush(ctl);
            flush(tgt);
            out.add(Gate::cnot(ctl, tgt));
        } else if (gs.contains(GateKind::ECR)) {
            emit_dressed(ctl, tgt, cnot_as_ecr(), Gate::ecr(ctl, tgt));
        } else {
            throw std::invalid_argument("transpile: no entangler for cnot");
        }
    }

    void handle(const Gate& g) {
        switch (g.kind) {
            case GateKind::Barrier:
                flush_all();
                out.add(g);
                return;
            case GateKind::Unitary:
                if (g.arity() == 1) {
                    push1q(g);
                    return;
                }
                throw std::invalid_argument(
                    "transpile: multi-qubit unitary gates must be synthesized first");
            case GateKind::CNOT:
                handle_cnot(g.qubits[0], g.qubits[1]);
                return;
            case GateKind::ECR:
                if (gs.contains(GateKind::ECR)) {
                    flush(g.qubits[0]);
                    flush(g.qubits[1]);
                    out.add(g);
                } else if (gs.contains(GateKind::CNOT)) {
                    emit_dressed(g.qubits[0], g.qubits[1], ecr_as_cnot(),
                                 Gate::cnot(g.qubits[0], g.qubits[1]));
                } else {
                    throw std::invalid_argument("transpile: no entangler for ecr");
                }
                return;
            case GateKind::RZZ:
                if (gs.contains(GateKind::RZZ)) {
                    flush(g.qubits[0]);
                    flush(g.qubits[1]);
                    out.add(g);
                } else {
                    handle_cnot(g.qubits[0], g.qubits[1]);
                    push1q(Gate::rz(g.qubits[1], g.params[0]));
                    handle_cnot(g.qubits[0], g.qubits[1]);
                }
                return;
            default:
                if (g.arity() != 1)
                    throw std::invalid_argument("transpile: unconvertible gate kind");
                push1q(g);
                return;
        }
    }
};

}  // namespace

circuit::Circuit transpile(const circuit::Circuit& c, const GateSet& gateset) {
    Transpiler t(c, gateset);
    for (const auto& g : c.gates) t.handle(g);
    t.flush_all();
    t.out.measurements = c.measurements;
    return t.out;
}

// ---------------------------------------------------------------------------
// approximate synthesis: template search with quasi-Newton angle optimization

namespace {

struct Slot {
    bool is_cnot;
    int q0, q1;   // cnot: control/target; u3: q0 only
    int offset;   // parameter offset for u3 slots
};

std::vector<Slot> build_slots(int n, const std::vector<std::pair<int, int>>& blocks) {
    std::vector<Slot> slots;
    for (int q = 0; q < n; ++q) slots.push_back({false, q, -1, 3 * q});
    int off = 3 * n;
    for (const auto& [a, b] : blocks) {
        slots.push_back({true, a, b, -1});
        slots.push_back({false, a, -1, off});
        slots.push_back({false, b, -1, off + 3});
        off += 6;
    }
    return slots;
}

Mat u3_matrix(double th, double ph, double la) {
    return circuit::gate_matrix(GateKind::U3, {th, ph, la});
}

void u3_derivatives(double th, double ph, double la, Mat d[3]) {
    double c = std::cos(th / 2), s = std::sin(th / 2);
    cd el = std::exp(cd(0, la)), ep = std::exp(cd(0, ph)), epl = std::exp(cd(0, ph + la));
    d[0].resize(2, 2);
    d[0] << -s / 2.0, -el * (c / 2.0), ep * (c / 2.0), -epl * (s / 2.0);
    d[1].resize(2, 2);
    d[1] << 0, 0, cd(0, 1) * ep * s, cd(0, 1) * epl * c;
    d[2].resize(2, 2);
    d[2] << 0, cd(0, -1) * el * s, 0, cd(0, 1) * epl * c;
}

// 1 - |Tr(v^dag c)|/N, evaluated through the deviation from the aligned
// identity so values far below double epsilon of 1 remain meaningful
class TraceObjective final : public ceres::FirstOrderFunction {
 public:
    TraceObjective(const Mat& target, int n, std::vector<Slot> slots, int n_params)
        : vdag_(target.adjoint()),
          n_(n),
          dim_(1L << n),
          slots_(std::move(slots)),
          n_params_(n_params) {}

    bool Evaluate(const double* x, double* cost, double* grad) const override {
        size_t m = slots_.size();
        std::vector<Mat> g(m);
        for (size_t i = 0; i < m; ++i) {
            const Slot& s = slots_[i];
            if (s.is_cnot) {
                g[i] = circuit::embed(circuit::gate_matrix(GateKind::CNOT, {}),
                                      {s.q0, s.q1}, n_);
            } else {
                g[i] = circuit::embed(
                    u3_matrix(x[s.offset], x[s.offset + 1], x[s.offset + 2]), {s.q0},
                    n_);
            }
        }
        std::vector<Mat> pre(m);
        pre[0] = g[0];
        for (size_t i = 1; i < m; ++i) pre[i] = g[i] * pre[i - 1];
        Mat vc = vdag_ * pre[m - 1];
        cd tr = vc.trace();
        cd phase = std::abs(tr) > 1e-14 ? tr / std::abs(tr) : cd(1, 0);
        Mat dev = vc / phase - Mat::Identity(dim_, dim_);
        *cost = dev.squaredNorm() / (2.0 * dim_);
        if (!grad) return true;
        std::fill(grad, grad + n_params_, 0.0);
        Mat suf = Mat::Identity(dim_, dim_);
        for (size_t ii = m; ii-- > 0;) {
            const Slot& s = slots_[ii];
            if (!s.is_cnot) {
                Mat mfac = (ii == 0 ? Mat(Mat::Identity(dim_, dim_)) : pre[ii - 1]) *
                           vdag_ * suf;
                Mat d[3];
                u3_derivatives(x[s.offset], x[s.offset + 1], x[s.offset + 2], d);
                for (int k = 0; k < 3; ++k) {
                    Mat e = circuit::embed(d[k], {s.q0}, n_);
                    cd dtr = (mfac.transpose().cwiseProduct(e)).sum();
                    grad[s.offset + k] = -(std::conj(phase) * dtr).real() / dim_;
                }
            }
            suf = suf * g[ii];
        }
        return true;
    }

    int NumParameters() const override { return n_params_; }

 private:
    Mat vdag_;
    int n_;
    long dim_;
    std::vector<Slot> slots_;
    int n_params_;
};

struct OptResult {
    double cost = 1.0;
    std::vector<double> params;
};

OptResult optimize_once(const Mat& target, int n,
                        const std::vector<std::pair<int, int>>& blocks,
                        std::vector<double> x0, int max_iter) {
    std::vector<Slot> slots = build_slots(n, blocks);
    int np = static_cast<int>(x0.size());
    ceres::GradientProblem problem(new TraceObjective(target, n, slots, np));
    ceres::GradientProblemSolver::Options opts;
    opts.line_search_direction_type = ceres::LBFGS;
    opts.max_num_iterations = max_iter;
    opts.logging_type = ceres::SILENT;
    opts.function_tolerance = 1e-14;
    opts.gradient_tolerance = 1e-32;
    opts.parameter_tolerance = 1e-16;
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(opts, problem, x0.data(), &summary);
    double cost;
    TraceObjective obj(target, n, slots, np);
    obj.Evaluate(x0.data(), &cost, nullptr);
    return {cost, std::move(x0)};
}

OptResult optimize_restarts(const Mat& target, int n,
                            const std::vector<std::pair<int, int>>& blocks,
                            const std::vector<double>& warm,
                            const SynthesisConfig& cfg, uint64_t salt) {
    int np = 3 * n + 6 * static_cast<int>(blocks.size());
    std::vector<OptResult> results(cfg.restarts);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<double> x0(np, 0.0);
        std::mt19937_64 rng(cfg.seed * 1000003ULL + salt * 131ULL +
                            static_cast<uint64_t>(r) * 17ULL + 1ULL);
        if (!warm.empty() && r < cfg.restarts / 2) {
            // half the budget continues from the previous depth; jitter all
            // but one copy so a stuck warm point cannot pin every restart
            std::copy(warm.begin(), warm.end(), x0.begin());
            if (r > 0) {
                std::normal_distribution<double> jit(0.0, 0.2);
                for (auto& v : x0) v += jit(rng);
            }
        } else {
            std::uniform_real_distribution<double> dist(-pi, pi);
            for (auto& v : x0) v = dist(rng);
        }
        results[r] = optimize_once(target, n, blocks, std::move(x0),
                                   cfg.max_iterations);
    }
    int best = 0;
    for (int r = 1; r < cfg.restarts; ++r)
        if (results[r].cost < results[best].cost) best = r;
    return results[best];
}

Circuit circuit_from_params(int n, const std::vector<std::pair<int, int>>& blocks,
                            const std::vector<double>& x) {
    Circuit c(n);
    auto add_u3 = [&](int q, int off) {
        Mat m = u3_matrix(x[off], x[off + 1], x[off + 2]);
        if (phase_dist(m, Mat::Identity(2, 2)) < 1e-12) return;
        c.add(Gate::u3(q, x[off], x[off + 1], x[off + 2]));
    };
    for (int q = 0; q < n; ++q) add_u3(q, 3 * q);
    int off = 3 * n;
    for (const auto& [a, b] : blocks) {
        c.add(Gate::cnot(a, b));
        add_u3(a, off);
        add_u3(b, off + 3);
        off += 6;
    }
    return c;
}

}  // namespace

SynthResult approx_synthesize(const Mat& u, const SynthesisConfig& cfg) {
    long dim = u.rows();
    if ((dim != 4 && dim != 8) || u.cols() != dim)
        throw std::invalid_argument("approx_synthesize: dimension must be 4 or 8");
    if (!is_unitary(u, 1e-9))
        throw std::invalid_argument("approx_synthesize: input not unitary");
    if (cfg.epsilon < 1e-20 || cfg.epsilon > 1e-1)
        throw std::invalid_argument("approx_synthesize: epsilon out of [1e-20, 1e-1]");
    int n = dim == 4 ? 2 : 3;
    double target_cost = cfg.epsilon * cfg.epsilon;

    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);

    std::vector<std::pair<int, int>> blocks;
    OptResult cur = optimize_restarts(u, n, blocks, {}, cfg, 0);
    while (cur.cost > target_cost &&
           static_cast<int>(blocks.size()) < cfg.max_depth) {
        OptResult best;
        size_t best_pair = 0;
        for (size_t pidx = 0; pidx < pairs.size(); ++pidx) {
            auto cand = blocks;
            cand.push_back(pairs[pidx]);
            std::vector<double> warm = cur.params;
            warm.resize(warm.size() + 6, 0.0);
            uint64_t salt = (blocks.size() + 1) * 101ULL + pidx;
            OptResult r = optimize_restarts(u, n, cand, warm, cfg, salt);
            if (r.cost < best.cost) {
                best = std::move(r);
                best_pair = pidx;
            }
        }
        // a lone cross-pair cnot cannot be undone by local gates, so one-block
        // growth can trap all blocks on a single pair; when progress stalls,
        // look two blocks ahead (a same-pair double is cnot^2 = identity, so
        // its warm start is exactly value-preserving)
        bool stalled = best.cost > 0.5 * cur.cost && best.cost > target_cost;
        if (stalled && static_cast<int>(blocks.size()) + 2 <= cfg.max_depth) {
            OptResult best2;
            size_t bp1 = 0, bp2 = 0;
            for (size_t i = 0; i < pairs.size(); ++i) {
                for (size_t j = 0; j < pairs.size(); ++j) {
                    auto cand = blocks;
                    cand.push_back(pairs[i]);
                    cand.push_back(pairs[j]);
                    std::vector<double> warm = cur.params;
                    warm.resize(warm.size() + 12, 0.0);
                    uint64_t salt = (blocks.size() + 1) * 101ULL + 29ULL +
                                    i * pairs.size() + j;
                    OptResult r = optimize_restarts(u, n, cand, warm, cfg, salt);
                    if (r.cost < best2.cost) {
                        best2 = std::move(r);
                        bp1 = i;
                        bp2 = j;
                    }
                }
            }
            if (best2.cost < best.cost) {
                blocks.push_back(pairs[bp1]);
                blocks.push_back(pairs[bp2]);
                cur = std::move(best2);
                continue;
            }
        }
        blocks.push_back(pairs[best_pair]);
        cur = std::move(best);
    }

    SynthResult out;
    out.circuit = circuit_from_params(n, blocks, cur.params);
    out.distance = std::sqrt(std::max(0.0, cur.cost));
    out.success = cur.cost <= target_cost;
    return out;
}

// ---------------------------------------------------------------------------
// gate-count reports

GateCountReport count_report(
    const std::vector<std::pair<std::string, std::vector<Circuit>>>& by_block) {
    GateCountReport rep;
    for (const auto& [name, circuits] : by_block) {
        BlockCounts bc;
        for (const auto& c : circuits) {
            for (const auto& g : c.gates) {
                if (g.kind == GateKind::Barrier) continue;
                bc.mean_by_kind[circuit::kind_name(g.kind)] += 1.0;
            }
        }
        double denom = circuits.empty() ? 1.0 : static_cast<double>(circuits.size());
        for (auto& [k, v] : bc.mean_by_kind) {
            v /= denom;
            bc.total += v;
        }
        rep.blocks.emplace_back(name, std::move(bc));
    }
    return rep;
}

std::string report_csv(const GateCountReport& r) {
    std::ostringstream os;
    os << "block,gate_kind,mean_count\n";
    for (const auto& [name, bc] : r.blocks) {
        for (const auto& [kind, v] : bc.mean_by_kind)
            os << name << "," << kind << "," << v << "\n";
        os << name << ",total," << bc.total << "\n";
    }
    return os.str();
}

std::string report_table(const GateCountReport& r) {
    std::ostringstream os;
    os << "block                     kind       mean\n";
    os << "----------------------------------------\n";
    for (const auto& [name, bc] : r.blocks) {
        for (const auto& [kind, v] : bc.mean_by_kind) {
            os << name;
            for (size_t i = name.size(); i < 26; ++i) os << ' ';
            os << kind;
            for (size_t i = kind.size(); i < 11; ++i) os << ' ';
            os << v << "\n";
        }
        os << name;
        for (size_t i = name.size(); i < 26; ++i) os << ' ';
        os << "total      " << bc.total << "\n";
    }
    return os.str();
}

}  // namespace uhl::synth
