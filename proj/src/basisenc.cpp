#include "uhl/basisenc.hpp"

#include <cmath>
#include <stdexcept>

#include "uhl/synth.hpp"

namespace uhl::basisenc {

using circuit::Circuit;
using circuit::Gate;

Mat m_matrix() {
    double s = 1.0 / std::sqrt(2.0);
    Mat m = Mat::Zero(4, 4);
    m(0, 1) = s;
    m(0, 2) = -s;
    m(1, 0) = 1;
    m(2, 1) = s;
    m(2, 2) = s;
    m(3, 3) = 1;
    return m;
}

EmbeddedOperator embed_triplet(const Mat& a) {
    if (a.rows() != 3 || !is_unitary(a, 1e-10))
        throw std::invalid_argument("embed_triplet: need a 3x3 unitary");
    Mat v_ph = Mat::Identity(4, 4);
    v_ph.block(1, 1, 3, 3) = a;
    Mat m = m_matrix();
    EmbeddedOperator e;
    e.triplet_block = a;
    e.full = m.adjoint() * v_ph * m;
    return e;
}

Mat two_qubit_ry(double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    Mat r(4, 4);
    r << 1 + c, -s, -s, 1 - c,
         s, 1 + c, c - 1, -s,
         s, c - 1, 1 + c, -s,
         1 - c, s, s, 1 + c;
    return 0.5 * r;
}

Mat controlled(const Mat& u) {
    if (!is_unitary(u, 1e-10)) throw std::invalid_argument("controlled: not unitary");
    long d = u.rows();
    Mat c = Mat::Identity(2 * d, 2 * d);
    c.block(d, d, d, d) = u;
    return c;
}

namespace {

// rotation angles of the amplitude-encoding binary tree: theta for qubit q
// under a given assignment of the higher qubits
double tree_angle(const Eigen::VectorXd& target, int n, int q, long prefix) {
    double w0 = 0, w1 = 0;
    long low = 1L << q;
    for (long rest = 0; rest < low; ++rest) {
        double a0 = target(prefix | rest);
        double a1 = target(prefix | low | rest);
        w0 += a0 * a0;
        w1 += a1 * a1;
    }
    return 2.0 * std::atan2(std::sqrt(w1), std::sqrt(w0));
}

// controlled-U for a single-qubit unitary, exact up to global phase
void emit_cu(Circuit& c, int control, int target, const Mat& u) {
    auto e = synth::zyz_angles(u);
    // ABC construction: A = Rz(phi) Ry(th/2), B = Ry(-th/2) Rz(-(phi+lambda)/2),
    // C = Rz((lambda-phi)/2); phase alpha lands on the control as Rz
    c.add(Gate::rz(target, (e.lambda - e.phi) / 2));
    c.add(Gate::cnot(control, target));
    c.add(Gate::rz(target, -(e.phi + e.lambda) / 2));
    c.add(Gate::ry(target, -e.theta / 2));
    c.add(Gate::cnot(control, target));
    c.add(Gate::ry(target, e.theta / 2));
    c.add(Gate::rz(target, e.phi));
    if (std::abs(e.alpha) > 1e-15) c.add(Gate::rz(control, e.alpha));
}

Mat matrix_sqrt_2x2(const Mat& u) {
    Eigen::ComplexEigenSolver<Mat> es(u);
    Mat d = es.eigenvalues().cwiseSqrt().asDiagonal();
    return es.eigenvectors() * d * es.eigenvectors().inverse();
}

// multi-controlled single-qubit unitary, plain Barenco-style recursion
void emit_mcu(Circuit& c, std::vector<int> controls, int target, const Mat& u) {
    if (controls.empty()) {
        auto e = synth::zyz_angles(u);
        c.add(Gate::u3(target, e.theta, e.phi, e.lambda));
        return;
    }
    if (controls.size() == 1) {
        emit_cu(c, controls[0], target, u);
        return;
    }
    Mat v = matrix_sqrt_2x2(u);
    int last = controls.back();
    std::vector<int> rest(controls.begin(), controls.end() - 1);
    emit_cu(c, last, target, v);
    emit_mcu(c, rest, last, circuit::gate_matrix(circuit::GateKind::X, {}));
    emit_cu(c, last, target, v.adjoint());
    emit_mcu(c, rest, last, circuit::gate_matrix(circuit::GateKind::X, {}));
    emit_mcu(c, rest, target, v);
}

void emit_mcry(Circuit& c, const std::vector<int>& controls, int target, double theta) {
    emit_mcu(c, controls, target, circuit::gate_matrix(circuit::GateKind::RY, {theta}));
}

}  // namespace

circuit::Circuit build_state_prep(const StatePrepSpec& spec) {
    const auto& t = spec.target;
    long dim = t.size();
    int n = 0;
    while ((1L << n) < dim) ++n;
    if ((1L << n) != dim) throw std::invalid_argument("build_state_prep: bad length");
    if (std::abs(t.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("build_state_prep: target not normalized");
    if (t.minCoeff() < 0)
        throw std::invalid_argument("build_state_prep: target must be non-negative");
    Circuit c(n);

    // pure basis state: X gates suffice
    int nonzero = 0;
    long hot = 0;
    for (long i = 0; i < dim; ++i)
        if (t(i) > 1e-12) {
            ++nonzero;
            hot = i;
        }
    if (nonzero == 1) {
        for (int q = 0; q < n; ++q)
            if ((hot >> q) & 1) c.add(Gate::x(q));
        return c;
    }

    if (spec.method == PrepMethod::Shannon) {
        // uniformly controlled Ry cascade, MSB first
        for (int q = n - 1; q >= 0; --q) {
            std::vector<int> selects;
            for (int s = q + 1; s < n; ++s) selects.push_back(s);
            std::vector<double> angles(1L << selects.size());
            for (long a = 0; a < static_cast<long>(angles.size()); ++a) {
                long prefix = 0;
                for (size_t i = 0; i < selects.size(); ++i)
                    if ((a >> i) & 1) prefix |= 1L << selects[i];
                angles[a] = tree_angle(t, n, q, prefix);
            }
            synth::emit_multiplexed_ry(c, angles, q, selects);
        }
        return c;
    }

    // arbitrary method: one multi-controlled rotation per branch of the tree
    for (int q = n - 1; q >= 0; --q) {
        std::vector<int> controls;
        for (int s = q + 1; s < n; ++s) controls.push_back(s);
        long branches = 1L << controls.size();
        for (long a = 0; a < branches; ++a) {
            long prefix = 0;
            for (size_t i = 0; i < controls.size(); ++i)
                if ((a >> i) & 1) prefix |= 1L << controls[i];
            double theta = tree_angle(t, n, q, prefix);
            // open controls via X conjugation
            for (size_t i = 0; i < controls.size(); ++i)
                if (!((a >> i) & 1)) c.add(Gate::x(controls[i]));
            emit_mcry(c, controls, q, theta);
            for (size_t i = 0; i < controls.size(); ++i)
                if (!((a >> i) & 1)) c.add(Gate::x(controls[i]));
        }
    }
    return c;
}

Eigen::VectorXd spin1_purified_target(const spinsys::ThermalSpinState& state) {
    if (state.dim() != 3) throw std::invalid_argument("spin1_purified_target: need j=1");
    // triplet computational images: m=+1 -> |00>, m=0 -> (|01>+|10>)/sqrt(2),
    // m=-1 -> |11>; ascending energy at theta=0 is m = -1, 0, +1
    double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd enc(4, 3);  // columns: m=+1, m=0, m=-1
    enc.setZero();
    enc(0, 0) = 1;
    enc(1, 1) = s;
    enc(2, 1) = s;
    enc(3, 2) = 1;
    Eigen::Vector3d w;  // sqrt(lambda) by m index (+1, 0, -1)
    w << std::sqrt(state.lambdas(2)), std::sqrt(state.lambdas(1)),
        std::sqrt(state.lambdas(0));
    Eigen::VectorXd target = Eigen::VectorXd::Zero(16);
    for (int m = 0; m < 3; ++m)
        for (int sys = 0; sys < 4; ++sys)
            for (int anc = 0; anc < 4; ++anc)
                target(sys + 4 * anc) += w(m) * enc(sys, m) * enc(anc, m);
    return target;
}

Eigen::VectorXd spin_half_purified_target(const spinsys::ThermalSpinState& state) {
    if (state.dim() != 2)
        throw std::invalid_argument("spin_half_purified_target: need j=1/2");
    // ascending energy at theta=0: ground is m=-1/2 = |1>
    Eigen::VectorXd target = Eigen::VectorXd::Zero(4);
    target(3) = std::sqrt(state.lambdas(0));  // |1>|1>
    target(0) = std::sqrt(state.lambdas(1));  // |0>|0>
    return target;
}

namespace {
void append_shifted(Circuit& dst, const Circuit& src, int offset) {
    for (auto g : src.gates) {
        for (auto& q : g.qubits) q += offset;
        dst.add(std::move(g));
    }
}
}  // namespace

std::pair<Circuit, Circuit> build_uhlmann_circuit(double temperature, double j,
                                                  PrepMethod method, bool dd) {
    if (temperature < 0.01 || temperature >= 1.0)
        throw std::invalid_argument("build_uhlmann_circuit: T out of [0.01, 1)");
    spinsys::SpinParams params{j, 1.0, 0.0};
    auto state = spinsys::thermal_state(params, spinsys::hamiltonian(params, 0.0),
                                        1.0 / temperature);
    auto proc = spinsys::uhlmann_process(state);

    int n = (j == 0.5) ? 3 : 5;
    Circuit base(n);
    base.add(Gate::h(0));
    if (j == 0.5) {
        StatePrepSpec spec{spin_half_purified_target(state), method};
        append_shifted(base, build_state_prep(spec), 1);
        // controlled Ry angles: Ry(theta) = exp(-i theta Jy) for spin 1/2
        for (auto [target, theta] :
             {std::pair{1, proc.theta_total_system}, {2, proc.theta_total_ancilla}}) {
            base.add(Gate::ry(target, theta / 2));
            base.add(Gate::cnot(0, target));
            base.add(Gate::ry(target, -theta / 2));
            base.add(Gate::cnot(0, target));
        }
    } else {
        StatePrepSpec spec{spin1_purified_target(state), method};
        append_shifted(base, build_state_prep(spec), 1);
        auto ops = spinsys::angular_momentum(1.0);
        Mat vs = embed_triplet(expi_hermitian(ops.jy, proc.theta_total_system)).full;
        Mat va = embed_triplet(expi_hermitian(ops.jy, proc.theta_total_ancilla)).full;
        base.add(Gate::unitary({1, 2, 0}, controlled(vs)));
        base.add(Gate::unitary({3, 4, 0}, controlled(va)));
    }
    if (dd) base = insert_xy4(base);
    Circuit cx = base, cy = base;
    cx.measure(0, 0, 'X');
    cy.measure(0, 0, 'Y');
    return {cx, cy};
}

circuit::Circuit insert_xy4(const circuit::Circuit& c) {
    // ASAP schedule from gate durations; one XY4 block per idle window longer
    // than four single-qubit gate times
    std::vector<double> avail(c.n_qubits, 0.0);
    std::vector<std::pair<size_t, int>> inserts;  // (gate index, qubit)
    for (size_t gi = 0; gi < c.gates.size(); ++gi) {
        const auto& g = c.gates[gi];
        if (g.kind == circuit::GateKind::Barrier) continue;
        double start = 0;
        for (int q : g.qubits) start = std::max(start, avail[q]);
        for (int q : g.qubits) {
            if (avail[q] > 0 && start - avail[q] > 4 * circuit::kDuration1q)
                inserts.push_back({gi, q});
            avail[q] = start + g.duration_ns;
        }
    }
    Circuit out(c.n_qubits);
    size_t next = 0;
    for (size_t gi = 0; gi < c.gates.size(); ++gi) {
        while (next < inserts.size() && inserts[next].first == gi) {
            int q = inserts[next].second;
            out.add(Gate::x(q));
            out.add(Gate::y(q));
            out.add(Gate::x(q));
            out.add(Gate::y(q));
            ++next;
        }
        out.add(c.gates[gi]);
    }
    out.measurements = c.measurements;
    return out;
}

PhaseEstimate phase_from_counts(const circuit::ShotCounts& counts_x,
                                const circuit::ShotCounts& counts_y) {
    auto [sx, sy] = circuit::expectation_xy(counts_x, counts_y);
    PhaseEstimate pe;
    pe.sx = sx;
    pe.sy = sy;
    double sigma = 1.0 / std::sqrt(static_cast<double>(counts_x.total));
    if (std::abs(sx) < 3 * sigma && std::abs(sy) < 3 * sigma) {
        pe.critical = true;
        return pe;
    }
    pe.theta = std::atan2(sy, sx);
    if (pe.theta <= -pi) pe.theta = pi;  // keep the range (-pi, pi]
    return pe;
}

}  // namespace uhl::basisenc
