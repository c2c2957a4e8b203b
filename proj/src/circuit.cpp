#include "uhl/circuit.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "uhl/kernels.hpp"
#include "uhl/noise.hpp"

namespace uhl::circuit {

const char* kind_name(GateKind k) {
    switch (k) {
        case GateKind::X: return "x";
        case GateKind::Y: return "y";
        case GateKind::Z: return "z";
        case GateKind::H: return "h";
        case GateKind::S: return "s";
        case GateKind::Sdg: return "sdg";
        case GateKind::SX: return "sx";
        case GateKind::RX: return "rx";
        case GateKind::RY: return "ry";
        case GateKind::RZ: return "rz";
        case GateKind::U3: return "u3";
        case GateKind::CNOT: return "cx";
        case GateKind::ECR: return "ecr";
        case GateKind::RZZ: return "rzz";
        case GateKind::Unitary: return "unitary";
        case GateKind::Barrier: return "barrier";
    }
    return "?";
}

Mat gate_matrix(GateKind kind, const std::vector<double>& p) {
    const double s2 = 1.0 / std::sqrt(2.0);
    Mat m;
    switch (kind) {
        case GateKind::X:
            m = Mat::Zero(2, 2);
            m(0, 1) = m(1, 0) = 1;
            return m;
        case GateKind::Y:
            m = Mat::Zero(2, 2);
            m(0, 1) = cd(0, -1);
            m(1, 0) = cd(0, 1);
            return m;
        case GateKind::Z:
            m = Mat::Identity(2, 2);
            m(1, 1) = -1;
            return m;
        case GateKind::H:
            m = Mat(2, 2);
            m << s2, s2, s2, -s2;
            return m;
        case GateKind::S:
            m = Mat::Identity(2, 2);
            m(1, 1) = cd(0, 1);
            return m;
        case GateKind::Sdg:
            m = Mat::Identity(2, 2);
            m(1, 1) = cd(0, -1);
            return m;
        case GateKind::SX:
            m = Mat(2, 2);
            m << cd(0.5, 0.5), cd(0.5, -0.5), cd(0.5, -0.5), cd(0.5, 0.5);
            return m;
        case GateKind::RX: {
            double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
            m = Mat(2, 2);
            m << c, cd(0, -s), cd(0, -s), c;
            return m;
        }
        case GateKind::RY: {
            double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
            m = Mat(2, 2);
            m << c, -s, s, c;
            return m;
        }
        case GateKind::RZ: {
            m = Mat::Zero(2, 2);
            m(0, 0) = std::exp(cd(0, -p[0] / 2));
            m(1, 1) = std::exp(cd(0, p[0] / 2));
            return m;
        }
        case GateKind::U3: {
            double th = p[0], ph = p[1], la = p[2];
            double c = std::cos(th / 2), s = std::sin(th / 2);
            m = Mat(2, 2);
            m << c, -std::exp(cd(0, la)) * s, std::exp(cd(0, ph)) * s,
                std::exp(cd(0, ph + la)) * c;
            return m;
        }
        case GateKind::CNOT:
            // control = local bit 0, target = local bit 1
            m = Mat::Zero(4, 4);
            m(0, 0) = m(2, 2) = 1;
            m(3, 1) = m(1, 3) = 1;
            return m;
        case GateKind::ECR:
            m = Mat::Zero(4, 4);
            m(0, 1) = m(1, 0) = m(2, 3) = m(3, 2) = s2;
            m(0, 3) = m(2, 1) = cd(0, s2);
            m(1, 2) = m(3, 0) = cd(0, -s2);
            return m;
        case GateKind::RZZ: {
            m = Mat::Zero(4, 4);
            cd em = std::exp(cd(0, -p[0] / 2)), ep = std::exp(cd(0, p[0] / 2));
            m(0, 0) = m(3, 3) = em;
            m(1, 1) = m(2, 2) = ep;
            return m;
        }
        default:
            throw std::invalid_argument("gate_matrix: kind has no parametric form");
    }
}

namespace {
Gate make(GateKind k, std::vector<int> qs, std::vector<double> ps) {
    Gate g;
    g.kind = k;
    g.qubits = std::move(qs);
    g.params = std::move(ps);
    g.matrix = gate_matrix(k, g.params);
    g.duration_ns = (g.qubits.size() == 1) ? kDuration1q : kDuration2q;
    if (g.matrix.rows() != (1 << g.qubits.size()))
        throw std::invalid_argument("gate arity mismatch");
    return g;
}
}  // namespace

Gate Gate::x(int q) { return make(GateKind::X, {q}, {}); }
Gate Gate::y(int q) { return make(GateKind::Y, {q}, {}); }
Gate Gate::z(int q) { return make(GateKind::Z, {q}, {}); }
Gate Gate::h(int q) { return make(GateKind::H, {q}, {}); }
Gate Gate::s(int q) { return make(GateKind::S, {q}, {}); }
Gate Gate::sdg(int q) { return make(GateKind::Sdg, {q}, {}); }
Gate Gate::sx(int q) { return make(GateKind::SX, {q}, {}); }
Gate Gate::rx(int q, double t) { return make(GateKind::RX, {q}, {t}); }
Gate Gate::ry(int q, double t) { return make(GateKind::RY, {q}, {t}); }
Gate Gate::rz(int q, double t) { return make(GateKind::RZ, {q}, {t}); }
Gate Gate::u3(int q, double t, double p, double l) {
    return make(GateKind::U3, {q}, {t, p, l});
}
Gate Gate::cnot(int c, int t) { return make(GateKind::CNOT, {c, t}, {}); }
Gate Gate::ecr(int c, int t) { return make(GateKind::ECR, {c, t}, {}); }
Gate Gate::rzz(int a, int b, double t) { return make(GateKind::RZZ, {a, b}, {t}); }

Gate Gate::unitary(std::vector<int> qs, Mat u) {
    if (!is_unitary(u, 1e-10)) throw std::invalid_argument("Gate::unitary: not unitary");
    Gate g;
    g.kind = GateKind::Unitary;
    g.qubits = std::move(qs);
    g.matrix = std::move(u);
    g.duration_ns = (g.qubits.size() == 1) ? kDuration1q : kDuration2q;
    if (g.matrix.rows() != (1L << g.qubits.size()))
        throw std::invalid_argument("Gate::unitary: dimension/arity mismatch");
    return g;
}

Gate Gate::barrier(std::vector<int> qs) {
    Gate g;
    g.kind = GateKind::Barrier;
    g.qubits = std::move(qs);
    g.matrix = Mat::Identity(1L << g.qubits.size(), 1L << g.qubits.size());
    g.duration_ns = 0;
    return g;
}

void Circuit::add(Gate g) {
    for (int q : g.qubits)
        if (q < 0 || q >= n_qubits) throw std::out_of_range("Circuit::add: qubit index");
    gates.push_back(std::move(g));
}

void Circuit::measure(int qubit, int cbit, char basis) {
    if (qubit < 0 || qubit >= n_qubits) throw std::out_of_range("Circuit::measure");
    measurements.push_back({qubit, cbit, basis});
}

int Circuit::count(GateKind k) const {
    int n = 0;
    for (const auto& g : gates) n += (g.kind == k);
    return n;
}

StateVector::StateVector(int n) : n_qubits(n), amplitudes(Vec::Zero(1L << n)) {
    amplitudes(0) = 1;
}

DensityMatrixState::DensityMatrixState(int n)
    : n_qubits(n), matrix(Mat::Zero(1L << n, 1L << n)) {
    matrix(0, 0) = 1;
}

void apply_gate(StateVector& state, const Gate& gate) {
    if (gate.kind == GateKind::Barrier) return;
    for (int q : gate.qubits)
        if (q < 0 || q >= state.n_qubits) throw std::out_of_range("apply_gate: qubit index");
    kernels::apply_unitary(state.amplitudes, gate.matrix, gate.qubits);
}

StateVector simulate_statevector(const Circuit& c) {
    StateVector st(c.n_qubits);
    for (const auto& g : c.gates) apply_gate(st, g);
    return st;
}

Mat embed(const Mat& u, const std::vector<int>& qubits, int n_qubits) {
    long dim = 1L << n_qubits;
    long k = static_cast<long>(qubits.size());
    Mat out = Mat::Zero(dim, dim);
    for (long b = 0; b < dim; ++b) {
        long l = 0;
        for (long i = 0; i < k; ++i) l |= ((b >> qubits[i]) & 1L) << i;
        long rest = b;
        for (long i = 0; i < k; ++i) rest &= ~(1L << qubits[i]);
        for (long lp = 0; lp < (1L << k); ++lp) {
            long bp = rest;
            for (long i = 0; i < k; ++i)
                if ((lp >> i) & 1) bp |= 1L << qubits[i];
            out(bp, b) = u(lp, l);
        }
    }
    return out;
}

Mat unitary_of_circuit(const Circuit& c) {
    if (!c.measurements.empty())
        throw std::invalid_argument("unitary_of_circuit: circuit has measurements");
    if (c.n_qubits > 6) throw std::invalid_argument("unitary_of_circuit: too many qubits");
    long dim = 1L << c.n_qubits;
    Mat u = Mat::Identity(dim, dim);
    // columns are basis-state evolutions; reuse the statevector kernels
    for (long col = 0; col < dim; ++col) {
        Vec v = u.col(col);
        for (const auto& g : c.gates)
            if (g.kind != GateKind::Barrier)
                kernels::apply_unitary_serial(v, g.matrix, g.qubits);
        u.col(col) = v;
    }
    return u;
}

DensityMatrixState simulate_density(const Circuit& c, const noise::NoiseModel* model) {
    if (c.n_qubits > 10) throw std::invalid_argument("simulate_density: too many qubits");
    DensityMatrixState st(c.n_qubits);
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::Barrier) continue;
        kernels::apply_kraus(st.matrix, {g.matrix}, g.qubits);
        if (model != nullptr && !model->trivial()) {
            double p = model->gate_error(g.kind, g.qubits);
            if (p > 0)
                kernels::apply_kraus(st.matrix, noise::depolarizing_channel(p, g.arity()),
                                     g.qubits);
            double dur = model->gate_duration(g);
            for (int q : g.qubits) {
                const auto& qc = model->qubit(q);
                auto relax = noise::thermal_relaxation(qc.t1_us, qc.t2_us, dur);
                kernels::apply_kraus(st.matrix, relax, {q});
            }
        }
    }
    return st;
}

namespace {

void rotate_for_basis(Vec& amps, const Measurement& m) {
    if (m.basis == 'X') {
        kernels::apply_unitary(amps, gate_matrix(GateKind::H, {}), {m.qubit});
    } else if (m.basis == 'Y') {
        kernels::apply_unitary(amps, gate_matrix(GateKind::Sdg, {}), {m.qubit});
        kernels::apply_unitary(amps, gate_matrix(GateKind::H, {}), {m.qubit});
    }
}

std::vector<double> marginal_probs(const Vec& probs_diag, int n_qubits,
                                   const std::vector<Measurement>& meas) {
    int nm = static_cast<int>(meas.size());
    std::vector<double> marg(1L << nm, 0.0);
    long dim = probs_diag.size();
    for (long b = 0; b < dim; ++b) {
        long key = 0;
        for (int i = 0; i < nm; ++i)
            if ((b >> meas[i].qubit) & 1) key |= 1L << i;
        marg[key] += probs_diag(b).real();
    }
    return marg;
}

ShotCounts sample_from_marginal(std::vector<double> marg,
                                const std::vector<Measurement>& meas, long shots,
                                uint64_t seed, const noise::NoiseModel* model) {
    if (shots < 1) throw std::invalid_argument("sample_counts: shots must be >= 1");
    int nm = static_cast<int>(meas.size());
    std::mt19937_64 rng(seed);
    std::discrete_distribution<long> dist(marg.begin(), marg.end());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ShotCounts sc;
    sc.total = shots;
    sc.seed = seed;
    for (long s = 0; s < shots; ++s) {
        long outcome = dist(rng);
        std::string bits(nm, '0');
        for (int i = 0; i < nm; ++i) {
            int bit = static_cast<int>((outcome >> i) & 1);
            if (model != nullptr) {
                const auto& conf = model->qubit(meas[i].qubit).readout;
                // row = true state, column = reported state
                if (unif(rng) < conf(bit, 1 - bit)) bit = 1 - bit;
            }
            bits[meas[i].cbit] = static_cast<char>('0' + bit);
        }
        sc.counts[bits]++;
    }
    return sc;
}

}  // namespace

ShotCounts sample_counts(const StateVector& state, const std::vector<Measurement>& meas,
                         long shots, uint64_t seed, const noise::NoiseModel* model) {
    Vec amps = state.amplitudes;
    for (const auto& m : meas) rotate_for_basis(amps, m);
    Vec probs = amps.cwiseAbs2().cast<cd>();
    return sample_from_marginal(marginal_probs(probs, state.n_qubits, meas), meas, shots,
                                seed, model);
}

ShotCounts sample_counts(const DensityMatrixState& state,
                         const std::vector<Measurement>& meas, long shots, uint64_t seed,
                         const noise::NoiseModel* model) {
    Mat rho = state.matrix;
    for (const auto& m : meas) {
        if (m.basis == 'X') {
            kernels::apply_kraus_serial(rho, {gate_matrix(GateKind::H, {})}, {m.qubit});
        } else if (m.basis == 'Y') {
            kernels::apply_kraus_serial(rho, {gate_matrix(GateKind::Sdg, {})}, {m.qubit});
            kernels::apply_kraus_serial(rho, {gate_matrix(GateKind::H, {})}, {m.qubit});
        }
    }
    Vec diag = rho.diagonal();
    return sample_from_marginal(marginal_probs(diag, state.n_qubits, meas), meas, shots,
                                seed, model);
}

std::pair<double, double> expectation_xy(const ShotCounts& cx, const ShotCounts& cy) {
    auto expval = [](const ShotCounts& sc) {
        if (sc.total == 0) throw std::invalid_argument("expectation_xy: zero shots");
        long n0 = 0;
        for (const auto& [bits, cnt] : sc.counts)
            if (bits.find('1') == std::string::npos) n0 += cnt;
        return (2.0 * n0 - sc.total) / sc.total;
    };
    return {expval(cx), expval(cy)};
}

std::pair<double, double> exact_xy(const StateVector& state, int qubit) {
    long dim = state.amplitudes.size();
    cd off = 0;  // <0|rho|1> block sum for the chosen qubit
    for (long b = 0; b < dim; ++b) {
        if ((b >> qubit) & 1) continue;
        off += state.amplitudes(b) * std::conj(state.amplitudes(b | (1L << qubit)));
    }
    return {2 * off.real(), -2 * off.imag()};
}

std::pair<double, double> exact_xy(const DensityMatrixState& state, int qubit) {
    long dim = state.matrix.rows();
    cd off = 0;
    for (long b = 0; b < dim; ++b) {
        if ((b >> qubit) & 1) continue;
        off += state.matrix(b, b | (1L << qubit));
    }
    return {2 * off.real(), -2 * off.imag()};
}

std::string to_qasm3(const Circuit& c) {
    std::ostringstream os;
    os.precision(17);
    os << "OPENQASM 3.0;\n";
    os << "include \"stdgates.inc\";\n";
    os << "qubit[" << c.n_qubits << "] q;\n";
    if (!c.measurements.empty()) os << "bit[" << c.measurements.size() << "] c;\n";
    for (const auto& g : c.gates) {
        switch (g.kind) {
            case GateKind::Unitary:
                throw std::invalid_argument(
                    "to_qasm3: generic unitary must be synthesized before export");
            case GateKind::Barrier:
                os << "barrier";
                for (size_t i = 0; i < g.qubits.size(); ++i)
                    os << (i ? ", " : " ") << "q[" << g.qubits[i] << "]";
                os << ";\n";
                continue;
            case GateKind::U3:
                os << "U(" << g.params[0] << ", " << g.params[1] << ", " << g.params[2]
                   << ") q[" << g.qubits[0] << "];\n";
                continue;
            default:
                break;
        }
        os << kind_name(g.kind);
        if (!g.params.empty()) {
            os << "(";
            for (size_t i = 0; i < g.params.size(); ++i) os << (i ? ", " : "") << g.params[i];
            os << ")";
        }
        for (size_t i = 0; i < g.qubits.size(); ++i)
            os << (i ? ", " : " ") << "q[" << g.qubits[i] << "]";
        os << ";\n";
    }
    for (const auto& m : c.measurements) {
        if (m.basis == 'X') {
            os << "h q[" << m.qubit << "];\n";
        } else if (m.basis == 'Y') {
            os << "sdg q[" << m.qubit << "];\n";
            os << "h q[" << m.qubit << "];\n";
        }
        os << "c[" << m.cbit << "] = measure q[" << m.qubit << "];\n";
    }
    return os.str();
}

}  // namespace uhl::circuit
