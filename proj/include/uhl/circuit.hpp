#pragma once

#include <map>
#include <string>
#include <vector>

#include "uhl/linalg.hpp"

namespace uhl::noise {
struct NoiseModel;
}

namespace uhl::circuit {

enum class GateKind {
    X, Y, Z, H, S, Sdg, SX, RX, RY, RZ, U3, CNOT, ECR, RZZ, Unitary, Barrier
};

const char* kind_name(GateKind k);

// default gate durations (ns); calibration files may override
inline constexpr double kDuration1q = 35.0;
inline constexpr double kDuration2q = 300.0;
inline constexpr double kDurationReadout = 800.0;

struct Gate {
    GateKind kind;
    std::vector<int> qubits;  // qubits[k] is the k-th least significant local bit
    std::vector<double> params;
    Mat matrix;               // 2^arity x 2^arity, cached
    double duration_ns;

    int arity() const { return static_cast<int>(qubits.size()); }

    static Gate x(int q);
    static Gate y(int q);
    static Gate z(int q);
    static Gate h(int q);
    static Gate s(int q);
    static Gate sdg(int q);
    static Gate sx(int q);
    static Gate rx(int q, double theta);
    static Gate ry(int q, double theta);
    static Gate rz(int q, double theta);
    static Gate u3(int q, double theta, double phi, double lambda);
    static Gate cnot(int control, int target);
    static Gate ecr(int control, int target);
    static Gate rzz(int q0, int q1, double theta);
    static Gate unitary(std::vector<int> qubits, Mat u);
    static Gate barrier(std::vector<int> qubits);
};

// the unitary of a gate family evaluated at given parameters
Mat gate_matrix(GateKind kind, const std::vector<double>& params);

struct Measurement {
    int qubit;
    int cbit;
    char basis;  // 'X', 'Y' or 'Z'
};

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<Measurement> measurements;

    Circuit() = default;
    explicit Circuit(int n) : n_qubits(n) {}
    void add(Gate g);
    void measure(int qubit, int cbit, char basis = 'Z');
    int count(GateKind k) const;
    int size() const { return static_cast<int>(gates.size()); }
};

struct StateVector {
    int n_qubits;
    Vec amplitudes;  // qubit 0 = least significant bit of the basis index

    explicit StateVector(int n);
};

struct DensityMatrixState {
    int n_qubits;
    Mat matrix;

    explicit DensityMatrixState(int n);
};

struct ShotCounts {
    std::map<std::string, long> counts;  // bitstring indexed by classical bit
    long total = 0;
    uint64_t seed = 0;
};

void apply_gate(StateVector& state, const Gate& gate);
StateVector simulate_statevector(const Circuit& c);
Mat unitary_of_circuit(const Circuit& c);
DensityMatrixState simulate_density(const Circuit& c, const noise::NoiseModel* model);

ShotCounts sample_counts(const StateVector& state, const std::vector<Measurement>& meas,
                         long shots, uint64_t seed,
                         const noise::NoiseModel* model = nullptr);
ShotCounts sample_counts(const DensityMatrixState& state,
                         const std::vector<Measurement>& meas, long shots, uint64_t seed,
                         const noise::NoiseModel* model = nullptr);

// (<sigma_x>, <sigma_y>) of the probe from the two single-bit count sets
std::pair<double, double> expectation_xy(const ShotCounts& counts_x,
                                         const ShotCounts& counts_y);

// exact single-qubit X/Y expectations, for the debugging path without shot noise
std::pair<double, double> exact_xy(const StateVector& state, int qubit);
std::pair<double, double> exact_xy(const DensityMatrixState& state, int qubit);

// embed a 2^k unitary acting on `qubits` into the full 2^n space
Mat embed(const Mat& u, const std::vector<int>& qubits, int n_qubits);

std::string to_qasm3(const Circuit& c);

}  // namespace uhl::circuit
