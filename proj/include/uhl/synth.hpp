#pragma once

#include <map>
#include <string>
#include <vector>

#include "uhl/circuit.hpp"
#include "uhl/gateset.hpp"
#include "uhl/linalg.hpp"

namespace uhl::synth {

// d = sqrt(max(0, 1 - |Tr(u^dag v)| / N)); global-phase invariant.
// evaluated via the phase-aligned deviation norm, which is the same
// quantity but stays meaningful below machine-epsilon cancellation
double hs_distance(const Mat& u, const Mat& v);

// ZYZ Euler angles: u = e^{i alpha} Rz(phi) Ry(theta) Rz(lambda)
struct Euler {
    double theta, phi, lambda, alpha;
};
Euler zyz_angles(const Mat& u);

// U = e^{i phase} (k1l (x) k1r) exp(i (a XX + b YY + c ZZ)) (k2l (x) k2r)
// with canonical coordinates folded into the Weyl chamber
struct WeylDecomposition {
    double phase;
    Mat k1l, k1r, k2l, k2r;
    double a, b, c;
};
WeylDecomposition weyl_decompose(const Mat& u);
Mat canonical_gate(double a, double b, double c);

// exact 2-qubit synthesis over {U3, CNOT}; <= 3 CNOTs
circuit::Circuit kak_decompose(const Mat& u);

struct QsdConfig {
    // false = plain recursion: full multiplexors, every block an exact 3-CNOT
    // synthesis, no pruning; true = diagonal-merged recursion (2-CNOT blocks
    // up to diagonal, central multiplexor CZ absorption)
    bool optimize = true;
};
// exact synthesis for n <= 4 qubits over {U3, CNOT}
circuit::Circuit qsd_decompose(const Mat& u, const QsdConfig& cfg = {});

// uniformly controlled rotation of `angles[s]` on `target`, select qubit
// selects[i] supplying the i-th bit of s
void emit_multiplexed_ry(circuit::Circuit& c, const std::vector<double>& angles,
                         int target, const std::vector<int>& selects);
void emit_multiplexed_rz(circuit::Circuit& c, const std::vector<double>& angles,
                         int target, const std::vector<int>& selects);

circuit::Circuit transpile(const circuit::Circuit& c, const GateSet& gateset);

struct SynthesisConfig {
    double epsilon = 1e-8;
    int max_depth = 20;      // template growth cap (number of 2q blocks)
    int max_iterations = 400;
    int restarts = 32;
    uint64_t seed = 1;
};

struct SynthResult {
    circuit::Circuit circuit;
    bool success = false;
    double distance = 1.0;
};

// bottom-up template search over {U3, CNOT}
SynthResult approx_synthesize(const Mat& u, const SynthesisConfig& cfg);

struct BlockCounts {
    std::map<std::string, double> mean_by_kind;
    double total = 0;
};

struct GateCountReport {
    std::vector<std::pair<std::string, BlockCounts>> blocks;  // stable order
};

// mean gate counts per block over a grid of per-temperature circuits
GateCountReport count_report(
    const std::vector<std::pair<std::string, std::vector<circuit::Circuit>>>& by_block);
std::string report_csv(const GateCountReport& r);
std::string report_table(const GateCountReport& r);

}  // namespace uhl::synth
