#pragma once

#include <utility>

#include "uhl/circuit.hpp"
#include "uhl/linalg.hpp"
#include "uhl/spinsys.hpp"

namespace uhl::basisenc {

// computational -> physical basis map, |psi>_ph = M |phi>
Mat m_matrix();

struct EmbeddedOperator {
    Mat triplet_block;  // 3x3, ordered m = +1, 0, -1
    Mat full;           // 4x4 in the computational basis; fixes the singlet
};

EmbeddedOperator embed_triplet(const Mat& a);

// the closed-form two-qubit Ry on the encoded triplet
Mat two_qubit_ry(double theta);

// block-diagonal(I4, u); the control is the probe and is the local MSB
Mat controlled(const Mat& u);

enum class PrepMethod { Arbitrary, Shannon };

struct StatePrepSpec {
    Eigen::VectorXd target;  // real non-negative, unit norm
    PrepMethod method = PrepMethod::Shannon;
};

circuit::Circuit build_state_prep(const StatePrepSpec& spec);

// purified spin-1 state embedded on the 4-qubit system+ancilla register
// (system = lower two qubits); support only on triplet (x) triplet images
Eigen::VectorXd spin1_purified_target(const spinsys::ThermalSpinState& state);
// spin-1/2 analogue over 2 qubits
Eigen::VectorXd spin_half_purified_target(const spinsys::ThermalSpinState& state);

// probe q0 in |+>, state prep, controlled Uhlmann process, probe measured in
// X (first) and Y (second); spin-1/2 uses qubits {0,1,2}, spin-1 {0,..,4}
std::pair<circuit::Circuit, circuit::Circuit> build_uhlmann_circuit(
    double temperature, double j, PrepMethod method, bool dd);

circuit::Circuit insert_xy4(const circuit::Circuit& c);

struct PhaseEstimate {
    double theta = 0.0;
    double sx = 0.0, sy = 0.0;
    bool critical = false;  // both expectations below the 3-sigma shot floor
};

PhaseEstimate phase_from_counts(const circuit::ShotCounts& counts_x,
                                const circuit::ShotCounts& counts_y);

}  // namespace uhl::basisenc
