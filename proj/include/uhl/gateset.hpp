#pragma once

#include <set>
#include <string>

#include "uhl/circuit.hpp"

namespace uhl::synth {

struct GateSet {
    std::string name;  // Eagle | Heron | Generic
    std::set<circuit::GateKind> basis;

    bool contains(circuit::GateKind k) const { return basis.count(k) > 0; }
};

GateSet eagle_gateset();    // {ECR, RZ, X, SX}
GateSet heron_gateset();    // {RZ, RX, CNOT, SX, X, RZZ}
GateSet generic_gateset();  // {U3, CNOT}

GateSet gateset_by_name(const std::string& name);

}  // namespace uhl::synth
