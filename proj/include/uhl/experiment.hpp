#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uhl/basisenc.hpp"
#include "uhl/circuit.hpp"
#include "uhl/gateset.hpp"
#include "uhl/noise.hpp"
#include "uhl/spinsys.hpp"
#include "uhl/synth.hpp"

namespace uhl::experiment {

enum class Method { Naive, Optimized };

struct SweepConfig {
    double j = 0.5;
    int grid_points = 60;       // uniform grid over [0.01, 1)
    long shots = 2024;
    bool exact_expectations = false;  // debugging path without shot noise
    Method method = Method::Optimized;
    bool dd = false;
    double epsilon = 1e-8;
    synth::GateSet gateset = synth::generic_gateset();
    std::optional<noise::CalibrationData> calibration;  // nullopt = noiseless
    uint64_t seed = 2024;
};

struct ExperimentRecord {
    double temperature = 0.0;
    double sx = 0.0, sy = 0.0;
    double theta_circuit = 0.0;
    double theta_analytic = 0.0;
    double abs_g = 0.0;
    long gates_prep = 0, gates_uhlmann = 0, gates_meas = 0;
    double delta_s = 0.0;
    uint64_t seed = 0;
    bool critical = false;
    bool failed = false;
    std::string note;  // error text or synthesis fallback notes
};

struct SweepResult {
    std::vector<ExperimentRecord> records;
    bool partial_failure = false;
};

std::vector<double> temperature_grid(int n, double t_min = 0.01, double t_max = 1.0);

SweepResult run_sweep(const SweepConfig& cfg);

double statistical_distance(const std::vector<double>& p, const std::vector<double>& q);

struct PrepDistancePoint {
    double temperature;
    double ds_arbitrary;
    double ds_shannon;
};

std::vector<PrepDistancePoint> state_prep_distance_sweep(const SweepConfig& cfg);

std::string report(const std::vector<ExperimentRecord>& records,
                   const std::string& format);  // "csv" | "table"

// probe-basis-change block (initial H + measurement pre-rotation) in ISA form,
// with the rotations that act trivially on |0> / commute with the final Z
// measurement removed; this is the paper-style "trace estimation" count
circuit::Circuit trace_estimation_isa(const synth::GateSet& gateset, char basis = 'X');

// per-block ISA circuits for gate-count reports at one temperature
struct BlockCircuits {
    circuit::Circuit prep, uhlmann, trace;
};
BlockCircuits block_circuits(double temperature, const SweepConfig& cfg);

// the complete synthesized and transpiled interferometry circuit, probe
// measured in the given basis
circuit::Circuit full_isa_circuit(double temperature, const SweepConfig& cfg,
                                  char basis);

}  // namespace uhl::experiment
