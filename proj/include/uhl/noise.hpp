#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uhl/circuit.hpp"
#include "uhl/gateset.hpp"
#include "uhl/linalg.hpp"

namespace uhl::noise {

struct QubitCalibration {
    double t1_us = 100.0;
    double t2_us = 100.0;
    Eigen::Matrix2d readout = Eigen::Matrix2d::Identity();  // row-stochastic
};

struct GateCalibration {
    circuit::GateKind kind;
    std::optional<std::vector<int>> qubits;  // absent = applies to all placements
    double error = 0.0;
    double duration_ns = 0.0;  // 0 = use the family default
};

struct CalibrationData {
    std::vector<QubitCalibration> qubits;
    std::vector<GateCalibration> gates;
};

CalibrationData load_calibration(const std::string& path);
CalibrationData parse_calibration(const std::string& json_text);

std::vector<Mat> depolarizing_channel(double p, int n_qubits);
std::vector<Mat> thermal_relaxation(double t1_us, double t2_us, double duration_ns);

struct NoiseModel {
    CalibrationData cal;

    double gate_error(circuit::GateKind kind, const std::vector<int>& qubits) const;
    double gate_duration(const circuit::Gate& g) const;
    const QubitCalibration& qubit(int q) const;
    bool trivial() const;  // true when every channel is the identity
};

NoiseModel build_noise_model(const CalibrationData& cal, const synth::GateSet& gateset);

}  // namespace uhl::noise
