#include "uhl/noise.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace uhl::noise {

using nlohmann::json;
using circuit::GateKind;

namespace {

GateKind kind_from_string(const std::string& s) {
    static const std::map<std::string, GateKind> table = {
        {"x", GateKind::X},     {"y", GateKind::Y},     {"z", GateKind::Z},
        {"h", GateKind::H},     {"s", GateKind::S},     {"sdg", GateKind::Sdg},
        {"sx", GateKind::SX},   {"rx", GateKind::RX},   {"ry", GateKind::RY},
        {"rz", GateKind::RZ},   {"u3", GateKind::U3},   {"cx", GateKind::CNOT},
        {"cnot", GateKind::CNOT}, {"ecr", GateKind::ECR}, {"rzz", GateKind::RZZ},
    };
    auto it = table.find(s);
    if (it == table.end())
        throw std::invalid_argument("calibration: unknown gate kind '" + s + "'");
    return it->second;
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed) ok = ok || (it.key() == k);
        if (!ok)
            throw std::invalid_argument("calibration: unknown key '" + it.key() + "' in " +
                                        where);
    }
}

}  // namespace

CalibrationData parse_calibration(const std::string& text) {
    json root = json::parse(text);
    reject_unknown_keys(root, {"qubits", "gates"}, "top level");
    CalibrationData cal;
    if (root.contains("qubits")) {
        int qi = 0;
        for (const auto& jq : root.at("qubits")) {
            reject_unknown_keys(jq, {"t1_us", "t2_us", "readout"},
                                "qubits[" + std::to_string(qi) + "]");
            QubitCalibration qc;
            qc.t1_us = jq.value("t1_us", qc.t1_us);
            qc.t2_us = jq.value("t2_us", qc.t2_us);
            if (qc.t2_us > 2 * qc.t1_us + 1e-12)
                throw std::invalid_argument("calibration: T2 > 2*T1 at qubits[" +
                                            std::to_string(qi) + "]");
            if (jq.contains("readout")) {
                const auto& r = jq.at("readout");
                if (r.size() != 2 || r[0].size() != 2 || r[1].size() != 2)
                    throw std::invalid_argument("calibration: readout must be 2x2");
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j) qc.readout(i, j) = r[i][j].get<double>();
                    if (std::abs(qc.readout.row(i).sum() - 1.0) > 1e-9)
                        throw std::invalid_argument(
                            "calibration: readout rows must sum to 1");
                }
            }
            cal.qubits.push_back(qc);
            ++qi;
        }
    }
    if (root.contains("gates")) {
        int gi = 0;
        for (const auto& jg : root.at("gates")) {
            reject_unknown_keys(jg, {"kind", "qubits", "error", "duration_ns"},
                                "gates[" + std::to_string(gi) + "]");
            GateCalibration gc;
            gc.kind = kind_from_string(jg.at("kind").get<std::string>());
            if (jg.contains("qubits")) gc.qubits = jg.at("qubits").get<std::vector<int>>();
            gc.error = jg.value("error", 0.0);
            if (gc.error < 0 || gc.error >= 1)
                throw std::invalid_argument("calibration: gate error out of [0,1)");
            gc.duration_ns = jg.value("duration_ns", 0.0);
            cal.gates.push_back(gc);
            ++gi;
        }
    }
    return cal;
}

CalibrationData load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_calibration: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_calibration(text);
}

std::vector<Mat> depolarizing_channel(double p, int n_qubits) {
    if (p < 0 || p >= 1) throw std::invalid_argument("depolarizing_channel: p out of [0,1)");
    long paulis = 1;
    for (int i = 0; i < n_qubits; ++i) paulis *= 4;
    Mat pauli1[4];
    pauli1[0] = Mat::Identity(2, 2);
    pauli1[1] = circuit::gate_matrix(circuit::GateKind::X, {});
    pauli1[2] = circuit::gate_matrix(circuit::GateKind::Y, {});
    pauli1[3] = circuit::gate_matrix(circuit::GateKind::Z, {});
    std::vector<Mat> kraus;
    kraus.reserve(paulis);
    double w_id = std::sqrt(1.0 - p * (paulis - 1) / paulis);
    double w_p = std::sqrt(p / paulis);
    for (long idx = 0; idx < paulis; ++idx) {
        Mat m = Mat::Identity(1, 1);
        long rem = idx;
        for (int qb = 0; qb < n_qubits; ++qb) {
            m = kron(pauli1[rem % 4], m);
            rem /= 4;
        }
        kraus.push_back(((idx == 0) ? w_id : w_p) * m);
    }
    if (p == 0) kraus.resize(1);
    return kraus;
}

std::vector<Mat> thermal_relaxation(double t1_us, double t2_us, double duration_ns) {
    if (t2_us > 2 * t1_us + 1e-12)
        throw std::invalid_argument("thermal_relaxation: T2 > 2*T1");
    if (duration_ns < 0) throw std::invalid_argument("thermal_relaxation: negative time");
    double t = duration_ns * 1e-3;  // us
    double gamma = 1.0 - std::exp(-t / t1_us);
    // extra pure dephasing on top of the amplitude-damping coherence decay so
    // the total off-diagonal factor is exp(-t/T2)
    double f = std::exp(-t * (1.0 / t2_us - 0.5 / t1_us));
    double pz = (1.0 - f) / 2.0;
    Mat a0 = Mat::Identity(2, 2), a1 = Mat::Zero(2, 2);
    a0(1, 1) = std::sqrt(1.0 - gamma);
    a1(0, 1) = std::sqrt(gamma);
    Mat z = circuit::gate_matrix(circuit::GateKind::Z, {});
    std::vector<Mat> kraus;
    kraus.push_back(std::sqrt(1 - pz) * a0);
    kraus.push_back(std::sqrt(1 - pz) * a1);
    if (pz > 0) {
        kraus.push_back(std::sqrt(pz) * (z * a0));
        kraus.push_back(std::sqrt(pz) * (z * a1));
    }
    return kraus;
}

double NoiseModel::gate_error(GateKind kind, const std::vector<int>& qubits) const {
    double fallback = 0.0;
    for (const auto& g : cal.gates) {
        if (g.kind != kind) continue;
        if (g.qubits.has_value()) {
            if (*g.qubits == qubits) return g.error;
        } else {
            fallback = g.error;
        }
    }
    return fallback;
}

double NoiseModel::gate_duration(const circuit::Gate& g) const {
    for (const auto& gc : cal.gates) {
        if (gc.kind != g.kind || gc.duration_ns <= 0) continue;
        if (!gc.qubits.has_value() || *gc.qubits == g.qubits) return gc.duration_ns;
    }
    return g.duration_ns;
}

const QubitCalibration& NoiseModel::qubit(int q) const {
    static const QubitCalibration ideal{1e12, 1e12, Eigen::Matrix2d::Identity()};
    if (cal.qubits.empty()) return ideal;
    return cal.qubits[q % cal.qubits.size()];
}

bool NoiseModel::trivial() const {
    for (const auto& g : cal.gates)
        if (g.error > 0) return false;
    for (const auto& q : cal.qubits) {
        if (q.t1_us < 1e11 || q.t2_us < 1e11) return false;
        if (!q.readout.isIdentity(1e-15)) return false;
    }
    return true;
}

NoiseModel build_noise_model(const CalibrationData& cal, const synth::GateSet& gateset) {
    std::string missing;
    for (auto kind : gateset.basis) {
        bool found = false;
        for (const auto& g : cal.gates) found = found || (g.kind == kind);
        // 1q error rates may legitimately be omitted (folded into duration);
        // a 2-qubit entangler without coverage is a configuration error
        bool two_qubit = kind == GateKind::CNOT || kind == GateKind::ECR ||
                         kind == GateKind::RZZ;
        if (!found && two_qubit) {
            if (!missing.empty()) missing += ", ";
            missing += circuit::kind_name(kind);
        }
    }
    if (!missing.empty() && !cal.gates.empty())
        throw std::invalid_argument("build_noise_model: missing coverage for: " + missing);
    NoiseModel m;
    m.cal = cal;
    return m;
}

}  // namespace uhl::noise
