#include <doctest.h>

#include <cmath>

#include "uhl/circuit.hpp"
#include "uhl/noise.hpp"

using namespace uhl;
using namespace uhl::noise;

namespace {

bool kraus_complete(const std::vector<Mat>& ks, double tol = 1e-12) {
    Mat sum = Mat::Zero(ks[0].cols(), ks[0].cols());
    for (const auto& k : ks) sum += k.adjoint() * k;
    return (sum - Mat::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff() < tol;
}

Mat apply_channel(const std::vector<Mat>& ks, const Mat& rho) {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const auto& k : ks) out += k * rho * k.adjoint();
    return out;
}

}  // namespace

TEST_CASE("calibration parsing") {
    SUBCASE("minimal file with defaults") {
        auto cal = parse_calibration(R"({"qubits": [{"t1_us": 120.0}]})");
        CHECK(cal.qubits.size() == 1);
        CHECK(cal.qubits[0].t1_us == doctest::Approx(120.0));
        CHECK(cal.qubits[0].readout.isApprox(Eigen::Matrix2d::Identity()));
        CHECK(cal.gates.empty());
    }
    SUBCASE("gate entries") {
        auto cal = parse_calibration(
            R"({"gates": [{"kind": "ecr", "error": 2.88e-3, "duration_ns": 460.0},
                          {"kind": "cx", "qubits": [0, 1], "error": 1e-3}]})");
        CHECK(cal.gates.size() == 2);
        CHECK(cal.gates[0].kind == circuit::GateKind::ECR);
        CHECK(cal.gates[0].error == doctest::Approx(2.88e-3));
        CHECK(!cal.gates[0].qubits.has_value());
        CHECK(cal.gates[1].qubits.value() == std::vector<int>{0, 1});
    }
    SUBCASE("unphysical t2 rejected") {
        CHECK_THROWS(parse_calibration(R"({"qubits": [{"t1_us": 100.0, "t2_us": 300.0}]})"));
    }
    SUBCASE("unknown keys rejected") {
        CHECK_THROWS(parse_calibration(R"({"qubitz": []})"));
        CHECK_THROWS(parse_calibration(R"({"qubits": [{"t1": 100.0}]})"));
        CHECK_THROWS(parse_calibration(
            R"({"gates": [{"kind": "cx", "error": 0.1, "fidelity": 0.9}]})"));
    }
    SUBCASE("bad gate values rejected") {
        CHECK_THROWS(parse_calibration(R"({"gates": [{"kind": "warp", "error": 0.1}]})"));
        CHECK_THROWS(parse_calibration(R"({"gates": [{"kind": "cx", "error": 1.5}]})"));
    }
    SUBCASE("shipped device files") {
        auto eagle = load_calibration("data/eagle.json");
        auto heron = load_calibration("data/heron.json");
        double e2 = 0, h2 = 0;
        for (const auto& g : eagle.gates)
            if (g.kind == circuit::GateKind::ECR) e2 = g.error;
        for (const auto& g : heron.gates)
            if (g.kind == circuit::GateKind::CNOT) h2 = g.error;
        CHECK(e2 == doctest::Approx(2.88e-3));
        CHECK(h2 == doctest::Approx(9.63e-4));
        CHECK(h2 < e2);
        CHECK(eagle.qubits.size() == heron.qubits.size());
    }
}

TEST_CASE("depolarizing channel") {
    SUBCASE("identity at p = 0") {
        auto ks = depolarizing_channel(0.0, 1);
        CHECK(ks.size() == 1);
        CHECK(phase_dist(ks[0], Mat::Identity(2, 2)) < 1e-14);
    }
    SUBCASE("complete positivity and trace preservation") {
        for (double p : {0.01, 0.3, 0.97}) {
            CHECK(kraus_complete(depolarizing_channel(p, 1)));
            CHECK(kraus_complete(depolarizing_channel(p, 2)));
        }
    }
    SUBCASE("full mixing near p = 1") {
        Mat rho = Mat::Zero(2, 2);
        rho(0, 0) = 1;
        Mat out = apply_channel(depolarizing_channel(0.9999999999, 1), rho);
        CHECK(std::abs(out(0, 0).real() - 0.5) < 1e-9);
    }
    SUBCASE("purity decreases monotonically in p") {
        Mat rho = Mat::Zero(2, 2);
        rho(0, 0) = 1;  // I/2 + sz/2
        double prev = 1.0;
        for (double p : {0.1, 0.3, 0.5, 0.8}) {
            Mat out = apply_channel(depolarizing_channel(p, 1), rho);
            double purity = (out * out).trace().real();
            CHECK(purity < prev);
            prev = purity;
        }
    }
    SUBCASE("p out of range") {
        CHECK_THROWS(depolarizing_channel(-0.1, 1));
        CHECK_THROWS(depolarizing_channel(1.0, 1));
    }
}

TEST_CASE("thermal relaxation channel") {
    SUBCASE("identity at zero duration") {
        auto ks = thermal_relaxation(100.0, 100.0, 0.0);
        Mat rho = Mat::Zero(2, 2);
        rho(0, 1) = rho(1, 0) = 0.5;
        rho(0, 0) = rho(1, 1) = 0.5;
        CHECK((apply_channel(ks, rho) - rho).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("population decay law") {
        Mat rho = Mat::Zero(2, 2);
        rho(1, 1) = 1;
        auto ks = thermal_relaxation(1.0, 1.0, 1000.0);  // t = T1
        Mat out = apply_channel(ks, rho);
        CHECK(out(1, 1).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    }
    SUBCASE("coherence decay law") {
        Mat rho(2, 2);
        rho << 0.5, 0.5, 0.5, 0.5;
        auto ks = thermal_relaxation(10.0, 2.0, 2000.0);  // t = T2
        Mat out = apply_channel(ks, rho);
        CHECK(std::abs(out(0, 1)) == doctest::Approx(std::exp(-1.0) / 2).epsilon(1e-10));
    }
    SUBCASE("completeness across parameters") {
        for (double t : {10.0, 300.0, 5000.0})
            CHECK(kraus_complete(thermal_relaxation(80.0, 110.0, t)));
    }
    SUBCASE("unphysical parameters rejected") {
        CHECK_THROWS(thermal_relaxation(100.0, 250.0, 10.0));
        CHECK_THROWS(thermal_relaxation(100.0, 100.0, -1.0));
    }
}

TEST_CASE("noise model assembly") {
    SUBCASE("zero-error calibration acts as identity") {
        CalibrationData cal;
        cal.qubits.push_back({1e12, 1e12, Eigen::Matrix2d::Identity()});
        auto model = build_noise_model(cal, synth::generic_gateset());
        CHECK(model.trivial());
        circuit::Circuit c(2);
        c.add(circuit::Gate::h(0));
        c.add(circuit::Gate::cnot(0, 1));
        auto noisy = circuit::simulate_density(c, &model);
        auto pure = circuit::simulate_statevector(c);
        Mat proj = pure.amplitudes * pure.amplitudes.adjoint();
        CHECK((noisy.matrix - proj).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("placement-specific error wins over fallback") {
        CalibrationData cal;
        cal.gates.push_back({circuit::GateKind::CNOT, std::nullopt, 1e-3, 0.0});
        cal.gates.push_back({circuit::GateKind::CNOT, std::vector<int>{0, 1}, 5e-3, 0.0});
        auto model = build_noise_model(cal, synth::generic_gateset());
        CHECK(model.gate_error(circuit::GateKind::CNOT, {0, 1}) == doctest::Approx(5e-3));
        CHECK(model.gate_error(circuit::GateKind::CNOT, {1, 2}) == doctest::Approx(1e-3));
    }
    SUBCASE("missing entangler coverage rejected") {
        CalibrationData cal;
        cal.gates.push_back({circuit::GateKind::SX, std::nullopt, 1e-4, 0.0});
        CHECK_THROWS(build_noise_model(cal, synth::eagle_gateset()));
    }
    SUBCASE("density invariants under a full model") {
        auto model = build_noise_model(load_calibration("data/eagle.json"),
                                       synth::eagle_gateset());
        circuit::Circuit c(3);
        c.add(circuit::Gate::sx(0));
        c.add(circuit::Gate::ecr(0, 1));
        c.add(circuit::Gate::x(2));
        c.add(circuit::Gate::ecr(1, 2));
        auto d = circuit::simulate_density(c, &model);
        CHECK(std::abs(d.matrix.trace().real() - 1.0) < 1e-10);
        CHECK(is_hermitian(d.matrix, 1e-10));
        Eigen::SelfAdjointEigenSolver<Mat> es(d.matrix);
        CHECK(es.eigenvalues().minCoeff() > -1e-9);
    }
}
