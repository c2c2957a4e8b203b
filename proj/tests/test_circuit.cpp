#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "uhl/circuit.hpp"
#include "uhl/noise.hpp"

using namespace uhl;
using namespace uhl::circuit;

namespace {

Circuit random_circuit(int n, int depth, std::mt19937_64& rng) {
    Circuit c(n);
    std::uniform_int_distribution<int> qd(0, n - 1);
    std::uniform_int_distribution<int> kd(0, 5);
    std::uniform_real_distribution<double> ad(-pi, pi);
    for (int i = 0; i < depth; ++i) {
        switch (kd(rng)) {
            case 0: c.add(Gate::h(qd(rng))); break;
            case 1: c.add(Gate::rx(qd(rng), ad(rng))); break;
            case 2: c.add(Gate::ry(qd(rng), ad(rng))); break;
            case 3: c.add(Gate::rz(qd(rng), ad(rng))); break;
            case 4: c.add(Gate::u3(qd(rng), ad(rng), ad(rng), ad(rng))); break;
            default: {
                if (n < 2) { c.add(Gate::x(0)); break; }
                int a = qd(rng), b = qd(rng);
                if (a == b) b = (b + 1) % n;
                c.add(Gate::cnot(a, b));
                break;
            }
        }
    }
    return c;
}

}  // namespace

TEST_CASE("gate construction and matrices") {
    CHECK(Gate::x(0).matrix.rows() == 2);
    CHECK(Gate::cnot(0, 1).matrix.rows() == 4);
    for (auto k : {GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S,
                   GateKind::Sdg, GateKind::SX})
        CHECK(is_unitary(gate_matrix(k, {}), 1e-12));
    for (auto k : {GateKind::CNOT, GateKind::ECR})
        CHECK(is_unitary(gate_matrix(k, {}), 1e-12));
    CHECK(is_unitary(gate_matrix(GateKind::U3, {0.3, 0.7, -1.1}), 1e-12));
    CHECK(is_unitary(gate_matrix(GateKind::RZZ, {0.4}), 1e-12));
    CHECK_THROWS(gate_matrix(GateKind::Barrier, {}));
    CHECK_THROWS(Gate::unitary({0}, Mat::Ones(2, 2)));
}

TEST_CASE("apply_gate basics") {
    SUBCASE("x flips the ground state") {
        StateVector s(1);
        apply_gate(s, Gate::x(0));
        CHECK(std::abs(s.amplitudes(1) - cd(1, 0)) < 1e-14);
    }
    SUBCASE("h twice is the identity") {
        std::mt19937_64 rng(5);
        StateVector s(3);
        s.amplitudes = random_unitary(8, rng).col(0);
        Vec before = s.amplitudes;
        apply_gate(s, Gate::h(1));
        apply_gate(s, Gate::h(1));
        CHECK((s.amplitudes - before).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("bell pair") {
        StateVector s(2);
        apply_gate(s, Gate::h(0));
        apply_gate(s, Gate::cnot(0, 1));
        CHECK(std::abs(s.amplitudes(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(s.amplitudes(3) - 1.0 / std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(s.amplitudes(1)) < 1e-14);
        CHECK(std::abs(s.amplitudes(2)) < 1e-14);
    }
    SUBCASE("out of range") {
        StateVector s(2);
        CHECK_THROWS(apply_gate(s, Gate::x(2)));
    }
}

TEST_CASE("statevector simulation") {
    SUBCASE("empty circuit") {
        Circuit c(5);
        auto s = simulate_statevector(c);
        CHECK(std::abs(s.amplitudes(0) - cd(1, 0)) < 1e-15);
        CHECK(std::abs(s.amplitudes.norm() - 1.0) < 1e-15);
    }
    SUBCASE("norm preserved on random circuits") {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 10; ++i) {
            auto c = random_circuit(4, 40, rng);
            auto s = simulate_statevector(c);
            CHECK(std::abs(s.amplitudes.norm() - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("unitary of circuit") {
    SUBCASE("single x") {
        Circuit c(1);
        c.add(Gate::x(0));
        CHECK(phase_dist(unitary_of_circuit(c), gate_matrix(GateKind::X, {})) < 1e-14);
    }
    SUBCASE("cnot permutation, control = qubit 0") {
        Circuit c(2);
        c.add(Gate::cnot(0, 1));
        Mat u = unitary_of_circuit(c);
        // |q1 q0>: 01 <-> 11, i.e. basis indices 1 <-> 3
        CHECK(std::abs(u(0, 0) - cd(1, 0)) < 1e-14);
        CHECK(std::abs(u(3, 1) - cd(1, 0)) < 1e-14);
        CHECK(std::abs(u(2, 2) - cd(1, 0)) < 1e-14);
        CHECK(std::abs(u(1, 3) - cd(1, 0)) < 1e-14);
    }
    SUBCASE("matches statevector route on random circuits") {
        std::mt19937_64 rng(21);
        for (int i = 0; i < 50; ++i) {
            int n = 2 + static_cast<int>(rng() % 4);
            auto c = random_circuit(n, 40, rng);
            Mat u = unitary_of_circuit(c);
            auto s = simulate_statevector(c);
            CHECK((u.col(0) - s.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SUBCASE("measurements rejected") {
        Circuit c(1);
        c.measure(0, 0);
        CHECK_THROWS(unitary_of_circuit(c));
    }
}

TEST_CASE("density simulation") {
    SUBCASE("no model equals pure projector") {
        std::mt19937_64 rng(31);
        for (int i = 0; i < 20; ++i) {
            auto c = random_circuit(3, 25, rng);
            auto s = simulate_statevector(c);
            auto d = simulate_density(c, nullptr);
            Mat proj = s.amplitudes * s.amplitudes.adjoint();
            CHECK((d.matrix - proj).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(d.matrix.trace().real() - 1.0) < 1e-10);
            CHECK(is_hermitian(d.matrix, 1e-10));
        }
    }
    SUBCASE("t1 decay closed form") {
        noise::CalibrationData cal;
        cal.qubits.push_back({1.0, 2.0, Eigen::Matrix2d::Identity()});
        cal.gates.push_back({GateKind::X, std::nullopt, 0.0, 1000.0});  // t = T1
        cal.gates.push_back({GateKind::CNOT, std::nullopt, 0.0, 1e-6});
        auto model = noise::build_noise_model(cal, synth::generic_gateset());
        Circuit c(1);
        c.add(Gate::x(0));
        auto d = simulate_density(c, &model);
        CHECK(d.matrix(1, 1).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    }
    SUBCASE("full depolarizing mixes the qubit") {
        noise::CalibrationData cal;
        cal.qubits.push_back({100.0, 100.0, Eigen::Matrix2d::Identity()});
        cal.gates.push_back({GateKind::H, std::nullopt, 0.999999999999, 1e-6});
        cal.gates.push_back({GateKind::CNOT, std::nullopt, 0.0, 1e-6});
        auto model = noise::build_noise_model(cal, synth::generic_gateset());
        Circuit c(1);
        c.add(Gate::h(0));
        auto d = simulate_density(c, &model);
        CHECK(std::abs(d.matrix(0, 0).real() - 0.5) < 1e-9);
        CHECK(std::abs(d.matrix(0, 1)) < 1e-9);
    }
}

TEST_CASE("shot sampling") {
    SUBCASE("plus state in the x basis is deterministic") {
        Circuit c(1);
        c.add(Gate::h(0));
        c.measure(0, 0, 'X');
        auto s = simulate_statevector(c);
        auto sc = sample_counts(s, c.measurements, 512, 7);
        CHECK(sc.total == 512);
        CHECK(sc.counts.at("0") == 512);
    }
    SUBCASE("ground state in the x basis is a fair coin") {
        Circuit c(1);
        c.measure(0, 0, 'X');
        auto s = simulate_statevector(c);
        auto sc = sample_counts(s, c.measurements, 2024, 13);
        double f = static_cast<double>(sc.counts["0"]) / 2024.0;
        CHECK(std::abs(f - 0.5) < 5 * 0.5 / std::sqrt(2024.0));
    }
    SUBCASE("readout confusion") {
        noise::CalibrationData cal;
        Eigen::Matrix2d r;
        r << 0.99, 0.01, 0.02, 0.98;
        cal.qubits.push_back({100.0, 100.0, r});
        auto model = noise::build_noise_model(cal, synth::generic_gateset());
        Circuit c(1);
        c.measure(0, 0);
        auto s = simulate_statevector(c);
        auto sc = sample_counts(s, c.measurements, 20000, 17, &model);
        double f1 = static_cast<double>(sc.counts["1"]) / 20000.0;
        CHECK(std::abs(f1 - 0.01) < 5 * std::sqrt(0.01 * 0.99 / 20000.0));
    }
    SUBCASE("fixed seed is bit-identical") {
        Circuit c(2);
        c.add(Gate::h(0));
        c.add(Gate::cnot(0, 1));
        c.measure(0, 0);
        c.measure(1, 1);
        auto s = simulate_statevector(c);
        auto a = sample_counts(s, c.measurements, 999, 42);
        auto b = sample_counts(s, c.measurements, 999, 42);
        CHECK(a.counts == b.counts);
        auto d = sample_counts(s, c.measurements, 999, 43);
        CHECK(a.counts != d.counts);
    }
    SUBCASE("shots must be positive") {
        Circuit c(1);
        c.measure(0, 0);
        auto s = simulate_statevector(c);
        CHECK_THROWS(sample_counts(s, c.measurements, 0, 1));
    }
}

TEST_CASE("probe expectations") {
    auto mk = [](long n0, long n1) {
        ShotCounts sc;
        if (n0 > 0) sc.counts["0"] = n0;
        if (n1 > 0) sc.counts["1"] = n1;
        sc.total = n0 + n1;
        return sc;
    };
    SUBCASE("deterministic and balanced counts") {
        auto [sx, sy] = expectation_xy(mk(100, 0), mk(50, 50));
        CHECK(sx == doctest::Approx(1.0));
        CHECK(sy == doctest::Approx(0.0));
    }
    SUBCASE("paper shot arithmetic") {
        auto [sx, sy] = expectation_xy(mk(1518, 506), mk(1518, 506));
        CHECK(sx == doctest::Approx(0.5));
        CHECK(sy == doctest::Approx(0.5));
    }
    SUBCASE("zero total rejected") {
        CHECK_THROWS(expectation_xy(mk(0, 0), mk(10, 0)));
    }
    SUBCASE("exact expectations of a rotated probe") {
        Circuit c(1);
        c.add(Gate::h(0));
        c.add(Gate::rz(0, 0.7));
        auto s = simulate_statevector(c);
        auto [sx, sy] = exact_xy(s, 0);
        CHECK(sx == doctest::Approx(std::cos(0.7)).epsilon(1e-12));
        CHECK(sy == doctest::Approx(std::sin(0.7)).epsilon(1e-12));
    }
}

TEST_CASE("operator embedding") {
    std::mt19937_64 rng(77);
    Mat u = random_unitary(4, rng);
    Mat e = embed(u, {0, 2}, 3);
    CHECK(is_unitary(e, 1e-12));
    // check action against a direct statevector application
    Circuit c(3);
    c.add(Gate::h(0));
    c.add(Gate::ry(1, 0.4));
    c.add(Gate::h(2));
    auto s = simulate_statevector(c);
    Vec direct = e * s.amplitudes;
    StateVector t = s;
    apply_gate(t, Gate::unitary({0, 2}, u));
    CHECK((direct - t.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("openqasm 3 export") {
    Circuit c(2);
    c.add(Gate::h(0));
    c.add(Gate::rz(1, 0.25));
    c.add(Gate::cnot(0, 1));
    c.measure(0, 0, 'X');
    std::string q = to_qasm3(c);
    CHECK(q.find("OPENQASM 3.0;") == 0);
    CHECK(q.find("qubit[2]") != std::string::npos);
    CHECK(q.find("cx") != std::string::npos);
    CHECK(q.find("rz(0.25") != std::string::npos);
    CHECK(q.find("measure") != std::string::npos);
    // one statement per line: every non-empty line ends in ; or {
    std::istringstream is(q);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        char last = line.back();
        CHECK((last == ';' || last == '{' || last == '}'));
    }
    Circuit bad(2);
    std::mt19937_64 rng(3);
    bad.add(Gate::unitary({0, 1}, random_unitary(4, rng)));
    CHECK_THROWS(to_qasm3(bad));
}
