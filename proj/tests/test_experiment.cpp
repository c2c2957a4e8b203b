#include <doctest.h>

#include <cmath>
#include <sstream>

#include "uhl/experiment.hpp"
#include "uhl/spinsys.hpp"

using namespace uhl;
using namespace uhl::experiment;

namespace {

SweepConfig quick_config() {
    SweepConfig cfg;
    cfg.j = 0.5;
    cfg.grid_points = 12;
    cfg.shots = 2024;
    cfg.exact_expectations = true;
    cfg.method = Method::Naive;
    cfg.gateset = synth::generic_gateset();
    cfg.seed = 99;
    return cfg;
}

}  // namespace

TEST_CASE("temperature grid") {
    auto g = temperature_grid(60);
    CHECK(g.size() == 60);
    CHECK(g.front() == doctest::Approx(0.01));
    CHECK(g.back() < 1.0);
    for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK_THROWS(temperature_grid(0));
}

TEST_CASE("statistical distance") {
    CHECK(statistical_distance({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(statistical_distance({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(statistical_distance({0.6, 0.4}, {0.5, 0.5}) == doctest::Approx(0.1));
    CHECK_THROWS(statistical_distance({0.5, 0.5}, {0.5, 0.5, 0.0}));
    CHECK_THROWS(statistical_distance({0.7, 0.7}, {0.5, 0.5}));
}

TEST_CASE("noiseless sweep matches the analytic phase") {
    auto cfg = quick_config();
    auto result = run_sweep(cfg);
    CHECK(result.records.size() == 12);
    CHECK(!result.partial_failure);
    for (const auto& r : result.records) {
        CHECK(!r.failed);
        CHECK(r.theta_circuit > -pi);
        CHECK(r.theta_circuit <= pi);
        if (!r.critical)
            CHECK(std::abs(std::remainder(r.theta_circuit - r.theta_analytic, 2 * pi)) <
                  1e-8);
    }
}

TEST_CASE("shot-sampled sweep within binomial bounds") {
    auto cfg = quick_config();
    cfg.exact_expectations = false;
    auto exact_cfg = cfg;
    exact_cfg.exact_expectations = true;
    auto sampled = run_sweep(cfg);
    auto exact = run_sweep(exact_cfg);
    double bound = 5.0 / std::sqrt(2024.0);
    for (size_t i = 0; i < sampled.records.size(); ++i) {
        CHECK(std::abs(sampled.records[i].sx - exact.records[i].sx) < bound);
        CHECK(std::abs(sampled.records[i].sy - exact.records[i].sy) < bound);
    }
}

TEST_CASE("sweep determinism under seed") {
    auto cfg = quick_config();
    cfg.exact_expectations = false;
    cfg.grid_points = 6;
    auto a = run_sweep(cfg);
    auto b = run_sweep(cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].sx == b.records[i].sx);
        CHECK(a.records[i].sy == b.records[i].sy);
        CHECK(a.records[i].theta_circuit == b.records[i].theta_circuit);
        CHECK(a.records[i].seed == b.records[i].seed);
    }
    cfg.seed += 1;
    auto c = run_sweep(cfg);
    bool any_diff = false;
    for (size_t i = 0; i < a.records.size(); ++i)
        any_diff = any_diff || (a.records[i].sx != c.records[i].sx);
    CHECK(any_diff);
}

TEST_CASE("invalid configs rejected") {
    auto cfg = quick_config();
    cfg.shots = 0;
    CHECK_THROWS(run_sweep(cfg));
    cfg = quick_config();
    cfg.j = 0.7;
    CHECK_THROWS(run_sweep(cfg));
    cfg = quick_config();
    cfg.grid_points = 0;
    CHECK_THROWS(run_sweep(cfg));
}

TEST_CASE("prep distance sweep") {
    SUBCASE("noiseless distances vanish") {
        auto cfg = quick_config();
        cfg.grid_points = 5;
        auto pts = state_prep_distance_sweep(cfg);
        CHECK(pts.size() == 5);
        for (const auto& p : pts) {
            CHECK(p.ds_arbitrary <= 1e-8);
            CHECK(p.ds_shannon <= 1e-8);
        }
    }
}

TEST_CASE("sweep report") {
    auto cfg = quick_config();
    cfg.grid_points = 3;
    auto result = run_sweep(cfg);
    SUBCASE("csv structure and round trip") {
        std::string csv = report(result.records, "csv");
        std::istringstream is(csv);
        std::string header;
        std::getline(is, header);
        CHECK(header ==
              "T,sx,sy,theta_circuit,theta_analytic,abs_G,gates_prep,gates_uhlmann,"
              "gates_meas,delta_s");
        int rows = 0;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string cell;
            std::vector<double> vals;
            while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
            REQUIRE(vals.size() == 10);
            const auto& r = result.records[rows];
            CHECK(vals[0] == doctest::Approx(r.temperature).epsilon(1e-9));
            CHECK(vals[1] == doctest::Approx(r.sx).epsilon(1e-9));
            CHECK(vals[3] == doctest::Approx(r.theta_circuit).epsilon(1e-9));
            CHECK(vals[6] == doctest::Approx(static_cast<double>(r.gates_prep)));
            ++rows;
        }
        CHECK(rows == 3);
    }
    SUBCASE("table totals match csv") {
        std::string csv = report(result.records, "csv");
        std::string tab = report(result.records, "table");
        long total_prep = 0;
        for (const auto& r : result.records) total_prep += r.gates_prep;
        CHECK(tab.find(std::to_string(total_prep)) != std::string::npos);
    }
    SUBCASE("unknown format rejected") {
        CHECK_THROWS(report(result.records, "yaml"));
        CHECK_THROWS(report({}, "csv"));
    }
}

TEST_CASE("trace estimation block") {
    auto eagle = trace_estimation_isa(synth::eagle_gateset());
    CHECK(eagle.size() == 4);
    for (const auto& g : eagle.gates) CHECK(synth::eagle_gateset().contains(g.kind));
    auto generic = trace_estimation_isa(synth::generic_gateset());
    CHECK(generic.size() >= 1);
}

TEST_CASE("per-block circuits") {
    auto cfg = quick_config();
    cfg.gateset = synth::eagle_gateset();
    auto blocks = block_circuits(0.5, cfg);
    CHECK(blocks.prep.size() > 0);
    CHECK(blocks.uhlmann.size() > 0);
    CHECK(blocks.trace.size() == 4);
    for (const auto& c : {blocks.prep, blocks.uhlmann, blocks.trace})
        for (const auto& g : c.gates)
            CHECK((cfg.gateset.contains(g.kind) || g.kind == circuit::GateKind::Barrier));
}

TEST_CASE("full circuit export shape") {
    auto cfg = quick_config();
    cfg.gateset = synth::eagle_gateset();
    auto c = full_isa_circuit(0.5, cfg, 'X');
    CHECK(c.n_qubits == 3);
    CHECK(c.measurements.size() == 1);
    CHECK(c.measurements[0].basis == 'X');
    std::string q = circuit::to_qasm3(c);
    CHECK(q.find("OPENQASM 3.0;") == 0);
}
