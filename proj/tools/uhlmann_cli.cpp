#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "uhl/basisenc.hpp"
#include "uhl/experiment.hpp"
#include "uhl/noise.hpp"
#include "uhl/synth.hpp"

using namespace uhl;

namespace {

struct CommonOpts {
    std::string spin = "one";
    std::string method = "optimized";
    bool dd = false;
    double epsilon = 1e-8;
    std::string gateset = "eagle";
    std::string noise = "none";
    long shots = 2024;
    uint64_t seed = 2024;
    int grid = 60;
    std::string out;
    bool exact = false;
};

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--spin", o.spin, "spin: half | one")
        ->check(CLI::IsMember({"half", "one"}));
    app->add_option("--method", o.method, "method: naive | optimized")
        ->check(CLI::IsMember({"naive", "optimized"}));
    app->add_flag("--dd", o.dd, "insert XY4 dynamical decoupling");
    app->add_option("--epsilon", o.epsilon, "approximate synthesis tolerance");
    app->add_option("--gateset", o.gateset, "target ISA: eagle | heron | generic")
        ->check(CLI::IsMember({"eagle", "heron", "generic"}));
    app->add_option("--noise", o.noise, "calibration json path, or 'none'");
    app->add_option("--shots", o.shots, "shots per basis circuit");
    app->add_option("--seed", o.seed, "random seed");
    app->add_option("--grid", o.grid, "number of temperature grid points");
    app->add_option("--out", o.out, "output path (default: stdout)");
    app->add_flag("--exact", o.exact, "use exact expectations instead of shots");
}

experiment::SweepConfig to_config(const CommonOpts& o) {
    experiment::SweepConfig cfg;
    cfg.j = o.spin == "half" ? 0.5 : 1.0;
    cfg.grid_points = o.grid;
    cfg.shots = o.shots;
    cfg.exact_expectations = o.exact;
    cfg.method = o.method == "naive" ? experiment::Method::Naive
                                     : experiment::Method::Optimized;
    cfg.dd = o.dd;
    cfg.epsilon = o.epsilon;
    cfg.gateset = synth::gateset_by_name(o.gateset);
    if (o.noise != "none") cfg.calibration = noise::load_calibration(o.noise);
    cfg.seed = o.seed;
    return cfg;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << text;
}

int cmd_sweep(const CommonOpts& o) {
    auto cfg = to_config(o);
    auto result = experiment::run_sweep(cfg);
    emit(experiment::report(result.records, "csv"), o.out);
    if (result.partial_failure) {
        for (const auto& r : result.records)
            if (r.failed)
                std::cerr << "point T=" << r.temperature << " failed: " << r.note
                          << "\n";
        return 2;
    }
    return 0;
}

int cmd_counts(const CommonOpts& o) {
    auto cfg = to_config(o);
    auto grid = experiment::temperature_grid(cfg.grid_points);
    std::vector<circuit::Circuit> preps, uhls, traces;
    for (double t : grid) {
        auto blocks = experiment::block_circuits(t, cfg);
        preps.push_back(std::move(blocks.prep));
        uhls.push_back(std::move(blocks.uhlmann));
        traces.push_back(std::move(blocks.trace));
    }
    auto rep = synth::count_report({{"state_prep", preps},
                                    {"uhlmann_process", uhls},
                                    {"trace_estimation", traces}});
    emit(synth::report_csv(rep) + "\n" + synth::report_table(rep), o.out);
    return 0;
}

int cmd_prep_distance(const CommonOpts& o) {
    auto cfg = to_config(o);
    auto points = experiment::state_prep_distance_sweep(cfg);
    std::ostringstream os;
    os.precision(12);
    os << "T,ds_arbitrary,ds_shannon\n";
    for (const auto& p : points)
        os << p.temperature << "," << p.ds_arbitrary << "," << p.ds_shannon << "\n";
    emit(os.str(), o.out);
    return 0;
}

int cmd_synth_bench(const CommonOpts& o) {
    auto cfg = to_config(o);
    double t = experiment::temperature_grid(cfg.grid_points)[cfg.grid_points / 2];
    spinsys::SpinParams params{1.0, 1.0, 0.0};
    auto state = spinsys::thermal_state(params, spinsys::hamiltonian(params, 0.0),
                                        1.0 / t);
    auto proc = spinsys::uhlmann_process(state);
    auto ops = spinsys::angular_momentum(1.0);
    Mat cva = basisenc::controlled(
        basisenc::embed_triplet(expi_hermitian(ops.jy, proc.theta_total_ancilla)).full);

    std::ostringstream os;
    os.precision(12);
    os << "epsilon,success,u3,cnot,isa_total,distance\n";
    for (double eps : {1e-3, 1e-5, 1e-8, 1e-10, 1e-15, 1e-20}) {
        synth::SynthesisConfig sc;
        sc.epsilon = eps;
        sc.seed = o.seed;
        auto r = synth::approx_synthesize(cva, sc);
        auto isa = synth::transpile(r.circuit, cfg.gateset);
        os << eps << "," << (r.success ? 1 : 0) << ","
           << r.circuit.count(circuit::GateKind::U3) << ","
           << r.circuit.count(circuit::GateKind::CNOT) << "," << isa.size() << ","
           << r.distance << "\n";
    }
    emit(os.str(), o.out);
    return 0;
}

int cmd_export_qasm(const CommonOpts& o) {
    auto cfg = to_config(o);
    double t = experiment::temperature_grid(cfg.grid_points)[cfg.grid_points / 2];
    auto circ = experiment::full_isa_circuit(t, cfg, 'X');
    emit(circuit::to_qasm3(circ), o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uhlmann-phase interferometry circuit toolkit"};
    app.require_subcommand(1);
    CommonOpts o;
    auto* sweep = app.add_subcommand("sweep", "temperature sweep of the phase curve");
    auto* counts = app.add_subcommand("counts", "per-block ISA gate-count report");
    auto* prep = app.add_subcommand("prep-distance",
                                    "statistical distance of prepared states");
    auto* bench = app.add_subcommand("synth-bench",
                                     "approximate synthesis tolerance sweep");
    auto* qasm = app.add_subcommand("export-qasm", "OpenQASM 3 export");
    for (auto* sc : {sweep, counts, prep, bench, qasm}) add_common(sc, o);
    CLI11_PARSE(app, argc, argv);
    try {
        if (sweep->parsed()) return cmd_sweep(o);
        if (counts->parsed()) return cmd_counts(o);
        if (prep->parsed()) return cmd_prep_distance(o);
        if (bench->parsed()) return cmd_synth_bench(o);
        if (qasm->parsed()) return cmd_export_qasm(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
