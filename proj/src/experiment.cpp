#include "uhl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace uhl::experiment {

using circuit::Circuit;
using circuit::Gate;
using circuit::GateKind;

std::vector<double> temperature_grid(int n, double t_min, double t_max) {
    if (n < 1) throw std::invalid_argument("temperature_grid: need n >= 1");
    std::vector<double> grid(n);
    double step = (t_max - t_min) / n;  // half-open [t_min, t_max)
    for (int i = 0; i < n; ++i) grid[i] = t_min + i * step;
    return grid;
}

double statistical_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("statistical_distance: support size mismatch");
    double sp = std::accumulate(p.begin(), p.end(), 0.0);
    double sq = std::accumulate(q.begin(), q.end(), 0.0);
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
        throw std::invalid_argument("statistical_distance: unnormalized input");
    double d = 0;
    for (size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return d / 2;
}

namespace {

void append_mapped(Circuit& dst, const Circuit& sub, const std::vector<int>& map) {
    for (auto g : sub.gates) {
        for (auto& q : g.qubits) q = map[q];
        dst.add(std::move(g));
    }
}

void append_shifted(Circuit& dst, const Circuit& sub, int offset) {
    for (auto g : sub.gates) {
        for (auto& q : g.qubits) q += offset;
        dst.add(std::move(g));
    }
}

struct ProcCacheEntry {
    Mat matrix;
    Circuit circ;
};

Circuit synth_unitary(const Mat& u, const SweepConfig& cfg, std::string* note,
                      std::vector<ProcCacheEntry>* cache) {
    if (cache)
        for (const auto& e : *cache)
            if (e.matrix.rows() == u.rows() && (e.matrix - u).cwiseAbs().maxCoeff() < 1e-12)
                return e.circ;
    if (cfg.method == Method::Naive)
        return synth::qsd_decompose(u, {/*optimize=*/false});
    synth::SynthesisConfig sc;
    sc.epsilon = cfg.epsilon;
    sc.max_depth = 12;
    sc.max_iterations = 300;
    sc.restarts = 8;
    sc.seed = cfg.seed;
    auto r = synth::approx_synthesize(u, sc);
    if (r.success) return r.circuit;
    if (note) *note += "approx synthesis missed epsilon, exact fallback; ";
    return synth::qsd_decompose(u, {/*optimize=*/true});
}

// process (controlled Uhlmann evolution) on the full register, pre-transpile
Circuit process_circuit(const spinsys::ThermalSpinState& state,
                        const spinsys::UhlmannProcess& proc, const SweepConfig& cfg,
                        std::string* note, std::vector<ProcCacheEntry>* cache) {
    if (cfg.j == 0.5) {
        Circuit c(3);
        for (auto [target, theta] :
             {std::pair{1, proc.theta_total_system}, {2, proc.theta_total_ancilla}}) {
            c.add(Gate::ry(target, theta / 2));
            c.add(Gate::cnot(0, target));
            c.add(Gate::ry(target, -theta / 2));
            c.add(Gate::cnot(0, target));
        }
        return c;
    }
    auto ops = spinsys::angular_momentum(1.0);
    Mat vs = basisenc::embed_triplet(expi_hermitian(ops.jy, proc.theta_total_system)).full;
    Mat va = basisenc::embed_triplet(expi_hermitian(ops.jy, proc.theta_total_ancilla)).full;
    Circuit c(5);
    append_mapped(c, synth_unitary(basisenc::controlled(vs), cfg, note, cache), {1, 2, 0});
    append_mapped(c, synth_unitary(basisenc::controlled(va), cfg, note, cache), {3, 4, 0});
    return c;
}

Eigen::VectorXd purified_target(const spinsys::ThermalSpinState& state) {
    return state.dim() == 2 ? basisenc::spin_half_purified_target(state)
                            : basisenc::spin1_purified_target(state);
}

std::vector<double> measured_distribution(const Circuit& isa,
                                          const noise::NoiseModel* model) {
    long dim = 1L << isa.n_qubits;
    std::vector<double> p(dim);
    if (model) {
        auto st = circuit::simulate_density(isa, model);
        for (long i = 0; i < dim; ++i) p[i] = std::max(0.0, st.matrix(i, i).real());
    } else {
        auto st = circuit::simulate_statevector(isa);
        for (long i = 0; i < dim; ++i) p[i] = std::norm(st.amplitudes(i));
    }
    if (model) {
        // classical readout confusion, qubit by qubit
        for (int q = 0; q < isa.n_qubits; ++q) {
            const auto& conf = model->qubit(q).readout;
            std::vector<double> next(dim, 0.0);
            for (long b = 0; b < dim; ++b) {
                int bit = (b >> q) & 1;
                next[b] += conf(bit, bit) * p[b];
                next[b ^ (1L << q)] += conf(bit, 1 - bit) * p[b];
            }
            p.swap(next);
        }
    }
    double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= s;
    return p;
}

double prep_delta_s(const Circuit& prep_isa, const Eigen::VectorXd& target,
                    const noise::NoiseModel* model) {
    std::vector<double> q(target.size());
    for (long i = 0; i < target.size(); ++i) q[i] = target(i) * target(i);
    return statistical_distance(measured_distribution(prep_isa, model), q);
}

// dynamical-decoupling blocks on the transpiled circuit; Y is not native on
// any target set, so it is lowered in place
Circuit insert_dd(const Circuit& isa, const synth::GateSet& gs) {
    Circuit dd = basisenc::insert_xy4(isa);
    Circuit out(dd.n_qubits);
    for (const auto& g : dd.gates) {
        if (g.kind == GateKind::Y && !gs.contains(GateKind::Y)) {
            int q = g.qubits[0];
            if (gs.contains(GateKind::RZ) && gs.contains(GateKind::X)) {
                out.add(Gate::rz(q, pi));
                out.add(Gate::x(q));
            } else {
                out.add(Gate::u3(q, pi, pi / 2, pi / 2));
            }
        } else {
            out.add(g);
        }
    }
    out.measurements = dd.measurements;
    return out;
}

BlockCircuits make_blocks(double temperature, const SweepConfig& cfg,
                          std::string* note, std::vector<ProcCacheEntry>* cache) {
    spinsys::SpinParams params{cfg.j, 1.0, 0.0};
    auto state = spinsys::thermal_state(params, spinsys::hamiltonian(params, 0.0),
                                        1.0 / temperature);
    auto proc = spinsys::uhlmann_process(state);
    basisenc::PrepMethod pm = cfg.method == Method::Naive
                                  ? basisenc::PrepMethod::Arbitrary
                                  : basisenc::PrepMethod::Shannon;
    BlockCircuits out;
    out.prep = synth::transpile(
        basisenc::build_state_prep({purified_target(state), pm}), cfg.gateset);
    out.uhlmann = synth::transpile(
        process_circuit(state, proc, cfg, note, cache), cfg.gateset);
    out.trace = trace_estimation_isa(cfg.gateset, 'X');
    return out;
}

}  // namespace

circuit::Circuit trace_estimation_isa(const synth::GateSet& gateset, char basis) {
    Circuit h1(1);
    h1.add(Gate::h(0));
    Circuit init = synth::transpile(h1, gateset);
    Circuit rot(1);
    if (basis == 'X') {
        rot.add(Gate::h(0));
    } else if (basis == 'Y') {
        rot.add(Gate::sdg(0));
        rot.add(Gate::h(0));
    } else {
        throw std::invalid_argument("trace_estimation_isa: basis must be X or Y");
    }
    Circuit meas = synth::transpile(rot, gateset);
    Circuit out(1);
    // a leading RZ acts on |0> only by phase; a trailing RZ commutes with the
    // Z-basis readout — neither affects the estimate
    size_t first = 0;
    while (first < init.gates.size() && init.gates[first].kind == GateKind::RZ) ++first;
    for (size_t i = first; i < init.gates.size(); ++i) out.add(init.gates[i]);
    size_t last = meas.gates.size();
    while (last > 0 && meas.gates[last - 1].kind == GateKind::RZ) --last;
    for (size_t i = 0; i < last; ++i) out.add(meas.gates[i]);
    return out;
}

BlockCircuits block_circuits(double temperature, const SweepConfig& cfg) {
    std::string note;
    return make_blocks(temperature, cfg, &note, nullptr);
}

circuit::Circuit full_isa_circuit(double temperature, const SweepConfig& cfg,
                                  char basis) {
    std::string note;
    BlockCircuits blocks = make_blocks(temperature, cfg, &note, nullptr);
    int n = cfg.j == 0.5 ? 3 : 5;
    Circuit h1(1);
    h1.add(Gate::h(0));
    Circuit full(n);
    append_shifted(full, synth::transpile(h1, cfg.gateset), 0);
    append_shifted(full, blocks.prep, 1);
    append_shifted(full, blocks.uhlmann, 0);
    if (cfg.dd) full = insert_dd(full, cfg.gateset);
    full.measure(0, 0, basis);
    return full;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    if (cfg.shots < 1) throw std::invalid_argument("run_sweep: shots must be >= 1");
    if (cfg.j != 0.5 && cfg.j != 1.0)
        throw std::invalid_argument("run_sweep: spin must be 1/2 or 1");
    std::vector<double> grid = temperature_grid(cfg.grid_points);
    int n = cfg.j == 0.5 ? 3 : 5;

    std::optional<noise::NoiseModel> model;
    if (cfg.calibration)
        model = noise::build_noise_model(*cfg.calibration, cfg.gateset);
    const noise::NoiseModel* model_ptr = model ? &*model : nullptr;

    // the system-side loop rotation is a full 2*pi turn at every temperature,
    // so its controlled version is synthesized once and shared
    std::vector<ProcCacheEntry> cache;
    if (cfg.j == 1.0) {
        auto ops = spinsys::angular_momentum(1.0);
        Mat cvs = basisenc::controlled(
            basisenc::embed_triplet(expi_hermitian(ops.jy, 2 * pi)).full);
        std::string note;
        Circuit c = synth_unitary(cvs, cfg, &note, nullptr);
        cache.push_back({cvs, std::move(c)});
    }

    Circuit probe_init = synth::transpile([] {
        Circuit h1(1);
        h1.add(Gate::h(0));
        return h1;
    }(), cfg.gateset);

    SweepResult result;
    result.records.resize(grid.size());
    bool partial = false;

#pragma omp parallel for schedule(dynamic) reduction(|| : partial)
    for (size_t idx = 0; idx < grid.size(); ++idx) {
        double t = grid[idx];
        ExperimentRecord rec;
        rec.temperature = t;
        uint64_t base_seed = cfg.seed + 0x9e3779b97f4a7c15ULL * (idx + 1);
        rec.seed = base_seed;
        try {
            spinsys::SpinParams params{cfg.j, 1.0, 0.0};
            auto state = spinsys::thermal_state(
                params, spinsys::hamiltonian(params, 0.0), 1.0 / t);
            auto proc = spinsys::uhlmann_process(state);
            auto analytic = spinsys::uhlmann_phase(state, proc);
            rec.theta_analytic = analytic.theta;
            rec.abs_g = std::abs(spinsys::loschmidt_amplitude(state, proc));

            BlockCircuits blocks = make_blocks(t, cfg, &rec.note, &cache);
            rec.gates_prep = blocks.prep.size();
            rec.gates_uhlmann = blocks.uhlmann.size();
            rec.gates_meas = blocks.trace.size();

            Circuit full(n);
            append_shifted(full, probe_init, 0);
            append_shifted(full, blocks.prep, 1);
            append_shifted(full, blocks.uhlmann, 0);
            if (cfg.dd) full = insert_dd(full, cfg.gateset);
            std::vector<circuit::Measurement> meas_x{{0, 0, 'X'}};
            std::vector<circuit::Measurement> meas_y{{0, 0, 'Y'}};

            if (model_ptr) {
                auto st = circuit::simulate_density(full, model_ptr);
                if (cfg.exact_expectations) {
                    std::tie(rec.sx, rec.sy) = circuit::exact_xy(st, 0);
                } else {
                    auto counts_x = circuit::sample_counts(st, meas_x, cfg.shots,
                                                           base_seed, model_ptr);
                    auto counts_y = circuit::sample_counts(st, meas_y, cfg.shots,
                                                           base_seed + 1, model_ptr);
                    auto pe = basisenc::phase_from_counts(counts_x, counts_y);
                    rec.sx = pe.sx;
                    rec.sy = pe.sy;
                    rec.critical = pe.critical;
                    rec.theta_circuit = pe.theta;
                }
            } else {
                auto st = circuit::simulate_statevector(full);
                if (cfg.exact_expectations) {
                    std::tie(rec.sx, rec.sy) = circuit::exact_xy(st, 0);
                } else {
                    auto counts_x =
                        circuit::sample_counts(st, meas_x, cfg.shots, base_seed);
                    auto counts_y =
                        circuit::sample_counts(st, meas_y, cfg.shots, base_seed + 1);
                    auto pe = basisenc::phase_from_counts(counts_x, counts_y);
                    rec.sx = pe.sx;
                    rec.sy = pe.sy;
                    rec.critical = pe.critical;
                    rec.theta_circuit = pe.theta;
                }
            }
            if (cfg.exact_expectations) {
                double mag = std::hypot(rec.sx, rec.sy);
                if (mag < 1e-8) {
                    rec.critical = true;
                } else {
                    rec.theta_circuit = std::atan2(rec.sy, rec.sx);
                    if (rec.theta_circuit <= -pi) rec.theta_circuit = pi;
                }
            }
            rec.delta_s = prep_delta_s(blocks.prep, purified_target(state), model_ptr);
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.note += e.what();
            partial = true;
        }
        result.records[idx] = rec;
    }
    result.partial_failure = partial;
    return result;
}

std::vector<PrepDistancePoint> state_prep_distance_sweep(const SweepConfig& cfg) {
    std::vector<double> grid = temperature_grid(cfg.grid_points);
    std::optional<noise::NoiseModel> model;
    if (cfg.calibration)
        model = noise::build_noise_model(*cfg.calibration, cfg.gateset);
    const noise::NoiseModel* model_ptr = model ? &*model : nullptr;

    std::vector<PrepDistancePoint> points(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (size_t idx = 0; idx < grid.size(); ++idx) {
        double t = grid[idx];
        spinsys::SpinParams params{cfg.j, 1.0, 0.0};
        auto state = spinsys::thermal_state(params, spinsys::hamiltonian(params, 0.0),
                                            1.0 / t);
        Eigen::VectorXd target = purified_target(state);
        auto ds = [&](basisenc::PrepMethod pm) {
            Circuit isa = synth::transpile(basisenc::build_state_prep({target, pm}),
                                           cfg.gateset);
            return prep_delta_s(isa, target, model_ptr);
        };
        points[idx] = {t, ds(basisenc::PrepMethod::Arbitrary),
                       ds(basisenc::PrepMethod::Shannon)};
    }
    return points;
}

std::string report(const std::vector<ExperimentRecord>& records,
                   const std::string& format) {
    if (records.empty()) throw std::invalid_argument("report: no records");
    const char* cols[] = {"T",          "sx",            "sy",
                          "theta_circuit", "theta_analytic", "abs_G",
                          "gates_prep", "gates_uhlmann", "gates_meas",
                          "delta_s"};
    auto values = [](const ExperimentRecord& r) {
        return std::vector<double>{r.temperature,
                                   r.sx,
                                   r.sy,
                                   r.theta_circuit,
                                   r.theta_analytic,
                                   r.abs_g,
                                   static_cast<double>(r.gates_prep),
                                   static_cast<double>(r.gates_uhlmann),
                                   static_cast<double>(r.gates_meas),
                                   r.delta_s};
    };
    std::ostringstream os;
    os.precision(12);
    if (format == "csv") {
        for (int i = 0; i < 10; ++i) os << cols[i] << (i == 9 ? "\n" : ",");
        for (const auto& r : records) {
            auto v = values(r);
            for (int i = 0; i < 10; ++i) os << v[i] << (i == 9 ? "\n" : ",");
        }
        return os.str();
    }
    if (format == "table") {
        std::vector<double> totals(10, 0.0);
        for (int i = 0; i < 10; ++i) os << cols[i] << (i == 9 ? "\n" : "\t");
        for (const auto& r : records) {
            auto v = values(r);
            for (int i = 0; i < 10; ++i) {
                totals[i] += v[i];
                os << v[i] << (i == 9 ? "\n" : "\t");
            }
        }
        os << "totals";
        for (int i = 1; i < 10; ++i) os << "\t" << totals[i];
        os << "\n";
        return os.str();
    }
    throw std::invalid_argument("report: format must be csv or table");
}

}  // namespace uhl::experiment
