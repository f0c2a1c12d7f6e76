#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "collective.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "dynamics.hpp"
#include "gate.hpp"
#include "scan.hpp"

// Bodies of the CLI subcommands. Each writes plot-ready CSV files into
// cfg.output_dir and returns their paths plus a short human summary.

namespace fret3 {

struct CommandOutput {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> summary;
};

namespace detail {

inline RydbergSystem make_system(const RunConfig& cfg) {
    return RydbergSystem(load_species(cfg.species_path, cfg.temperature_k), cfg.stark_window);
}

inline CsvTable table(const std::string& command, const RunConfig& cfg, const RydbergSystem& sys,
                      std::vector<std::string> columns) {
    CsvTable t(std::move(columns));
    t.meta("command", command);
    t.meta("species", sys.data().species + " version " + sys.data().version);
    t.meta("species_checksum_fnv1a64", sys.data().checksum);
    t.meta("config", cfg.to_json().dump());
    return t;
}

inline std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
    return std::filesystem::path(cfg.output_dir) / name;
}

inline std::function<bool(const RydbergState&)> level_filter(const std::string& level) {
    const auto s = parse_state(level + "(1/2)");
    return level_predicate(s.n, s.l, s.j);
}

}  // namespace detail

inline CommandOutput cmd_stark_map(const RunConfig& cfg) {
    if (cfg.fields_vcm.empty()) throw ValidationError("stark-map: fields_vcm grid is required");
    const auto sys = detail::make_system(cfg);
    const auto states = cfg.stark_map_states();
    if (states.size() < 2) throw ValidationError("stark-map: state list is empty");
    const auto& reference = states.front();
    const auto map = stark_map(sys, states, cfg.fields_vcm, reference);

    std::vector<std::string> cols{"field_vcm"};
    for (std::size_t i = 0; i < states.size(); ++i) cols.push_back("E" + std::to_string(i) + "_mhz");
    auto t = detail::table("stark-map", cfg, sys, cols);
    t.describe("field_vcm", "dc field along the trap axis, V/cm");
    for (std::size_t i = 0; i < states.size(); ++i) {
        t.describe(cols[i + 1], states[i].label() + ", MHz relative to " + reference.label() + " at zero field");
    }
    CommandOutput out;
    const auto& final_state = states.back();
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        const auto roots = find_resonances(sys, states[i], final_state, cfg.fields_vcm.front(),
                                           cfg.fields_vcm.back(), 1e-3);
        std::string list;
        for (double r : roots) list += (list.empty() ? "" : " ") + format_number(r);
        t.meta("crossing " + std::to_string(i + 1), states[i].label() + " -> " + final_state.label() + " at " +
                                                      (list.empty() ? "none" : list) + " V/cm");
        out.summary.push_back("crossing " + std::to_string(i + 1) + ": " + (list.empty() ? "none" : list));
    }
    for (std::size_t f = 0; f < cfg.fields_vcm.size(); ++f) {
        std::vector<double> row{cfg.fields_vcm[f]};
        for (const auto& curve : map.energies_mhz) row.push_back(curve[f]);
        t.row(row);
    }
    const auto path = detail::out_path(cfg, "stark_map.csv");
    t.write(path);
    out.files.push_back(path);
    return out;
}

inline CommandOutput cmd_resonance_scan(const RunConfig& cfg) {
    if (cfg.fields_vcm.empty()) throw ValidationError("resonance-scan: fields_vcm grid is required");
    const auto sys = detail::make_system(cfg);
    const auto initial = uniform_state(cfg.rydberg(), 3);
    const auto basis = build_basis(sys, initial, cfg.basis);
    const CouplingMatrix couplings(sys, basis, cfg.geometry());
    const auto rho = resonance_scan(sys, basis, couplings, cfg.fields_vcm, cfg.time_us,
                                    detail::level_filter(cfg.transfer_level), cfg.tolerance, cfg.jobs);
    const auto features = find_features(cfg.fields_vcm, rho, cfg.peak_prominence);

    auto t = detail::table("resonance-scan", cfg, sys, {"field_vcm", "rho"});
    t.meta("basis", basis.provenance());
    t.describe("field_vcm", "dc field, V/cm");
    t.describe("rho", "fraction of atoms in " + cfg.transfer_level + " after T = " + format_number(cfg.time_us) + " us");
    CommandOutput out;
    for (std::size_t k = 0; k < features.size(); ++k) {
        const auto& f = features[k];
        t.meta("feature " + std::to_string(k + 1), "field " + format_number(f.position) + " V/cm, rho " +
                                                     format_number(f.height) + ", prominence " + format_number(f.prominence));
        out.summary.push_back("feature at " + format_number(f.position) + " V/cm, rho = " + format_number(f.height));
    }
    for (std::size_t i = 0; i < rho.size(); ++i) t.row({cfg.fields_vcm[i], rho[i]});
    const auto path = detail::out_path(cfg, "resonance_scan.csv");
    t.write(path);
    out.files.push_back(path);
    return out;
}

/// Population/phase trajectories of the rrr, rgr, grr and rrg configurations.
inline CommandOutput cmd_dynamics(const RunConfig& cfg) {
    const auto sys = detail::make_system(cfg);
    const auto r = cfg.rydberg();
    struct Case {
        const char* name;
        std::vector<std::size_t> traps;
    };
    const std::vector<Case> cases{{"rrr", {0, 1, 2}}, {"rgr", {0, 2}}, {"grr", {1, 2}}, {"rrg", {0, 1}}};
    CommandOutput out;
    std::vector<std::unique_ptr<BasisSet>> bases(4);
    for (const auto& c : cases) {
        auto& b = bases[c.traps.size()];
        if (!b) b = std::make_unique<BasisSet>(build_basis(sys, uniform_state(r, c.traps.size()), cfg.basis));
        const Geometry g = cfg.geometry().subset(c.traps);
        const auto h = assemble(sys, *b, cfg.gate.field_vcm, g);
        const auto traj = evolve(h, basis_vector(static_cast<Eigen::Index>(b->size())), cfg.gate.t_us,
                                 cfg.tolerance, cfg.samples);
        const auto pp = initial_state_population_phase(traj);
        const auto rho = transfer_fraction(traj, *b, detail::level_filter(cfg.transfer_level));

        auto t = detail::table("dynamics", cfg, sys, {"t_us", "P0", "phi0_rad", "phase_defined", "rho"});
        t.meta("configuration", std::string(c.name) + " (" + std::to_string(c.traps.size()) + " Rydberg atoms)");
        t.meta("basis", b->provenance());
        t.describe("t_us", "time, us");
        t.describe("P0", "population of the initial collective state");
        t.describe("phi0_rad", "its phase in the frame of its Stark-shifted bare energy, (-pi, pi]");
        t.describe("phase_defined", "0 where P0 < 1e-12 and the phase is undefined");
        t.describe("rho", "fraction of atoms in " + cfg.transfer_level);
        for (std::size_t k = 0; k < pp.times_us.size(); ++k) {
            t.row({pp.times_us[k], pp.population[k], pp.phase_rad[k], pp.phase_undefined[k] ? 0.0 : 1.0, rho[k]});
        }
        const auto path = detail::out_path(cfg, std::string("dynamics_") + c.name + ".csv");
        t.write(path);
        out.files.push_back(path);
        out.summary.push_back(std::string(c.name) + ": P0(T) = " + format_number(pp.population.back()) +
                              ", phi0(T) = " + format_number(pp.phase_rad.back()));
    }
    return out;
}

inline void write_gate_result(const GateResult& r, const RunConfig& cfg, const RydbergSystem& sys,
                              const std::string& command, const std::filesystem::path& path) {
    auto t = detail::table(command, cfg, sys, {"input", "fidelity", "leakage"});
    t.meta("R_um", format_number(r.params.r_um));
    t.meta("T_us", format_number(r.params.t_us));
    t.meta("E_vcm", format_number(r.params.field_vcm));
    if (r.params.excitation) {
        t.meta("E0_vcm", format_number(r.params.excitation->field_vcm));
        t.meta("tau_us", format_number(r.params.excitation->tau_us));
    }
    t.meta("target_qubit", std::to_string(r.params.target));
    t.meta("mean_fidelity", format_number(r.mean));
    t.meta("min_fidelity", format_number(r.min));
    t.meta("three_atom_basis_size", std::to_string(r.basis_size));
    for (std::size_t k = 0; k < 8; ++k) {
        const auto& d = r.rydberg_diagonal[k];
        t.meta("amplitude " + std::to_string(k), "P " + format_number(std::norm(d)) + " phase " + format_number(std::arg(d)));
    }
    t.describe("input", "product input state, qubit 0 first");
    t.describe("fidelity", "sqrt(<psi_et|rho_sim|psi_et>)");
    t.describe("leakage", "1 - trace of the output on the computational subspace");
    for (std::size_t i = 0; i < r.fidelities.size(); ++i) {
        t.row({r.inputs[i], format_number(r.fidelities[i]), format_number(r.leakage[i])});
    }
    t.write(path);
}

inline CommandOutput cmd_fidelity(const RunConfig& cfg) {
    if (cfg.fields_vcm.empty()) throw ValidationError("fidelity: fields_vcm grid is required");
    const auto sys = detail::make_system(cfg);
    GateSimulator sim(sys, cfg.rydberg(), cfg.basis, cfg.tolerance);
    sim.set_jobs(cfg.jobs);
    auto t = detail::table("fidelity", cfg, sys, {"field_vcm", "mean_fidelity", "min_fidelity", "mean_leakage"});
    t.describe("mean_fidelity", "average over the 216 product inputs");
    CommandOutput out;
    for (double e : cfg.fields_vcm) {
        GateParameters p = cfg.gate;
        p.field_vcm = e;
        const auto r = sim.average_fidelity(p);
        double leak = 0.0;
        for (double l : r.leakage) leak += l;
        t.row({e, r.mean, r.min, leak / static_cast<double>(r.leakage.size())});
    }
    const auto path = detail::out_path(cfg, "fidelity.csv");
    t.write(path);
    out.files.push_back(path);

    const auto r = sim.average_fidelity(cfg.gate);
    const auto gpath = detail::out_path(cfg, "gate_result.csv");
    write_gate_result(r, cfg, sys, "fidelity", gpath);
    out.files.push_back(gpath);
    out.summary.push_back("mean fidelity at E = " + format_number(cfg.gate.field_vcm) + " V/cm: " + format_number(r.mean));
    return out;
}

inline CommandOutput cmd_optimize(const RunConfig& cfg) {
    const auto sys = detail::make_system(cfg);
    GateSimulator sim(sys, cfg.rydberg(), cfg.basis, cfg.tolerance);
    sim.set_jobs(cfg.jobs);
    OptimizeOptions opt = cfg.optimize;
    opt.seed = cfg.seed;
    const auto res = optimize(sim, cfg.gate, opt);

    auto t = detail::table("optimize", cfg, sys, {"key", "value"});
    t.row({std::string("R_um"), format_number(res.params.r_um)});
    t.row({std::string("T_us"), format_number(res.params.t_us)});
    t.row({std::string("E_vcm"), format_number(res.params.field_vcm)});
    if (res.params.excitation) {
        t.row({std::string("E0_vcm"), format_number(res.params.excitation->field_vcm)});
        t.row({std::string("tau_us"), format_number(res.params.excitation->tau_us)});
    }
    t.row({std::string("mean_fidelity"), format_number(res.result.mean)});
    t.row({std::string("min_fidelity"), format_number(res.result.min)});
    t.row({std::string("evaluations"), std::to_string(res.evaluations)});
    t.row({std::string("simplex_diameter"), format_number(res.diameter)});
    t.row({std::string("converged"), res.converged ? "1" : "0"});
    const auto path = detail::out_path(cfg, "optimize.csv");
    t.write(path);
    const auto gpath = detail::out_path(cfg, "optimize_gate_result.csv");
    write_gate_result(res.result, cfg, sys, "optimize", gpath);
    CommandOutput out;
    out.files = {path, gpath};
    out.summary.push_back("T = " + format_number(res.params.t_us) + " us, E = " + format_number(res.params.field_vcm) +
                          " V/cm, mean fidelity " + format_number(res.result.mean) + " after " +
                          std::to_string(res.evaluations) + " evaluations" + (res.converged ? "" : " (budget exhausted)"));
    return out;
}

/// Every single-atom dipole element coupling states of the three-atom basis.
inline CommandOutput cmd_dump_matrix_elements(const RunConfig& cfg) {
    const auto sys = detail::make_system(cfg);
    const auto basis = build_basis(sys, uniform_state(cfg.rydberg(), 3), cfg.basis);
    const CouplingMatrix couplings(sys, basis, cfg.geometry());
    const auto pairs = coupled_level_pairs(basis, couplings);
    auto t = detail::table("dump-matrix-elements", cfg, sys,
                           {"n1", "l1", "j1", "n2", "l2", "j2", "radial_qc", "radial_numerov", "rel_diff"});
    t.meta("basis", basis.provenance());
    t.meta("pairs", "level pairs joined by a nonzero coupling of the three-atom basis");
    t.describe("radial_qc", "quasiclassical radial integral, a0 (used in the Hamiltonian)");
    t.describe("radial_numerov", "Numerov radial integral in the Coulomb potential, a0");
    t.describe("rel_diff", "|radial_qc - radial_numerov| / |radial_numerov|");
    std::vector<std::pair<RydbergState, RydbergState>> list(pairs.begin(), pairs.end());
    std::vector<double> num(list.size());
    parallel_for(list.size(), cfg.jobs, [&](std::size_t i) {
        num[i] = radial_numerov(list[i].first, list[i].second, sys.defects());
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& [a, b] = list[i];
        const double qc = sys.radial().get(a, b);
        const double rel = std::abs(qc - num[i]) / std::abs(num[i]);
        worst = std::max(worst, rel);
        t.row({std::to_string(a.n), std::to_string(a.l), a.j.str(), std::to_string(b.n), std::to_string(b.l), b.j.str(),
               format_number(qc), format_number(num[i]), format_number(rel)});
    }
    const auto path = detail::out_path(cfg, "matrix_elements.csv");
    t.write(path);
    CommandOutput out;
    out.files.push_back(path);
    out.summary.push_back(std::to_string(list.size()) + " coupled level pairs, largest relative difference " +
                          format_number(worst));
    return out;
}

}  // namespace fret3
