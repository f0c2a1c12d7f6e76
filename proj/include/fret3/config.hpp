#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomic_data.hpp"
#include "collective.hpp"
#include "errors.hpp"
#include "gate.hpp"
#include "quantum_numbers.hpp"

namespace fret3 {

using Json = nlohmann::ordered_json;

/// Everything a CLI command needs, resolved from a JSON file plus flag overrides.
struct RunConfig {
    std::string species_path;
    double temperature_k = 300.0;
    int stark_window = default_stark_window;
    std::vector<double> positions_um{0.0, 10.0, 20.0};

    std::string rydberg_state = "70P3/2(1/2)";
    std::vector<std::string> final_state{"70S1/2(1/2)", "71S1/2(1/2)", "70P1/2(1/2)"};
    std::string transfer_level = "71S1/2";
    std::vector<std::vector<std::string>> stark_states;  ///< empty: the four 70P3/2 sublevel configurations

    BasisRule basis;
    std::vector<double> fields_vcm;
    double time_us = 1.15;
    int samples = 200;

    GateParameters gate;
    OptimizeOptions optimize;
    double peak_prominence = 0.2;  ///< fraction of the largest rho

    double tolerance = 1e-10;
    int jobs = 1;
    std::uint64_t seed = 0;
    std::string output_dir = ".";

    std::string source;  ///< config file path ("" when built in code)
    std::string text;    ///< raw config text, for error locations

    /// Resolved configuration, embedded in every output header.
    Json to_json() const {
        Json j;
        j["species"] = species_path;
        j["temperature_k"] = temperature_k;
        j["stark_window"] = stark_window;
        j["geometry"] = {{"positions_um", positions_um}};
        j["rydberg_state"] = rydberg_state;
        j["final_state"] = final_state;
        j["transfer_level"] = transfer_level;
        j["stark_map"] = {{"initial_states", stark_states}};
        j["basis"] = {{"hops", basis.hops},
                      {"defect_cutoff_ghz", basis.defect_cutoff_ghz},
                      {"max_dn", basis.max_dn},
                      {"max_l", basis.max_l}};
        j["fields_vcm"] = fields_vcm;
        j["time"] = {{"t_us", time_us}, {"samples", samples}};
        Json g = {{"r_um", gate.r_um}, {"t_us", gate.t_us}, {"field_vcm", gate.field_vcm}, {"target", gate.target}};
        if (gate.excitation) g["excitation"] = {{"field_vcm", gate.excitation->field_vcm}, {"tau_us", gate.excitation->tau_us}};
        j["gate"] = g;
        j["optimize"] = {{"t_min_us", optimize.t_min_us},           {"t_max_us", optimize.t_max_us},
                         {"e_min_vcm", optimize.e_min_vcm},         {"e_max_vcm", optimize.e_max_vcm},
                         {"max_evaluations", optimize.max_evaluations}, {"jitter", optimize.jitter},
                         {"two_stage", optimize.two_stage},         {"include_excitation", optimize.include_excitation}};
        j["peak_prominence"] = peak_prominence;
        j["tolerance"] = tolerance;
        j["jobs"] = jobs;
        j["seed"] = seed;
        j["output_dir"] = output_dir;
        return j;
    }

    RydbergState rydberg() const { return parse_state(rydberg_state); }

    CollectiveState final_collective() const {
        CollectiveState cs;
        for (const auto& s : final_state) cs.atoms.push_back(parse_state(s));
        return cs;
    }

    /// Tracked states of the Stark map: initial configurations, then the final state.
    std::vector<CollectiveState> stark_map_states() const {
        std::vector<CollectiveState> out;
        if (stark_states.empty()) {
            const auto r = rydberg();
            for (int up = 0; up <= 3; ++up) {
                CollectiveState cs = uniform_state(r, 3);
                for (int k = 0; k < up; ++k) {
                    cs.atoms[static_cast<std::size_t>(2 - k)].mj = HalfInt::from_twice(3);
                }
                out.push_back(cs);
            }
        } else {
            for (const auto& list : stark_states) {
                CollectiveState cs;
                for (const auto& s : list) cs.atoms.push_back(parse_state(s));
                out.push_back(cs);
            }
        }
        out.push_back(final_collective());
        return out;
    }

    Geometry geometry() const { return Geometry{positions_um}; }
};

namespace detail {

/// Best-effort "file:line" of the key at the end of a JSON pointer path.
inline std::string locate(const RunConfig& cfg, const std::string& pointer) {
    std::string where = cfg.source.empty() ? "<config>" : cfg.source;
    if (cfg.text.empty()) return where + " " + pointer;
    std::size_t pos = 0;
    std::stringstream parts(pointer);
    std::string part;
    bool found = true;
    while (std::getline(parts, part, '/')) {
        if (part.empty() || std::isdigit(static_cast<unsigned char>(part[0]))) continue;
        const auto next = cfg.text.find("\"" + part + "\"", pos);
        if (next == std::string::npos) {
            found = false;
            break;
        }
        pos = next;
    }
    if (!found) return where + " " + pointer;
    const auto line = 1 + std::count(cfg.text.begin(), cfg.text.begin() + static_cast<long>(pos), '\n');
    return where + ":" + std::to_string(line) + " " + pointer;
}

[[noreturn]] inline void config_error(const RunConfig& cfg, const std::string& pointer, const std::string& what) {
    throw ValidationError(locate(cfg, pointer) + ": " + what);
}

inline void check_keys(const RunConfig& cfg, const Json& obj, const std::string& pointer,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object()) config_error(cfg, pointer, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) config_error(cfg, pointer + "/" + it.key(), "unknown key");
    }
}

template <class T>
T get(const RunConfig& cfg, const Json& obj, const std::string& pointer) {
    try {
        return obj.get<T>();
    } catch (const nlohmann::json::exception& e) {
        config_error(cfg, pointer, std::string("wrong type (") + e.what() + ")");
    }
}

inline std::vector<double> grid(const RunConfig& cfg, const Json& node, const std::string& pointer) {
    std::vector<double> out;
    if (node.is_array()) {
        out = get<std::vector<double>>(cfg, node, pointer);
    } else {
        check_keys(cfg, node, pointer, {"start", "stop", "count"});
        if (!node.contains("start") || !node.contains("stop") || !node.contains("count")) {
            config_error(cfg, pointer, "grid needs start, stop and count");
        }
        const double a = get<double>(cfg, node["start"], pointer + "/start");
        const double b = get<double>(cfg, node["stop"], pointer + "/stop");
        const int n = get<int>(cfg, node["count"], pointer + "/count");
        if (n < 1) config_error(cfg, pointer + "/count", "grid must have at least one point");
        if (n == 1) {
            out.push_back(a);
        } else {
            for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
        }
    }
    if (out.empty()) config_error(cfg, pointer, "grid is empty");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1])) config_error(cfg, pointer, "grid must be strictly increasing");
    }
    return out;
}

}  // namespace detail

/// Parses and validates a config. Relative species paths resolve against `base_dir`.
inline RunConfig parse_config(const std::string& text, const std::string& source = "",
                              const std::filesystem::path& base_dir = ".") {
    using detail::config_error;
    using detail::get;
    RunConfig cfg;
    cfg.source = source;
    cfg.text = text;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError((source.empty() ? "<config>" : source) + ": " + e.what());
    }
    detail::check_keys(cfg, j, "",
                       {"species", "temperature_k", "stark_window", "geometry", "rydberg_state", "final_state",
                        "transfer_level", "stark_map", "basis", "fields_vcm", "time", "gate", "optimize",
                        "peak_prominence", "tolerance", "jobs", "seed", "output_dir", "description"});

    if (!j.contains("species")) config_error(cfg, "/species", "missing species data path");
    {
        std::filesystem::path p = get<std::string>(cfg, j["species"], "/species");
        if (p.is_relative()) p = base_dir / p;
        if (!std::filesystem::exists(p)) config_error(cfg, "/species", "file not found: " + p.string());
        cfg.species_path = p.lexically_normal().string();
    }
    if (j.contains("temperature_k")) {
        cfg.temperature_k = get<double>(cfg, j["temperature_k"], "/temperature_k");
        if (!(cfg.temperature_k >= 0.0)) config_error(cfg, "/temperature_k", "must be >= 0");
    }
    if (j.contains("stark_window")) {
        cfg.stark_window = get<int>(cfg, j["stark_window"], "/stark_window");
        if (cfg.stark_window < 1) config_error(cfg, "/stark_window", "must be >= 1");
    }
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        detail::check_keys(cfg, g, "/geometry", {"spacing_um", "positions_um"});
        if (g.contains("spacing_um") == g.contains("positions_um")) {
            config_error(cfg, "/geometry", "give exactly one of spacing_um or positions_um");
        }
        if (g.contains("spacing_um")) {
            const double r = get<double>(cfg, g["spacing_um"], "/geometry/spacing_um");
            if (!(r > 0.0)) config_error(cfg, "/geometry/spacing_um", "must be positive");
            cfg.positions_um = Geometry::equidistant(r, 3).z_um;
        } else {
            cfg.positions_um = get<std::vector<double>>(cfg, g["positions_um"], "/geometry/positions_um");
            if (cfg.positions_um.size() != 3) config_error(cfg, "/geometry/positions_um", "need three trap positions");
            try {
                cfg.geometry().validate();
            } catch (const ValidationError& e) {
                config_error(cfg, "/geometry/positions_um", e.what());
            }
        }
        cfg.gate.r_um = cfg.positions_um[1] - cfg.positions_um[0];
    }
    auto state_list = [&](const Json& node, const std::string& pointer) {
        auto list = get<std::vector<std::string>>(cfg, node, pointer);
        if (list.empty()) config_error(cfg, pointer, "state list is empty");
        for (std::size_t i = 0; i < list.size(); ++i) {
            try {
                parse_state(list[i]);
            } catch (const ValidationError& e) {
                config_error(cfg, pointer + "/" + std::to_string(i), e.what());
            }
        }
        return list;
    };
    if (j.contains("rydberg_state")) {
        cfg.rydberg_state = get<std::string>(cfg, j["rydberg_state"], "/rydberg_state");
        try {
            parse_state(cfg.rydberg_state);
        } catch (const ValidationError& e) {
            config_error(cfg, "/rydberg_state", e.what());
        }
    }
    if (j.contains("final_state")) {
        cfg.final_state = state_list(j["final_state"], "/final_state");
        if (cfg.final_state.size() != 3) config_error(cfg, "/final_state", "need three atom states");
    }
    if (j.contains("transfer_level")) cfg.transfer_level = get<std::string>(cfg, j["transfer_level"], "/transfer_level");
    try {
        parse_state(cfg.transfer_level + "(1/2)");
    } catch (const ValidationError&) {
        config_error(cfg, "/transfer_level", "expected a level such as 71S1/2");
    }
    if (j.contains("stark_map")) {
        const auto& s = j["stark_map"];
        detail::check_keys(cfg, s, "/stark_map", {"initial_states"});
        if (s.contains("initial_states")) {
            const auto& arr = s["initial_states"];
            if (!arr.is_array() || arr.empty()) config_error(cfg, "/stark_map/initial_states", "state list is empty");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                cfg.stark_states.push_back(state_list(arr[i], "/stark_map/initial_states/" + std::to_string(i)));
            }
        }
    }
    if (j.contains("basis")) {
        const auto& b = j["basis"];
        detail::check_keys(cfg, b, "/basis", {"hops", "defect_cutoff_ghz", "max_dn", "max_l"});
        if (b.contains("hops")) cfg.basis.hops = get<int>(cfg, b["hops"], "/basis/hops");
        if (b.contains("defect_cutoff_ghz")) cfg.basis.defect_cutoff_ghz = get<double>(cfg, b["defect_cutoff_ghz"], "/basis/defect_cutoff_ghz");
        if (b.contains("max_dn")) cfg.basis.max_dn = get<int>(cfg, b["max_dn"], "/basis/max_dn");
        if (b.contains("max_l")) cfg.basis.max_l = get<int>(cfg, b["max_l"], "/basis/max_l");
        if (cfg.basis.hops < 0) config_error(cfg, "/basis/hops", "must be >= 0");
        if (!(cfg.basis.defect_cutoff_ghz > 0.0)) config_error(cfg, "/basis/defect_cutoff_ghz", "must be positive");
        if (cfg.basis.max_dn < 0) config_error(cfg, "/basis/max_dn", "must be >= 0");
        if (cfg.basis.max_l < 1) config_error(cfg, "/basis/max_l", "must be >= 1");
    }
    if (j.contains("fields_vcm")) {
        cfg.fields_vcm = detail::grid(cfg, j["fields_vcm"], "/fields_vcm");
        if (cfg.fields_vcm.front() < 0.0 || cfg.fields_vcm.back() > stark_field_guard_vcm) {
            config_error(cfg, "/fields_vcm", "fields must lie in [0, 0.5] V/cm");
        }
    }
    if (j.contains("time")) {
        const auto& t = j["time"];
        detail::check_keys(cfg, t, "/time", {"t_us", "samples"});
        if (t.contains("t_us")) cfg.time_us = get<double>(cfg, t["t_us"], "/time/t_us");
        if (t.contains("samples")) cfg.samples = get<int>(cfg, t["samples"], "/time/samples");
        if (!(cfg.time_us > 0.0)) config_error(cfg, "/time/t_us", "must be positive");
        if (cfg.samples < 1) config_error(cfg, "/time/samples", "must be >= 1");
    }
    if (j.contains("gate")) {
        const auto& g = j["gate"];
        detail::check_keys(cfg, g, "/gate", {"t_us", "field_vcm", "target", "excitation"});
        if (g.contains("t_us")) cfg.gate.t_us = get<double>(cfg, g["t_us"], "/gate/t_us");
        if (g.contains("field_vcm")) cfg.gate.field_vcm = get<double>(cfg, g["field_vcm"], "/gate/field_vcm");
        if (g.contains("target")) cfg.gate.target = get<int>(cfg, g["target"], "/gate/target");
        if (g.contains("excitation")) {
            const auto& e = g["excitation"];
            detail::check_keys(cfg, e, "/gate/excitation", {"field_vcm", "tau_us"});
            ExcitationStage st;
            if (e.contains("field_vcm")) st.field_vcm = get<double>(cfg, e["field_vcm"], "/gate/excitation/field_vcm");
            if (e.contains("tau_us")) st.tau_us = get<double>(cfg, e["tau_us"], "/gate/excitation/tau_us");
            cfg.gate.excitation = st;
        }
        try {
            cfg.gate.validate();
        } catch (const ValidationError& e) {
            config_error(cfg, "/gate", e.what());
        }
    }
    if (j.contains("optimize")) {
        const auto& o = j["optimize"];
        detail::check_keys(cfg, o, "/optimize",
                           {"t_min_us", "t_max_us", "e_min_vcm", "e_max_vcm", "max_evaluations", "jitter",
                            "two_stage", "include_excitation"});
        auto& op = cfg.optimize;
        if (o.contains("t_min_us")) op.t_min_us = get<double>(cfg, o["t_min_us"], "/optimize/t_min_us");
        if (o.contains("t_max_us")) op.t_max_us = get<double>(cfg, o["t_max_us"], "/optimize/t_max_us");
        if (o.contains("e_min_vcm")) op.e_min_vcm = get<double>(cfg, o["e_min_vcm"], "/optimize/e_min_vcm");
        if (o.contains("e_max_vcm")) op.e_max_vcm = get<double>(cfg, o["e_max_vcm"], "/optimize/e_max_vcm");
        if (o.contains("max_evaluations")) op.max_evaluations = get<int>(cfg, o["max_evaluations"], "/optimize/max_evaluations");
        if (o.contains("jitter")) op.jitter = get<double>(cfg, o["jitter"], "/optimize/jitter");
        if (o.contains("two_stage")) op.two_stage = get<bool>(cfg, o["two_stage"], "/optimize/two_stage");
        if (o.contains("include_excitation")) op.include_excitation = get<bool>(cfg, o["include_excitation"], "/optimize/include_excitation");
        if (!(op.t_min_us > 0.0 && op.t_max_us > op.t_min_us)) config_error(cfg, "/optimize", "need 0 < t_min_us < t_max_us");
        if (!(op.e_min_vcm >= 0.0 && op.e_max_vcm > op.e_min_vcm && op.e_max_vcm <= stark_field_guard_vcm)) {
            config_error(cfg, "/optimize", "need 0 <= e_min_vcm < e_max_vcm <= 0.5");
        }
        if (op.max_evaluations < 1) config_error(cfg, "/optimize/max_evaluations", "must be >= 1");
        if (op.jitter < 0.0) config_error(cfg, "/optimize/jitter", "must be >= 0");
    }
    if (j.contains("peak_prominence")) {
        cfg.peak_prominence = get<double>(cfg, j["peak_prominence"], "/peak_prominence");
        if (!(cfg.peak_prominence > 0.0 && cfg.peak_prominence < 1.0)) config_error(cfg, "/peak_prominence", "must be in (0, 1)");
    }
    if (j.contains("tolerance")) {
        cfg.tolerance = get<double>(cfg, j["tolerance"], "/tolerance");
        if (!(cfg.tolerance > 0.0)) config_error(cfg, "/tolerance", "must be positive");
    }
    if (j.contains("jobs")) {
        cfg.jobs = get<int>(cfg, j["jobs"], "/jobs");
        if (cfg.jobs < 1) config_error(cfg, "/jobs", "must be >= 1");
    }
    if (j.contains("seed")) cfg.seed = get<std::uint64_t>(cfg, j["seed"], "/seed");
    if (j.contains("output_dir")) cfg.output_dir = get<std::string>(cfg, j["output_dir"], "/output_dir");
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string(), path.parent_path());
}

}  // namespace fret3
