#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fret3/commands.hpp"

namespace {

enum Exit { ok = 0, validation = 1, numerical = 2 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-atom Forster-resonance Toffoli gate simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    double tolerance = 0.0;
    long long seed = -1;
    app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tolerance", tolerance, "integrator tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "optimizer start jitter seed")->check(CLI::NonNegativeNumber);

    using Command = fret3::CommandOutput (*)(const fret3::RunConfig&);
    const std::pair<const char*, Command> commands[] = {
        {"stark-map", fret3::cmd_stark_map},
        {"resonance-scan", fret3::cmd_resonance_scan},
        {"dynamics", fret3::cmd_dynamics},
        {"fidelity", fret3::cmd_fidelity},
        {"optimize", fret3::cmd_optimize},
        {"dump-matrix-elements", fret3::cmd_dump_matrix_elements},
    };
    const char* help[] = {
        "collective Stark map and level crossings",
        "fraction transferred to the final level versus field",
        "population and phase of the rrr, rgr, grr, rrg configurations",
        "mean gate fidelity versus field",
        "Nelder-Mead search over interaction time and field",
        "dipole matrix elements of the three-atom basis",
    };
    for (std::size_t i = 0; i < std::size(commands); ++i) app.add_subcommand(commands[i].first, help[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : validation;
    }

    try {
        auto cfg = fret3::load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (jobs > 0) cfg.jobs = jobs;
        if (tolerance > 0.0) cfg.tolerance = tolerance;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        for (const auto& [name, fn] : commands) {
            if (!app.got_subcommand(name)) continue;
            const auto result = fn(cfg);
            for (const auto& line : result.summary) std::cout << line << '\n';
            for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
        }
    } catch (const fret3::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical;
    } catch (const fret3::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return validation;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return validation;
    }
    return ok;
}
