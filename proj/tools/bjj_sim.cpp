// bjj-sim: stationary states, two-mode and GPE dynamics of a bosonic
// Josephson junction in a 1D double well.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "bjj/cache.hpp"
#include "bjj/config.hpp"
#include "bjj/error.hpp"
#include "bjj/scenarios.hpp"
#include "bjj/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Runner = bjj::ScenarioResult (*)(const bjj::RunConfig&, bjj::ScenarioContext&);

struct Command {
    const char* name;
    const char* help;
    Runner run;
};

const Command commands[] = {
    {"stationary", "Ground and excited states, localized modes and junction integrals", bjj::run_stationary},
    {"evolve-2mode", "Two-mode trajectories from (z0, phi0)", bjj::run_evolve_two_mode},
    {"evolve-gpe", "GPE trajectories from a tilt-loaded state", bjj::run_evolve_gpe},
    {"rabi", "Non-interacting Rabi oscillations", bjj::run_rabi},
    {"pi-phase", "Oscillations about the pi-phase point", bjj::run_pi_phase},
    {"sweep-lambda", "Small-amplitude frequency against Lambda", bjj::sweep_lambda},
    {"sweep-z0", "Frequency and regime against the initial imbalance", bjj::sweep_z0},
    {"mqst", "Self-trapped runs", bjj::run_mqst},
};

struct Options {
    std::string config;
    std::string out_dir = "out";
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    bool no_cache = false;
    bool print_schema = false;
};

void add_common(CLI::App* sub, Options& o, bool compute) {
    sub->add_option("--config", o.config, "Run configuration (JSON)");
    if (!compute) return;
    sub->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--no-cache", o.no_cache, "Bypass the stationary-state cache");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_manifest(const fs::path& path, const json& manifest) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        f << manifest.dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

json solver_json(const bjj::SolverSettings& s) {
    return {{"imaginary_step", s.imaginary_step},
            {"energy_tolerance", s.energy_tolerance},
            {"residual_tolerance", s.residual_tolerance},
            {"max_iterations", s.max_iterations},
            {"kinetic", s.kinetic == bjj::KineticModel::spectral ? "spectral" : "finite_difference"}};
}

int run_command(const Command& cmd, const Options& o) {
    const auto t_total = std::chrono::steady_clock::now();
    const bjj::RunConfig cfg = bjj::load_config(o.config);

    std::unique_ptr<bjj::ModeCache> cache =
        o.no_cache ? std::make_unique<bjj::ModeCache>() : std::make_unique<bjj::ModeCache>(bjj::ModeCache::default_dir());
    bjj::ScenarioContext ctx(cfg.run.solver, cache.get(), o.threads);

    const bjj::ScenarioResult result = cmd.run(cfg, ctx);
    const fs::path dir(o.out_dir);
    const auto t_write = std::chrono::steady_clock::now();
    std::vector<std::string> files = bjj::write_outputs(result, dir);
    const double write_seconds = seconds_since(t_write);

    json manifest = {
        {"command", cmd.name},
        {"config_path", o.config},
        {"config_hash", bjj::content_hash(cfg.source)},
        {"preset", fs::path(o.config).stem().string()},
        {"label", cfg.run.label},
        {"solver", solver_json(cfg.run.solver)},
        {"threads", o.threads},
        {"timings_seconds",
         {{"stationary", ctx.stationary_seconds()},
          {"dynamics", ctx.dynamics_seconds()},
          {"write", write_seconds},
          {"total", seconds_since(t_total)}}},
        {"cache",
         {{"enabled", cache->enabled()},
          {"dir", cache->enabled() ? cache->dir().string() : ""},
          {"hits", cache->hits()},
          {"misses", cache->misses()},
          {"warnings", cache->warnings()}}},
        {"summary", result.summary},
        {"outputs", files},
        {"versions", bjj::build_info()},
    };
    write_manifest(dir / "manifest.json", manifest);
    files.push_back("manifest.json");
    for (const auto& f : files) std::cout << (dir / f).string() << '\n';
    return 0;
}

int run_validate(const Options& o) {
    if (o.print_schema) {
        std::cout << bjj::config_schema().dump(2) << '\n';
        return 0;
    }
    if (o.config.empty()) throw bjj::ConfigError("--config", "required");
    const bjj::RunConfig cfg = bjj::load_config(o.config);
    json out = bjj::describe(cfg);
    out["config_hash"] = bjj::content_hash(cfg.source);
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bosonic Josephson junction simulator (1D double well)", "bjj-sim"};
    app.require_subcommand(1);
    Options o;
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, o, true);
        sub->get_option("--config")->required();
        subs.emplace_back(sub, &c);
    }
    CLI::App* validate = app.add_subcommand("validate", "Check a configuration and print it in internal units");
    add_common(validate, o, false);
    validate->add_flag("--print-schema", o.print_schema, "Print every accepted configuration key");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (validate->parsed()) return run_validate(o);
        for (const auto& [sub, cmd] : subs)
            if (sub->parsed()) return run_command(*cmd, o);
        std::cerr << app.help();
        return 1;
    } catch (const bjj::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const bjj::SpecError& e) {
        std::cerr << "invalid run: " << e.what() << '\n';
        return 1;
    } catch (const bjj::UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return 1;
    } catch (const bjj::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
