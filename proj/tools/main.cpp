// mfgsolve: command line front end for the emission-band equilibrium solver.
//
// Subcommands: equilibrium, sweep-price, converge, validate-mc. Exit code 0
// means success, 1 a usage or configuration error, 2 a runtime failure
// (non-convergence, numerical breakdown). Set MFG_LOG=info|debug for
// progress output on stderr.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "mfg/config.hpp"
#include "mfg/coupling.hpp"
#include "mfg/errors.hpp"
#include "mfg/io.hpp"
#include "mfg/log.hpp"
#include "mfg/validation.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
};

mfg::RunConfig load(const CommonArgs& args) {
    if (args.config_path.empty()) return mfg::RunConfig{};
    return mfg::load_config(args.config_path);
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Run configuration file (INI); omit for the baseline run")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "Output directory")->required();
}

struct RunArtifacts {
    mfg::EquilibriumSolution solution;
    mfg::SpaceGrid grid;
    mfg::TimeGrid times;
    double payoff = 0.0;
    double low_mass = 0.0;
    double wall_seconds = 0.0;
};

RunArtifacts run_equilibrium(const mfg::RunConfig& cfg) {
    RunArtifacts art;
    const auto start = std::chrono::steady_clock::now();
    art.solution = mfg::solve_equilibrium(cfg.solver, cfg.model, cfg.schedule, cfg.initial);
    art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    art.grid = mfg::make_space_grid(cfg.solver.n_space, cfg.model.e_min, cfg.model.e_max);
    art.times = mfg::make_time_grid(cfg.solver.n_time, cfg.model.horizon);
    if (art.solution.m.num_levels() > 0) {
        art.payoff = mfg::discounted_payoff(art.solution.m, art.solution.tau.nodes, cfg.schedule,
                                            art.grid, art.times, cfg.model);
        // Mass below the midpoint of the emission band: the "low emitters" share.
        art.low_mass = mfg::mass_below(art.solution.m.level(0),
                                       0.5 * (cfg.model.e_min + cfg.model.e_max), art.grid);
    }
    return art;
}

void write_run_outputs(const fs::path& dir, const mfg::RunConfig& cfg, const RunArtifacts& art) {
    fs::create_directories(dir);
    mfg::write_field_csv(dir / "m.csv", art.solution.m, art.times, art.grid, "m");
    mfg::write_field_csv(dir / "v.csv", art.solution.v, art.times, art.grid, "v");
    mfg::write_field_csv(dir / "tau.csv", art.solution.tau.nodes, art.times, art.grid, "tau");
    mfg::write_trace_csv(dir / "trace.csv", art.solution.errors);
    mfg::write_summary(dir / "summary.txt", art.solution, art.payoff, art.wall_seconds);
    (void)cfg;
}

int cmd_equilibrium(const CommonArgs& args) {
    const mfg::RunConfig cfg = load(args);
    const RunArtifacts art = run_equilibrium(cfg);
    write_run_outputs(args.out_dir, cfg, art);
    if (!art.solution.converged()) {
        std::fprintf(stderr, "equilibrium: %s\n", art.solution.failure_detail.c_str());
        return exit_runtime;
    }
    std::printf("converged in %zu iterations, final update %s\n", art.solution.iterations,
                mfg::format_double(art.solution.errors.back()).c_str());
    return exit_ok;
}

int cmd_sweep(const CommonArgs& args, const std::vector<double>& values, unsigned jobs) {
    if (values.size() < 2)
        throw std::invalid_argument("sweep-price: need at least two --values");
    const mfg::RunConfig base = load(args);
    const fs::path out(args.out_dir);
    fs::create_directories(out);

    struct SweepRun {
        double value = 0.0;
        mfg::RunConfig cfg;
        RunArtifacts art;
    };
    std::vector<SweepRun> runs(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        runs[i].value = values[i];
        runs[i].cfg = base;
        if (auto* c = std::get_if<mfg::ConstantPrice>(&runs[i].cfg.schedule)) c->value = values[i];
        else std::get<mfg::RampPrice>(runs[i].cfg.schedule).s_max = values[i];
    }

    const unsigned workers = std::max(1u, jobs);
    std::vector<std::future<void>> futures;
    for (unsigned t = 0; t < workers; ++t)
        futures.push_back(std::async(std::launch::async, [&, t] {
            for (std::size_t i = t; i < runs.size(); i += workers)
                runs[i].art = run_equilibrium(runs[i].cfg);
        }));
    for (auto& f : futures) f.get();

    bool all_ok = true;
    std::vector<std::vector<double>> sweep_rows; // final density per value, long format
    std::vector<std::vector<double>> low_rows;
    for (const auto& run : runs) {
        const fs::path sub = out / ("value_" + mfg::format_double(run.value));
        write_run_outputs(sub, run.cfg, run.art);
        const bool ok = run.art.solution.converged();
        all_ok = all_ok && ok;
        if (run.art.solution.m.num_levels() > 0) {
            const auto final_density = run.art.solution.m.level(0);
            for (std::size_t i = 0; i < run.art.grid.num_nodes(); ++i)
                sweep_rows.push_back({run.value, run.art.grid.nodes[i], final_density[i]});
        }
        low_rows.push_back({run.value, run.art.low_mass});
        if (!ok)
            std::fprintf(stderr, "sweep-price: value %s: %s\n",
                         mfg::format_double(run.value).c_str(),
                         run.art.solution.failure_detail.c_str());
    }
    mfg::write_csv(out / "sweep.csv", {"value", "E", "m"}, sweep_rows);
    mfg::write_csv(out / "lowmass.csv", {"value", "low_mass"}, low_rows);
    std::printf("swept %zu values, %s\n", runs.size(), all_ok ? "all converged" : "with failures");
    return all_ok ? exit_ok : exit_runtime;
}

int cmd_converge(const CommonArgs& args, int n_min, int n_max, int n_ref) {
    const mfg::RunConfig cfg = load(args);
    const mfg::ConvergenceReport report =
        mfg::convergence_study(n_min, n_max, n_ref, cfg.solver, cfg.model, cfg.schedule, cfg.initial);
    fs::create_directories(args.out_dir);
    mfg::write_convergence_csv(fs::path(args.out_dir) / "convergence.csv", report);
    std::printf("fitted_order = %s\n", mfg::format_double(report.fitted_order).c_str());
    return report.all_converged ? exit_ok : exit_runtime;
}

int cmd_validate_mc(const CommonArgs& args, std::optional<std::size_t> particles,
                    std::optional<std::uint64_t> seed, unsigned jobs) {
    const mfg::RunConfig cfg = load(args);
    const RunArtifacts art = run_equilibrium(cfg);
    const fs::path out(args.out_dir);
    write_run_outputs(out, cfg, art);
    if (!art.solution.converged()) {
        std::fprintf(stderr, "validate-mc: equilibrium failed: %s\n",
                     art.solution.failure_detail.c_str());
        return exit_runtime;
    }

    mfg::McOptions mc_options;
    mc_options.chunk_size = cfg.validation.chunk_size;
    mc_options.jobs = std::max(1u, jobs);
    const mfg::McResult mc = mfg::simulate_particles(
        art.solution.tau.nodes, cfg.initial, particles.value_or(cfg.validation.particles),
        cfg.validation.substeps, seed.value_or(cfg.validation.seed), art.grid, art.times,
        cfg.model, mc_options);

    const auto pde = art.solution.m.level(0);
    const double l1 = mfg::l1_distance(pde, mc.density, art.grid);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < art.grid.num_nodes(); ++i)
        rows.push_back({art.grid.nodes[i], pde[i], mc.density[i]});
    mfg::write_csv(out / "mc_vs_pde.csv", {"E", "m_pde", "m_mc"}, rows);
    std::printf("l1_distance = %s\n", mfg::format_double(l1).c_str());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled forward/backward solver for emission-regulated producers"};
    app.require_subcommand(1);

    CommonArgs eq_args;
    CLI::App* eq = app.add_subcommand("equilibrium", "Solve one coupled equilibrium");
    add_common(eq, eq_args);

    CommonArgs sweep_args;
    std::vector<double> sweep_values;
    unsigned sweep_jobs = 1;
    CLI::App* sweep = app.add_subcommand("sweep-price", "Re-solve across allowance price levels");
    add_common(sweep, sweep_args);
    sweep->add_option("--values", sweep_values, "Price levels (constant schedule) or ramp peaks")
        ->required()
        ->expected(1, -1);
    sweep->add_option("--jobs", sweep_jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    CommonArgs conv_args;
    int n_min = 4, n_max = 8, n_ref = 9;
    CLI::App* conv = app.add_subcommand("converge", "Self-convergence study on nested grids");
    add_common(conv, conv_args);
    conv->add_option("--n-min", n_min, "Coarsest dyadic exponent");
    conv->add_option("--n-max", n_max, "Finest dyadic exponent");
    conv->add_option("--n-ref", n_ref, "Reference dyadic exponent");

    CommonArgs mc_args;
    std::optional<std::size_t> mc_particles;
    std::optional<std::uint64_t> mc_seed;
    unsigned mc_jobs = 1;
    CLI::App* mc = app.add_subcommand("validate-mc", "Cross-check the density against particles");
    add_common(mc, mc_args);
    mc->add_option("--particles", mc_particles, "Particle count")->check(CLI::PositiveNumber);
    mc->add_option("--seed", mc_seed, "RNG seed");
    mc->add_option("--jobs", mc_jobs, "Concurrent simulation chunks")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (eq->parsed()) return cmd_equilibrium(eq_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_values, sweep_jobs);
        if (conv->parsed()) return cmd_converge(conv_args, n_min, n_max, n_ref);
        if (mc->parsed()) return cmd_validate_mc(mc_args, mc_particles, mc_seed, mc_jobs);
    } catch (const mfg::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_runtime;
    }
    return exit_usage;
}
