// Command-line front end: `subq <bouncer|walker|ensemble|sweep|verify> [options]`.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subq/commands.hpp"
#include "subq/errors.hpp"

namespace {

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bouncer-walker simulation and relation checks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", subq::cli::version());

    std::string config_path;
    std::vector<std::string> overrides;
    std::string seed_text;
    std::string out_dir;
    unsigned threads = 1;
    app.add_option("--config", config_path, "TOML configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", overrides, "override a config key, e.g. params.omega0=2")
        ->take_all()
        ->allow_extra_args(false);
    app.add_option("--seed", seed_text, "master seed (falls back to SUBQ_SEED, then the config)");
    app.add_option("--out", out_dir, "output directory (defaults to output.directory)");
    app.add_option("--threads", threads, "worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber);

    subq::cli::BouncerOptions bouncer_opts;
    double f0 = 0.0;
    auto* bouncer = app.add_subcommand("bouncer", "integrate the driven damped oscillator");
    auto* f0_opt = bouncer->add_option("--F0", f0, "drive amplitude for this run (may be 0)");
    bouncer->add_option("--x0", bouncer_opts.x0, "initial displacement");
    bouncer->add_option("--v0", bouncer_opts.v0, "initial velocity");

    auto* walker = app.add_subcommand("walker", "simulate the Langevin walker ensemble");
    auto* ensemble = app.add_subcommand("ensemble", "ballistic spreading of Gaussian ensembles");

    std::string omega_range = "0:2:201";
    auto* sweep = app.add_subcommand("sweep", "stationary amplitude and phase against drive frequency");
    sweep->add_option("--omega", omega_range, "lo:hi:points");

    auto* verify = app.add_subcommand("verify", "run every relation check and write report.json");

    CLI11_PARSE(app, argc, argv);

    try {
        subq::RunConfig base;
        if (const char* env = std::getenv("SUBQ_SEED"); env && *env)
            subq::apply_override(base, std::string("run.seed=") + env);
        subq::cli::Context ctx;
        ctx.config = subq::parse_config(config_path, overrides, base);
        if (!seed_text.empty()) subq::apply_override(ctx.config, "run.seed=" + seed_text);
        ctx.out_dir = out_dir.empty() ? ctx.config.output.directory : out_dir;
        ctx.threads = threads;
        ctx.command_line = join_args(argc, argv);

        if (*bouncer) {
            if (*f0_opt) bouncer_opts.drive_amplitude = f0;
            return subq::cli::cmd_bouncer(ctx, bouncer_opts);
        }
        if (*walker) return subq::cli::cmd_walker(ctx);
        if (*ensemble) return subq::cli::cmd_ensemble(ctx);
        if (*sweep) return subq::cli::cmd_sweep(ctx, subq::cli::parse_sweep_range(omega_range));
        if (*verify) return subq::cli::cmd_verify(ctx);
    } catch (const subq::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
    return 0;
}
