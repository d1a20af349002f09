#pragma once

// Subcommands of the `subq` tool. Each one writes its files into
// `out_dir` together with a manifest.json describing the run.

#include <filesystem>
#include <optional>
#include <string>

#include "subq/config.hpp"

namespace subq::cli {

struct Context {
    RunConfig config;
    std::filesystem::path out_dir;
    unsigned threads{1};
    std::string command_line;
};

struct BouncerOptions {
    std::optional<double> drive_amplitude;  ///< may be 0 (undriven)
    double x0{0};
    double v0{0};
};

struct SweepRange {
    double lo{0};
    double hi{2};
    int points{201};
};

/// Parses "lo:hi:points".
SweepRange parse_sweep_range(const std::string& text);

int cmd_bouncer(const Context& ctx, const BouncerOptions& opts);
int cmd_walker(const Context& ctx);
int cmd_ensemble(const Context& ctx);
int cmd_sweep(const Context& ctx, const SweepRange& range);
/// Returns 0 iff every check passes.
int cmd_verify(const Context& ctx);

std::string version();

}  // namespace subq::cli
