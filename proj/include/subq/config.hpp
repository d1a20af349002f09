#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subq/constants.hpp"
#include "subq/walker.hpp"
#include "json.hpp"

namespace subq {

/// Complete configuration of a run. Every field has a default; the defaults
/// describe the canonical natural-unit model (m = omega0 = hbar = 1).
struct RunConfig {
    struct ParamsBlock {
        ParamSpec<double> spec{};
        /// When set, F0 is chosen so that m r^2 omega0 equals this action.
        std::optional<double> hbar_target;
        bool operator==(const ParamsBlock&) const = default;
    };
    struct RunBlock {
        std::uint64_t seed{42};
        std::size_t ensemble_size{10000};
        std::optional<double> dt;      ///< default tau/1000
        std::optional<double> t_end;   ///< bouncer horizon; default reaches steady state
        std::optional<double> drive_omega;  ///< default omega0
        double burn_in{10};            ///< in units of 1/zeta
        std::optional<double> fit_lo;  ///< default 5/zeta
        std::optional<double> fit_hi;  ///< default 20/zeta
        double u_init{2};              ///< initial speed of the relaxation ensemble
        Integrator integrator{Integrator::ou_exact};
        int work_periods{100};
        bool operator==(const RunBlock&) const = default;
    };
    struct EnsembleBlock {
        std::vector<double> sigma0{0.5, 1.0, 2.0};
        double x0{0};
        double v_conv{1};
        std::size_t size{100000};
        std::vector<double> times{0, 1, 2, 5};
        bool operator==(const EnsembleBlock&) const = default;
    };
    struct OutputBlock {
        std::string directory{"out"};
        int precision{17};
        bool operator==(const OutputBlock&) const = default;
    };

    ParamsBlock params;
    RunBlock run;
    EnsembleBlock ensemble;
    OutputBlock output;

    bool operator==(const RunConfig&) const = default;
};

/// Validated model parameters of a configuration.
Params resolve_params(const RunConfig& cfg);

/// Checks every block; throws ParseError or the parameter validation errors.
void validate_config(const RunConfig& cfg);

/// Applies one `block.key=value` override.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Parses TOML text on top of `base`, then applies the overrides in order.
RunConfig parse_config_string(std::string_view toml_text,
                              const std::vector<std::string>& overrides = {},
                              const RunConfig& base = RunConfig{});
/// Same for a file; an empty path means no file.
RunConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {},
                       const RunConfig& base = RunConfig{});

nlohmann::ordered_json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);
std::string config_to_toml(const RunConfig& cfg);

/// Effective time step tau/1000 unless overridden.
double effective_dt(const RunConfig& cfg, const Params& p);

}  // namespace subq
