#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "subq/config.hpp"
#include "subq/errors.hpp"

using namespace subq;

TEST(ParseConfig, EmptyTextGivesDefaults) {
    const RunConfig cfg = parse_config_string("");
    EXPECT_EQ(cfg, RunConfig{});
    const Params p = resolve_params(cfg);
    EXPECT_EQ(p.gamma, 2.0);
    EXPECT_EQ(p.zeta, 2.0);
    EXPECT_EQ(p.drive_amplitude, 4.0);
    EXPECT_EQ(cfg.run.ensemble_size, 10000u);
    EXPECT_EQ(cfg.run.seed, 42u);
}

TEST(ParseConfig, EmptyFileGivesDefaults) {
    const auto path = std::filesystem::temp_directory_path() / "subq_empty_config.toml";
    std::ofstream(path).close();
    EXPECT_EQ(parse_config(path), RunConfig{});
    std::filesystem::remove(path);
}

TEST(ParseConfig, MissingFileRejected) {
    EXPECT_THROW(parse_config("/nonexistent/subq.toml"), Error);
}

TEST(ParseConfig, OverrideRecomputesCoupling) {
    const RunConfig cfg = parse_config_string("", {"params.omega0=2"});
    const Params p = resolve_params(cfg);
    EXPECT_EQ(p.gamma, 4.0);
    EXPECT_EQ(p.zeta, 4.0);
}

TEST(ParseConfig, OverridesApplyAfterFile) {
    const RunConfig cfg = parse_config_string("[run]\nseed = 5\n", {"run.seed=9"});
    EXPECT_EQ(cfg.run.seed, 9u);
}

TEST(ParseConfig, UnknownKeysRejected) {
    EXPECT_THROW(parse_config_string("", {"params.hbar=2"}), ParseError);
    try {
        parse_config_string("[params]\nm = 1.0\nhbar = 2.0\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("params.hbar"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    EXPECT_THROW(parse_config_string("[nonsense]\nx = 1\n"), ParseError);
}

TEST(ParseConfig, MalformedInputRejected) {
    EXPECT_THROW(parse_config_string("[params\n"), ParseError);
    EXPECT_THROW(parse_config_string("", {"params.m"}), ParseError);
    EXPECT_THROW(parse_config_string("", {"params.m=abc"}), ParseError);
    EXPECT_THROW(parse_config_string("", {"run.integrator=rk4"}), ParseError);
}

TEST(ParseConfig, ValidationForwarded) {
    EXPECT_THROW(parse_config_string("[params]\nm = 0.0\n"), NonPositiveParameter);
    EXPECT_THROW(parse_config_string("", {"params.gamma=1"}), CouplingMismatch);
}

TEST(ParseConfig, HbarTargetSetsDrive) {
    const RunConfig cfg = parse_config_string("[params]\nhbar_target = 4.0\n");
    const Params p = resolve_params(cfg);
    EXPECT_NEAR(p.drive_amplitude, 8.0, 1e-14);
    EXPECT_NEAR(derive_constants(p).e_tot, 4.0, 1e-14);
}

TEST(ParseConfig, FreeModeBlock) {
    const RunConfig cfg = parse_config_string(
        "[params]\ncanonical = false\ngamma = 0.1\nzeta = 0.1\nF0 = 1.0\ne_zp = 0.25\n"
        "[run]\nintegrator = \"euler_maruyama\"\ndt = 0.001\n"
        "[ensemble]\nsigma0 = [0.5, 3.0]\ntimes = [0.0, 4.0]\n"
        "[output]\ndirectory = \"runs/a\"\nprecision = 12\n");
    const Params p = resolve_params(cfg);
    EXPECT_EQ(p.gamma, 0.1);
    EXPECT_EQ(p.zp_energy, 0.25);
    EXPECT_EQ(cfg.run.integrator, Integrator::euler_maruyama);
    EXPECT_EQ(cfg.ensemble.sigma0, (std::vector<double>{0.5, 3.0}));
    EXPECT_EQ(cfg.output.directory, "runs/a");
    EXPECT_EQ(effective_dt(cfg, p), 0.001);
}

TEST(ParseConfig, DefaultStepIsTauOverThousand) {
    const RunConfig cfg = parse_config_string("", {"params.omega0=2"});
    EXPECT_DOUBLE_EQ(effective_dt(cfg, resolve_params(cfg)), std::numbers::pi / 1000.0);
}

TEST(ParseConfig, LargeSeeds) {
    const RunConfig cfg = parse_config_string("", {"run.seed=18446744073709551615"});
    EXPECT_EQ(cfg.run.seed, 18446744073709551615ull);
    EXPECT_EQ(parse_config_string(config_to_toml(cfg)), cfg);
    EXPECT_THROW(parse_config_string("", {"run.seed=-1"}), ParseError);
}

namespace {

RunConfig busy_config() {
    return parse_config_string(
        "[params]\nm = 2.5\nomega0 = 0.75\nn_dof = 3\nhbar_target = 1.5\n"
        "[run]\nseed = 7\nensemble_size = 123\nt_end = 40.0\ndrive_omega = 0.6\n"
        "fit_lo = 7.0\nfit_hi = 30.5\nu_init = 0.1\nwork_periods = 3\n"
        "[ensemble]\nsigma0 = [0.1]\nx0 = -2.0\nv_conv = 0.0\nsize = 10\ntimes = [0.0, 0.1]\n");
}

}  // namespace

TEST(ConfigRoundTrip, Toml) {
    for (const RunConfig& cfg : {RunConfig{}, busy_config()})
        EXPECT_EQ(parse_config_string(config_to_toml(cfg)), cfg);
}

TEST(ConfigRoundTrip, Json) {
    for (const RunConfig& cfg : {RunConfig{}, busy_config()}) {
        const auto j = nlohmann::json::parse(config_to_json(cfg).dump());
        EXPECT_EQ(config_from_json(j), cfg);
    }
}

TEST(ConfigRoundTrip, OddDoublesSurvive) {
    RunConfig cfg;
    cfg.ensemble.x0 = 0.1 + 0.2;
    cfg.ensemble.v_conv = 1e-300;
    cfg.params.spec.m = 1.0 / 3.0;
    EXPECT_EQ(parse_config_string(config_to_toml(cfg)), cfg);
}
