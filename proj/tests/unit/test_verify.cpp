#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "subq/config.hpp"
#include "subq/verify.hpp"
#include "subq/walker.hpp"

using namespace subq;

namespace {

constexpr double kPi = std::numbers::pi;

struct Canon {
    Params p = canonical_params(1.0, 1.0);
    Derived d = derive_constants(p);
};

Params free_params(double gamma, double zeta) {
    Params p = canonical_params(1.0, 1.0);
    p.canonical = false;
    p.gamma = gamma;
    p.zeta = zeta;
    return p;
}

RunConfig small_config() {
    RunConfig cfg;
    cfg.run.ensemble_size = 4000;
    cfg.ensemble.size = 20000;
    return cfg;
}

}  // namespace

TEST(Checks, ToleranceKinds) {
    EXPECT_TRUE(algebraic_check("a", 1.0 + 5e-11, 1.0, "").pass);
    EXPECT_FALSE(algebraic_check("a", 1.0 + 2e-10, 1.0, "").pass);
    EXPECT_TRUE(numeric_check("n", 1.0 + 5e-7, 1.0, "").pass);
    EXPECT_FALSE(numeric_check("n", 1.0 + 2e-6, 1.0, "").pass);
    EXPECT_TRUE(statistical_check("s", {1.29, 0.1, 100}, 1.0, "").pass);
    EXPECT_FALSE(statistical_check("s", {1.31, 0.1, 100}, 1.0, "").pass);
    const auto exact = statistical_check("s", {1.0, 0.0, 100}, 1.0, "");
    EXPECT_TRUE(exact.pass);
    EXPECT_EQ(exact.tolerance, kStatisticalFloor);
    const auto na = not_applicable("x", CheckKind::algebraic, "", "why");
    EXPECT_TRUE(na.pass);
    EXPECT_FALSE(na.applicable);
    EXPECT_EQ(to_string(CheckKind::deterministic_numeric), "deterministic-numeric");
}

TEST(Equipartition, CanonEnsemble) {
    const Canon c;
    EnsembleSpec spec;
    spec.size = 10000;
    spec.dt = 0.05;
    spec.t_end = 0.05;
    spec.burn_in = 5.0;
    spec.seed = 31;
    const auto rec = run_walker_ensemble(make_noise_model(c.p, c.d), spec);
    const auto r = check_equipartition(ensemble_msv(rec, 0), c.p, c.d);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.lhs, 0.5, 0.05);

    // lambda halved, E_zp kept: the bath is too cold for the claimed E_zp
    NoiseModel cold = make_noise_model(c.p, c.d);
    cold.lambda /= 2;
    const auto cold_rec = run_walker_ensemble(cold, spec);
    EXPECT_FALSE(check_equipartition(ensemble_msv(cold_rec, 0), c.p, c.d).pass);
}

TEST(Equipartition, FreeModeExplicitZeroPoint) {
    Params p = free_params(1.0, 1.0);
    p.zp_energy = 0.25;
    const Derived d = derive_constants(p);
    EXPECT_NEAR(d.lambda, 4.0 * 1.0 * 1.0 * 0.25, 1e-15);
    EnsembleSpec spec;
    spec.size = 10000;
    spec.dt = 0.05;
    spec.t_end = 0.05;
    spec.burn_in = 10.0;
    spec.seed = 8;
    const auto rec = run_walker_ensemble(make_noise_model(p, d), spec);
    EXPECT_TRUE(check_equipartition(ensemble_msv(rec, 0), p, d).pass);
}

TEST(Einstein, Examples) {
    Canon c;
    auto r = check_einstein(c.p, c.d);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.lhs, 4.0);
    c.d.lambda *= 1.001;
    EXPECT_FALSE(check_einstein(c.p, c.d).pass);

    Params two = canonical_params(1.0, 1.0);
    two.n_dof = 2;
    const Derived d2 = derive_constants(two);
    EXPECT_NEAR(d2.lambda, 2.0, 1e-15);
    EXPECT_TRUE(check_einstein(two, d2).pass);
}

TEST(Diffusion, CanonAndGating) {
    const Canon c;
    const auto rs = check_diffusion({0.51, 0.01, 10000}, c.p, c.d);
    ASSERT_EQ(rs.size(), 3u);
    EXPECT_TRUE(std::all_of(rs.begin(), rs.end(), [](const auto& r) { return r.pass && r.applicable; }));
    EXPECT_EQ(rs[1].lhs, 0.5);

    const Params f = free_params(1.0, 1.0);
    const auto fr = check_diffusion({1.0, 0.01, 10000}, f, derive_constants(f));
    EXPECT_TRUE(fr[0].pass);
    EXPECT_FALSE(fr[1].applicable);
    EXPECT_FALSE(fr[2].applicable);

    EXPECT_FALSE(check_diffusion({0.6, 0.01, 10000}, c.p, c.d)[0].pass);
}

TEST(WorkMatching, Examples) {
    const Canon c;
    auto r = check_work_matching(c.p, c.d, 7);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.lhs, 28 * kPi, 1e-12);

    const Params f = free_params(2.0, 3.0);
    r = check_work_matching(f, derive_constants(f), 1);
    EXPECT_FALSE(r.pass);
    EXPECT_NE(r.note.find("zeta/gamma = 1.5"), std::string::npos);

    Params three = canonical_params(1.0, 1.0);
    three.n_dof = 3;
    const Derived d3 = derive_constants(three);
    EXPECT_NEAR(d3.e_zp, 1.0 / 6.0, 1e-15);
    for (int n : {1, 100}) EXPECT_TRUE(check_work_matching(three, d3, n).pass);
}

TEST(TotalEnergy, Examples) {
    Canon c;
    EXPECT_TRUE(check_total_energy(c.p, c.d).pass);
    const Params big = canonical_params(1.0, 1.0, 4.0);
    const Derived db = derive_constants(big);
    EXPECT_NEAR(db.e_tot, 4.0, 1e-14);
    EXPECT_TRUE(check_total_energy(big, db).pass);
    c.d.e_zp *= 1.01;
    EXPECT_FALSE(check_total_energy(c.p, c.d).pass);
}

TEST(Coupling, CanonicalAndFree) {
    for (double w : {0.5, 1.0, 3.0}) {
        const Params p = canonical_params(1.0, w);
        const auto r = check_coupling(p);
        EXPECT_TRUE(r.pass);
        EXPECT_EQ(r.abs_error, 0.0);
    }
    EXPECT_FALSE(check_coupling(free_params(1.0, 1.0)).pass);
    EXPECT_FALSE(check_coupling(free_params(2.0, 1.0)).pass);
}

TEST(HeatGradient, Coupling) {
    const Canon c;
    EXPECT_TRUE(check_heat_gradient(c.p, c.d).pass);
    const Params f = free_params(1.0, 1.0);
    const auto r = check_heat_gradient(f, derive_constants(f));
    EXPECT_FALSE(r.pass);
    EXPECT_NEAR(r.lhs, 0.5, 1e-15);
}

TEST(EntropicCycle, SteadyAndDecaying) {
    const Canon c;
    EXPECT_TRUE(check_entropic_cycle(heat_cycle_ledger(steady_period(c.p, 1.0)), c.p, c.d).pass);

    const Params big = canonical_params(1.0, 1.0, 4.0);
    const auto r = check_entropic_cycle(heat_cycle_ledger(steady_period(big, 1.0)), big,
                                        derive_constants(big));
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.lhs, 4.0, 4e-6);

    const auto traj = integrate_bouncer(c.p, 1.0, OscState<double>{}, 2 * kPi, 2 * kPi / 1000);
    const auto early = heat_cycle_ledger(last_period(traj), SteadyGuard::skip);
    EXPECT_FALSE(check_entropic_cycle(early, c.p, c.d).pass);
}

TEST(RunAll, CanonPasses) {
    const Report report = run_all(small_config(), 2);
    for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.note;
    EXPECT_TRUE(report.overall_pass);
    for (const char* name : {"coupling", "work_identity", "power_balance", "entropic_cycle",
                             "equipartition", "diffusion_fit", "velocity_relaxation",
                             "ballistic_spread[sigma0=1]", "osmotic_link[sigma0=2]"})
        EXPECT_NE(report.find(name), nullptr) << name;
}

TEST(RunAll, FreeModeFailsOnlyCouplingFamily) {
    RunConfig cfg = small_config();
    cfg.params.spec.canonical = false;
    cfg.params.spec.gamma = 1.0;
    cfg.params.spec.zeta = 1.0;
    const Report report = run_all(cfg, 2);
    EXPECT_FALSE(report.overall_pass);
    const auto& family = coupling_family();
    for (const auto& c : report.checks) {
        const bool in_family = std::find(family.begin(), family.end(), c.name) != family.end();
        if (!in_family) EXPECT_TRUE(c.pass) << c.name << ": " << c.note;
    }
    EXPECT_FALSE(report.find("coupling")->pass);
}

TEST(RunAll, DeterministicAcrossThreads) {
    RunConfig cfg = small_config();
    cfg.run.ensemble_size = 1000;
    cfg.ensemble.size = 3000;
    auto strip = [](Report r) {
        for (auto& c : r.checks) c.wall_seconds = 0;
        return to_json(r).dump();
    };
    EXPECT_EQ(strip(run_all(cfg, 1)), strip(run_all(cfg, 5)));
}

TEST(RunAll, ReportEchoesConfig) {
    RunConfig cfg = small_config();
    cfg.run.seed = 1234567;
    const auto j = to_json(run_all(cfg, 1));
    EXPECT_EQ(config_from_json(nlohmann::json::parse(j["config"].dump())), cfg);
    EXPECT_TRUE(j.contains("seeds"));
    for (const auto& c : j["checks"])
        for (const char* key : {"name", "kind", "lhs", "rhs", "abs_error", "rel_error", "stderr",
                                "tolerance", "pass", "paper_anchor", "wall_seconds"})
            EXPECT_TRUE(c.contains(key)) << key;
}
