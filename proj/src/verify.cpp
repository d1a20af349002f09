#include "subq/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "subq/ensemble.hpp"
#include "subq/rng.hpp"
#include "subq/walker.hpp"

namespace subq {

namespace {

constexpr double kPowerBalanceTolerance = 1e-8;

struct Point {
    double t;
    EstimateWithError estimate;
    double expected;
};

/// One statistical verdict over several points: passes iff every point
/// does; reports the point with the largest |error| / tolerance.
CheckResult worst_of(std::string name, const std::vector<Point>& points, std::string anchor) {
    CheckResult worst;
    double worst_score = -1.0;
    bool all = true;
    for (const auto& pt : points) {
        CheckResult r = statistical_check(name, pt.estimate, pt.expected, anchor);
        all &= r.pass;
        const double score = r.abs_error / r.tolerance;
        if (score > worst_score) {
            worst_score = score;
            worst = r;
            worst.note = fmt::format("worst of {} points at t = {:.17g}", points.size(), pt.t);
        }
    }
    worst.pass = all;
    return worst;
}

/// Relative check against a fixed scale rather than the right-hand side.
CheckResult scaled_numeric(std::string name, double lhs, double rhs, double scale,
                           double tolerance, std::string anchor) {
    CheckResult r = numeric_check(std::move(name), lhs, rhs, std::move(anchor), tolerance);
    r.rel_error = r.abs_error / std::abs(scale);
    r.pass = r.rel_error <= tolerance;
    return r;
}

CheckResult failed(std::string name, CheckKind kind, std::string anchor, std::string why) {
    CheckResult r;
    r.name = std::move(name);
    r.kind = kind;
    r.pass = false;
    r.anchor = std::move(anchor);
    r.note = std::move(why);
    r.rel_error = std::numeric_limits<double>::infinity();
    r.abs_error = r.rel_error;
    return r;
}

std::string with_width(std::string_view base, double sigma0) {
    return fmt::format("{}[sigma0={:g}]", base, sigma0);
}

}  // namespace

const CheckResult* Report::find(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

const std::vector<std::string>& coupling_family() {
    static const std::vector<std::string> names = {"coupling", "total_energy", "work_matching",
                                                   "heat_gradient_coupling", "diffusion_hbar",
                                                   "diffusion_fit_hbar"};
    return names;
}

CheckResult check_equipartition(const EstimateWithError& msv, const Params& p, const Derived& d) {
    const EstimateWithError kinetic{0.5 * p.m * msv.value, 0.5 * p.m * msv.std_error,
                                    msv.n_samples};
    return statistical_check("equipartition", kinetic, d.e_zp,
                             "sub-quantum equipartition: (m/2)<u^2> = lambda/(4 zeta m) = E_zp");
}

CheckResult check_einstein(const Params& p, const Derived& d) {
    return algebraic_check("einstein_relation", d.lambda, 4.0 * p.zeta * p.m * d.e_zp,
                           "Einstein-type relation: lambda = 4 zeta m E_zp");
}

std::vector<CheckResult> check_diffusion(const EstimateWithError& fitted, const Params& p,
                                         const Derived& d) {
    std::vector<CheckResult> out;
    const double expected = d.lambda / (2.0 * p.zeta * p.zeta * p.m * p.m);
    out.push_back(statistical_check("diffusion_fit", fitted, expected,
                                    "diffusion constant: <x^2> ~ 2 D t, D = lambda/(2 zeta^2 m^2)"));
    const std::string anchor = "D = 2 E_zp/(zeta m) = hbar/(2m) under zeta = gamma = 2 omega0";
    const double quantum = d.hbar / (2.0 * p.m);
    if (p.canonical && p.n_dof == 1) {
        out.push_back(algebraic_check("diffusion_hbar", d.diffusion, quantum, anchor));
        out.push_back(statistical_check("diffusion_fit_hbar", fitted, quantum, anchor));
    } else {
        const std::string why = "requires canonical coupling in one dimension";
        out.push_back(not_applicable("diffusion_hbar", CheckKind::algebraic, anchor, why));
        out.push_back(not_applicable("diffusion_fit_hbar", CheckKind::statistical, anchor, why));
    }
    return out;
}

CheckResult check_work_matching(const Params& p, const Derived& d, int n) {
    const double bouncer = 2.0 * std::numbers::pi * p.gamma * d.hbar;
    auto r = algebraic_check("work_matching", double(n) * bouncer, walker_work(p, d, n),
                             "n W_bouncer = W_walker: n 2 pi gamma hbar = n N 4 pi zeta E_zp / omega0");
    r.note = fmt::format("n = {}, zeta/gamma = {:.17g}", n, p.zeta / p.gamma);
    return r;
}

CheckResult check_total_energy(const Params& p, const Derived& d) {
    const double quantum = d.hbar * p.omega0;
    auto r = algebraic_check("total_energy", d.e_tot, quantum,
                             "E_tot = 2 N E_zp = 2 E_bouncer = hbar omega0");
    const double chain[] = {d.e_tot, 2.0 * double(p.n_dof) * d.e_zp, 2.0 * d.e_bouncer};
    for (double v : chain) r.rel_error = std::max(r.rel_error, std::abs(v - quantum) / quantum);
    r.pass = r.rel_error <= r.tolerance;
    r.note = fmt::format("E_tot = {:.17g}, 2 E_bouncer = {:.17g}, hbar omega0 = {:.17g}", d.e_tot,
                         2.0 * d.e_bouncer, quantum);
    return r;
}

CheckResult check_coupling(const Params& p) {
    const double target = 2.0 * p.omega0;
    auto r = algebraic_check("coupling", p.gamma, target, "zeta = gamma = 2 omega0");
    const double zeta_err = std::abs(p.zeta - target) / target;
    if (zeta_err > r.rel_error) {
        r.lhs = p.zeta;
        r.abs_error = std::abs(p.zeta - target);
        r.rel_error = zeta_err;
    }
    r.pass = r.rel_error <= r.tolerance;
    r.note = fmt::format("gamma = {:.17g}, zeta = {:.17g}", p.gamma, p.zeta);
    return r;
}

CheckResult check_heat_gradient(const Params& p, const Derived& d) {
    // any Gaussian width: both gradients are proportional to the same u(x)
    double worst = 0.0, ratio = 1.0;
    for (int k = -3; k <= 3; ++k) {
        if (k == 0) continue;
        const auto g = heat_gradient(double(k), 0.0, 1.0, p, d);
        const double rel = std::abs(g.from_friction - g.from_boltzmann) / std::abs(g.from_boltzmann);
        if (rel >= worst) {
            worst = rel;
            ratio = g.from_friction / g.from_boltzmann;
        }
    }
    auto r = algebraic_check("heat_gradient_coupling", ratio, 1.0,
                             "m zeta u = grad Q = 2 omega0 m u");
    r.rel_error = worst;
    r.pass = worst <= r.tolerance;
    return r;
}

CheckResult check_entropic_cycle(const HeatCycleLedger& ledger, const Params& p,
                                 const Derived& d) {
    const double quantum = d.hbar * p.omega0;
    auto r = numeric_check("entropic_cycle", ledger.absorbed, quantum,
                           "heat throughput per cycle: 2 (hbar omega0/4 + hbar omega0/4) = hbar omega0");
    const double peak_err = std::abs(ledger.ekin_max - quantum / 2.0) / (quantum / 2.0);
    r.rel_error = std::max(r.rel_error, peak_err);
    r.pass = r.rel_error <= r.tolerance;
    r.note = fmt::format("absorbed = {:.17g}, emitted = {:.17g}, ekin_min = {:.17g}, ekin_max = {:.17g}",
                         ledger.absorbed, ledger.emitted, ledger.ekin_min, ledger.ekin_max);
    return r;
}

Report run_all(const RunConfig& cfg, unsigned threads) {
    using clock = std::chrono::steady_clock;
    validate_config(cfg);

    Report report;
    report.config = cfg;
    report.params = resolve_params(cfg);
    report.derived = derive_constants(report.params);
    report.seed = cfg.run.seed;
    const Params& p = report.params;
    const Derived& d = report.derived;
    const double dt = effective_dt(cfg, p);

    auto run_group = [&](auto&& body) {
        const auto start = clock::now();
        const std::size_t first = report.checks.size();
        body();
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        for (std::size_t i = first; i < report.checks.size(); ++i)
            report.checks[i].wall_seconds = secs / double(report.checks.size() - first);
    };
    auto add = [&](CheckResult r) { report.checks.push_back(std::move(r)); };

    // closed-form relations
    run_group([&] {
        add(check_coupling(p));
        add(check_einstein(p, d));
        add(check_total_energy(p, d));
        add(check_work_matching(p, d, cfg.run.work_periods));
        add(check_heat_gradient(p, d));
        const double width = matched_width(p, d);
        add(algebraic_check("matched_width", d.u0_of(width), p.zeta * width,
                            "u0 = zeta sigma0 = D / sigma0 at sigma0 = sqrt(D / zeta)"));
    });

    // bouncer
    run_group([&] {
        const double omega = cfg.run.drive_omega.value_or(p.omega0);
        const double periods = std::ceil(settling_time(p) / d.tau) + 1.0;
        const double t_end = cfg.run.t_end.value_or(periods * d.tau);
        const auto stationary = stationary_solution(p, omega);
        const std::string kStationary = "stationary solution x = A cos(omega t + phi)";
        try {
            const auto traj = integrate_bouncer(p, omega, OscState<double>{}, t_end, dt);
            const auto seg = last_period(traj);

            Eigen::MatrixXd basis(seg.size(), 2);
            basis.col(0) = (omega * seg.t.array()).cos().matrix();
            basis.col(1) = (omega * seg.t.array()).sin().matrix();
            const Eigen::Vector2d coef = basis.colPivHouseholderQr().solve(seg.x);
            const double amplitude = std::hypot(coef(0), coef(1));
            const double phase = std::atan2(-coef(1), coef(0));
            add(numeric_check("stationary_amplitude", amplitude, stationary.amplitude, kStationary));
            add(scaled_numeric("stationary_phase", phase, stationary.phase, std::numbers::pi,
                               kNumericTolerance, kStationary));

            const std::string kWork = "work per period: gamma m omega0^2 r^2 tau = 2 pi gamma hbar";
            if (omega == p.omega0) {
                add(numeric_check("work_identity", work_per_period(seg), work_per_period(p), kWork));
            } else {
                add(not_applicable("work_identity", CheckKind::deterministic_numeric, kWork,
                                   "drive is off resonance"));
            }
            add(scaled_numeric("power_balance", drive_work(seg) - friction_work(seg), 0.0, d.e_tot,
                               kPowerBalanceTolerance,
                               "steady state: drive power - friction power integrates to 0"));
            const auto ledger = heat_cycle_ledger(seg);
            add(scaled_numeric("heat_balance", ledger.absorbed, ledger.emitted, d.e_tot,
                               kNumericTolerance, "absorbed heat = emitted heat per period"));
            add(check_entropic_cycle(ledger, p, d));
        } catch (const Error& err) {
            add(failed("bouncer_pipeline", CheckKind::deterministic_numeric, kStationary, err.what()));
        }
    });

    const NoiseModel model = make_noise_model(p, d);

    // walker at equilibrium: equipartition, diffusion fit, autocorrelation
    run_group([&] {
        const double spacing = 1.0 / (8.0 * p.zeta);
        const auto stride = std::size_t(std::ceil(spacing / dt - 1e-9));
        const double fit_lo = cfg.run.fit_lo.value_or(5.0 / p.zeta);
        const double fit_hi = cfg.run.fit_hi.value_or(20.0 / p.zeta);
        EnsembleSpec spec;
        spec.size = cfg.run.ensemble_size;
        spec.dt = spacing / double(stride);
        spec.record_every = stride;
        spec.t_end = std::ceil(fit_hi / spacing - 1e-9) * spacing;
        spec.burn_in = cfg.run.burn_in / p.zeta;
        spec.integrator = cfg.run.integrator;
        spec.seed = derive_seed(cfg.run.seed, 1);
        spec.threads = threads;
        try {
            const auto rec = run_walker_ensemble(model, spec);
            add(check_equipartition(ensemble_msv(rec, 0), p, d));
            for (auto& r : check_diffusion(fit_diffusion(rec, fit_lo, fit_hi, p.zeta), p, d))
                add(std::move(r));
            const auto acf = velocity_autocorrelation(rec, {1.0 / p.zeta});
            add(statistical_check("velocity_autocorrelation", acf.front(), std::exp(-1.0),
                                  "force correlation time 1/zeta: <u(s)u(s+1/zeta)>/<u^2> = e^-1"));
        } catch (const Error& err) {
            add(failed("walker_equilibrium", CheckKind::statistical, "Langevin walker", err.what()));
        }
    });

    // walker relaxing from a fixed initial speed
    run_group([&] {
        const std::string anchor =
            "<u^2(t)> = lambda/(2 zeta m^2) (1 - e^{-2 zeta t}) + u0^2 e^{-2 zeta t}";
        const double horizon = 5.0 / p.zeta;
        const double spacing = horizon / 19.0;
        const auto stride = std::size_t(std::ceil(spacing / dt - 1e-9));
        EnsembleSpec spec;
        spec.size = cfg.run.ensemble_size;
        spec.dt = spacing / double(stride);
        spec.record_every = stride;
        spec.t_end = horizon;
        spec.u_init = cfg.run.u_init;
        spec.integrator = cfg.run.integrator;
        spec.seed = derive_seed(cfg.run.seed, 2);
        spec.threads = threads;
        try {
            const auto rec = run_walker_ensemble(model, spec);
            const auto msv = ensemble_msv(rec);
            std::vector<Point> points;
            for (std::size_t j = 0; j < msv.size(); ++j) {
                const double t = rec.times(Eigen::Index(j));
                points.push_back({t, msv[j], msv_analytic(model, t, cfg.run.u_init)});
            }
            add(worst_of("velocity_relaxation", points, anchor));
        } catch (const Error& err) {
            add(failed("velocity_relaxation", CheckKind::statistical, anchor, err.what()));
        }
    });

    // Gaussian ensembles
    for (std::size_t k = 0; k < cfg.ensemble.sigma0.size(); ++k) {
        const double sigma0 = cfg.ensemble.sigma0[k];
        run_group([&] {
            const double u0 = initial_u0(d, sigma0);
            const double t_cross = crossover_time(sigma0, d.diffusion);
            std::vector<double> grid = cfg.ensemble.times;
            grid.push_back(2.0 * t_cross);
            std::sort(grid.begin(), grid.end());

            const GaussianPrep prep{sigma0, cfg.ensemble.x0, cfg.ensemble.v_conv, cfg.ensemble.size};
            const std::uint64_t seed = derive_seed(cfg.run.seed, 100 + k);
            const EnsembleState start = prepare_gaussian(prep, d, seed, threads);

            std::vector<Point> spread;
            std::vector<KineticSplit> analytic, empirical;
            double rest_sigmas = 0.0;
            for (double t : grid) {
                const EnsembleState now = ballistic_evolve(start, t);
                const auto var = variance_about_center(now);
                spread.push_back({t, var, ballistic_variance(sigma0, u0, t)});
                if (t == 2.0 * t_cross)
                    rest_sigmas = std::abs(var.value - rest_frame_variance(sigma0, d.diffusion, t)) /
                                  var.std_error;
                analytic.push_back(kinetic_decomposition(d, p, sigma0, t));
                empirical.push_back(empirical_kinetic_split(now, p));
            }
            auto ballistic = worst_of(with_width("ballistic_spread", sigma0), spread,
                                      "sigma^2(t) = sigma0^2 + u0^2 t^2, u0 = D/sigma0");
            ballistic.note += fmt::format(
                "; rest-frame curve sigma0^2 + 2 D t misses the data by {:.3g} stderr at t = {:.17g}",
                rest_sigmas, 2.0 * t_cross);
            add(std::move(ballistic));

            const double total = 0.5 * p.m * u0 * u0;
            auto a = check_energy_conservation(analytic, total);
            a.name = with_width("kinetic_conservation_analytic", sigma0);
            add(std::move(a));
            auto e = check_energy_conservation(empirical, total);
            e.name = with_width("kinetic_conservation_empirical", sigma0);
            add(std::move(e));

            Eigen::ArrayXd osmotic(start.positions.size());
            for (Eigen::Index i = 0; i < osmotic.size(); ++i) {
                const double u = osmotic_velocity(start.positions(i), prep.x0, sigma0 * sigma0, p, d);
                osmotic(i) = 0.5 * p.m * u * u;
            }
            add(statistical_check(with_width("osmotic_link", sigma0), mean_with_error(osmotic),
                                  d.hbar * d.hbar / (8.0 * p.m * sigma0 * sigma0),
                                  "(m/2)<u(x)^2> = hbar^2/(8 m sigma0^2), u = -(hbar/2m) P'/P"));
        });
    }

    report.overall_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                      [](const CheckResult& c) { return c.pass; });
    return report;
}

nlohmann::ordered_json to_json(const Report& report) {
    using oj = nlohmann::ordered_json;
    const Params& p = report.params;
    const Derived& d = report.derived;
    oj out;
    out["config"] = config_to_json(report.config);
    out["params"] = {{"m", p.m},         {"omega0", p.omega0}, {"gamma", p.gamma},
                     {"zeta", p.zeta},   {"F0", p.drive_amplitude}, {"n_dof", p.n_dof},
                     {"canonical", p.canonical}, {"e_zp", p.zp_energy}};
    out["derived"] = {{"r", d.r},           {"tau", d.tau},         {"hbar", d.hbar},
                      {"e_zp", d.e_zp},     {"e_tot", d.e_tot},     {"e_bouncer", d.e_bouncer},
                      {"lambda", d.lambda}, {"D", d.diffusion},     {"kT0", d.kT0()}};
    oj seeds;
    seeds["master"] = report.seed;
    seeds["walker_equilibrium"] = derive_seed(report.seed, 1);
    seeds["walker_relaxation"] = derive_seed(report.seed, 2);
    oj ens = oj::array();
    for (std::size_t k = 0; k < report.config.ensemble.sigma0.size(); ++k)
        ens.push_back(derive_seed(report.seed, 100 + k));
    seeds["ensemble"] = ens;
    out["seeds"] = seeds;

    oj checks = oj::array();
    for (const auto& c : report.checks) {
        oj j;
        j["name"] = c.name;
        j["kind"] = std::string(to_string(c.kind));
        j["lhs"] = c.lhs;
        j["rhs"] = c.rhs;
        j["abs_error"] = c.abs_error;
        j["rel_error"] = c.rel_error;
        j["stderr"] = c.std_error;
        j["tolerance"] = c.tolerance;
        j["pass"] = c.pass;
        j["applicable"] = c.applicable;
        j["paper_anchor"] = c.anchor;
        j["note"] = c.note;
        j["wall_seconds"] = c.wall_seconds;
        checks.push_back(std::move(j));
    }
    out["checks"] = std::move(checks);
    out["overall_pass"] = report.overall_pass;
    return out;
}

}  // namespace subq
