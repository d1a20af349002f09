#include "subq/commands.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <Eigen/Core>
#include <cmath>
#include <fstream>
#include <iostream>
#include <vector>

#include "subq/bouncer.hpp"
#include "subq/ensemble.hpp"
#include "subq/errors.hpp"
#include "subq/rng.hpp"
#include "subq/verify.hpp"
#include "subq/walker.hpp"

namespace subq::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

/// Row-wise CSV writer with a fixed number of significant digits.
class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::string_view header, int precision)
        : out_(path), precision_(precision) {
        if (!out_) throw Error("cannot write " + path.string());
        out_ << header << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << fmt::format("{:.{}g}", v, precision_);
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
    int precision_;
};

void write_json(const fs::path& path, const ojson& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_manifest(const Context& ctx, std::string_view command,
                    const std::vector<std::string>& files) {
    ojson m;
    m["command"] = command;
    m["command_line"] = ctx.command_line;
    m["version"] = version();
    m["seed"] = ctx.config.run.seed;
    m["threads"] = ctx.threads;
    m["config"] = config_to_json(ctx.config);
    m["files"] = files;
    write_json(ctx.out_dir / "manifest.json", m);
    std::ofstream(ctx.out_dir / "config.toml") << config_to_toml(ctx.config);
}

std::string width_tag(double sigma0) { return fmt::format("{:g}", sigma0); }

double bouncer_horizon(const RunConfig& cfg, const Params& p, const Derived& d) {
    return cfg.run.t_end.value_or((std::ceil(settling_time(p) / d.tau) + 1.0) * d.tau);
}

}  // namespace

std::string version() {
    return fmt::format("subq 1.0.0 (Eigen {}.{}.{})", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                       EIGEN_MINOR_VERSION);
}

SweepRange parse_sweep_range(const std::string& text) {
    SweepRange r;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.points) || c1 != ':' || c2 != ':' || !in.eof())
        throw ParseError("sweep range must look like lo:hi:points, got '" + text + "'");
    if (r.points < 2 || !(r.hi > r.lo) || r.lo < 0.0)
        throw ParseError("sweep range needs 0 <= lo < hi and at least two points");
    return r;
}

int cmd_bouncer(const Context& ctx, const BouncerOptions& opts) {
    const RunConfig& cfg = ctx.config;
    Params p = resolve_params(cfg);
    if (opts.drive_amplitude) {
        if (!(*opts.drive_amplitude >= 0.0)) throw NonPositiveParameter("F0");
        p.drive_amplitude = *opts.drive_amplitude;
    }
    const Derived d = derive_constants(p);
    const double omega = cfg.run.drive_omega.value_or(p.omega0);
    const double dt = effective_dt(cfg, p);
    const auto traj = integrate_bouncer(p, omega, OscState<double>{opts.x0, opts.v0, 0.0},
                                        bouncer_horizon(cfg, p, d), dt);
    fs::create_directories(ctx.out_dir);

    CsvWriter csv(ctx.out_dir / "bouncer_trajectory.csv", "t,x,v,ekin,epot,h",
                  cfg.output.precision);
    for (Eigen::Index k = 0; k < traj.size(); ++k) {
        const auto s = traj.state(k);
        const double ekin = kinetic_energy(s, p);
        const double h = hamiltonian(s, p);
        csv.row({s.t, s.x, s.v, ekin, h - ekin, h});
    }

    const auto seg = last_period(traj);
    const auto stationary = stationary_solution(p, omega);
    double deviation = 0.0;
    for (Eigen::Index k = 0; k < seg.size(); ++k)
        deviation = std::max(deviation,
                             std::abs(seg.x(k) - stationary_displacement(stationary, omega, seg.t(k))));
    const auto ledger = heat_cycle_ledger(seg, SteadyGuard::skip);

    ojson summary;
    summary["drive_omega"] = omega;
    summary["F0"] = p.drive_amplitude;
    summary["dt"] = dt;
    summary["t_end"] = traj.t(traj.size() - 1);
    summary["stationary"] = {{"amplitude", stationary.amplitude}, {"phase", stationary.phase}};
    summary["tail_max_deviation"] = deviation;
    summary["steady_state"] = hamiltonian_drift(seg) <= kSteadyTolerance;
    summary["work_quadrature"] = drive_work(seg);
    summary["work_analytic"] = work_per_period(p);
    summary["friction_work"] = friction_work(seg);
    summary["heat_ledger"] = {{"absorbed", ledger.absorbed},
                              {"emitted", ledger.emitted},
                              {"throughput", ledger.throughput},
                              {"ekin_min", ledger.ekin_min},
                              {"ekin_max", ledger.ekin_max},
                              {"expected_throughput", d.hbar * p.omega0}};
    write_json(ctx.out_dir / "bouncer.json", summary);
    write_manifest(ctx, "bouncer", {"bouncer_trajectory.csv", "bouncer.json"});
    std::cout << fmt::format("bouncer: {} samples, work/period {:.10g} (analytic {:.10g})\n",
                             traj.size(), drive_work(seg), work_per_period(p));
    return 0;
}

int cmd_walker(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const Params p = resolve_params(cfg);
    const Derived d = derive_constants(p);
    const NoiseModel model = make_noise_model(p, d);
    const double dt = effective_dt(cfg, p);
    const double fit_lo = cfg.run.fit_lo.value_or(5.0 / p.zeta);
    const double fit_hi = cfg.run.fit_hi.value_or(20.0 / p.zeta);

    const double spacing = 1.0 / (8.0 * p.zeta);
    const auto stride = std::size_t(std::ceil(spacing / dt - 1e-9));
    EnsembleSpec spec;
    spec.size = cfg.run.ensemble_size;
    spec.dt = spacing / double(stride);
    spec.record_every = stride;
    spec.t_end = std::ceil(fit_hi / spacing - 1e-9) * spacing;
    spec.burn_in = cfg.run.burn_in / p.zeta;
    spec.integrator = cfg.run.integrator;
    spec.seed = derive_seed(cfg.run.seed, 1);
    spec.threads = ctx.threads;
    const auto rec = run_walker_ensemble(model, spec);
    fs::create_directories(ctx.out_dir);

    const auto msv = ensemble_msv(rec);
    const auto msd = ensemble_msd(rec);
    CsvWriter summary(ctx.out_dir / "walker_summary.csv", "t,msv,msv_stderr,msd,msd_stderr",
                      cfg.output.precision);
    for (std::size_t j = 0; j < msv.size(); ++j)
        summary.row({rec.times(Eigen::Index(j)), msv[j].value, msv[j].std_error, msd[j].value,
                     msd[j].std_error});

    // one full-resolution path on the first stream of the same seed
    const auto path = simulate_walker(model, WalkerState{0.0, 0.0, 0.0}, spec.t_end, spec.dt,
                                      spec.seed, spec.integrator, 0);
    CsvWriter traj(ctx.out_dir / "walker_trajectory.csv", "t,x,u", cfg.output.precision);
    for (Eigen::Index k = 0; k < path.t.size(); ++k) traj.row({path.t(k), path.x(k), path.u(k)});

    const auto fit = fit_diffusion(rec, fit_lo, fit_hi, p.zeta);
    ojson out;
    out["integrator"] = std::string(to_string(spec.integrator));
    out["dt"] = spec.dt;
    out["trajectories"] = spec.size;
    out["seed"] = spec.seed;
    out["fit_window"] = {fit_lo, fit_hi};
    out["D_fit"] = {{"value", fit.value}, {"stderr", fit.std_error}};
    out["D_analytic"] = model.diffusion();
    out["hbar_over_2m"] = d.hbar / (2.0 * p.m);
    out["msv_equilibrium"] = model.stationary_variance();
    write_json(ctx.out_dir / "walker.json", out);
    write_manifest(ctx, "walker", {"walker_summary.csv", "walker_trajectory.csv", "walker.json"});
    std::cout << fmt::format("walker: D_fit = {:.6g} +- {:.2g} (analytic {:.6g})\n", fit.value,
                             fit.std_error, model.diffusion());
    return 0;
}

int cmd_ensemble(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const Params p = resolve_params(cfg);
    const Derived d = derive_constants(p);
    fs::create_directories(ctx.out_dir);
    std::vector<std::string> files;
    for (std::size_t k = 0; k < cfg.ensemble.sigma0.size(); ++k) {
        const double sigma0 = cfg.ensemble.sigma0[k];
        const GaussianPrep prep{sigma0, cfg.ensemble.x0, cfg.ensemble.v_conv, cfg.ensemble.size};
        const std::uint64_t seed = derive_seed(cfg.run.seed, 100 + k);
        const auto series = variance_series(prep, d, cfg.ensemble.times, seed, ctx.threads);

        const std::string spread_name = "spread_sigma0_" + width_tag(sigma0) + ".csv";
        CsvWriter spread(ctx.out_dir / spread_name, "t,var_emp,var_stderr,var_ballistic,var_restframe",
                         cfg.output.precision);
        for (const auto& s : series)
            spread.row({s.t, s.empirical.value, s.empirical.std_error, s.ballistic, s.rest_frame});

        const double t_last = cfg.ensemble.times.empty() ? 0.0 : cfg.ensemble.times.back();
        const auto snap = ballistic_evolve(prepare_gaussian(prep, d, seed, ctx.threads), t_last);
        const std::string snap_name = "snapshot_sigma0_" + width_tag(sigma0) + ".csv";
        CsvWriter snapshot(ctx.out_dir / snap_name, "x,u", cfg.output.precision);
        for (Eigen::Index i = 0; i < snap.positions.size(); ++i)
            snapshot.row({snap.positions(i), snap.diff_velocities(i)});

        files.push_back(spread_name);
        files.push_back(snap_name);
        std::cout << fmt::format("ensemble sigma0={:g}: u0 = {:.6g}, crossover t* = {:.6g}\n",
                                 sigma0, initial_u0(d, sigma0),
                                 crossover_time(sigma0, d.diffusion));
    }
    write_manifest(ctx, "ensemble", files);
    return 0;
}

int cmd_sweep(const Context& ctx, const SweepRange& range) {
    const RunConfig& cfg = ctx.config;
    const Params p = resolve_params(cfg);
    fs::create_directories(ctx.out_dir);
    CsvWriter csv(ctx.out_dir / "sweep.csv", "omega,amplitude,phase", cfg.output.precision);
    double peak_omega = range.lo, peak_amp = -1.0;
    for (int i = 0; i < range.points; ++i) {
        const double omega = range.lo + (range.hi - range.lo) * double(i) / double(range.points - 1);
        const auto s = stationary_solution(p, omega);
        csv.row({omega, s.amplitude, s.phase});
        if (s.amplitude > peak_amp) {
            peak_amp = s.amplitude;
            peak_omega = omega;
        }
    }
    const double radicand = p.omega0 * p.omega0 - 2.0 * p.gamma * p.gamma;
    ojson out;
    out["peak_omega"] = peak_omega;
    out["peak_amplitude"] = peak_amp;
    out["analytic_peak_omega"] = radicand > 0.0 ? std::sqrt(radicand) : 0.0;
    out["grid_step"] = (range.hi - range.lo) / double(range.points - 1);
    write_json(ctx.out_dir / "sweep.json", out);
    write_manifest(ctx, "sweep", {"sweep.csv", "sweep.json"});
    std::cout << fmt::format("sweep: peak at omega = {:.6g} (analytic {:.6g})\n", peak_omega,
                             out["analytic_peak_omega"].get<double>());
    return 0;
}

int cmd_verify(const Context& ctx) {
    const Report report = run_all(ctx.config, ctx.threads);
    fs::create_directories(ctx.out_dir);
    write_json(ctx.out_dir / "report.json", to_json(report));
    write_manifest(ctx, "verify", {"report.json"});
    for (const auto& c : report.checks) {
        const char* verdict = !c.applicable ? "SKIP" : (c.pass ? "PASS" : "FAIL");
        std::cout << fmt::format("{} {:<44} lhs={:.10g} rhs={:.10g}\n", verdict, c.name, c.lhs, c.rhs);
    }
    std::cout << (report.overall_pass ? "overall: PASS\n" : "overall: FAIL\n");
    return report.overall_pass ? 0 : 1;
}

}  // namespace subq::cli
