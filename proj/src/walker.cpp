#include "subq/walker.hpp"

#include <cmath>

#include "subq/errors.hpp"
#include "subq/parallel.hpp"
#include "subq/rng.hpp"

namespace subq {

NoiseModel make_noise_model(const Params& p, const Derived& d) {
    return {d.lambda, p.zeta, p.m};
}

std::string_view to_string(Integrator integrator) {
    switch (integrator) {
        case Integrator::ou_exact: return "ou_exact";
        case Integrator::euler_maruyama: return "euler_maruyama";
    }
    return "unknown";
}

Integrator integrator_from_string(std::string_view name) {
    if (name == "ou_exact") return Integrator::ou_exact;
    if (name == "euler_maruyama") return Integrator::euler_maruyama;
    throw ParseError("unknown integrator '" + std::string(name) + "'");
}

WalkerState ou_exact_step(const WalkerState& s, double dt, const NoiseModel& model, double xi1,
                          double xi2) {
    const double zeta = model.zeta;
    const double s2 = model.stationary_variance();
    const double em1 = std::expm1(-zeta * dt);  // e^{-zeta dt} - 1
    const double decay = 1.0 + em1;

    const double mean_u = s.u * decay;
    const double mean_x = s.x - s.u * em1 / zeta;
    const double var_u = -s2 * std::expm1(-2.0 * zeta * dt);
    const double var_x = s2 / (zeta * zeta) * (2.0 * zeta * dt + 2.0 * em1 - em1 * em1);
    const double cov = s2 / zeta * em1 * em1;

    WalkerState next{mean_x, mean_u, s.t + dt};
    if (var_u > 0.0) {
        const double sd_u = std::sqrt(var_u);
        next.u += sd_u * xi1;
        next.x += cov / sd_u * xi1 + std::sqrt(std::max(var_x - cov * cov / var_u, 0.0)) * xi2;
    }
    return next;
}

WalkerState euler_maruyama_step(const WalkerState& s, double dt, const NoiseModel& model,
                                double xi) {
    if (!(dt > 0.0) || dt > 0.1 / model.zeta)
        throw StepTooLarge("euler_maruyama_step: dt must lie in (0, 0.1/zeta]");
    return {s.x + s.u * dt,
            s.u - model.zeta * s.u * dt + std::sqrt(model.lambda * dt) / model.m * xi, s.t + dt};
}

namespace {

struct Stepper {
    const NoiseModel& model;
    double dt;
    Integrator integrator;

    WalkerState operator()(const WalkerState& s, NormalStream& normal) const {
        if (integrator == Integrator::ou_exact) {
            const double xi1 = normal();
            const double xi2 = normal();
            return ou_exact_step(s, dt, model, xi1, xi2);
        }
        return euler_maruyama_step(s, dt, model, normal());
    }
};

void check_step(double dt, const NoiseModel& model, Integrator integrator) {
    if (!(dt > 0.0)) throw StepTooLarge("walker: dt must be positive");
    if (integrator == Integrator::euler_maruyama && dt > 0.1 / model.zeta)
        throw StepTooLarge("walker: Euler-Maruyama needs dt <= 0.1/zeta");
}

}  // namespace

WalkerTrajectory simulate_walker(const NoiseModel& model, const WalkerState& init, double t_end,
                                 double dt, std::uint64_t seed, Integrator integrator,
                                 std::uint64_t stream) {
    check_step(dt, model, integrator);
    if (!(t_end > init.t)) throw WindowOutOfRange("simulate_walker: t_end must exceed t0");
    const auto steps = static_cast<Eigen::Index>(std::llround((t_end - init.t) / dt));

    WalkerTrajectory traj;
    traj.dt = dt;
    traj.seed = seed;
    traj.stream = stream;
    traj.integrator = integrator;
    traj.t.resize(steps + 1);
    traj.x.resize(steps + 1);
    traj.u.resize(steps + 1);

    NormalStream normal(seed, stream);
    const Stepper step{model, dt, integrator};
    WalkerState s = init;
    for (Eigen::Index k = 0;; ++k) {
        s.t = init.t + double(k) * dt;
        traj.t(k) = s.t;
        traj.x(k) = s.x;
        traj.u(k) = s.u;
        if (k == steps) break;
        s = step(s, normal);
        if (!std::isfinite(s.x) || !std::isfinite(s.u))
            throw NonFinite("simulate_walker: state diverged");
    }
    return traj;
}

double msv_analytic(const NoiseModel& model, double t, double u0) {
    const double decay = std::exp(-2.0 * model.zeta * t);
    return model.stationary_variance() * (1.0 - decay) + u0 * u0 * decay;
}

double msd_asymptotic(const NoiseModel& model, double t) { return 2.0 * model.diffusion() * t; }

double msd_exact(const NoiseModel& model, double t) {
    return 2.0 * model.diffusion() * (t + std::expm1(-model.zeta * t) / model.zeta);
}

EnsembleRecord run_walker_ensemble(const NoiseModel& model, const EnsembleSpec& spec) {
    check_step(spec.dt, model, spec.integrator);
    if (spec.size < 2) throw TooFewSamples("ensemble needs at least two trajectories");
    if (spec.record_every == 0) throw WindowOutOfRange("record_every must be positive");
    const auto steps = static_cast<Eigen::Index>(std::llround(spec.t_end / spec.dt));
    const auto burn = static_cast<Eigen::Index>(std::llround(spec.burn_in / spec.dt));
    const auto stride = static_cast<Eigen::Index>(spec.record_every);
    const Eigen::Index columns = steps / stride + 1;

    EnsembleRecord rec;
    rec.dt = spec.dt;
    rec.seed = spec.seed;
    rec.integrator = spec.integrator;
    rec.times.resize(columns);
    for (Eigen::Index j = 0; j < columns; ++j) rec.times(j) = double(j * stride) * spec.dt;
    const auto rows = static_cast<Eigen::Index>(spec.size);
    rec.x.resize(rows, columns);
    rec.u.resize(rows, columns);

    const Stepper step{model, spec.dt, spec.integrator};
    const double sd_eq = std::sqrt(model.stationary_variance());
    parallel_for(spec.size, spec.threads, [&](std::size_t index) {
        const auto i = static_cast<Eigen::Index>(index);
        NormalStream normal(spec.seed, index);
        WalkerState s{0.0, spec.u_init ? *spec.u_init : sd_eq * normal(), 0.0};
        for (Eigen::Index k = 0; k < burn; ++k) s = step(s, normal);
        s.x = 0.0;
        s.t = 0.0;
        for (Eigen::Index k = 0, j = 0; j < columns; ++k) {
            if (k % stride == 0) {
                rec.x(i, j) = s.x;
                rec.u(i, j) = s.u;
                ++j;
                if (j == columns) break;
            }
            s = step(s, normal);
        }
    });
    return rec;
}

EstimateWithError ensemble_msv(const EnsembleRecord& record, Eigen::Index column) {
    return mean_with_error(record.u.col(column).array().square());
}

std::vector<EstimateWithError> ensemble_msv(const EnsembleRecord& record) {
    std::vector<EstimateWithError> out;
    out.reserve(std::size_t(record.times.size()));
    for (Eigen::Index j = 0; j < record.times.size(); ++j) out.push_back(ensemble_msv(record, j));
    return out;
}

std::vector<EstimateWithError> ensemble_msd(const EnsembleRecord& record) {
    std::vector<EstimateWithError> out;
    out.reserve(std::size_t(record.times.size()));
    for (Eigen::Index j = 0; j < record.times.size(); ++j)
        out.push_back(mean_with_error((record.x.col(j) - record.x.col(0)).array().square()));
    return out;
}

EstimateWithError fit_diffusion(const EnsembleRecord& record, double t_lo, double t_hi,
                                double zeta) {
    if (record.trajectories() < 2) throw TooFewSamples("fit_diffusion: need >= 2 trajectories");
    const double slack = 1e-9 * std::max(1.0, t_hi);
    if (!(t_lo < t_hi) || t_lo < record.times(0) - slack ||
        t_hi > record.times(record.times.size() - 1) + slack)
        throw WindowOutOfRange("fit_diffusion: window outside the recorded range");
    if (t_lo < 5.0 / zeta - slack)
        throw WindowOutOfRange("fit_diffusion: window must start at t >= 5/zeta");

    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < record.times.size(); ++j)
        if (record.times(j) >= t_lo - slack && record.times(j) <= t_hi + slack) cols.push_back(j);
    if (cols.size() < 2) throw TooFewSamples("fit_diffusion: fewer than two points in window");

    Eigen::VectorXd t(Eigen::Index(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) t(Eigen::Index(c)) = record.times(cols[c]);

    const Eigen::Index rows = record.trajectories();
    Eigen::VectorXd per_traj(rows);
    Eigen::VectorXd msd(t.size());
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double dx = record.x(i, cols[c]) - record.x(i, 0);
            msd(Eigen::Index(c)) = dx * dx;
        }
        per_traj(i) = 0.5 * ols_slope(t, msd);
    }
    return mean_with_error(per_traj);
}

std::vector<EstimateWithError> velocity_autocorrelation(const EnsembleRecord& record,
                                                        const std::vector<double>& lags) {
    const Eigen::Index rows = record.trajectories();
    const Eigen::Index cols = record.times.size();
    if (rows < 2) throw TooFewSamples("velocity_autocorrelation: need >= 2 trajectories");
    const double spacing = cols > 1 ? record.times(1) - record.times(0) : record.dt;

    std::vector<EstimateWithError> out;
    for (double lag : lags) {
        const auto k = static_cast<Eigen::Index>(std::llround(lag / spacing));
        if (k < 0 || k >= cols) throw WindowOutOfRange("autocorrelation lag outside record");
        const Eigen::Index origins = cols - k;
        const Eigen::ArrayXXd lead = record.u.leftCols(origins).array();
        const Eigen::ArrayXXd lagged = record.u.middleCols(k, origins).array();
        const Eigen::ArrayXd cross = (lead * lagged).rowwise().mean();
        const Eigen::ArrayXd self = lead.square().rowwise().mean();

        CompensatedSum cross_sum, self_sum;
        for (Eigen::Index i = 0; i < rows; ++i) {
            cross_sum.add(cross(i));
            self_sum.add(self(i));
        }
        const double self_mean = self_sum.value() / double(rows);
        const double ratio = cross_sum.value() / self_sum.value();
        // delta method for a ratio of means
        const Eigen::ArrayXd z = (cross - ratio * self) / self_mean;
        const auto spread = mean_with_error(z);
        out.push_back({ratio, spread.std_error, std::size_t(rows)});
    }
    return out;
}

}  // namespace subq
