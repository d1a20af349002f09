#include "subq/ensemble.hpp"

#include <cmath>
#include <sstream>

#include "subq/errors.hpp"
#include "subq/parallel.hpp"
#include "subq/rng.hpp"

namespace subq {

namespace {

constexpr double kConservationTolerance = 1e-12;

}  // namespace

double initial_u0(const Derived& d, double sigma0) {
    if (!(sigma0 > 0.0)) throw NonPositiveParameter("sigma0");
    return d.u0_of(sigma0);
}

double matched_width(const Params& p, const Derived& d) { return std::sqrt(d.diffusion / p.zeta); }

EnsembleState prepare_gaussian(const GaussianPrep& prep, const Derived& d, std::uint64_t seed,
                               unsigned threads) {
    if (!(prep.sigma0 > 0.0)) throw NonPositiveParameter("sigma0");
    if (prep.size < 2) throw TooFewSamples("ensemble needs at least two particles");
    const double u0 = initial_u0(d, prep.sigma0);

    EnsembleState e;
    e.x0 = prep.x0;
    e.v_conv = prep.v_conv;
    e.positions.resize(Eigen::Index(prep.size));
    e.diff_velocities.resize(Eigen::Index(prep.size));
    parallel_for(prep.size, threads, [&](std::size_t i) {
        NormalStream normal(seed, i);
        e.positions(Eigen::Index(i)) = prep.x0 + prep.sigma0 * normal();
        e.diff_velocities(Eigen::Index(i)) = u0 * normal();
    });
    return e;
}

double osmotic_velocity(double x, double x0, double sigma_sq, const Params& p, const Derived& d) {
    if (!(sigma_sq > 0.0)) throw NonPositiveParameter("sigma_sq");
    return d.hbar / (2.0 * p.m) * (x - x0) / sigma_sq;
}

HeatGradient heat_gradient(double x, double x0, double sigma_sq, const Params& p,
                           const Derived& d) {
    const double u = osmotic_velocity(x, x0, sigma_sq, p, d);
    return {p.m * p.zeta * u, 2.0 * p.omega0 * p.m * u};
}

EnsembleState ballistic_evolve(const EnsembleState& e, double t_target) {
    if (t_target < e.t) throw WindowOutOfRange("ballistic_evolve: cannot evolve backwards");
    EnsembleState out = e;
    const double span = t_target - e.t;
    out.positions += (e.v_conv + e.diff_velocities) * span;
    out.t = t_target;
    return out;
}

double ballistic_variance(double sigma0, double u0, double t) {
    return sigma0 * sigma0 + u0 * u0 * t * t;
}

double rest_frame_variance(double sigma0, double diffusion, double t) {
    return sigma0 * sigma0 + 2.0 * diffusion * t;
}

double crossover_time(double sigma0, double diffusion) {
    return 2.0 * sigma0 * sigma0 / diffusion;
}

EstimateWithError variance_about_center(const EnsembleState& e) {
    return mean_with_error((e.positions - e.center()).square());
}

std::vector<VarianceSample> variance_series(const GaussianPrep& prep, const Derived& d,
                                            const std::vector<double>& times, std::uint64_t seed,
                                            unsigned threads) {
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1]))
            throw WindowOutOfRange("variance_series: time grid must be non-decreasing from 0");
    const double u0 = initial_u0(d, prep.sigma0);
    const EnsembleState start = prepare_gaussian(prep, d, seed, threads);

    std::vector<VarianceSample> out;
    out.reserve(times.size());
    for (double t : times) {
        const EnsembleState now = ballistic_evolve(start, t);
        out.push_back({t, variance_about_center(now), ballistic_variance(prep.sigma0, u0, t),
                       rest_frame_variance(prep.sigma0, d.diffusion, t)});
    }
    return out;
}

KineticSplit kinetic_decomposition(const Derived& d, const Params& p, double sigma0, double t) {
    if (!(sigma0 > 0.0)) throw NonPositiveParameter("sigma0");
    if (t < 0.0) throw WindowOutOfRange("kinetic_decomposition: t must be >= 0");
    const double u0 = initial_u0(d, sigma0);
    const double total = 0.5 * p.m * u0 * u0;
    KineticSplit s;
    s.t = t;
    s.sigma_sq = ballistic_variance(sigma0, u0, t);
    s.diffusive = total * sigma0 * sigma0 / s.sigma_sq;
    s.convective = total * u0 * u0 * t * t / s.sigma_sq;
    s.total = s.convective + s.diffusive;
    return s;
}

KineticSplit empirical_kinetic_split(const EnsembleState& e, const Params& p) {
    const Eigen::ArrayXd offset = e.positions - e.center();
    const Eigen::ArrayXd& u = e.diff_velocities;
    const double n = double(offset.size());
    const double sxx = offset.square().sum() / n;
    const double sxu = (offset * u).sum() / n;
    const double slope = sxx > 0.0 ? sxu / sxx : 0.0;

    const Eigen::ArrayXd convective = slope * offset;
    const Eigen::ArrayXd residual = u - convective;
    const auto total = mean_with_error(u.square());

    KineticSplit s;
    s.t = e.t;
    s.sigma_sq = sxx;
    s.convective = 0.5 * p.m * convective.square().mean();
    s.diffusive = 0.5 * p.m * residual.square().mean();
    s.total = s.convective + s.diffusive;
    s.total_std_error = 0.5 * p.m * total.std_error;
    return s;
}

CheckResult check_energy_conservation(const std::vector<KineticSplit>& series,
                                      double expected_total) {
    if (series.size() < 2) throw TooFewSamples("energy conservation needs >= 2 time points");
    bool empirical = false;
    for (const auto& s : series) empirical |= s.total_std_error > 0.0;

    // report the point with the largest normalised defect
    CheckResult worst;
    double worst_score = -1.0;
    bool all_pass = true;
    for (const auto& s : series) {
        CheckResult r = empirical
                            ? statistical_check("kinetic_energy_conservation",
                                                {s.total, s.total_std_error, 0}, expected_total,
                                                "convective + diffusive = (m/2) u0^2 for all t")
                            : algebraic_check("kinetic_energy_conservation", s.total,
                                              expected_total,
                                              "convective + diffusive = (m/2) u0^2 for all t",
                                              kConservationTolerance);
        all_pass &= r.pass;
        const double score = r.tolerance > 0.0 ? (empirical ? r.abs_error : r.rel_error) / r.tolerance
                                               : r.abs_error;
        if (score > worst_score) {
            worst_score = score;
            worst = r;
            std::ostringstream note;
            note.precision(17);
            note << "worst t = " << s.t;
            worst.note = note.str();
        }
    }
    worst.pass = all_pass;
    if (!all_pass) worst.note = "ConservationViolated: " + worst.note;
    return worst;
}

}  // namespace subq
