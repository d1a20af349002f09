#pragma once

// Langevin walker  m u' = -m zeta u + f(t),  <f(t) f(t')> = lambda delta(t - t'),
// its exact Ornstein-Uhlenbeck transition, an Euler-Maruyama reference
// scheme, ensemble simulation and the estimators used to check it.

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subq/constants.hpp"
#include "subq/stats.hpp"

namespace subq {

struct NoiseModel {
    double lambda{4};
    double zeta{2};
    double m{1};

    /// lambda / (2 zeta m^2), the equilibrium mean-square velocity.
    double stationary_variance() const { return lambda / (2.0 * zeta * m * m); }
    /// lambda / (2 zeta^2 m^2).
    double diffusion() const { return lambda / (2.0 * zeta * zeta * m * m); }
    /// lambda / (4 zeta m), equilibrium kinetic energy per DOF.
    double equipartition_energy() const { return lambda / (4.0 * zeta * m); }
};

NoiseModel make_noise_model(const Params& p, const Derived& d);

struct WalkerState {
    double x{0};
    double u{0};
    double t{0};
};

enum class Integrator { ou_exact, euler_maruyama };

std::string_view to_string(Integrator integrator);
Integrator integrator_from_string(std::string_view name);

struct WalkerTrajectory {
    double dt{};
    std::uint64_t seed{};
    std::uint64_t stream{};
    Integrator integrator{Integrator::ou_exact};
    Eigen::VectorXd t, x, u;
};

/// Exact joint (x, u) transition of the integrated OU process over dt,
/// driven by two independent standard normals.
WalkerState ou_exact_step(const WalkerState& s, double dt, const NoiseModel& model, double xi1,
                          double xi2);

/// Explicit Euler-Maruyama step. Requires dt <= 0.1/zeta.
WalkerState euler_maruyama_step(const WalkerState& s, double dt, const NoiseModel& model,
                                double xi);

WalkerTrajectory simulate_walker(const NoiseModel& model, const WalkerState& init, double t_end,
                                 double dt, std::uint64_t seed,
                                 Integrator integrator = Integrator::ou_exact,
                                 std::uint64_t stream = 0);

/// Mean-square velocity from an initial velocity u0.
double msv_analytic(const NoiseModel& model, double t, double u0);

/// Long-time mean-square displacement 2 D t (valid for t >> 1/zeta).
double msd_asymptotic(const NoiseModel& model, double t);

/// Exact mean-square displacement for an equilibrium start,
/// 2 D (t - (1 - e^{-zeta t}) / zeta).
double msd_exact(const NoiseModel& model, double t);

/// Walker work over n periods with N degrees of freedom.
template <typename Scalar>
Scalar walker_work(const PhysicalParams<Scalar>& p, const DerivedConstants<Scalar>& d, int n) {
    return Scalar(n) * Scalar(p.n_dof) * Scalar(4) * std::numbers::pi_v<Scalar> / p.omega0 *
           p.zeta * d.e_zp;
}

struct EnsembleSpec {
    std::size_t size{10000};
    double dt{0.01};
    double t_end{10};         ///< length of the recorded window
    double burn_in{0};        ///< unrecorded relaxation before t = 0
    std::size_t record_every{1};
    /// Fixed initial velocity; when empty, velocities start from the
    /// stationary distribution.
    std::optional<double> u_init;
    Integrator integrator{Integrator::ou_exact};
    std::uint64_t seed{0};
    unsigned threads{1};
};

/// Positions and velocities of every trajectory on a shared observation
/// grid. Row i is trajectory i; column j is times(j). Positions restart at
/// zero at the start of the recorded window.
struct EnsembleRecord {
    Eigen::VectorXd times;
    Eigen::MatrixXd x, u;
    double dt{};
    std::uint64_t seed{};
    Integrator integrator{Integrator::ou_exact};

    Eigen::Index trajectories() const { return x.rows(); }
};

EnsembleRecord run_walker_ensemble(const NoiseModel& model, const EnsembleSpec& spec);

/// <u^2> at recorded column `column`.
EstimateWithError ensemble_msv(const EnsembleRecord& record, Eigen::Index column);
std::vector<EstimateWithError> ensemble_msv(const EnsembleRecord& record);

/// <(x(t) - x(0))^2> at every recorded time.
std::vector<EstimateWithError> ensemble_msd(const EnsembleRecord& record);

/// Diffusion constant as half the least-squares slope of the MSD over
/// [t_lo, t_hi]. The error bar comes from the spread of per-trajectory
/// slopes, which accounts for the correlation between MSD points.
EstimateWithError fit_diffusion(const EnsembleRecord& record, double t_lo, double t_hi,
                                double zeta);

/// Normalised velocity autocorrelation <u(s) u(s + lag)> / <u(s)^2>,
/// averaged over all available origins s. Lags snap to the record grid.
std::vector<EstimateWithError> velocity_autocorrelation(const EnsembleRecord& record,
                                                        const std::vector<double>& lags);

}  // namespace subq
