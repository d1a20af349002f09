#pragma once

// Gaussian preparation of many walkers and their free (ballistic) spreading.
//
// A source emits particles with convective velocity v_conv whose positions
// are Gaussian with width sigma0 about x0. Each particle also carries a
// diffusive velocity u of spread u0 = D/sigma0, independent of its
// position, so the ensemble variance about the moving centre grows as
// sigma0^2 + u0^2 t^2.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "subq/check.hpp"
#include "subq/constants.hpp"
#include "subq/stats.hpp"

namespace subq {

struct GaussianPrep {
    double sigma0{1};
    double x0{0};
    double v_conv{0};
    std::size_t size{100000};
};

struct EnsembleState {
    double t{0};
    double x0{0};  ///< centre at t = 0
    double v_conv{0};
    Eigen::ArrayXd positions;
    Eigen::ArrayXd diff_velocities;

    double center() const { return x0 + v_conv * t; }
};

struct KineticSplit {
    double t{0};
    double convective{0};
    double diffusive{0};
    double total{0};
    double sigma_sq{0};
    double total_std_error{0};  ///< zero for closed-form splits
};

struct HeatGradient {
    double from_friction{0};   ///< m zeta u
    double from_boltzmann{0};  ///< 2 omega0 m u
};

struct VarianceSample {
    double t{0};
    EstimateWithError empirical;
    double ballistic{0};   ///< sigma0^2 + u0^2 t^2
    double rest_frame{0};  ///< sigma0^2 + 2 D t
};

double initial_u0(const Derived& d, double sigma0);

/// Width at which u0 = D/sigma0 coincides with zeta sigma0, i.e. sqrt(D/zeta).
double matched_width(const Params& p, const Derived& d);

EnsembleState prepare_gaussian(const GaussianPrep& prep, const Derived& d, std::uint64_t seed,
                               unsigned threads = 1);

/// u(x) = -(hbar/2m) dP/dx / P for the Gaussian P centred at x0.
double osmotic_velocity(double x, double x0, double sigma_sq, const Params& p, const Derived& d);

HeatGradient heat_gradient(double x, double x0, double sigma_sq, const Params& p,
                           const Derived& d);

/// Free flight to t_target with velocities v_conv + u held fixed.
EnsembleState ballistic_evolve(const EnsembleState& e, double t_target);

double ballistic_variance(double sigma0, double u0, double t);
double rest_frame_variance(double sigma0, double diffusion, double t);
/// Time at which the ballistic and rest-frame curves cross again, 2 sigma0^2 / D.
double crossover_time(double sigma0, double diffusion);

/// Mean squared distance from the convective centre (known, not estimated).
EstimateWithError variance_about_center(const EnsembleState& e);

std::vector<VarianceSample> variance_series(const GaussianPrep& prep, const Derived& d,
                                            const std::vector<double>& times, std::uint64_t seed,
                                            unsigned threads = 1);

/// Closed-form split of the fluctuating kinetic energy at time t. The
/// diffusive part is (m/2) u0^2 sigma0^2 / sigma^2, which equals
/// hbar^2 / (8 m sigma^2) under the canonical coupling.
KineticSplit kinetic_decomposition(const Derived& d, const Params& p, double sigma0, double t);

/// Empirical split of an ensemble: the convective part is carried by the
/// velocity field linear in distance from the centre (the least-squares
/// predictor of u given x); the diffusive part is the residual.
KineticSplit empirical_kinetic_split(const EnsembleState& e, const Params& p);

/// Checks that convective + diffusive stays at (m/2) u0^2 across the series.
/// Closed-form series are held to 1e-12 relative; empirical ones to
/// 3 standard errors.
CheckResult check_energy_conservation(const std::vector<KineticSplit>& series,
                                      double expected_total);

}  // namespace subq
