#pragma once

// Driven damped oscillator ("bouncer"):
//   x'' = -omega0^2 x - 2 gamma x' + (F0/m) cos(omega t)
// together with its stationary solution, energy bookkeeping, polar-form
// invariants and the per-period heat ledger.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "subq/constants.hpp"
#include "subq/errors.hpp"

namespace subq {

template <typename Scalar>
using Series = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct OscState {
    Scalar x{0};
    Scalar v{0};
    Scalar t{0};
};

/// Uniformly sampled oscillator path. Columns t, x, v share one index.
template <typename Scalar>
struct OscTrajectory {
    Scalar dt{};
    Scalar drive_omega{};
    PhysicalParams<Scalar> params{};
    Series<Scalar> t, x, v;

    Eigen::Index size() const { return t.size(); }
    OscState<Scalar> state(Eigen::Index k) const { return {x(k), v(k), t(k)}; }

    /// Samples [first, first + count), keeping provenance.
    OscTrajectory segment(Eigen::Index first, Eigen::Index count) const {
        OscTrajectory out{dt, drive_omega, params, t.segment(first, count),
                          x.segment(first, count), v.segment(first, count)};
        return out;
    }
};

template <typename Scalar>
struct StationarySolution {
    Scalar amplitude;
    Scalar phase;  ///< in (-pi, 0]
};

struct HeatCycleLedger {
    double absorbed{0};
    double emitted{0};
    double throughput{0};
    double ekin_min{0};
    double ekin_max{0};
};

enum class SteadyGuard { require, skip };

/// Relative Hamiltonian drift over a period above which a segment is not
/// considered stationary.
inline constexpr double kSteadyTolerance = 1e-6;

template <typename Scalar>
StationarySolution<Scalar> stationary_solution(const PhysicalParams<Scalar>& p, Scalar omega) {
    using std::atan2;
    using std::sqrt;
    const Scalar detuning = p.omega0 * p.omega0 - omega * omega;
    const Scalar damping = Scalar(2) * p.gamma * omega;
    StationarySolution<Scalar> s;
    s.amplitude = (p.drive_amplitude / p.m) / sqrt(detuning * detuning + damping * damping);
    // atan2 of (-0, +) is -0; normalise so the static limit reports +0
    s.phase = atan2(-damping, detuning) + Scalar(0);
    return s;
}

/// Displacement of the stationary solution at time t.
template <typename Scalar>
Scalar stationary_displacement(const StationarySolution<Scalar>& s, Scalar omega, Scalar t) {
    using std::cos;
    return s.amplitude * cos(omega * t + s.phase);
}

template <typename Scalar>
Scalar hamiltonian(const OscState<Scalar>& s, const PhysicalParams<Scalar>& p) {
    return p.m / Scalar(2) * s.v * s.v + p.m / Scalar(2) * p.omega0 * p.omega0 * s.x * s.x;
}

template <typename Scalar>
Scalar kinetic_energy(const OscState<Scalar>& s, const PhysicalParams<Scalar>& p) {
    return p.m / Scalar(2) * s.v * s.v;
}

/// Right-hand side of the equation of motion divided by m.
template <typename Scalar>
Scalar bouncer_acceleration(const PhysicalParams<Scalar>& p, Scalar omega, Scalar x, Scalar v,
                            Scalar t) {
    using std::cos;
    return -p.omega0 * p.omega0 * x - Scalar(2) * p.gamma * v +
           p.drive_amplitude / p.m * cos(omega * t);
}

/// Fixed-step classical Runge-Kutta integration. `t_end` is snapped to the
/// nearest multiple of dt past init.t. The params are used as given, so
/// undriven (F0 = 0) or undamped (gamma = 0) oscillators are allowed.
template <typename Scalar>
OscTrajectory<Scalar> integrate_bouncer(const PhysicalParams<Scalar>& p, Scalar omega,
                                        const OscState<Scalar>& init, Scalar t_end, Scalar dt) {
    using std::isfinite;
    using std::llround;
    const Scalar period = Scalar(2) * std::numbers::pi_v<Scalar> / p.omega0;
    if (!(dt > Scalar(0)) || !(t_end > init.t))
        throw StepTooLarge("integrate_bouncer: need dt > 0 and t_end > t0");
    if (dt > period / Scalar(100))
        throw StepTooLarge("integrate_bouncer: dt exceeds period/100");

    const auto steps = static_cast<Eigen::Index>(llround((t_end - init.t) / dt));
    OscTrajectory<Scalar> traj;
    traj.dt = dt;
    traj.drive_omega = omega;
    traj.params = p;
    traj.t.resize(steps + 1);
    traj.x.resize(steps + 1);
    traj.v.resize(steps + 1);

    auto f = [&](Scalar x, Scalar v, Scalar t) { return bouncer_acceleration(p, omega, x, v, t); };

    Scalar x = init.x, v = init.v;
    const Scalar half = dt / Scalar(2);
    traj.t(0) = init.t;
    traj.x(0) = x;
    traj.v(0) = v;
    for (Eigen::Index k = 0; k < steps; ++k) {
        const Scalar t = init.t + Scalar(k) * dt;
        const Scalar k1x = v;
        const Scalar k1v = f(x, v, t);
        const Scalar k2x = v + half * k1v;
        const Scalar k2v = f(x + half * k1x, v + half * k1v, t + half);
        const Scalar k3x = v + half * k2v;
        const Scalar k3v = f(x + half * k2x, v + half * k2v, t + half);
        const Scalar k4x = v + dt * k3v;
        const Scalar k4v = f(x + dt * k3x, v + dt * k3v, t + dt);
        x += dt / Scalar(6) * (k1x + Scalar(2) * k2x + Scalar(2) * k3x + k4x);
        v += dt / Scalar(6) * (k1v + Scalar(2) * k2v + Scalar(2) * k3v + k4v);
        if (!isfinite(x) || !isfinite(v))
            throw NonFinite("integrate_bouncer: state diverged at t = " + std::to_string(double(t)));
        traj.t(k + 1) = init.t + Scalar(k + 1) * dt;
        traj.x(k + 1) = x;
        traj.v(k + 1) = v;
    }
    return traj;
}

/// Number of samples per resonant period on the trajectory's grid.
template <typename Scalar>
Eigen::Index samples_per_period(const OscTrajectory<Scalar>& traj) {
    using std::llround;
    const Scalar period = Scalar(2) * std::numbers::pi_v<Scalar> / traj.params.omega0;
    return static_cast<Eigen::Index>(llround(period / traj.dt));
}

/// The final full period of a trajectory (both endpoints included).
template <typename Scalar>
OscTrajectory<Scalar> last_period(const OscTrajectory<Scalar>& traj) {
    const Eigen::Index per = samples_per_period(traj);
    if (traj.size() < per + 1) throw NotSteadyState("trajectory shorter than one period");
    return traj.segment(traj.size() - per - 1, per + 1);
}

template <typename Scalar>
Scalar hamiltonian_drift(const OscTrajectory<Scalar>& seg) {
    using std::abs;
    const Scalar h0 = hamiltonian(seg.state(0), seg.params);
    const Scalar h1 = hamiltonian(seg.state(seg.size() - 1), seg.params);
    const Scalar scale = std::max(abs(h0), abs(h1));
    if (scale == Scalar(0)) return Scalar(0);
    return abs(h1 - h0) / scale;
}

template <typename Scalar>
void require_steady(const OscTrajectory<Scalar>& seg) {
    if (seg.size() < 2) throw NotSteadyState("segment needs at least two samples");
    if (hamiltonian_drift(seg) > Scalar(kSteadyTolerance))
        throw NotSteadyState("Hamiltonian drifts by more than 1e-6 relative over the segment");
}

namespace detail {

template <typename Scalar, typename Integrand>
Scalar trapezoid(const OscTrajectory<Scalar>& seg, Integrand&& g) {
    Scalar sum{0};
    const Eigen::Index n = seg.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar w = (k == 0 || k == n - 1) ? Scalar(0.5) : Scalar(1);
        sum += w * g(k);
    }
    return sum * seg.dt;
}

}  // namespace detail

/// Work done by the drive over a segment, with no steady-state requirement.
template <typename Scalar>
Scalar drive_work(const OscTrajectory<Scalar>& seg) {
    using std::cos;
    const auto& p = seg.params;
    return detail::trapezoid(seg, [&](Eigen::Index k) {
        return p.drive_amplitude * cos(seg.drive_omega * seg.t(k)) * seg.v(k);
    });
}

/// Energy dissipated by friction over a segment.
template <typename Scalar>
Scalar friction_work(const OscTrajectory<Scalar>& seg) {
    const auto& p = seg.params;
    return detail::trapezoid(seg, [&](Eigen::Index k) {
        return Scalar(2) * p.gamma * p.m * seg.v(k) * seg.v(k);
    });
}

/// Closed-form work per period at resonance: gamma m omega0^2 r^2 tau = 2 pi gamma hbar.
template <typename Scalar>
Scalar work_per_period(const PhysicalParams<Scalar>& p) {
    const auto d = derive_constants(p);
    return p.gamma * p.m * p.omega0 * p.omega0 * d.r * d.r * d.tau;
}

/// Drive work quadrature over a steady one-period segment.
template <typename Scalar>
Scalar work_per_period(const OscTrajectory<Scalar>& seg) {
    require_steady(seg);
    return drive_work(seg);
}

/// 2-D circular embedding of a steady oscillation on a uniform grid.
template <typename Scalar>
struct PolarPath {
    Scalar dt{};
    Series<Scalar> r, theta;
};

template <typename Scalar>
struct PolarResiduals {
    Scalar radial{0};   ///< max |r'' - r theta'^2 + omega0^2 r|
    Scalar angular{0};  ///< max |r theta'' + 2 r' theta'|
};

/// Circle of radius `radius` swept at angular rate omega0, sampled at t0 + k dt.
template <typename Scalar>
PolarPath<Scalar> circular_embedding(Scalar radius, Scalar omega0, Scalar t0, Scalar dt,
                                     Eigen::Index count) {
    PolarPath<Scalar> path;
    path.dt = dt;
    path.r = Series<Scalar>::Constant(count, radius);
    path.theta.resize(count);
    for (Eigen::Index k = 0; k < count; ++k) path.theta(k) = omega0 * (t0 + Scalar(k) * dt);
    return path;
}

/// Residuals of the polar equations of motion by centred finite differences
/// over the interior samples.
template <typename Scalar>
PolarResiduals<Scalar> polar_residuals(const PolarPath<Scalar>& path, Scalar omega0) {
    using std::abs;
    PolarResiduals<Scalar> res;
    const Eigen::Index n = path.r.size();
    const Scalar h = path.dt;
    for (Eigen::Index k = 1; k + 1 < n; ++k) {
        const Scalar r = path.r(k);
        const Scalar r_dot = (path.r(k + 1) - path.r(k - 1)) / (Scalar(2) * h);
        const Scalar r_ddot = (path.r(k + 1) - Scalar(2) * r + path.r(k - 1)) / (h * h);
        const Scalar th_dot = (path.theta(k + 1) - path.theta(k - 1)) / (Scalar(2) * h);
        const Scalar th_ddot =
            (path.theta(k + 1) - Scalar(2) * path.theta(k) + path.theta(k - 1)) / (h * h);
        res.radial = std::max(res.radial, abs(r_ddot - r * th_dot * th_dot + omega0 * omega0 * r));
        res.angular = std::max(res.angular, abs(r * th_ddot + Scalar(2) * r_dot * th_dot));
    }
    return res;
}

/// L(t) = m r^2 theta'.
template <typename Scalar>
Series<Scalar> angular_momentum_series(const Series<Scalar>& r, const Series<Scalar>& theta_dot,
                                       Scalar m) {
    return (m * r.array().square() * theta_dot.array()).matrix();
}

/// Heat taken up from and given off to the bath over one period, read off
/// the rises and falls of the kinetic energy.
///
/// The kinetic energy is reconstructed between samples by cubic Hermite
/// interpolation using the exact power m v a from the equation of motion,
/// so interior extrema are located to fourth order in dt.
template <typename Scalar>
HeatCycleLedger heat_cycle_ledger(const OscTrajectory<Scalar>& seg,
                                  SteadyGuard guard = SteadyGuard::require) {
    using std::abs;
    using std::sqrt;
    if (guard == SteadyGuard::require) require_steady(seg);
    const auto& p = seg.params;
    const Eigen::Index n = seg.size();
    if (n < 2) throw NotSteadyState("segment needs at least two samples");

    std::vector<Scalar> energy(n), power(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar a = bouncer_acceleration(p, seg.drive_omega, seg.x(k), seg.v(k), seg.t(k));
        energy[k] = p.m / Scalar(2) * seg.v(k) * seg.v(k);
        power[k] = p.m * seg.v(k) * a;
    }

    // kinetic energy at samples and at interior stationary points, in time order
    std::vector<Scalar> path;
    path.reserve(n + 8);
    const Scalar h = seg.dt;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const Scalar e0 = energy[k], e1 = energy[k + 1];
        const Scalar p0 = h * power[k], p1 = h * power[k + 1];
        path.push_back(e0);
        // dH/ds = a s^2 + b s + c on s in [0, 1]
        const Scalar qa = Scalar(6) * e0 + Scalar(3) * p0 - Scalar(6) * e1 + Scalar(3) * p1;
        const Scalar qb = Scalar(-6) * e0 - Scalar(4) * p0 + Scalar(6) * e1 - Scalar(2) * p1;
        const Scalar qc = p0;
        std::array<Scalar, 2> roots{};
        int nroots = 0;
        const Scalar scale = abs(qb) + abs(qc) + abs(qa);
        if (scale == Scalar(0)) continue;
        if (abs(qa) <= Scalar(1e-14) * scale) {
            if (qb != Scalar(0)) roots[nroots++] = -qc / qb;
        } else {
            const Scalar disc = qb * qb - Scalar(4) * qa * qc;
            if (disc >= Scalar(0)) {
                const Scalar sq = sqrt(disc);
                const Scalar q = qb >= Scalar(0) ? -(qb + sq) / Scalar(2) : -(qb - sq) / Scalar(2);
                if (q != Scalar(0)) {
                    roots[nroots++] = q / qa;
                    roots[nroots++] = qc / q;
                } else {
                    roots[nroots++] = Scalar(0);
                }
            }
        }
        std::sort(roots.begin(), roots.begin() + nroots);
        for (int i = 0; i < nroots; ++i) {
            const Scalar s = roots[i];
            if (!(s > Scalar(0) && s < Scalar(1))) continue;
            const Scalar s2 = s * s, s3 = s2 * s;
            const Scalar value = (Scalar(2) * s3 - Scalar(3) * s2 + Scalar(1)) * e0 +
                                 (s3 - Scalar(2) * s2 + s) * p0 +
                                 (Scalar(-2) * s3 + Scalar(3) * s2) * e1 + (s3 - s2) * p1;
            path.push_back(std::max(value, Scalar(0)));
        }
    }
    path.push_back(energy[n - 1]);

    HeatCycleLedger ledger;
    ledger.ekin_min = double(*std::min_element(path.begin(), path.end()));
    ledger.ekin_max = double(*std::max_element(path.begin(), path.end()));
    Scalar up{0}, down{0};
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Scalar delta = path[i + 1] - path[i];
        if (delta > Scalar(0))
            up += delta;
        else
            down -= delta;
    }
    ledger.absorbed = double(up);
    ledger.emitted = double(down);
    ledger.throughput = ledger.absorbed;
    return ledger;
}

/// Time for the slowest homogeneous mode to decay by e^-25.
template <typename Scalar>
Scalar settling_time(const PhysicalParams<Scalar>& p) {
    using std::sqrt;
    const Scalar rate = p.gamma > p.omega0
                            ? p.gamma - sqrt((p.gamma - p.omega0) * (p.gamma + p.omega0))
                            : p.gamma;
    return Scalar(25) / rate;
}

/// Integrates from rest past the settling time and returns the final full
/// period of the stationary regime at the given drive.
template <typename Scalar>
OscTrajectory<Scalar> steady_period(const PhysicalParams<Scalar>& p, Scalar omega,
                                    Scalar dt_fraction = Scalar(1000)) {
    using std::ceil;
    const Scalar period = Scalar(2) * std::numbers::pi_v<Scalar> / p.omega0;
    const Scalar periods = ceil(settling_time(p) / period) + Scalar(1);
    const auto traj =
        integrate_bouncer(p, omega, OscState<Scalar>{}, periods * period, period / dt_fraction);
    return last_period(traj);
}

}  // namespace subq
