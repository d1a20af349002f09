#pragma once

// Model parameters and the closed-form constants derived from them.
//
// The library is unit-agnostic; every quantity is a pure number in whatever
// consistent unit system the caller picks. All types are templated on the
// scalar so the closed forms can be evaluated in extended precision or with
// automatic-differentiation scalars.

#include <cmath>
#include <numbers>
#include <optional>

#include "subq/errors.hpp"

namespace subq {

/// User-facing parameter set. gamma and zeta may be left unset when the
/// canonical coupling (gamma = zeta = 2 omega0) is requested.
template <typename Scalar>
struct ParamSpec {
    Scalar m{1};
    Scalar omega0{1};
    std::optional<Scalar> gamma;
    std::optional<Scalar> zeta;
    Scalar drive_amplitude{4};
    int n_dof{1};
    bool canonical{true};
    /// Zero-point kinetic energy per DOF. Only read in free (non-canonical) mode.
    Scalar zp_energy{0.5};

    bool operator==(const ParamSpec&) const = default;
};

/// Validated parameters of the coupled bouncer/walker model.
template <typename Scalar>
struct PhysicalParams {
    Scalar m{1};
    Scalar omega0{1};
    Scalar gamma{2};  ///< bouncer friction
    Scalar zeta{2};   ///< walker friction
    Scalar drive_amplitude{4};
    int n_dof{1};
    bool canonical{true};
    Scalar zp_energy{0.5};

    bool operator==(const PhysicalParams&) const = default;
};

template <typename Scalar>
struct DerivedConstants {
    Scalar r;          ///< stationary amplitude at resonance
    Scalar tau;        ///< period 2 pi / omega0
    Scalar hbar;       ///< m r^2 omega0
    Scalar e_zp;       ///< zero-point kinetic energy per DOF
    Scalar e_tot;      ///< 2 N e_zp
    Scalar e_bouncer;  ///< m omega0^2 r^2 / 2
    Scalar lambda;     ///< noise strength 4 zeta m e_zp
    Scalar diffusion;  ///< lambda / (2 zeta^2 m^2)

    /// Initial diffusive speed of a Gaussian preparation of width sigma0.
    Scalar u0_of(Scalar sigma0) const { return diffusion / sigma0; }
    /// "k T0" is only ever an alias for twice the zero-point energy.
    Scalar kT0() const { return Scalar(2) * e_zp; }

    bool operator==(const DerivedConstants&) const = default;
};

using Params = PhysicalParams<double>;
using Derived = DerivedConstants<double>;

namespace detail {

template <typename Scalar>
void require_positive(const Scalar& value, const char* field) {
    // written as !(v > 0) so NaN is rejected too
    if (!(value > Scalar(0))) throw NonPositiveParameter(field);
}

template <typename Scalar>
void require_finite(const Scalar& value, const char* field) {
    using std::isfinite;
    if (!isfinite(value)) throw NonPositiveParameter(field);
}

template <typename Scalar>
void check_fields(const PhysicalParams<Scalar>& p) {
    require_positive(p.m, "m");
    require_positive(p.omega0, "omega0");
    require_positive(p.gamma, "gamma");
    require_positive(p.zeta, "zeta");
    require_positive(p.drive_amplitude, "F0");
    require_positive(p.zp_energy, "e_zp");
    for (auto [v, name] : {std::pair{p.m, "m"}, {p.omega0, "omega0"}, {p.gamma, "gamma"},
                           {p.zeta, "zeta"}, {p.drive_amplitude, "F0"}, {p.zp_energy, "e_zp"}})
        require_finite(v, name);
    if (p.n_dof < 1) throw NonPositiveParameter("n_dof");
}

}  // namespace detail

/// Fills in the canonical frictions when requested and checks every field.
template <typename Scalar>
PhysicalParams<Scalar> validate_params(const ParamSpec<Scalar>& spec) {
    PhysicalParams<Scalar> p;
    p.m = spec.m;
    p.omega0 = spec.omega0;
    p.drive_amplitude = spec.drive_amplitude;
    p.n_dof = spec.n_dof;
    p.canonical = spec.canonical;
    p.zp_energy = spec.zp_energy;
    detail::require_positive(spec.omega0, "omega0");
    if (spec.canonical) {
        const Scalar target = Scalar(2) * spec.omega0;
        if ((spec.gamma && *spec.gamma != target) || (spec.zeta && *spec.zeta != target))
            throw CouplingMismatch("canonical coupling requires gamma == zeta == 2*omega0");
        p.gamma = target;
        p.zeta = target;
    } else {
        if (!spec.gamma || !spec.zeta)
            throw NonPositiveParameter(!spec.gamma ? "gamma" : "zeta");
        p.gamma = *spec.gamma;
        p.zeta = *spec.zeta;
    }
    detail::check_fields(p);
    return p;
}

/// Re-validates an already populated parameter set.
template <typename Scalar>
PhysicalParams<Scalar> validate_params(const PhysicalParams<Scalar>& p) {
    detail::require_positive(p.omega0, "omega0");
    if (p.canonical) {
        const Scalar target = Scalar(2) * p.omega0;
        if (p.gamma != target || p.zeta != target)
            throw CouplingMismatch("canonical coupling requires gamma == zeta == 2*omega0");
    }
    detail::check_fields(p);
    return p;
}

/// Drive amplitude that yields m r^2 omega0 == action for the given friction.
template <typename Scalar>
Scalar drive_for_action(Scalar m, Scalar omega0, Scalar gamma, Scalar action) {
    using std::sqrt;
    const Scalar r = sqrt(action / (m * omega0));
    return Scalar(2) * gamma * m * omega0 * r;
}

/// Canonically coupled parameters whose angular-momentum invariant equals `action`.
template <typename Scalar>
PhysicalParams<Scalar> canonical_params(Scalar m, Scalar omega0, Scalar action = Scalar(1)) {
    PhysicalParams<Scalar> p;
    p.m = m;
    p.omega0 = omega0;
    p.gamma = Scalar(2) * omega0;
    p.zeta = p.gamma;
    p.drive_amplitude = drive_for_action(m, omega0, p.gamma, action);
    p.n_dof = 1;
    p.canonical = true;
    return validate_params(p);
}

template <typename Scalar>
DerivedConstants<Scalar> derive_constants(const PhysicalParams<Scalar>& p) {
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    const Scalar n = Scalar(p.n_dof);

    DerivedConstants<Scalar> d;
    d.r = p.drive_amplitude / (Scalar(2) * p.gamma * p.m * p.omega0);
    d.tau = two_pi / p.omega0;
    d.hbar = p.m * d.r * d.r * p.omega0;
    d.e_bouncer = p.m * p.omega0 * p.omega0 * d.r * d.r / Scalar(2);
    d.e_zp = p.canonical ? d.hbar * p.omega0 / (Scalar(2) * n) : p.zp_energy;
    d.e_tot = Scalar(2) * n * d.e_zp;
    d.lambda = Scalar(4) * p.zeta * p.m * d.e_zp;
    d.diffusion = d.lambda / (Scalar(2) * p.zeta * p.zeta * p.m * p.m);
    return d;
}

}  // namespace subq
