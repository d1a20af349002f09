#pragma once

// Relation-checking engine: every identity of the model is evaluated either
// algebraically, against a deterministic integration, or against a Monte
// Carlo estimate, and collected into a report.

#include <cstdint>
#include <string>
#include <vector>

#include "subq/bouncer.hpp"
#include "subq/check.hpp"
#include "subq/config.hpp"
#include "subq/constants.hpp"
#include "subq/stats.hpp"
#include "json.hpp"

namespace subq {

struct Report {
    RunConfig config;
    Params params;
    Derived derived;
    std::uint64_t seed{};
    std::vector<CheckResult> checks;
    bool overall_pass{false};

    const CheckResult* find(std::string_view name) const;
};

/// (m/2) <u^2> of an equilibrium walker ensemble against E_zp.
CheckResult check_equipartition(const EstimateWithError& msv, const Params& p, const Derived& d);

/// lambda == 4 zeta m E_zp.
CheckResult check_einstein(const Params& p, const Derived& d);

/// Fitted D against lambda / (2 zeta^2 m^2), plus D == hbar/(2m) (closed
/// form and fitted) when the canonical coupling holds in one dimension.
std::vector<CheckResult> check_diffusion(const EstimateWithError& fitted, const Params& p,
                                         const Derived& d);

/// n W_bouncer == W_walker(n).
CheckResult check_work_matching(const Params& p, const Derived& d, int n);

/// E_tot == 2 N E_zp == hbar omega0 == 2 E_bouncer.
CheckResult check_total_energy(const Params& p, const Derived& d);

/// gamma == zeta == 2 omega0.
CheckResult check_coupling(const Params& p);

/// Friction and Boltzmann heat gradients coincide on a grid of positions.
CheckResult check_heat_gradient(const Params& p, const Derived& d);

/// Heat absorbed per period == hbar omega0 and peak kinetic energy == hbar omega0 / 2.
CheckResult check_entropic_cycle(const HeatCycleLedger& ledger, const Params& p,
                                 const Derived& d);

/// Runs the whole pipeline. Results are identical for any thread count.
Report run_all(const RunConfig& cfg, unsigned threads = 1);

/// Names of the checks that test the bouncer/walker coupling itself; these
/// are the only ones expected to fail for non-canonical parameters.
const std::vector<std::string>& coupling_family();

nlohmann::ordered_json to_json(const Report& report);

}  // namespace subq
