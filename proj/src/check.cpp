#include "subq/check.hpp"

#include <algorithm>
#include <cmath>

namespace subq {

std::string_view to_string(CheckKind kind) {
    switch (kind) {
        case CheckKind::algebraic: return "algebraic";
        case CheckKind::deterministic_numeric: return "deterministic-numeric";
        case CheckKind::statistical: return "statistical";
    }
    return "unknown";
}

namespace {

CheckResult relative_check(std::string name, CheckKind kind, double lhs, double rhs,
                           std::string anchor, double tolerance) {
    CheckResult r;
    r.name = std::move(name);
    r.kind = kind;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_error = std::abs(lhs - rhs);
    r.rel_error = rhs != 0.0 ? r.abs_error / std::abs(rhs) : r.abs_error;
    r.tolerance = tolerance;
    r.pass = r.rel_error <= tolerance;
    r.anchor = std::move(anchor);
    return r;
}

}  // namespace

CheckResult algebraic_check(std::string name, double lhs, double rhs, std::string anchor,
                            double tolerance) {
    return relative_check(std::move(name), CheckKind::algebraic, lhs, rhs, std::move(anchor),
                          tolerance);
}

CheckResult numeric_check(std::string name, double lhs, double rhs, std::string anchor,
                          double tolerance) {
    return relative_check(std::move(name), CheckKind::deterministic_numeric, lhs, rhs,
                          std::move(anchor), tolerance);
}

CheckResult statistical_check(std::string name, const EstimateWithError& lhs, double rhs,
                              std::string anchor) {
    CheckResult r;
    r.name = std::move(name);
    r.kind = CheckKind::statistical;
    r.lhs = lhs.value;
    r.rhs = rhs;
    r.abs_error = std::abs(lhs.value - rhs);
    r.rel_error = rhs != 0.0 ? r.abs_error / std::abs(rhs) : r.abs_error;
    r.std_error = lhs.std_error;
    r.tolerance = std::max(kSigmaMultiple * lhs.std_error, kStatisticalFloor);
    r.pass = r.abs_error <= r.tolerance;
    r.anchor = std::move(anchor);
    return r;
}

CheckResult not_applicable(std::string name, CheckKind kind, std::string anchor,
                           std::string reason) {
    CheckResult r;
    r.name = std::move(name);
    r.kind = kind;
    r.pass = true;
    r.applicable = false;
    r.anchor = std::move(anchor);
    r.note = std::move(reason);
    return r;
}

}  // namespace subq
