#pragma once

#include <string>
#include <string_view>

#include "subq/stats.hpp"

namespace subq {

enum class CheckKind { algebraic, deterministic_numeric, statistical };

std::string_view to_string(CheckKind kind);

/// Default tolerances of the three check kinds.
inline constexpr double kAlgebraicTolerance = 1e-10;
inline constexpr double kNumericTolerance = 1e-6;
inline constexpr double kSigmaMultiple = 3.0;
inline constexpr double kStatisticalFloor = 1e-12;

/// Outcome of one verified relation.
struct CheckResult {
    std::string name;
    CheckKind kind{CheckKind::algebraic};
    double lhs{0};
    double rhs{0};
    double abs_error{0};
    double rel_error{0};
    double std_error{0};
    double tolerance{0};
    bool pass{false};
    bool applicable{true};
    std::string anchor;
    std::string note;
    double wall_seconds{0};
};

/// Passes iff rel_error <= tolerance.
CheckResult algebraic_check(std::string name, double lhs, double rhs, std::string anchor,
                            double tolerance = kAlgebraicTolerance);
CheckResult numeric_check(std::string name, double lhs, double rhs, std::string anchor,
                          double tolerance = kNumericTolerance);
/// Passes iff |lhs - rhs| <= max(3 stderr, 1e-12).
CheckResult statistical_check(std::string name, const EstimateWithError& lhs, double rhs,
                              std::string anchor);
/// A check that does not apply to the current configuration; counts as passed.
CheckResult not_applicable(std::string name, CheckKind kind, std::string anchor,
                           std::string reason);

}  // namespace subq
