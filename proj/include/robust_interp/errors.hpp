#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robust_interp {

enum class ErrorCode {
    DegenerateInput,
    EvaluationAtPole,
    BoundaryRoot,
    RepeatedRoot,
    SingularPoint,
    CurveTooCoarse,
    CenterOnCurve,
    UnsupportedCurve,
    ParamsOutOfBox,
    InvalidFamily,
    ShiftTouchesRegion,
    QuadratureFailure,
    FloorNotPositive,
    FitInfeasible,
    OvershootExcessive,
    NodeCollision,
    InfeasibleData,
    IllConditioned,
    AssumptionViolation,
    Infeasible,
    CancellationFailure,
    GridTooNarrow,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; code() identifies the
// condition so callers (and tests) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace robust_interp
