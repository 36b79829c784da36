#pragma once
#include <stdexcept>
#include <string>

namespace hyplab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PointOutsideChart : Error {
    explicit PointOutsideChart(double norm)
        : Error("point outside the unit-disk chart, |x| = " + std::to_string(norm)) {}
};

struct ChartEscape : Error {
    using Error::Error;
};

struct BvpNoConvergence : Error {
    double best_residual;
    BvpNoConvergence(const std::string& what, double residual)
        : Error(what + " (best residual " + std::to_string(residual) + ")"),
          best_residual(residual) {}
};

struct NotEscaped : Error {
    using Error::Error;
};

struct EndpointMismatch : Error {
    double angle_error;
    EndpointMismatch(const std::string& what, double err)
        : Error(what), angle_error(err) {}
};

struct NotConverged : Error {
    using Error::Error;
};

struct HypothesisViolation : Error {
    double worst_x1, worst_x2, worst_value;
    HypothesisViolation(double x1, double x2, double value)
        : Error("curvature bound violated: K = " + std::to_string(value) +
                " at (" + std::to_string(x1) + ", " + std::to_string(x2) + ")"),
          worst_x1(x1), worst_x2(x2), worst_value(value) {}
};

struct NotEntrySphere : Error {
    using Error::Error;
};

struct SolverFailure : Error {
    using Error::Error;
};

struct PipelineStageFailure : Error {
    std::string stage;
    double residual;
    PipelineStageFailure(const std::string& stage_, double residual_)
        : Error("pipeline stage '" + stage_ + "' failed, residual " + std::to_string(residual_)),
          stage(stage_), residual(residual_) {}
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace hyplab
