#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbf {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

// Metric failed the SPD guard somewhere on the grid.
struct SingularMetric : std::runtime_error {
  SingularMetric(const std::string& what, std::int64_t point, double ratio)
      : std::runtime_error(what), point(point), eig_ratio(ratio) {}
  std::int64_t point;
  double eig_ratio;  // min/max eigenvalue at the offending point
  static constexpr const char* name() { return "SingularMetric"; }
};

struct PressureError : std::runtime_error {
  enum class Kind { NoConvergence, NearSingularOperator, IncompatibleRHS };
  PressureError(Kind kind, const std::string& what, std::int64_t iterations,
                double residual, double margin)
      : std::runtime_error(what),
        kind(kind),
        iterations(iterations),
        residual(residual),
        margin(margin) {}
  Kind kind;
  std::int64_t iterations;
  double residual;
  double margin;
  const char* name() const {
    switch (kind) {
      case Kind::NoConvergence: return "NoConvergence";
      case Kind::NearSingularOperator: return "NearSingularOperator";
      case Kind::IncompatibleRHS: return "IncompatibleRHS";
    }
    return "PressureError";
  }
};

struct ProjectionDiverged : std::runtime_error {
  ProjectionDiverged(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations(iterations), residual(residual) {}
  int iterations;
  double residual;
  static constexpr const char* name() { return "ProjectionDiverged"; }
};

}  // namespace cbf
