#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/diagnostics.hpp"
#include "cbf/flow.hpp"
#include "cbf/oracle.hpp"

// Run configuration: a flat, typed key-value text format with [section]
// headers, '#' comments, and repeatable mode keys for the Fourier data of
// the initial-metric families. Parsing is strict (unknown keys and malformed
// values are errors anchored to their line number) and the format round-trips
// losslessly: parse(format(c)) reproduces every field bit-for-bit, doubles
// included (17 significant digits).

namespace cbf {

struct RunConfig {
  // [grid]
  int n = 4;
  std::vector<std::int64_t> sizes;   // n entries
  std::vector<double> periods;       // n entries

  // [initial] -- family parameters; n and periods mirror the grid section
  AnalyticFamily family;
  std::uint64_t seed = 0;  // recorded in artifacts for reproducibility

  // [flow]
  FlowVariant variant = FlowVariant::cbf;
  double s0 = 0.0;
  TimeScheme scheme = TimeScheme::rk2;
  double c_cfl = 0.05;
  double t_end = 0.0;
  std::int64_t max_steps = 0;
  int stencil_order = kDefaultStencilOrder;

  // [pressure]
  PressureOptions pressure;

  // [project]
  bool project = false;       // run project_constant_scalar on initial data
  double project_tol = 1e-8;
  int project_max_iterations = 40;

  // [output]
  std::string out_dir = "out";
  std::int64_t record_every = 1;
  int m_max = 2;
  std::int64_t checkpoint_every = 0;
  double shi_k = 0.0;  // 0: take K from the first record
  MonitorThresholds thresholds;

  // Cross-field validation (sizes/periods lengths, family parameters, value
  // ranges). Throws ConfigError; called by parse_config after assignment.
  void validate() const;
};

// Parse configuration text. Throws ConfigError with a "line N:" prefix for
// syntax errors and unknown keys.
RunConfig parse_config(const std::string& text);

// Read a file and parse it; the filename is included in error messages.
RunConfig load_config(const std::string& path);

// Serialize every field, defaults included, in canonical section order.
std::string format_config(const RunConfig& config);

// Adapters into the flow layer.
StepPolicy step_policy(const RunConfig& config);
RunOptions run_options(const RunConfig& config);

// The grid and sampled initial metric described by the config.
MetricField initial_metric(const RunConfig& config);

}  // namespace cbf
