#pragma once

#include <string>
#include <vector>

namespace squidget {

/// Tunables shared by the matching, solving and session layers. Serialized with
/// the scene document; every field can be overridden from the command line.
struct Config {
  // Curve fitting.
  int resample_n = 30;
  int smoothing_iterations = 2;
  int contour_samples = 64;

  // Corner detection (ShortStraw).
  int corner_resample_n = 64;
  int straw_window = 3;
  double straw_threshold = 0.95;

  // Selection scoring.
  double lambda = 0.7;
  double epsilon = 1e-9;
  /// No-selection threshold: a candidate must score at least as well as a curve
  /// whose per-point distance is this fraction of the stroke's bbox diagonal.
  double threshold = 0.25;
  double min_coverage = 0.05;
  int icp_max_iterations = 2000;

  // Scalar solver.
  double solver_window = 0.25;
  double solver_tolerance = 1e-4;

  // Session.
  int hold_ms = 300;
  double hold_radius = 4.0;

  bool operator==(const Config&) const = default;
};

/// Applies a `key=value` override. Throws Error(kInvalidArgument) on unknown keys
/// or unparsable or out-of-range values; `config` is left unchanged then.
void apply_override(Config& config, const std::string& assignment);
void apply_overrides(Config& config, const std::vector<std::string>& assignments);

}  // namespace squidget
