#include "squidget/config.hpp"

#include <charconv>
#include <functional>
#include <map>

#include "squidget/error.hpp"

namespace squidget {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::kInvalidArgument, "invalid value '" + text + "' for config key '" + key + "'");
  }
  return value;
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

template <typename T>
Setter setter(T Config::*field) {
  return [field](Config& c, const std::string& key, const std::string& text) { c.*field = parse_number<T>(key, text); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"resample-n", setter(&Config::resample_n)},
      {"smoothing-iterations", setter(&Config::smoothing_iterations)},
      {"contour-samples", setter(&Config::contour_samples)},
      {"corner-resample-n", setter(&Config::corner_resample_n)},
      {"straw-window", setter(&Config::straw_window)},
      {"straw-threshold", setter(&Config::straw_threshold)},
      {"lambda", setter(&Config::lambda)},
      {"epsilon", setter(&Config::epsilon)},
      {"threshold", setter(&Config::threshold)},
      {"min-coverage", setter(&Config::min_coverage)},
      {"icp-max-iterations", setter(&Config::icp_max_iterations)},
      {"solver-window", setter(&Config::solver_window)},
      {"solver-tolerance", setter(&Config::solver_tolerance)},
      {"hold-ms", setter(&Config::hold_ms)},
      {"hold-radius", setter(&Config::hold_radius)},
  };
  return table;
}

bool in_range(const Config& c) {
  return c.resample_n >= 2 && c.smoothing_iterations >= 0 && c.contour_samples >= 3 && c.corner_resample_n >= 3 &&
         c.straw_window >= 1 && c.straw_threshold > 0 && c.lambda >= 0 && c.lambda <= 1 && c.epsilon > 0 &&
         c.threshold > 0 && c.min_coverage >= 0 && c.min_coverage <= 1 && c.icp_max_iterations >= 1 &&
         c.solver_window > 0 && c.solver_tolerance > 0 && c.hold_ms >= 0 && c.hold_radius >= 0;
}

}  // namespace

void apply_override(Config& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument, "config override must look like key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const auto it = setters().find(key);
  if (it == setters().end()) throw Error(ErrorKind::kInvalidArgument, "unknown config key '" + key + "'");
  Config next = config;
  it->second(next, key, assignment.substr(eq + 1));
  if (!in_range(next)) {
    throw Error(ErrorKind::kInvalidArgument, "value '" + assignment.substr(eq + 1) + "' out of range for config key '" + key + "'");
  }
  config = next;
}

void apply_overrides(Config& config, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) apply_override(config, a);
}

}  // namespace squidget
