#include "squidget/document.hpp"

#include <sstream>

#include "squidget/error.hpp"

namespace squidget {

namespace {

bool is_weight_path(const AttributePath& path) {
  const auto& seg = path.segments();
  return seg.size() == 3 && seg[0] == "squidget" && seg[2] == "w";
}

}  // namespace

bool Document::resolves(const AttributePath& path) const {
  if (is_weight_path(path)) return registry.continuous().contains(path.segments()[1]);
  return scene.resolves(path);
}

AttributeRange Document::range_of(const AttributePath& path) const {
  if (is_weight_path(path)) {
    if (!resolves(path)) throw Error(ErrorKind::kUnknownAttribute, "unknown attribute: '" + path.str() + "'");
    return {AttributeRange::Kind::kClosed, 0.0, 1.0};
  }
  return scene.range_of(path);
}

double Document::get_attr(const AttributePath& path) const {
  if (is_weight_path(path)) {
    if (!resolves(path)) throw Error(ErrorKind::kUnknownAttribute, "unknown attribute: '" + path.str() + "'");
    return registry.continuous_squidget(path.segments()[1]).weight;
  }
  return scene.get_attr(path);
}

AttributeChange Document::set_attr(const AttributePath& path, double value) {
  if (!is_weight_path(path)) return scene.set_attr(path, value);
  const auto range = range_of(path);
  if (!range.admits(value)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "range violation: " << path.str() << " = " << value << " outside [0, 1]";
    throw Error(ErrorKind::kRangeViolation, msg.str());
  }
  const double old_value = get_attr(path);
  registry.set_weight(path.segments()[1], value);
  return {path, old_value, value};
}

AttributeSnapshot Document::collect_attributes(const std::vector<std::string>& selection) const {
  std::vector<std::string> objects;
  AttributeSnapshot weights;
  for (const auto& entry : selection) {
    if (entry.starts_with("squidget/")) {
      const AttributePath path = weight_path(entry.substr(9));
      weights[path] = get_attr(path);
    } else {
      objects.push_back(entry);
    }
  }
  AttributeSnapshot snapshot = scene.collect_attributes(objects);
  snapshot.merge(weights);
  return snapshot;
}

Polyline Document::to_world(const Polyline& screen) const { return transformed(screen, scene.view().inverse()); }

Polyline Document::to_screen(const Polyline& world) const { return transformed(world, scene.view()); }

Point2 Document::to_world(const Point2& screen) const { return scene.view().inverse().apply(screen); }

CornerParams Document::corner_params() const {
  return {config.corner_resample_n, config.straw_window, config.straw_threshold};
}

std::vector<std::string> Document::validate() const {
  auto problems = scene.validate();
  for (auto& p : registry.validate()) problems.push_back(std::move(p));
  for (const auto& [id, canvas] : registry.canvases()) {
    for (const auto& path : canvas.attributes) {
      if (!resolves(path)) problems.push_back("canvas '" + id + "' references unknown attribute '" + path.str() + "'");
    }
  }
  for (const auto& [id, d] : registry.discrete()) {
    for (const auto& [path, value] : d.snapshot) {
      if (resolves(path) && !range_of(path).admits(value)) {
        problems.push_back("range violation: squidget '" + id + "' stores out-of-range " + path.str());
      }
    }
  }
  if (config.resample_n < 2) problems.push_back("config resample_n must be at least 2");
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) problems.push_back("config lambda must lie in [0, 1]");
  if (!(config.epsilon > 0.0)) problems.push_back("config epsilon must be positive");
  if (config.hold_ms < 0) problems.push_back("config hold_ms must be non-negative");
  return problems;
}

}  // namespace squidget
