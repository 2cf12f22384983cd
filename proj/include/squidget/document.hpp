#pragma once

#include <string>
#include <vector>

#include "squidget/config.hpp"
#include "squidget/registry.hpp"
#include "squidget/scene.hpp"

namespace squidget {

/// Scene, squidgets and configuration: the unit that is saved, replayed and
/// edited. Attribute access resolves object paths through the scene and
/// `squidget/<id>/w` through the registry.
struct Document {
  Scene scene;
  Registry registry;
  Config config;

  bool resolves(const AttributePath& path) const;
  AttributeRange range_of(const AttributePath& path) const;
  double get_attr(const AttributePath& path) const;
  AttributeChange set_attr(const AttributePath& path, double value);

  /// Selection entries are object ids or `squidget/<id>` for a continuous
  /// squidget's weight.
  AttributeSnapshot collect_attributes(const std::vector<std::string>& selection) const;

  Polyline to_world(const Polyline& screen) const;
  Polyline to_screen(const Polyline& world) const;
  Point2 to_world(const Point2& screen) const;

  CornerParams corner_params() const;

  /// Scene and registry invariant violations.
  std::vector<std::string> validate() const;

  bool operator==(const Document&) const = default;
};

}  // namespace squidget
