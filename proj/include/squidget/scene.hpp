#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "squidget/geometry.hpp"

namespace squidget {

/// Slash-separated attribute address, e.g. `lamp/transform/tx` or
/// `lamp/shape/cone-angle`.
class AttributePath {
 public:
  AttributePath() = default;
  explicit AttributePath(std::vector<std::string> segments);

  /// Throws Error(kUnknownAttribute) on empty input or empty segments.
  static AttributePath parse(std::string_view text);

  const std::vector<std::string>& segments() const { return segments_; }
  const std::string& front() const { return segments_.front(); }
  bool empty() const { return segments_.empty(); }
  std::string str() const;

  auto operator<=>(const AttributePath&) const = default;
  bool operator==(const AttributePath&) const = default;

 private:
  std::vector<std::string> segments_;
};

using AttributeSnapshot = std::map<AttributePath, double>;

/// Declared domain of a scalar attribute.
struct AttributeRange {
  enum class Kind {
    kUnbounded,
    kPositive,  ///< (0, inf)
    kOpen,      ///< (lo, hi)
    kClosed,    ///< [lo, hi]
    kAngle,     ///< any finite value, stored wrapped to (-pi, pi]
  };
  Kind kind = Kind::kUnbounded;
  double lo = 0.0;
  double hi = 0.0;

  /// True when the range gives the 1-D solver a finite search interval.
  bool bounded() const;
  double width() const;
  bool admits(double value) const;
  /// Canonical stored form of an admitted value (wraps angles).
  double normalize(double value) const;
};

/// One recorded scalar write; enough to undo or redo it.
struct AttributeChange {
  AttributePath path;
  double old_value = 0.0;
  double new_value = 0.0;
};

enum class ObjectKind { kPolygon, kEllipse, kSpotlight, kFigure, kGroup };

std::string_view to_string(ObjectKind kind);
ObjectKind object_kind_from_string(std::string_view text);

struct LocalTransform {
  double tx = 0.0;
  double ty = 0.0;
  double rotation = 0.0;
  double scale = 1.0;

  Similarity2 as_similarity() const { return {rotation, scale, Point2(tx, ty)}; }
  bool operator==(const LocalTransform&) const = default;
};

/// A manipulable scene element. Shape parameters are kind specific:
///  - ellipse: radius-x, radius-y
///  - spotlight: cone-angle (half angle, radians), height (apex to ground line)
///  - figure: width plus limb-<k>-length / limb-<k>-angle for each limb k
///  - polygon: none; its outline is `vertices`
///  - group: none
struct SceneObject {
  std::string id;
  ObjectKind kind = ObjectKind::kGroup;
  LocalTransform transform;
  std::map<std::string, double> shape;
  Polyline vertices;
  std::optional<std::string> parent;

  bool operator==(const SceneObject&) const = default;
};

/// Vertical squash applied to the spotlight's ground-plane hot-spot when it is
/// drawn into the 2D scene.
inline constexpr double kGroundForeshortening = 0.35;

int figure_limb_count(const SceneObject& object);

class Scene {
 public:
  /// Checks ids, parent links and the shape-parameter set for the kind. Values
  /// are not range-checked here; see validate().
  void add_object(SceneObject object);

  const std::vector<SceneObject>& objects() const { return objects_; }
  bool has_object(std::string_view id) const;
  const SceneObject& object(std::string_view id) const;

  const Similarity2& view() const { return view_; }
  /// Throws Error(kRangeViolation) unless the view scale is positive and finite.
  void set_view(const Similarity2& view);

  bool resolves(const AttributePath& path) const;
  AttributeRange range_of(const AttributePath& path) const;
  double get_attr(const AttributePath& path) const;
  /// Writes one scalar and returns the change record. Throws Error on an
  /// unresolvable path or a value outside the declared range.
  AttributeChange set_attr(const AttributePath& path, double value);

  /// Attribute paths owned by one object (not its descendants).
  std::vector<AttributePath> attribute_paths(std::string_view id) const;
  /// Shape-parameter paths only.
  std::vector<AttributePath> shape_paths(std::string_view id) const;
  std::vector<std::string> children(std::string_view id) const;

  /// Every scalar attribute of the selected objects and their descendants.
  AttributeSnapshot collect_attributes(const std::vector<std::string>& selection) const;

  Similarity2 local_to_world(std::string_view id) const;
  Similarity2 local_to_screen(std::string_view id) const;

  /// World-space outlines of one object; closed outlines repeat their first
  /// point. `samples` is the point count of each sampled ellipse or capsule.
  std::vector<Polyline> contour(std::string_view id, int samples = 64) const;
  /// The same outlines in the object's own frame, before any transform.
  std::vector<Polyline> local_outlines(std::string_view id, int samples = 64) const;

  /// Invariant violations (empty when the scene is valid).
  std::vector<std::string> validate() const;

  bool operator==(const Scene&) const = default;

 private:
  SceneObject& mutable_object(std::string_view id);
  std::vector<Polyline> local_contour(const SceneObject& object, int samples) const;

  std::vector<SceneObject> objects_;
  Similarity2 view_;
};

}  // namespace squidget
