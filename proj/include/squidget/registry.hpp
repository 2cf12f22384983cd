#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "squidget/geometry.hpp"
#include "squidget/scene.hpp"

namespace squidget {

struct Document;

/// Axis-aligned rectangle in world units.
struct Rect {
  Point2 min = Point2::Zero();
  Point2 max = Point2::Zero();

  double area() const;
  bool contains(const Point2& p) const;
  bool contains(const Polyline& p) const;
  /// Closed boundary, counter-clockwise from `min`.
  Polyline boundary() const;
  bool operator==(const Rect&) const = default;
};

struct Canvas {
  std::string id;
  Rect region;
  std::vector<AttributePath> attributes;
  int z_order = 0;

  bool operator==(const Canvas&) const = default;
};

/// A drawn curve bookmarking the values of its canvas attributes at creation.
struct DiscreteSquidget {
  std::string id;
  Polyline curve;  // world space
  std::string canvas;
  AttributeSnapshot snapshot;

  bool operator==(const DiscreteSquidget&) const = default;
};

/// An ordered chain of discrete squidgets blended by a weight w in [0, 1].
/// The weight is itself an attribute (`squidget/<id>/w`), so other squidgets
/// can drive it.
struct ContinuousSquidget {
  std::string id;
  std::vector<std::string> members;
  Polyline path;  // member midpoints, world space
  double weight = 0.0;

  bool operator==(const ContinuousSquidget&) const = default;
};

/// A corner-delimited piece of an object's contour, bound to that object's
/// transform and shape attributes. Regenerated from the scene on demand.
struct ImplicitSquidget {
  std::string id;  // "<object>#<contour>.<segment>"
  std::string object;
  int contour_index = 0;
  int segment_index = 0;
  Polyline segment;  // world space, resampled
  std::vector<AttributePath> bound;
};

AttributePath weight_path(std::string_view continuous_id);

/// Storage for canvases and explicit squidgets. Ids are unique across all three
/// collections and allocated from a single counter.
class Registry {
 public:
  const std::map<std::string, Canvas>& canvases() const { return canvases_; }
  const std::map<std::string, DiscreteSquidget>& discrete() const { return discrete_; }
  const std::map<std::string, ContinuousSquidget>& continuous() const { return continuous_; }

  bool contains(std::string_view id) const;
  const Canvas& canvas(std::string_view id) const;
  const DiscreteSquidget& discrete_squidget(std::string_view id) const;
  const ContinuousSquidget& continuous_squidget(std::string_view id) const;
  void set_weight(std::string_view continuous_id, double w);

  std::string allocate_id(std::string_view prefix);
  int next_id() const { return next_id_; }
  void set_next_id(int next) { next_id_ = next; }

  void add_canvas(Canvas canvas);
  void add_discrete(DiscreteSquidget squidget);
  /// Rejects (Error kCycle) a squidget that would close a cycle in the
  /// "drives the weight of" graph.
  void add_continuous(ContinuousSquidget squidget);

  /// Removes an id and everything depending on it: a canvas takes its discrete
  /// squidgets along, a discrete squidget takes the continuous squidgets it is
  /// a member of. Returns the removed ids; unknown ids remove nothing.
  std::vector<std::string> remove(std::string_view id);

  /// Continuous squidgets whose weights appear in the member snapshots of `cs`.
  std::vector<std::string> driven_by(const ContinuousSquidget& cs) const;
  bool would_cycle(const ContinuousSquidget& candidate) const;

  /// Highest-z canvas whose region holds every point of the world-space
  /// polyline; ties go to the smaller id.
  std::optional<std::string> topmost_canvas_containing(const Polyline& world) const;

  std::vector<std::string> validate() const;

  bool operator==(const Registry&) const = default;

 private:
  std::map<std::string, Canvas> canvases_;
  std::map<std::string, DiscreteSquidget> discrete_;
  std::map<std::string, ContinuousSquidget> continuous_;
  int next_id_ = 1;
};

struct Interpolated {
  Polyline curve;
  AttributeSnapshot snapshot;
};

/// Piecewise blend along the member chain: m members give m - 1 equal
/// segments of w. Attributes present in only one endpoint hold that value.
/// w is clamped to [0, 1]; member positions i / (m - 1) return member i exactly.
Interpolated interpolate(const Registry& registry, const ContinuousSquidget& cs, double w);

/// Maps (path segment, position within it) to the squidget weight.
double path_weight(std::size_t segment_count, std::size_t segment, double t);

const Canvas& create_canvas(Document& doc, const Rect& region, const std::vector<std::string>& selection);

/// Smooths, resamples and stores a screen-space stroke drawn on `canvas_id`,
/// bookmarking the canvas attributes' current values.
const DiscreteSquidget& create_discrete(Document& doc, const Polyline& stroke, std::string_view canvas_id);

/// Connects every discrete squidget the stroke crosses exactly once, in stroke
/// order. Error(kNotAConnectGesture) unless at least two qualify.
const ContinuousSquidget& create_continuous(Document& doc, const Polyline& stroke);

/// Removes every canvas boundary, discrete curve or continuous path the stroke
/// crosses at least twice (with cascades). Returns removed ids.
std::vector<std::string> delete_by_crossout(Document& doc, const Polyline& stroke);

enum class CreateGesture { kCrossOut, kConnect, kDiscrete };

std::string_view to_string(CreateGesture gesture);

/// Create-mode precedence: cross-out, then connect, then discrete creation.
CreateGesture classify_create_stroke(const Document& doc, const Polyline& stroke);

/// World-space corner-split pieces of each outline of `object`. Corners are
/// found in the object's own frame, so the split does not depend on its pose.
std::vector<std::vector<Polyline>> outline_pieces(const Scene& scene, std::string_view object, int samples,
                                                  const CornerParams& corners);

/// Corner-split contour segments of every non-group object.
std::vector<ImplicitSquidget> implicit_squidgets(const Document& doc);
std::vector<ImplicitSquidget> implicit_squidgets_of(const Document& doc, std::string_view object_id);
std::optional<ImplicitSquidget> find_implicit(const Document& doc, std::string_view id);

}  // namespace squidget
