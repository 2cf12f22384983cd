#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "squidget/document.hpp"
#include "squidget/matching.hpp"

namespace squidget {

/// Ordered attribute writes plus anything skipped on the way. Undoing walks the
/// changes backwards restoring `old_value`.
struct AttributeUpdate {
  std::vector<AttributeChange> changes;
  std::vector<std::string> warnings;

  bool empty() const { return changes.empty(); }
  void append(const AttributeUpdate& later);
};

/// One record per path: the first old value and the last new value, in the
/// order paths were first touched. Used to fold a drag into a single undo step.
AttributeUpdate coalesce(const AttributeUpdate& earlier, const AttributeUpdate& later);

void revert(Document& doc, const AttributeUpdate& update);
void reapply(Document& doc, const AttributeUpdate& update);

enum class Constraint { kFull, kTranslateOnly, kRotateOnly, kScale };

std::string_view to_string(Constraint constraint);

/// Writes every resolvable entry; stale paths and out-of-range values are
/// skipped with a warning.
AttributeUpdate apply_snapshot(Document& doc, const AttributeSnapshot& snapshot);

AttributeUpdate apply_discrete(Document& doc, std::string_view id);

/// Applies the blended snapshot, then the squidget's own weight, then every
/// continuous squidget whose weight the snapshot just set (nested driving).
AttributeUpdate apply_continuous(Document& doc, std::string_view id, double w);

/// Sets the object's pose to `base * local_delta`, after dropping the parts of
/// `local_delta` the constraint excludes. kScale keeps the full similarity;
/// the other modes force unit scale.
AttributeUpdate apply_implicit_transform(Document& doc, std::string_view object, const LocalTransform& base,
                                         Similarity2 local_delta, Constraint constraint);

/// Dispatches on the match kind.
AttributeUpdate apply_match(Document& doc, const MatchResult& match, Constraint constraint = Constraint::kFull);

/// Contour piece of `imp` regenerated with `path` set to `value`, screen space,
/// resampled like the original segment.
Polyline regenerate_segment(const Document& doc, const ImplicitSquidget& imp, const AttributePath& path, double value);

/// g(v): centered distance between the resampled stroke and the regenerated
/// segment.
class ScalarObjective {
 public:
  ScalarObjective(const Document& doc, const Polyline& stroke, ImplicitSquidget imp, AttributePath path);
  double operator()(double value) const;
  /// Search interval around the current value, clipped to the declared range.
  std::pair<double, double> window() const { return window_; }
  double start() const { return start_; }

 private:
  const Document* doc_;
  Polyline stroke_;
  ImplicitSquidget imp_;
  AttributePath path_;
  double start_ = 0.0;
  std::pair<double, double> window_;
};

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search down to `tolerance`, then parabolic steps through the
/// three best samples. The returned point is the best sample seen; `extra`
/// points (e.g. the start value) are always sampled.
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                              const std::vector<double>& extra = {});

/// The object's contour piece or whole outline (segment_index -1, id
/// "<object>#<contour>") whose shape, centroids aligned and scaled to unit RMS
/// radius, is closest to the stroke. Nothing for objects without a contour.
std::optional<ImplicitSquidget> closest_segment(const Document& doc, const Polyline& stroke, std::string_view object);

struct ScalarSolution {
  double value = 0.0;
  double start = 0.0;
  double residual = 0.0;
  double start_residual = 0.0;
  AttributeUpdate update;
};

/// Searches `path` (a ranged shape parameter of the squidget's object) for the
/// value whose regenerated segment best fits the stroke and writes it.
/// Error(kUnboundedAttribute) when the range gives no finite interval.
ScalarSolution solve_scalar(Document& doc, const Polyline& stroke, const ImplicitSquidget& imp,
                            const AttributePath& path);

/// A held match being refined by pointer motion.
struct DragState {
  MatchResult match;
  Constraint constraint = Constraint::kFull;
  Point2 origin = Point2::Zero();  ///< pointer where the hold began, screen space
  LocalTransform base;             ///< implicit: object pose before the stroke
  Similarity2 to_screen;           ///< implicit: object local-to-screen before the stroke
  Similarity2 screen_fit;          ///< implicit: the stroke's solved screen transform
};

/// `doc` must be in the pre-stroke state for implicit matches.
DragState begin_drag(const Document& doc, const MatchResult& match, const Point2& origin, Constraint constraint);

/// Continuous: w follows the pointer's projection onto the path. Implicit: the
/// solved transform is shifted by the pointer's motion since the hold began.
/// Discrete: nothing to refine.
AttributeUpdate drag_update(Document& doc, const DragState& drag, const Point2& pointer);

}  // namespace squidget
