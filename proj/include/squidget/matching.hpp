#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "squidget/document.hpp"

namespace squidget {

enum class SquidgetKind { kDiscrete, kContinuous, kImplicit };

std::string_view to_string(SquidgetKind kind);

enum class FitMode { kRigid, kSimilarity };

/// Result of fitting an implicit squidget's segment to a stroke.
struct ImplicitFit {
  Similarity2 screen;  ///< moves the segment onto the stroke, screen space
  Similarity2 local;   ///< the same motion in the object's local frame
  Polyline partial;    ///< stroke points projected onto the (unmoved) segment, screen space
  double distance = 0.0;
  double dev = 0.0;       ///< squared norm of the local translation
  double coverage = 0.0;  ///< fraction of the segment the projections span
  int iterations = 0;
};

struct ContinuousFit {
  double w = 0.0;
  double distance = 0.0;
  bool crossed = false;  ///< w came from the stroke crossing the path
};

struct MatchResult {
  std::string id;
  SquidgetKind kind = SquidgetKind::kDiscrete;
  double distance = 0.0;
  double dev = 0.0;
  double score = 0.0;
  /// none for discrete, w for continuous, the fit for implicit squidgets.
  std::variant<std::monostate, double, ImplicitFit> payload;
};

struct MatchOptions {
  /// Translate stroke and curves to their centroids before comparing
  /// explicit squidgets.
  bool shape_only = false;
  FitMode fit = FitMode::kRigid;
};

/// Strokes passed to this module are raw screen-space polylines.
double match_discrete(const Polyline& stroke, const DiscreteSquidget& squidget, const Document& doc, bool centered);

ContinuousFit match_continuous(const Polyline& stroke, const ContinuousSquidget& squidget, const Document& doc,
                               bool centered);

/// Least-squares weight for an already resampled screen-space stroke, ignoring
/// path crossings: each member pair (P, Q) is solved in closed form for
/// u = sum (s - p).(q - p) / sum |q - p|^2, clamped, trying both stroke
/// directions; the best pair wins.
ContinuousFit best_weight(const Polyline& resampled, const ContinuousSquidget& squidget, const Document& doc,
                          bool centered);

/// Iterated closest-point fit of the segment onto the stroke. Returns nothing
/// when the projections collapse or cover too little of the segment.
std::optional<ImplicitFit> match_implicit(const Polyline& stroke, const ImplicitSquidget& squidget, const Document& doc,
                                          FitMode fit = FitMode::kRigid);

double explicit_score(double distance, const Config& config);
double implicit_score(double distance, double dev, const Config& config);

/// Score a candidate must reach to be selected for this stroke.
double selection_threshold(const Polyline& stroke, const Config& config);

/// Every candidate the stroke may select, best first. Scores within a relative
/// 1e-9 of each other tie; ties go to the smaller rotation and scale change,
/// then the smaller id.
/// Strokes entirely inside a canvas only see that canvas's squidgets.
std::vector<MatchResult> rank_candidates(const Polyline& stroke, const Document& doc, const MatchOptions& options = {});

std::optional<MatchResult> select(const Polyline& stroke, const Document& doc, const MatchOptions& options = {});

/// Re-evaluates one known squidget against a stroke (used for the second stroke
/// of a two-stroke interaction). Nothing if the squidget no longer exists or
/// the fit degenerates.
std::optional<MatchResult> match_one(const Polyline& stroke, const Document& doc, std::string_view id,
                                     SquidgetKind kind, const MatchOptions& options = {});

}  // namespace squidget
