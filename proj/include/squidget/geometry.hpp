#pragma once

// 2D curve kernels: resampling, correspondence distances, crossings, rigid
// registration, corner finding and projection. Everything here is a pure
// function over values.

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace squidget {

using Point2 = Eigen::Vector2d;

/// Ordered point list. Strokes, squidget curves, contours and continuous paths
/// all use this representation. A polyline is closed when its last point
/// repeats its first.
using Polyline = std::vector<Point2>;

/// Rotation (radians, normalized to (-pi, pi]) followed by translation.
struct RigidTransform2 {
  double rotation = 0.0;
  Point2 translation = Point2::Zero();

  Point2 apply(const Point2& p) const;
  RigidTransform2 inverse() const;
  /// (*this) after `rhs`: x -> this(rhs(x)).
  RigidTransform2 operator*(const RigidTransform2& rhs) const;
  bool operator==(const RigidTransform2&) const = default;
};

/// Uniform scale, rotation, translation: x -> translation + scale * R(rotation) x.
/// Object-to-screen transforms are always of this form.
struct Similarity2 {
  double rotation = 0.0;
  double scale = 1.0;
  Point2 translation = Point2::Zero();

  static Similarity2 from_rigid(const RigidTransform2& rigid);

  Point2 apply(const Point2& p) const;
  Point2 apply_linear(const Point2& v) const;
  Similarity2 inverse() const;
  Similarity2 operator*(const Similarity2& rhs) const;
  bool operator==(const Similarity2&) const = default;
};

/// Wraps an angle into (-pi, pi]. Values already in range are returned unchanged
/// (bitwise), so stored angles round-trip exactly.
double wrap_angle(double radians);

bool is_finite(const Point2& p);
bool is_closed(const Polyline& p);

double arc_length(const Polyline& p);
/// Cumulative arc length at every vertex; front() == 0.
std::vector<double> cumulative_length(const Polyline& p);

Point2 centroid(const Polyline& p);
double bbox_diagonal(const Polyline& p);
Polyline reversed(Polyline p);
Polyline transformed(const Polyline& p, const RigidTransform2& t);
Polyline transformed(const Polyline& p, const Similarity2& t);

/// Removes consecutive duplicates (within 1e-9) and non-finite points. Throws
/// Error(kDegenerateCurve) if fewer than two distinct points remain.
Polyline sanitize_stroke(const Polyline& raw);

/// n points uniformly spaced by arc length; endpoints copied exactly.
Polyline resample(const Polyline& p, int n);

/// Corner-cutting (Chaikin) smoothing; endpoints are kept exactly.
Polyline smooth(const Polyline& p, int iterations);

/// Sum of squared distances between corresponding points. With `centered`, both
/// point sets are first moved so their centroids sit at the origin.
double pairwise_dist(const Polyline& s, const Polyline& c, bool centered);

/// pairwise_dist against both `s` and reverse(`s`), whichever is smaller.
double dist_min_reverse(const Polyline& s, const Polyline& c, bool centered);

struct Crossing {
  Point2 point;
  double arc_a = 0.0;  ///< arc length along the first polyline
  double arc_b = 0.0;  ///< arc length along the second polyline
  std::size_t segment_b = 0;
  double t_b = 0.0;  ///< position within segment_b, in [0, 1]
};

/// Intersections between two polylines ordered by position along `a`. Hits at a
/// shared vertex are reported once and a collinear overlap is a single crossing.
std::vector<Crossing> crossings(const Polyline& a, const Polyline& b);
int count_crossings(const Polyline& a, const Polyline& b);

/// Least-squares rotation + translation taking `source` onto `target`.
/// Throws Error(kRankDeficient) if the source points all coincide.
RigidTransform2 best_fit_rigid(const Polyline& source, const Polyline& target);

/// As best_fit_rigid, plus a uniform scale equal to the ratio of the RMS
/// centered radii of target and source.
Similarity2 best_fit_similarity(const Polyline& source, const Polyline& target);

/// Sum of squared distances between target and the transformed source.
double fit_residual(const Polyline& source, const Polyline& target, const RigidTransform2& t);

struct CornerParams {
  int resample_n = 64;
  int window = 3;
  double threshold = 0.95;
};

/// ShortStraw corner finder. Returns sorted indices into resample(p, resample_n).
/// On closed polylines the straw window wraps around and every index is eligible.
std::vector<int> detect_corners(const Polyline& p, const CornerParams& params = {});

/// Splits `p` at its corners. Corner positions snap to a vertex of `p` when one
/// lies within a resample spacing, so polygon sides come out exact. A closed
/// curve without corners is returned whole.
std::vector<Polyline> split_at_corners(const Polyline& p, const CornerParams& params = {});

/// Sub-curve between two arc-length positions. On closed curves `from > to`
/// wraps through the start point.
Polyline extract_arc(const Polyline& p, double from, double to);

struct Projection {
  Point2 point;
  double parameter = 0.0;  ///< normalized arc length in [0, 1]
  std::size_t segment = 0;
  double t = 0.0;  ///< position within `segment`, in [0, 1]
  double distance_sq = 0.0;
};

/// Closest point on `p`; ties go to the smallest arc-length parameter.
Projection project_to_polyline(const Point2& q, const Polyline& p);

}  // namespace squidget
