#include "squidget/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "squidget/error.hpp"

namespace squidget {

namespace {

constexpr double kDedupTolerance = 1e-9;

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Matrix2d rotation_matrix(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

// Arc length -> point, with exact vertex hits returning the vertex itself.
Point2 point_at(const Polyline& p, const std::vector<double>& cum, double s) {
  if (s <= 0.0) return p.front();
  if (s >= cum.back()) return p.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - cum.begin()) - 1;
  const double len = cum[j + 1] - cum[j];
  if (len <= 0.0) return p[j];
  const double t = (s - cum[j]) / len;
  return p[j] + t * (p[j + 1] - p[j]);
}

struct CrossingEvent {
  double s0;
  double s1;
  Point2 p0;
  Point2 p1;
  std::size_t segment_b;
  double t_b;
  double arc_b;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

double wrap_angle(double radians) {
  constexpr double pi = std::numbers::pi;
  if (radians > -pi && radians <= pi) return radians;
  double r = std::remainder(radians, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

Point2 RigidTransform2::apply(const Point2& p) const {
  return rotation_matrix(rotation) * p + translation;
}

RigidTransform2 RigidTransform2::inverse() const {
  return {wrap_angle(-rotation), -(rotation_matrix(-rotation) * translation)};
}

RigidTransform2 RigidTransform2::operator*(const RigidTransform2& rhs) const {
  return {wrap_angle(rotation + rhs.rotation), rotation_matrix(rotation) * rhs.translation + translation};
}

Similarity2 Similarity2::from_rigid(const RigidTransform2& rigid) {
  return {rigid.rotation, 1.0, rigid.translation};
}

Point2 Similarity2::apply(const Point2& p) const { return apply_linear(p) + translation; }

Point2 Similarity2::apply_linear(const Point2& v) const { return scale * (rotation_matrix(rotation) * v); }

Similarity2 Similarity2::inverse() const {
  const double inv_scale = 1.0 / scale;
  return {wrap_angle(-rotation), inv_scale, -(inv_scale * (rotation_matrix(-rotation) * translation))};
}

Similarity2 Similarity2::operator*(const Similarity2& rhs) const {
  return {wrap_angle(rotation + rhs.rotation), scale * rhs.scale, apply_linear(rhs.translation) + translation};
}

bool is_finite(const Point2& p) { return std::isfinite(p.x()) && std::isfinite(p.y()); }

bool is_closed(const Polyline& p) {
  return p.size() >= 3 && (p.front() - p.back()).norm() <= kDedupTolerance;
}

double arc_length(const Polyline& p) {
  double total = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) total += (p[i] - p[i - 1]).norm();
  return total;
}

std::vector<double> cumulative_length(const Polyline& p) {
  std::vector<double> cum(p.size(), 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) cum[i] = cum[i - 1] + (p[i] - p[i - 1]).norm();
  return cum;
}

Point2 centroid(const Polyline& p) {
  Point2 sum = Point2::Zero();
  for (const auto& q : p) sum += q;
  return p.empty() ? sum : Point2(sum / static_cast<double>(p.size()));
}

double bbox_diagonal(const Polyline& p) {
  if (p.empty()) return 0.0;
  Point2 lo = p.front();
  Point2 hi = p.front();
  for (const auto& q : p) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  return (hi - lo).norm();
}

Polyline reversed(Polyline p) {
  std::reverse(p.begin(), p.end());
  return p;
}

Polyline transformed(const Polyline& p, const RigidTransform2& t) {
  Polyline out;
  out.reserve(p.size());
  for (const auto& q : p) out.push_back(t.apply(q));
  return out;
}

Polyline transformed(const Polyline& p, const Similarity2& t) {
  Polyline out;
  out.reserve(p.size());
  for (const auto& q : p) out.push_back(t.apply(q));
  return out;
}

Polyline sanitize_stroke(const Polyline& raw) {
  Polyline out;
  out.reserve(raw.size());
  for (const auto& q : raw) {
    if (!is_finite(q)) continue;
    if (!out.empty() && (q - out.back()).norm() <= kDedupTolerance) continue;
    out.push_back(q);
  }
  if (out.size() < 2) throw Error(ErrorKind::kDegenerateCurve, "degenerate curve");
  return out;
}

Polyline resample(const Polyline& p, int n) {
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "resample count must be at least 2");
  if (p.size() < 2) throw Error(ErrorKind::kDegenerateCurve, "degenerate curve");
  const auto cum = cumulative_length(p);
  const double total = cum.back();
  if (!(total > 0.0)) throw Error(ErrorKind::kDegenerateCurve, "degenerate curve");

  Polyline out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(p.front());
  for (int k = 1; k < n - 1; ++k) {
    out.push_back(point_at(p, cum, total * static_cast<double>(k) / static_cast<double>(n - 1)));
  }
  out.push_back(p.back());
  return out;
}

Polyline smooth(const Polyline& p, int iterations) {
  Polyline current = p;
  for (int it = 0; it < iterations && current.size() >= 3; ++it) {
    Polyline next;
    next.reserve(2 * current.size());
    next.push_back(current.front());
    for (std::size_t i = 0; i + 1 < current.size(); ++i) {
      next.push_back(0.75 * current[i] + 0.25 * current[i + 1]);
      next.push_back(0.25 * current[i] + 0.75 * current[i + 1]);
    }
    next.push_back(current.back());
    current = std::move(next);
  }
  return current;
}

double pairwise_dist(const Polyline& s, const Polyline& c, bool centered) {
  if (s.size() != c.size()) throw Error(ErrorKind::kCountMismatch, "count mismatch");
  const Point2 offset = centered ? Point2(centroid(c) - centroid(s)) : Point2::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += (s[i] + offset - c[i]).squaredNorm();
  return total;
}

double dist_min_reverse(const Polyline& s, const Polyline& c, bool centered) {
  return std::min(pairwise_dist(s, c, centered), pairwise_dist(reversed(s), c, centered));
}

std::vector<Crossing> crossings(const Polyline& a, const Polyline& b) {
  std::vector<Crossing> result;
  if (a.size() < 2 || b.size() < 2) return result;

  const auto cum_a = cumulative_length(a);
  const auto cum_b = cumulative_length(b);
  const double scale = std::max({1.0, bbox_diagonal(a), bbox_diagonal(b)});
  const double point_tol = 1e-9 * scale;
  constexpr double param_tol = 1e-12;

  std::vector<CrossingEvent> events;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const Point2 a0 = a[i];
    const Point2 r = a[i + 1] - a0;
    const double r_len = r.norm();
    if (r_len <= 0.0) continue;
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      const Point2 b0 = b[j];
      const Point2 s = b[j + 1] - b0;
      const double s_len = s.norm();
      if (s_len <= 0.0) continue;
      // Cheap reject on bounding boxes.
      if (std::max(a0.x(), a[i + 1].x()) < std::min(b0.x(), b[j + 1].x()) - point_tol ||
          std::max(b0.x(), b[j + 1].x()) < std::min(a0.x(), a[i + 1].x()) - point_tol ||
          std::max(a0.y(), a[i + 1].y()) < std::min(b0.y(), b[j + 1].y()) - point_tol ||
          std::max(b0.y(), b[j + 1].y()) < std::min(a0.y(), a[i + 1].y()) - point_tol) {
        continue;
      }
      const Point2 qp = b0 - a0;
      const double denom = cross(r, s);
      if (std::abs(denom) > 1e-12 * r_len * s_len) {
        const double t = cross(qp, s) / denom;
        const double u = cross(qp, r) / denom;
        if (t < -param_tol || t > 1.0 + param_tol || u < -param_tol || u > 1.0 + param_tol) continue;
        const double tc = std::clamp(t, 0.0, 1.0);
        const double uc = std::clamp(u, 0.0, 1.0);
        const Point2 hit = a0 + tc * r;
        const double sa = cum_a[i] + tc * r_len;
        events.push_back({sa, sa, hit, hit, j, uc, cum_b[j] + uc * s_len});
        continue;
      }
      // Parallel: only collinear overlaps intersect.
      if (std::abs(cross(qp, r)) > point_tol * r_len) continue;
      const double inv = 1.0 / (r_len * r_len);
      const double t0 = qp.dot(r) * inv;
      const double t1 = (b[j + 1] - a0).dot(r) * inv;
      const double lo = std::max(0.0, std::min(t0, t1));
      const double hi = std::min(1.0, std::max(t0, t1));
      if (lo > hi + param_tol) continue;
      const Point2 p0 = a0 + lo * r;
      const Point2 p1 = a0 + std::max(lo, hi) * r;
      const double u0 = std::clamp((p0 - b0).dot(s) / (s_len * s_len), 0.0, 1.0);
      events.push_back({cum_a[i] + lo * r_len, cum_a[i] + std::max(lo, hi) * r_len, p0, p1, j, u0,
                        cum_b[j] + u0 * s_len});
    }
  }

  // Merge hits that touch each other: a shared vertex reported by adjacent
  // segments, or a chain of collinear overlaps.
  std::vector<std::size_t> parent(events.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  const auto touches = [&](const CrossingEvent& e, const CrossingEvent& f) {
    const Point2 ep[2] = {e.p0, e.p1};
    const Point2 fp[2] = {f.p0, f.p1};
    for (const auto& x : ep)
      for (const auto& y : fp)
        if ((x - y).norm() <= point_tol) return true;
    return false;
  };
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (touches(events[i], events[j])) parent[find_root(parent, i)] = find_root(parent, j);
    }
  }
  std::vector<int> representative(events.size(), -1);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::size_t root = find_root(parent, i);
    if (representative[root] < 0 || events[i].s0 < events[static_cast<std::size_t>(representative[root])].s0) {
      representative[root] = static_cast<int>(i);
    }
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (find_root(parent, i) != i) continue;
    const auto& e = events[static_cast<std::size_t>(representative[i])];
    result.push_back({e.p0, e.s0, e.arc_b, e.segment_b, e.t_b});
  }
  std::sort(result.begin(), result.end(), [](const Crossing& x, const Crossing& y) {
    return x.arc_a != y.arc_a ? x.arc_a < y.arc_a : x.arc_b < y.arc_b;
  });
  return result;
}

int count_crossings(const Polyline& a, const Polyline& b) { return static_cast<int>(crossings(a, b).size()); }

namespace {

struct CenteredPair {
  Point2 source_mean;
  Point2 target_mean;
  double source_spread = 0.0;  // sum of squared centered source norms
  double target_spread = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // sum target_i * source_i^T
};

CenteredPair center_pair(const Polyline& source, const Polyline& target) {
  if (source.size() != target.size()) throw Error(ErrorKind::kCountMismatch, "count mismatch");
  if (source.size() < 2) throw Error(ErrorKind::kRankDeficient, "rank deficient");
  CenteredPair out;
  out.source_mean = centroid(source);
  out.target_mean = centroid(target);
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Point2 cs = source[i] - out.source_mean;
    const Point2 ct = target[i] - out.target_mean;
    out.source_spread += cs.squaredNorm();
    out.target_spread += ct.squaredNorm();
    out.covariance += ct * cs.transpose();
  }
  const double scale = std::max(1.0, out.source_mean.squaredNorm());
  if (!(out.source_spread > 1e-24 * scale * static_cast<double>(source.size()))) {
    throw Error(ErrorKind::kRankDeficient, "rank deficient");
  }
  return out;
}

// Rotation factor of the polar decomposition of a 2x2 cross-covariance. For
// M = [[a, b], [c, d]] the closest rotation has angle atan2(c - b, a + d); this
// also covers det(M) < 0, where the full polar factor would be a reflection.
double polar_rotation(const Eigen::Matrix2d& m) {
  return wrap_angle(std::atan2(m(1, 0) - m(0, 1), m(0, 0) + m(1, 1)));
}

}  // namespace

RigidTransform2 best_fit_rigid(const Polyline& source, const Polyline& target) {
  const auto pair = center_pair(source, target);
  RigidTransform2 out;
  out.rotation = polar_rotation(pair.covariance);
  out.translation = pair.target_mean - rotation_matrix(out.rotation) * pair.source_mean;
  return out;
}

Similarity2 best_fit_similarity(const Polyline& source, const Polyline& target) {
  const auto pair = center_pair(source, target);
  Similarity2 out;
  out.rotation = polar_rotation(pair.covariance);
  out.scale = std::sqrt(pair.target_spread / pair.source_spread);
  if (!(out.scale > 0.0)) throw Error(ErrorKind::kRankDeficient, "rank deficient");
  out.translation = pair.target_mean - out.apply_linear(pair.source_mean);
  return out;
}

double fit_residual(const Polyline& source, const Polyline& target, const RigidTransform2& t) {
  return pairwise_dist(target, transformed(source, t), false);
}

std::vector<int> detect_corners(const Polyline& p, const CornerParams& params) {
  std::vector<int> corners;
  const int n = params.resample_n;
  const int w = params.window;
  if (n < 3 || w < 1 || p.size() < 2 || !(arc_length(p) > 0.0)) return corners;

  const bool closed = is_closed(p);
  const Polyline r = resample(p, n);
  const int m = closed ? n - 1 : n;  // distinct samples
  constexpr double kNotEligible = std::numeric_limits<double>::infinity();

  std::vector<double> straws(static_cast<std::size_t>(m), kNotEligible);
  std::vector<double> computed;
  for (int i = 0; i < m; ++i) {
    if (closed) {
      if (m <= 2 * w) break;
      straws[i] = (r[(i + w) % m] - r[(i - w + m) % m]).norm();
    } else {
      if (i < w || i >= m - w) continue;
      straws[i] = (r[i + w] - r[i - w]).norm();
    }
    computed.push_back(straws[i]);
  }
  if (computed.empty()) return corners;

  auto mid = computed.begin() + static_cast<std::ptrdiff_t>(computed.size() / 2);
  std::nth_element(computed.begin(), mid, computed.end());
  const double threshold = *mid * params.threshold;

  // Each run of consecutive below-threshold straws contributes its minimum.
  const auto scan = [&](int start, int count) {
    int best = -1;
    for (int k = 0; k < count; ++k) {
      const int i = (start + k) % m;
      if (straws[i] < threshold) {
        if (best < 0 || straws[i] < straws[best]) best = i;
      } else if (best >= 0) {
        corners.push_back(best);
        best = -1;
      }
    }
    if (best >= 0) corners.push_back(best);
  };

  if (closed) {
    int start = -1;
    for (int i = 0; i < m; ++i) {
      if (!(straws[i] < threshold)) {
        start = i;
        break;
      }
    }
    if (start < 0) return corners;
    scan(start, m);
  } else {
    scan(0, m);
  }
  std::sort(corners.begin(), corners.end());
  return corners;
}

Polyline extract_arc(const Polyline& p, double from, double to) {
  const auto cum = cumulative_length(p);
  const double total = cum.back();
  const double eps = 1e-12 * std::max(1.0, total);

  const auto straight = [&](double a, double b, Polyline& out) {
    const Point2 start = point_at(p, cum, a);
    if (out.empty() || (out.back() - start).norm() > kDedupTolerance) out.push_back(start);
    for (std::size_t v = 0; v < p.size(); ++v) {
      if (cum[v] > a + eps && cum[v] < b - eps && (p[v] - out.back()).norm() > kDedupTolerance) {
        out.push_back(p[v]);
      }
    }
    const Point2 end = point_at(p, cum, b);
    if ((end - out.back()).norm() > kDedupTolerance) out.push_back(end);
  };

  Polyline out;
  if (is_closed(p) && from >= to - eps) {
    straight(from, total, out);
    straight(0.0, to, out);
  } else {
    straight(std::max(0.0, from), std::min(total, to), out);
  }
  return out;
}

std::vector<Polyline> split_at_corners(const Polyline& p, const CornerParams& params) {
  const auto corner_idx = detect_corners(p, params);
  const auto cum = cumulative_length(p);
  const double total = cum.back();
  const double spacing = total / static_cast<double>(params.resample_n - 1);

  std::vector<double> cuts;
  for (const int idx : corner_idx) {
    double s = spacing * static_cast<double>(idx);
    const auto nearest = std::min_element(cum.begin(), cum.end(), [s](double x, double y) {
      return std::abs(x - s) < std::abs(y - s);
    });
    if (std::abs(*nearest - s) <= spacing) s = *nearest;
    if (is_closed(p) && s >= total) s = 0.0;
    cuts.push_back(s);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, total); }),
             cuts.end());

  std::vector<Polyline> segments;
  const auto keep = [&](Polyline seg) {
    if (seg.size() >= 2 && arc_length(seg) > 1e-12 * std::max(1.0, total)) segments.push_back(std::move(seg));
  };
  if (is_closed(p)) {
    if (cuts.empty()) return {p};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) keep(extract_arc(p, cuts[k], cuts[k + 1]));
    keep(extract_arc(p, cuts.back(), cuts.front()));
  } else {
    double prev = 0.0;
    for (const double c : cuts) {
      if (c <= 0.0 || c >= total) continue;
      keep(extract_arc(p, prev, c));
      prev = c;
    }
    keep(extract_arc(p, prev, total));
  }
  return segments;
}

Projection project_to_polyline(const Point2& q, const Polyline& p) {
  Projection best;
  best.distance_sq = std::numeric_limits<double>::infinity();
  if (p.empty()) return best;
  if (p.size() == 1) return {p.front(), 0.0, 0, 0.0, (q - p.front()).squaredNorm()};

  const auto cum = cumulative_length(p);
  const double total = cum.back();
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    const Point2 d = p[j + 1] - p[j];
    const double len_sq = d.squaredNorm();
    const double t = len_sq > 0.0 ? std::clamp((q - p[j]).dot(d) / len_sq, 0.0, 1.0) : 0.0;
    const Point2 candidate = p[j] + t * d;
    const double dist_sq = (q - candidate).squaredNorm();
    // Strictly better beyond rounding noise; otherwise the earlier segment wins.
    if (j == 0 || dist_sq < best.distance_sq - 1e-12 * (1.0 + best.distance_sq)) {
      const double s = cum[j] + t * (cum[j + 1] - cum[j]);
      best = {candidate, total > 0.0 ? s / total : 0.0, j, t, dist_sq};
    }
  }
  return best;
}

}  // namespace squidget
