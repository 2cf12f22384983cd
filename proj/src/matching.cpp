#include "squidget/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "squidget/error.hpp"

namespace squidget {

namespace {

double squared_distance_sum(const Polyline& a, const Polyline& b) { return pairwise_dist(a, b, false); }

Polyline centered_copy(const Polyline& p) {
  const Point2 c = centroid(p);
  Polyline out;
  out.reserve(p.size());
  for (const auto& q : p) out.push_back(q - c);
  return out;
}

struct ProjectedCurve {
  Polyline points;
  double coverage = 0.0;
};

ProjectedCurve project_all(const Polyline& stroke, const Polyline& curve) {
  ProjectedCurve out;
  out.points.reserve(stroke.size());
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& q : stroke) {
    const auto proj = project_to_polyline(q, curve);
    out.points.push_back(proj.point);
    lo = std::min(lo, proj.parameter);
    hi = std::max(hi, proj.parameter);
  }
  out.coverage = hi >= lo ? hi - lo : 0.0;
  return out;
}

Similarity2 fit_step(const Polyline& source, const Polyline& target, FitMode fit) {
  if (fit == FitMode::kSimilarity) return best_fit_similarity(source, target);
  return Similarity2::from_rigid(best_fit_rigid(source, target));
}

bool canvas_holds(const Registry& registry, const ContinuousSquidget& cs, const std::string& canvas) {
  return std::any_of(cs.members.begin(), cs.members.end(), [&](const std::string& m) {
    return registry.discrete_squidget(m).canvas == canvas;
  });
}

MatchResult make_explicit(std::string id, SquidgetKind kind, double distance, const Config& config) {
  MatchResult r;
  r.id = std::move(id);
  r.kind = kind;
  r.distance = distance;
  r.score = explicit_score(distance, config);
  return r;
}

MatchResult make_implicit(const ImplicitSquidget& imp, const ImplicitFit& fit, const Config& config) {
  MatchResult r;
  r.id = imp.id;
  r.kind = SquidgetKind::kImplicit;
  r.distance = fit.distance;
  r.dev = fit.dev;
  r.score = implicit_score(fit.distance, fit.dev, config);
  r.payload = fit;
  return r;
}

}  // namespace

std::string_view to_string(SquidgetKind kind) {
  switch (kind) {
    case SquidgetKind::kDiscrete:
      return "discrete";
    case SquidgetKind::kContinuous:
      return "continuous";
    case SquidgetKind::kImplicit:
      return "implicit";
  }
  return "?";
}

double match_discrete(const Polyline& stroke, const DiscreteSquidget& squidget, const Document& doc, bool centered) {
  const Polyline s = resample(sanitize_stroke(stroke), static_cast<int>(squidget.curve.size()));
  return dist_min_reverse(s, doc.to_screen(squidget.curve), centered);
}

ContinuousFit best_weight(const Polyline& resampled, const ContinuousSquidget& squidget, const Document& doc,
                          bool centered) {
  const std::size_t m = squidget.members.size();
  ContinuousFit best;
  best.distance = std::numeric_limits<double>::infinity();
  const Polyline orientations[2] = {resampled, reversed(resampled)};
  for (std::size_t i = 0; i + 1 < m; ++i) {
    Polyline p = doc.to_screen(doc.registry.discrete_squidget(squidget.members[i]).curve);
    Polyline q = doc.to_screen(doc.registry.discrete_squidget(squidget.members[i + 1]).curve);
    if (p.size() != resampled.size() || q.size() != resampled.size()) {
      throw Error(ErrorKind::kCountMismatch, "count mismatch");
    }
    if (centered) {
      p = centered_copy(p);
      q = centered_copy(q);
    }
    for (const auto& orientation : orientations) {
      const Polyline s = centered ? centered_copy(orientation) : orientation;
      double num = 0.0;
      double den = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        const Point2 d = q[k] - p[k];
        num += (s[k] - p[k]).dot(d);
        den += d.squaredNorm();
      }
      const double u = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
      double dist = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) dist += (s[k] - ((1.0 - u) * p[k] + u * q[k])).squaredNorm();
      const double w = path_weight(m - 1, i, u);
      if (dist < best.distance || (dist == best.distance && w < best.w)) {
        best.distance = dist;
        best.w = w;
      }
    }
  }
  return best;
}

ContinuousFit match_continuous(const Polyline& stroke, const ContinuousSquidget& squidget, const Document& doc,
                               bool centered) {
  const Polyline clean = sanitize_stroke(stroke);
  const std::size_t n = doc.registry.discrete_squidget(squidget.members.front()).curve.size();
  const Polyline s = resample(clean, static_cast<int>(n));
  const Polyline path = doc.to_screen(squidget.path);
  const auto xs = crossings(clean, path);
  if (!xs.empty()) {
    ContinuousFit fit;
    fit.crossed = true;
    fit.w = path_weight(squidget.members.size() - 1, xs.front().segment_b, xs.front().t_b);
    fit.distance = dist_min_reverse(s, doc.to_screen(interpolate(doc.registry, squidget, fit.w).curve), centered);
    return fit;
  }
  return best_weight(s, squidget, doc, centered);
}

namespace {

std::optional<ImplicitFit> icp(const Polyline& s, const Polyline& segment, const Similarity2& start,
                               const ImplicitSquidget& squidget, const Document& doc, FitMode fit) {
  const double scale = std::max({1.0, bbox_diagonal(s), bbox_diagonal(segment)});
  ImplicitFit out;
  Similarity2 total = start;
  try {
    for (int it = 0; it < doc.config.icp_max_iterations; ++it) {
      const ProjectedCurve projected = project_all(s, transformed(segment, total));
      const Similarity2 step = fit_step(projected.points, s, fit);
      total = step * total;
      out.iterations = it + 1;
      if (std::abs(step.rotation) < 1e-13 && step.translation.norm() < 1e-13 * scale &&
          std::abs(step.scale - 1.0) < 1e-13) {
        break;
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kRankDeficient) return std::nullopt;
    throw;
  }

  const ProjectedCurve projected = project_all(s, transformed(segment, total));
  if (projected.coverage < doc.config.min_coverage) return std::nullopt;
  out.screen = total;
  out.partial = transformed(projected.points, total.inverse());
  out.distance = squared_distance_sum(s, projected.points);
  const Similarity2 to_screen = doc.scene.local_to_screen(squidget.object);
  out.local = to_screen.inverse() * total * to_screen;
  out.dev = out.local.translation.squaredNorm();
  out.coverage = projected.coverage;
  return out;
}

}  // namespace

std::optional<ImplicitFit> match_implicit(const Polyline& stroke, const ImplicitSquidget& squidget, const Document& doc,
                                          FitMode fit) {
  const Polyline s = resample(sanitize_stroke(stroke), static_cast<int>(squidget.segment.size()));
  const Polyline segment = doc.to_screen(squidget.segment);

  // Closest-point iteration only finds the nearest local optimum. Starting in
  // place keeps small corrections small; starting with the centroids aligned
  // recovers strokes drawn far from the curve. The in-place result wins ties.
  auto in_place = icp(s, segment, Similarity2{}, squidget, doc, fit);
  const double scale = std::max(1.0, bbox_diagonal(s));
  if (in_place && in_place->distance <= 1e-18 * scale * scale * static_cast<double>(s.size())) return in_place;
  auto aligned = icp(s, segment, Similarity2{0.0, 1.0, centroid(s) - centroid(segment)}, squidget, doc, fit);
  if (!aligned) return in_place;
  if (!in_place) return aligned;
  return aligned->distance < in_place->distance * (1.0 - 1e-6) - 1e-12 * scale * scale ? aligned : in_place;
}

double explicit_score(double distance, const Config& config) { return 1.0 / (distance + config.epsilon); }

double implicit_score(double distance, double dev, const Config& config) {
  return (1.0 - config.lambda) / (distance + config.epsilon) + config.lambda / (dev + config.epsilon);
}

double selection_threshold(const Polyline& stroke, const Config& config) {
  const double radius = config.threshold * bbox_diagonal(stroke);
  return 1.0 / (static_cast<double>(config.resample_n) * radius * radius + config.epsilon);
}

std::vector<MatchResult> rank_candidates(const Polyline& stroke, const Document& doc, const MatchOptions& options) {
  const Polyline clean = sanitize_stroke(stroke);
  const Registry& registry = doc.registry;

  // A stroke inside a canvas that holds squidgets is matched against that
  // canvas only.
  std::optional<std::string> canvas = registry.topmost_canvas_containing(doc.to_world(clean));
  if (canvas) {
    const bool has_any = std::any_of(registry.discrete().begin(), registry.discrete().end(),
                                     [&](const auto& kv) { return kv.second.canvas == *canvas; });
    if (!has_any) canvas.reset();
  }

  std::vector<MatchResult> results;
  for (const auto& [id, d] : registry.discrete()) {
    if (canvas && d.canvas != *canvas) continue;
    results.push_back(make_explicit(id, SquidgetKind::kDiscrete, match_discrete(clean, d, doc, options.shape_only),
                                    doc.config));
  }
  for (const auto& [id, cs] : registry.continuous()) {
    if (canvas && !canvas_holds(registry, cs, *canvas)) continue;
    const auto fit = match_continuous(clean, cs, doc, options.shape_only);
    auto r = make_explicit(id, SquidgetKind::kContinuous, fit.distance, doc.config);
    r.payload = fit.w;
    results.push_back(std::move(r));
  }
  if (!canvas) {
    for (const auto& imp : implicit_squidgets(doc)) {
      if (const auto fit = match_implicit(clean, imp, doc, options.fit)) {
        results.push_back(make_implicit(imp, *fit, doc.config));
      }
    }
  }
  std::stable_sort(results.begin(), results.end(), [](const MatchResult& a, const MatchResult& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  // Scores within rounding of the run's best are ties (a symmetric outline fits
  // several pieces equally well); the one needing the least rotation and scale
  // change goes first, then the smaller id.
  const auto motion = [](const MatchResult& r) {
    if (const auto* fit = std::get_if<ImplicitFit>(&r.payload)) {
      return std::abs(fit->local.rotation) + std::abs(std::log(fit->local.scale));
    }
    return 0.0;
  };
  for (std::size_t i = 0; i < results.size();) {
    std::size_t j = i + 1;
    while (j < results.size() && results[j].score >= results[i].score * (1.0 - 1e-9)) ++j;
    std::stable_sort(results.begin() + static_cast<std::ptrdiff_t>(i), results.begin() + static_cast<std::ptrdiff_t>(j),
                     [&](const MatchResult& a, const MatchResult& b) {
                       const double ma = motion(a);
                       const double mb = motion(b);
                       return ma != mb ? ma < mb : a.id < b.id;
                     });
    i = j;
  }
  return results;
}

std::optional<MatchResult> select(const Polyline& stroke, const Document& doc, const MatchOptions& options) {
  const auto ranked = rank_candidates(stroke, doc, options);
  if (ranked.empty()) return std::nullopt;
  if (ranked.front().score < selection_threshold(sanitize_stroke(stroke), doc.config)) return std::nullopt;
  return ranked.front();
}

std::optional<MatchResult> match_one(const Polyline& stroke, const Document& doc, std::string_view id,
                                     SquidgetKind kind, const MatchOptions& options) {
  const Polyline clean = sanitize_stroke(stroke);
  switch (kind) {
    case SquidgetKind::kDiscrete: {
      if (!doc.registry.discrete().contains(std::string(id))) return std::nullopt;
      const auto& d = doc.registry.discrete_squidget(id);
      return make_explicit(d.id, kind, match_discrete(clean, d, doc, options.shape_only), doc.config);
    }
    case SquidgetKind::kContinuous: {
      if (!doc.registry.continuous().contains(std::string(id))) return std::nullopt;
      const auto& cs = doc.registry.continuous_squidget(id);
      const auto fit = match_continuous(clean, cs, doc, options.shape_only);
      auto r = make_explicit(cs.id, kind, fit.distance, doc.config);
      r.payload = fit.w;
      return r;
    }
    case SquidgetKind::kImplicit: {
      const auto imp = find_implicit(doc, id);
      if (!imp) return std::nullopt;
      const auto fit = match_implicit(clean, *imp, doc, options.fit);
      if (!fit) return std::nullopt;
      return make_implicit(*imp, *fit, doc.config);
    }
  }
  return std::nullopt;
}

}  // namespace squidget
