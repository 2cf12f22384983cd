#include "squidget/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "squidget/error.hpp"

namespace squidget {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

void write(Document& doc, AttributeUpdate& update, const AttributePath& path, double value) {
  if (!doc.resolves(path)) {
    update.warnings.push_back("stale attribute '" + path.str() + "' skipped");
    return;
  }
  try {
    update.changes.push_back(doc.set_attr(path, value));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kRangeViolation) throw;
    update.warnings.push_back(e.what());
  }
}

Polyline segment_from(const Scene& scene, const Config& config, const CornerParams& corners,
                      const ImplicitSquidget& imp) {
  const auto outlines = scene.contour(imp.object, config.contour_samples);
  if (imp.contour_index < 0 || static_cast<std::size_t>(imp.contour_index) >= outlines.size()) {
    throw Error(ErrorKind::kDegenerateCurve, "contour of '" + imp.object + "' changed shape");
  }
  const Polyline& outline = outlines[static_cast<std::size_t>(imp.contour_index)];
  const auto pieces =
      outline_pieces(scene, imp.object, config.contour_samples, corners)[static_cast<std::size_t>(imp.contour_index)];
  // A parameter change can add or remove corners; fall back to the whole
  // outline when the piece no longer exists.
  const bool whole = imp.segment_index < 0 || static_cast<std::size_t>(imp.segment_index) >= pieces.size();
  const Polyline& piece = whole ? outline : pieces[static_cast<std::size_t>(imp.segment_index)];
  return transformed(resample(piece, static_cast<int>(imp.segment.size())), scene.view());
}

}  // namespace

void AttributeUpdate::append(const AttributeUpdate& later) {
  changes.insert(changes.end(), later.changes.begin(), later.changes.end());
  warnings.insert(warnings.end(), later.warnings.begin(), later.warnings.end());
}

AttributeUpdate coalesce(const AttributeUpdate& earlier, const AttributeUpdate& later) {
  AttributeUpdate out;
  std::map<AttributePath, std::size_t> index;
  auto fold = [&](const AttributeUpdate& u) {
    for (const auto& c : u.changes) {
      const auto it = index.find(c.path);
      if (it == index.end()) {
        index.emplace(c.path, out.changes.size());
        out.changes.push_back(c);
      } else {
        out.changes[it->second].new_value = c.new_value;
      }
    }
    out.warnings.insert(out.warnings.end(), u.warnings.begin(), u.warnings.end());
  };
  fold(earlier);
  fold(later);
  return out;
}

void revert(Document& doc, const AttributeUpdate& update) {
  for (auto it = update.changes.rbegin(); it != update.changes.rend(); ++it) doc.set_attr(it->path, it->old_value);
}

void reapply(Document& doc, const AttributeUpdate& update) {
  for (const auto& c : update.changes) doc.set_attr(c.path, c.new_value);
}

std::string_view to_string(Constraint constraint) {
  switch (constraint) {
    case Constraint::kFull:
      return "full";
    case Constraint::kTranslateOnly:
      return "translate-only";
    case Constraint::kRotateOnly:
      return "rotate-only";
    case Constraint::kScale:
      return "scale";
  }
  return "?";
}

AttributeUpdate apply_snapshot(Document& doc, const AttributeSnapshot& snapshot) {
  AttributeUpdate update;
  for (const auto& [path, value] : snapshot) write(doc, update, path, value);
  return update;
}

AttributeUpdate apply_discrete(Document& doc, std::string_view id) {
  return apply_snapshot(doc, doc.registry.discrete_squidget(id).snapshot);
}

AttributeUpdate apply_continuous(Document& doc, std::string_view id, double w) {
  const ContinuousSquidget& cs = doc.registry.continuous_squidget(id);
  w = std::clamp(w, 0.0, 1.0);
  const Interpolated blend = interpolate(doc.registry, cs, w);
  AttributeUpdate update = apply_snapshot(doc, blend.snapshot);
  write(doc, update, weight_path(id), w);
  for (const auto& [path, value] : blend.snapshot) {
    const auto& seg = path.segments();
    if (seg.size() == 3 && seg[0] == "squidget" && seg[2] == "w" && doc.registry.continuous().contains(seg[1])) {
      update.append(apply_continuous(doc, seg[1], value));
    }
  }
  return update;
}

AttributeUpdate apply_implicit_transform(Document& doc, std::string_view object, const LocalTransform& base,
                                         Similarity2 local_delta, Constraint constraint) {
  switch (constraint) {
    case Constraint::kFull:
      local_delta.scale = 1.0;
      break;
    case Constraint::kTranslateOnly:
      local_delta.rotation = 0.0;
      local_delta.scale = 1.0;
      break;
    case Constraint::kRotateOnly:
      local_delta.translation = Point2::Zero();
      local_delta.scale = 1.0;
      break;
    case Constraint::kScale:
      break;
  }
  const Similarity2 pose = base.as_similarity() * local_delta;
  const std::string id(object);
  AttributeUpdate update;
  auto path = [&](const char* name) { return AttributePath({id, "transform", name}); };
  write(doc, update, path("tx"), pose.translation.x());
  write(doc, update, path("ty"), pose.translation.y());
  write(doc, update, path("rotation"), pose.rotation);
  write(doc, update, path("scale"), pose.scale);
  return update;
}

AttributeUpdate apply_match(Document& doc, const MatchResult& match, Constraint constraint) {
  switch (match.kind) {
    case SquidgetKind::kDiscrete:
      return apply_discrete(doc, match.id);
    case SquidgetKind::kContinuous:
      return apply_continuous(doc, match.id, std::get<double>(match.payload));
    case SquidgetKind::kImplicit: {
      const auto& fit = std::get<ImplicitFit>(match.payload);
      const auto imp = find_implicit(doc, match.id);
      if (!imp) throw Error(ErrorKind::kUnknownObject, "implicit squidget '" + match.id + "' no longer exists");
      return apply_implicit_transform(doc, imp->object, doc.scene.object(imp->object).transform, fit.local, constraint);
    }
  }
  return {};
}

Polyline regenerate_segment(const Document& doc, const ImplicitSquidget& imp, const AttributePath& path, double value) {
  Scene scene = doc.scene;
  scene.set_attr(path, value);
  return segment_from(scene, doc.config, doc.corner_params(), imp);
}

ScalarObjective::ScalarObjective(const Document& doc, const Polyline& stroke, ImplicitSquidget imp, AttributePath path)
    : doc_(&doc), imp_(std::move(imp)), path_(std::move(path)) {
  const auto& seg = path_.segments();
  if (seg.size() != 3 || seg[0] != imp_.object || seg[1] != "shape" || !doc.resolves(path_)) {
    throw Error(ErrorKind::kUnknownAttribute,
                "'" + path_.str() + "' is not a shape parameter of '" + imp_.object + "'");
  }
  const AttributeRange range = doc.range_of(path_);
  if (!range.bounded()) throw Error(ErrorKind::kUnboundedAttribute, "unbounded attribute: '" + path_.str() + "'");
  start_ = doc.get_attr(path_);
  const double half = doc.config.solver_window * range.width();
  double lo = std::max(start_ - half, range.lo);
  double hi = std::min(start_ + half, range.hi);
  // Open ends are never attained; stay a hair inside them.
  if (range.kind != AttributeRange::Kind::kClosed) {
    const double inset = 1e-12 * range.width();
    lo = std::max(lo, range.lo + inset);
    hi = std::min(hi, range.hi - inset);
  }
  window_ = {lo, hi};
  stroke_ = resample(sanitize_stroke(stroke), static_cast<int>(imp_.segment.size()));
}

double ScalarObjective::operator()(double value) const {
  return dist_min_reverse(stroke_, regenerate_segment(*doc_, imp_, path_, value), true);
}

ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                              const std::vector<double>& extra) {
  std::map<double, double> samples;
  auto eval = [&](double x) {
    const auto it = samples.find(x);
    if (it != samples.end()) return it->second;
    const double y = f(x);
    samples.emplace(x, y);
    return y;
  };

  eval(lo);
  eval(hi);
  for (double x : extra) {
    if (x >= lo && x <= hi) eval(x);
  }

  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }

  // Parabolic polish through the best sample and its neighbours.
  const double floor_step = 1e-13 * std::max(1.0, std::abs(hi - lo));
  for (int iter = 0; iter < 100; ++iter) {
    auto best = std::min_element(samples.begin(), samples.end(),
                                 [](const auto& l, const auto& r) { return l.second < r.second; });
    if (best == samples.begin() || std::next(best) == samples.end()) break;
    const auto [x0, y0] = *std::prev(best);
    const auto [x1, y1] = *best;
    const auto [x2, y2] = *std::next(best);
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if (den == 0.0) break;
    const double x = std::clamp(x1 - 0.5 * num / den, x0, x2);
    if (!std::isfinite(x) || std::abs(x - x1) < floor_step || samples.contains(x)) break;
    eval(x);
  }

  const auto best = std::min_element(samples.begin(), samples.end(),
                                     [](const auto& l, const auto& r) { return l.second < r.second; });
  return {best->first, best->second, static_cast<int>(samples.size())};
}

std::optional<ImplicitSquidget> closest_segment(const Document& doc, const Polyline& stroke, std::string_view object) {
  const Polyline s = sanitize_stroke(stroke);
  std::vector<ImplicitSquidget> candidates = implicit_squidgets_of(doc, object);
  // Whole outlines too: a redrawn outline need not respect corner splits.
  const auto outlines = doc.scene.contour(object, doc.config.contour_samples);
  for (std::size_t c = 0; c < outlines.size(); ++c) {
    ImplicitSquidget whole;
    whole.id = std::string(object) + "#" + std::to_string(c);
    whole.object = std::string(object);
    whole.contour_index = static_cast<int>(c);
    whole.segment_index = -1;
    whole.segment = resample(outlines[c], doc.config.resample_n);
    whole.bound = doc.scene.attribute_paths(object);
    candidates.push_back(std::move(whole));
  }
  // Compared at unit RMS radius: the parameter about to be solved may change
  // the size of the piece.
  const auto normalized = [](Polyline p) {
    const Point2 c = centroid(p);
    double sum = 0.0;
    for (auto& q : p) {
      q -= c;
      sum += q.squaredNorm();
    }
    const double rms = std::sqrt(sum / static_cast<double>(p.size()));
    if (rms > 0.0) {
      for (auto& q : p) q /= rms;
    }
    return p;
  };
  std::optional<ImplicitSquidget> best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (auto& imp : candidates) {
    const double d = dist_min_reverse(normalized(resample(s, static_cast<int>(imp.segment.size()))),
                                      normalized(doc.to_screen(imp.segment)), false);
    if (d < best_distance) {
      best_distance = d;
      best = std::move(imp);
    }
  }
  return best;
}

ScalarSolution solve_scalar(Document& doc, const Polyline& stroke, const ImplicitSquidget& imp,
                            const AttributePath& path) {
  const ScalarObjective g(doc, stroke, imp, path);
  const auto [lo, hi] = g.window();
  const double tolerance = doc.config.solver_tolerance * doc.range_of(path).width();
  const ScalarMinimum min = minimize_scalar(std::cref(g), lo, hi, tolerance, {g.start()});
  ScalarSolution out;
  out.start = g.start();
  out.start_residual = g(g.start());
  out.value = min.argmin;
  out.residual = min.value;
  write(doc, out.update, path, out.value);
  return out;
}

DragState begin_drag(const Document& doc, const MatchResult& match, const Point2& origin, Constraint constraint) {
  DragState drag;
  drag.match = match;
  drag.constraint = constraint;
  drag.origin = origin;
  if (match.kind == SquidgetKind::kImplicit) {
    const auto imp = find_implicit(doc, match.id);
    if (!imp) throw Error(ErrorKind::kUnknownObject, "implicit squidget '" + match.id + "' no longer exists");
    drag.base = doc.scene.object(imp->object).transform;
    drag.to_screen = doc.scene.local_to_screen(imp->object);
    drag.screen_fit = std::get<ImplicitFit>(match.payload).screen;
  }
  return drag;
}

AttributeUpdate drag_update(Document& doc, const DragState& drag, const Point2& pointer) {
  switch (drag.match.kind) {
    case SquidgetKind::kDiscrete:
      return {};
    case SquidgetKind::kContinuous: {
      const auto& cs = doc.registry.continuous_squidget(drag.match.id);
      const auto proj = project_to_polyline(pointer, doc.to_screen(cs.path));
      return apply_continuous(doc, cs.id, path_weight(cs.path.size() - 1, proj.segment, proj.t));
    }
    case SquidgetKind::kImplicit: {
      Similarity2 moved = drag.screen_fit;
      moved.translation += pointer - drag.origin;
      const Similarity2 local = drag.to_screen.inverse() * moved * drag.to_screen;
      const std::string object = drag.match.id.substr(0, drag.match.id.find('#'));
      return apply_implicit_transform(doc, object, drag.base, local, drag.constraint);
    }
  }
  return {};
}

}  // namespace squidget
