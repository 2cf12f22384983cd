#include "squidget/registry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "squidget/document.hpp"
#include "squidget/error.hpp"

namespace squidget {

namespace {

template <typename Map>
const typename Map::mapped_type& lookup(const Map& map, std::string_view id, std::string_view what) {
  const auto it = map.find(std::string(id));
  if (it == map.end()) throw Error(ErrorKind::kUnknownObject, "unknown " + std::string(what) + " '" + std::string(id) + "'");
  return it->second;
}

std::optional<std::string> weight_owner(const AttributePath& path) {
  const auto& seg = path.segments();
  if (seg.size() == 3 && seg[0] == "squidget" && seg[2] == "w") return seg[1];
  return std::nullopt;
}

}  // namespace

double Rect::area() const { return (max.x() - min.x()) * (max.y() - min.y()); }

bool Rect::contains(const Point2& p) const {
  return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
}

bool Rect::contains(const Polyline& p) const {
  return !p.empty() && std::all_of(p.begin(), p.end(), [this](const Point2& q) { return contains(q); });
}

Polyline Rect::boundary() const {
  return {min, Point2(max.x(), min.y()), max, Point2(min.x(), max.y()), min};
}

AttributePath weight_path(std::string_view continuous_id) {
  return AttributePath({"squidget", std::string(continuous_id), "w"});
}

bool Registry::contains(std::string_view id) const {
  const std::string key(id);
  return canvases_.contains(key) || discrete_.contains(key) || continuous_.contains(key);
}

const Canvas& Registry::canvas(std::string_view id) const { return lookup(canvases_, id, "canvas"); }

const DiscreteSquidget& Registry::discrete_squidget(std::string_view id) const {
  return lookup(discrete_, id, "discrete squidget");
}

const ContinuousSquidget& Registry::continuous_squidget(std::string_view id) const {
  return lookup(continuous_, id, "continuous squidget");
}

void Registry::set_weight(std::string_view continuous_id, double w) {
  const auto it = continuous_.find(std::string(continuous_id));
  if (it == continuous_.end()) {
    throw Error(ErrorKind::kUnknownAttribute, "unknown attribute: '" + weight_path(continuous_id).str() + "'");
  }
  it->second.weight = w;
}

std::string Registry::allocate_id(std::string_view prefix) {
  std::string id;
  do {
    id = std::string(prefix) + std::to_string(next_id_++);
  } while (contains(id));
  return id;
}

void Registry::add_canvas(Canvas canvas) {
  if (canvas.id.empty() || contains(canvas.id)) throw Error(ErrorKind::kDuplicateId, "duplicate id '" + canvas.id + "'");
  if (!(canvas.region.area() > 0.0)) throw Error(ErrorKind::kInvalidArgument, "canvas region must have positive area");
  canvases_.emplace(canvas.id, std::move(canvas));
}

void Registry::add_discrete(DiscreteSquidget squidget) {
  if (squidget.id.empty() || contains(squidget.id)) {
    throw Error(ErrorKind::kDuplicateId, "duplicate id '" + squidget.id + "'");
  }
  if (!canvases_.contains(squidget.canvas)) throw Error(ErrorKind::kUnknownObject, "unknown canvas '" + squidget.canvas + "'");
  if (squidget.curve.size() < 2) throw Error(ErrorKind::kDegenerateCurve, "degenerate curve");
  discrete_.emplace(squidget.id, std::move(squidget));
}

void Registry::add_continuous(ContinuousSquidget squidget) {
  if (squidget.id.empty() || contains(squidget.id)) {
    throw Error(ErrorKind::kDuplicateId, "duplicate id '" + squidget.id + "'");
  }
  if (squidget.members.size() < 2) throw Error(ErrorKind::kNotAConnectGesture, "not a connect gesture");
  std::size_t count = 0;
  for (const auto& member : squidget.members) {
    const auto& d = discrete_squidget(member);
    if (count != 0 && d.curve.size() != count) throw Error(ErrorKind::kCountMismatch, "count mismatch");
    count = d.curve.size();
  }
  if (squidget.path.size() != squidget.members.size()) throw Error(ErrorKind::kCountMismatch, "count mismatch");
  if (!(squidget.weight >= 0.0 && squidget.weight <= 1.0)) {
    throw Error(ErrorKind::kRangeViolation, "range violation: weight outside [0, 1]");
  }
  if (would_cycle(squidget)) {
    throw Error(ErrorKind::kCycle, "squidget '" + squidget.id + "' would drive its own weight");
  }
  continuous_.emplace(squidget.id, std::move(squidget));
}

std::vector<std::string> Registry::remove(std::string_view id) {
  std::vector<std::string> removed;
  const std::string key(id);
  if (canvases_.erase(key)) {
    removed.push_back(key);
    std::vector<std::string> owned;
    for (const auto& [did, d] : discrete_) {
      if (d.canvas == key) owned.push_back(did);
    }
    for (const auto& did : owned) {
      for (auto& r : remove(did)) removed.push_back(std::move(r));
    }
  } else if (discrete_.erase(key)) {
    removed.push_back(key);
    std::vector<std::string> dependents;
    for (const auto& [cid, c] : continuous_) {
      if (std::find(c.members.begin(), c.members.end(), key) != c.members.end()) dependents.push_back(cid);
    }
    for (const auto& cid : dependents) {
      continuous_.erase(cid);
      removed.push_back(cid);
    }
  } else if (continuous_.erase(key)) {
    removed.push_back(key);
  }
  return removed;
}

std::vector<std::string> Registry::driven_by(const ContinuousSquidget& cs) const {
  std::set<std::string> driven;
  for (const auto& member : cs.members) {
    const auto it = discrete_.find(member);
    if (it == discrete_.end()) continue;
    for (const auto& [path, value] : it->second.snapshot) {
      if (auto owner = weight_owner(path)) driven.insert(*owner);
    }
  }
  return {driven.begin(), driven.end()};
}

bool Registry::would_cycle(const ContinuousSquidget& candidate) const {
  // Existing edges are acyclic, so any new cycle passes through the candidate.
  std::set<std::string> visited;
  std::function<bool(const std::string&)> reaches_candidate = [&](const std::string& id) {
    if (id == candidate.id) return true;
    if (!visited.insert(id).second) return false;
    const auto it = continuous_.find(id);
    if (it == continuous_.end()) return false;
    for (const auto& next : driven_by(it->second)) {
      if (reaches_candidate(next)) return true;
    }
    return false;
  };
  for (const auto& next : driven_by(candidate)) {
    if (reaches_candidate(next)) return true;
  }
  return false;
}

std::optional<std::string> Registry::topmost_canvas_containing(const Polyline& world) const {
  std::optional<std::string> best;
  int best_z = 0;
  for (const auto& [id, canvas] : canvases_) {
    if (!canvas.region.contains(world)) continue;
    if (!best || canvas.z_order > best_z) {
      best = id;
      best_z = canvas.z_order;
    }
  }
  return best;
}

std::vector<std::string> Registry::validate() const {
  std::vector<std::string> problems;
  for (const auto& [id, c] : canvases_) {
    if (!(c.region.area() > 0.0)) problems.push_back("canvas '" + id + "' has non-positive area");
  }
  for (const auto& [id, d] : discrete_) {
    if (!canvases_.contains(d.canvas)) problems.push_back("squidget '" + id + "' refers to unknown canvas '" + d.canvas + "'");
    if (d.curve.size() < 2) problems.push_back("squidget '" + id + "' has a degenerate curve");
  }
  for (const auto& [id, c] : continuous_) {
    if (c.members.size() < 2) problems.push_back("continuous squidget '" + id + "' has fewer than 2 members");
    if (c.path.size() != c.members.size()) problems.push_back("continuous squidget '" + id + "' path/member count mismatch");
    if (!(c.weight >= 0.0 && c.weight <= 1.0)) problems.push_back("range violation: squidget/" + id + "/w outside [0, 1]");
    std::size_t count = 0;
    for (const auto& m : c.members) {
      const auto it = discrete_.find(m);
      if (it == discrete_.end()) {
        problems.push_back("continuous squidget '" + id + "' refers to unknown member '" + m + "'");
        continue;
      }
      if (count != 0 && it->second.curve.size() != count) {
        problems.push_back("continuous squidget '" + id + "' members differ in point count");
      }
      count = it->second.curve.size();
    }
  }
  // Cycle check over the whole graph.
  std::map<std::string, int> state;  // 1 = on stack, 2 = done
  std::function<bool(const std::string&)> has_cycle = [&](const std::string& id) {
    auto& s = state[id];
    if (s == 1) return true;
    if (s == 2) return false;
    s = 1;
    const auto it = continuous_.find(id);
    if (it != continuous_.end()) {
      for (const auto& next : driven_by(it->second)) {
        if (has_cycle(next)) return true;
      }
    }
    state[id] = 2;
    return false;
  };
  for (const auto& [id, c] : continuous_) {
    if (has_cycle(id)) {
      problems.push_back("weight-driving cycle through '" + id + "'");
      break;
    }
  }
  return problems;
}

double path_weight(std::size_t segment_count, std::size_t segment, double t) {
  if (segment_count == 0) return 0.0;
  return std::clamp((static_cast<double>(segment) + t) / static_cast<double>(segment_count), 0.0, 1.0);
}

Interpolated interpolate(const Registry& registry, const ContinuousSquidget& cs, double w) {
  const std::size_t m = cs.members.size();
  if (m < 2) throw Error(ErrorKind::kNotAConnectGesture, "continuous squidget needs at least 2 members");
  w = std::isfinite(w) ? std::clamp(w, 0.0, 1.0) : 0.0;
  const double gaps = static_cast<double>(m - 1);
  const double position = w * gaps;

  const double nearest = std::round(position);
  if (std::abs(position - nearest) <= 1e-12 * gaps) {
    const auto& member = registry.discrete_squidget(cs.members[static_cast<std::size_t>(nearest)]);
    return {member.curve, member.snapshot};
  }
  const std::size_t i = std::min(static_cast<std::size_t>(std::floor(position)), m - 2);
  const double u = position - static_cast<double>(i);
  const auto& p = registry.discrete_squidget(cs.members[i]);
  const auto& q = registry.discrete_squidget(cs.members[i + 1]);
  if (p.curve.size() != q.curve.size()) throw Error(ErrorKind::kCountMismatch, "count mismatch");

  Interpolated out;
  out.curve.reserve(p.curve.size());
  for (std::size_t k = 0; k < p.curve.size(); ++k) out.curve.push_back((1.0 - u) * p.curve[k] + u * q.curve[k]);
  out.snapshot = p.snapshot;
  for (const auto& [path, qv] : q.snapshot) {
    const auto it = out.snapshot.find(path);
    if (it == out.snapshot.end()) {
      out.snapshot.emplace(path, qv);
    } else {
      it->second = (1.0 - u) * it->second + u * qv;
    }
  }
  return out;
}

const Canvas& create_canvas(Document& doc, const Rect& region, const std::vector<std::string>& selection) {
  if (!(region.area() > 0.0)) throw Error(ErrorKind::kInvalidArgument, "canvas region must have positive area");
  const AttributeSnapshot snapshot = doc.collect_attributes(selection);
  Canvas canvas;
  canvas.region = region;
  for (const auto& [path, value] : snapshot) canvas.attributes.push_back(path);
  int top = -1;
  for (const auto& [id, c] : doc.registry.canvases()) top = std::max(top, c.z_order);
  canvas.z_order = top + 1;
  canvas.id = doc.registry.allocate_id("canvas");
  const std::string id = canvas.id;
  doc.registry.add_canvas(std::move(canvas));
  return doc.registry.canvas(id);
}

const DiscreteSquidget& create_discrete(Document& doc, const Polyline& stroke, std::string_view canvas_id) {
  const Canvas& canvas = doc.registry.canvas(canvas_id);
  const Polyline world = doc.to_world(sanitize_stroke(stroke));
  if (!canvas.region.contains(world)) {
    throw Error(ErrorKind::kOutsideCanvas, "stroke leaves canvas '" + canvas.id + "'");
  }
  DiscreteSquidget squidget;
  squidget.canvas = canvas.id;
  squidget.curve = resample(smooth(world, doc.config.smoothing_iterations), doc.config.resample_n);
  for (const auto& path : canvas.attributes) {
    if (doc.resolves(path)) squidget.snapshot[path] = doc.get_attr(path);
  }
  squidget.id = doc.registry.allocate_id("d");
  const std::string id = squidget.id;
  doc.registry.add_discrete(std::move(squidget));
  return doc.registry.discrete_squidget(id);
}

const ContinuousSquidget& create_continuous(Document& doc, const Polyline& stroke) {
  const Polyline world = doc.to_world(sanitize_stroke(stroke));
  std::vector<std::pair<double, std::string>> hits;
  for (const auto& [id, d] : doc.registry.discrete()) {
    const auto xs = crossings(world, d.curve);
    if (xs.size() >= 2) throw Error(ErrorKind::kNotAConnectGesture, "not a connect gesture: '" + id + "' crossed twice");
    if (xs.size() == 1) hits.emplace_back(xs.front().arc_a, id);
  }
  if (hits.size() < 2) throw Error(ErrorKind::kNotAConnectGesture, "not a connect gesture");
  std::sort(hits.begin(), hits.end());

  ContinuousSquidget squidget;
  for (const auto& [arc, id] : hits) {
    squidget.members.push_back(id);
    squidget.path.push_back(centroid(doc.registry.discrete_squidget(id).curve));
  }
  squidget.id = "c" + std::to_string(doc.registry.next_id());
  if (doc.registry.would_cycle(squidget)) {
    throw Error(ErrorKind::kCycle, "squidget would drive its own weight");
  }
  squidget.id = doc.registry.allocate_id("c");
  const std::string id = squidget.id;
  doc.registry.add_continuous(std::move(squidget));
  return doc.registry.continuous_squidget(id);
}

namespace {

std::vector<std::string> crossout_targets(const Document& doc, const Polyline& world) {
  std::vector<std::string> targets;
  for (const auto& [id, c] : doc.registry.canvases()) {
    if (count_crossings(world, c.region.boundary()) >= 2) targets.push_back(id);
  }
  for (const auto& [id, d] : doc.registry.discrete()) {
    if (count_crossings(world, d.curve) >= 2) targets.push_back(id);
  }
  for (const auto& [id, c] : doc.registry.continuous()) {
    if (count_crossings(world, c.path) >= 2) targets.push_back(id);
  }
  return targets;
}

}  // namespace

std::vector<std::string> delete_by_crossout(Document& doc, const Polyline& stroke) {
  const Polyline world = doc.to_world(sanitize_stroke(stroke));
  std::vector<std::string> removed;
  for (const auto& id : crossout_targets(doc, world)) {
    for (auto& r : doc.registry.remove(id)) removed.push_back(std::move(r));
  }
  return removed;
}

std::string_view to_string(CreateGesture gesture) {
  switch (gesture) {
    case CreateGesture::kCrossOut:
      return "cross-out";
    case CreateGesture::kConnect:
      return "connect";
    case CreateGesture::kDiscrete:
      return "discrete";
  }
  return "?";
}

CreateGesture classify_create_stroke(const Document& doc, const Polyline& stroke) {
  const Polyline world = doc.to_world(sanitize_stroke(stroke));
  if (!crossout_targets(doc, world).empty()) return CreateGesture::kCrossOut;
  int single = 0;
  for (const auto& [id, d] : doc.registry.discrete()) {
    if (count_crossings(world, d.curve) == 1) ++single;
  }
  return single >= 2 ? CreateGesture::kConnect : CreateGesture::kDiscrete;
}

std::vector<std::vector<Polyline>> outline_pieces(const Scene& scene, std::string_view object, int samples,
                                                  const CornerParams& corners) {
  const Similarity2 to_world = scene.local_to_world(object);
  std::vector<std::vector<Polyline>> out;
  for (const auto& outline : scene.local_outlines(object, samples)) {
    auto pieces = split_at_corners(outline, corners);
    for (auto& piece : pieces) piece = transformed(piece, to_world);
    out.push_back(std::move(pieces));
  }
  return out;
}

std::vector<ImplicitSquidget> implicit_squidgets_of(const Document& doc, std::string_view object_id) {
  std::vector<ImplicitSquidget> out;
  const auto& object = doc.scene.object(object_id);
  if (object.kind == ObjectKind::kGroup) return out;
  const auto bound = doc.scene.attribute_paths(object_id);
  const auto outlines = outline_pieces(doc.scene, object_id, doc.config.contour_samples, doc.corner_params());
  for (std::size_t c = 0; c < outlines.size(); ++c) {
    const auto& pieces = outlines[c];
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      ImplicitSquidget imp;
      imp.id = object.id + "#" + std::to_string(c) + "." + std::to_string(k);
      imp.object = object.id;
      imp.contour_index = static_cast<int>(c);
      imp.segment_index = static_cast<int>(k);
      imp.segment = resample(pieces[k], doc.config.resample_n);
      imp.bound = bound;
      out.push_back(std::move(imp));
    }
  }
  return out;
}

std::vector<ImplicitSquidget> implicit_squidgets(const Document& doc) {
  std::vector<ImplicitSquidget> out;
  for (const auto& object : doc.scene.objects()) {
    for (auto& imp : implicit_squidgets_of(doc, object.id)) out.push_back(std::move(imp));
  }
  return out;
}

std::optional<ImplicitSquidget> find_implicit(const Document& doc, std::string_view id) {
  const auto hash = id.find('#');
  if (hash == std::string_view::npos) return std::nullopt;
  const auto object_id = id.substr(0, hash);
  if (!doc.scene.has_object(object_id)) return std::nullopt;
  for (auto& imp : implicit_squidgets_of(doc, object_id)) {
    if (imp.id == id) return std::move(imp);
  }
  return std::nullopt;
}

}  // namespace squidget
