#include "squidget/scene.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "squidget/error.hpp"

namespace squidget {

namespace {

constexpr std::string_view kTransform = "transform";
constexpr std::string_view kShape = "shape";
constexpr std::string_view kTransformNames[] = {"tx", "ty", "rotation", "scale"};

bool is_angle_parameter(std::string_view name) {
  return name.size() > 6 && name.substr(name.size() - 6) == "-angle" && name.starts_with("limb-");
}

AttributeRange shape_range(std::string_view name) {
  using K = AttributeRange::Kind;
  if (name == "cone-angle") return {K::kOpen, 0.0, std::numbers::pi / 2.0};
  if (is_angle_parameter(name)) return {K::kAngle, -std::numbers::pi, std::numbers::pi};
  return {K::kPositive, 0.0, std::numeric_limits<double>::infinity()};
}

std::vector<std::string> required_shape_keys(const SceneObject& object) {
  switch (object.kind) {
    case ObjectKind::kEllipse:
      return {"radius-x", "radius-y"};
    case ObjectKind::kSpotlight:
      return {"cone-angle", "height"};
    case ObjectKind::kFigure: {
      std::vector<std::string> keys{"width"};
      const int limbs = figure_limb_count(object);
      for (int k = 0; k < limbs; ++k) {
        keys.push_back("limb-" + std::to_string(k) + "-angle");
        keys.push_back("limb-" + std::to_string(k) + "-length");
      }
      return keys;
    }
    case ObjectKind::kPolygon:
    case ObjectKind::kGroup:
      return {};
  }
  return {};
}

std::string describe(const AttributeRange& range) {
  std::ostringstream out;
  switch (range.kind) {
    case AttributeRange::Kind::kUnbounded:
      return "finite";
    case AttributeRange::Kind::kPositive:
      return "(0, inf)";
    case AttributeRange::Kind::kOpen:
      out << "(" << range.lo << ", " << range.hi << ")";
      return out.str();
    case AttributeRange::Kind::kClosed:
      out << "[" << range.lo << ", " << range.hi << "]";
      return out.str();
    case AttributeRange::Kind::kAngle:
      return "finite angle";
  }
  return "?";
}

Polyline sample_ellipse(const Point2& center, double rx, double ry, int samples) {
  Polyline out;
  out.reserve(static_cast<std::size_t>(samples));
  const int distinct = samples - 1;
  for (int k = 0; k < distinct; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(distinct);
    out.emplace_back(center.x() + rx * std::cos(a), center.y() + ry * std::sin(a));
  }
  out.push_back(out.front());
  return out;
}

Polyline capsule(const Point2& from, const Point2& to, double radius, int samples) {
  const Point2 u = (to - from).normalized();
  const Point2 n(-u.y(), u.x());
  const double base = std::atan2(n.y(), n.x());
  constexpr int kArcSteps = 32;
  Polyline dense;
  dense.push_back(from - radius * n);
  // Around `to` from -n through +u to +n, then back around `from`.
  for (int k = 0; k <= kArcSteps; ++k) {
    const double a = base - std::numbers::pi + std::numbers::pi * k / kArcSteps;
    dense.push_back(to + radius * Point2(std::cos(a), std::sin(a)));
  }
  for (int k = 0; k <= kArcSteps; ++k) {
    const double a = base + std::numbers::pi * k / kArcSteps;
    dense.push_back(from + radius * Point2(std::cos(a), std::sin(a)));
  }
  dense.back() = dense.front();
  return resample(dense, samples);
}

}  // namespace

AttributePath::AttributePath(std::vector<std::string> segments) : segments_(std::move(segments)) {}

AttributePath AttributePath::parse(std::string_view text) {
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t slash = text.find('/', start);
    const std::size_t end = slash == std::string_view::npos ? text.size() : slash;
    if (end == start) throw Error(ErrorKind::kUnknownAttribute, "unknown attribute: '" + std::string(text) + "'");
    segments.emplace_back(text.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return AttributePath(std::move(segments));
}

std::string AttributePath::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += '/';
    out += segments_[i];
  }
  return out;
}

bool AttributeRange::bounded() const {
  return kind == Kind::kOpen || kind == Kind::kClosed || kind == Kind::kAngle;
}

double AttributeRange::width() const { return bounded() ? hi - lo : std::numeric_limits<double>::infinity(); }

bool AttributeRange::admits(double value) const {
  if (!std::isfinite(value)) return false;
  switch (kind) {
    case Kind::kUnbounded:
    case Kind::kAngle:
      return true;
    case Kind::kPositive:
      return value > 0.0;
    case Kind::kOpen:
      return value > lo && value < hi;
    case Kind::kClosed:
      return value >= lo && value <= hi;
  }
  return false;
}

double AttributeRange::normalize(double value) const { return kind == Kind::kAngle ? wrap_angle(value) : value; }

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kPolygon:
      return "polygon";
    case ObjectKind::kEllipse:
      return "ellipse";
    case ObjectKind::kSpotlight:
      return "spotlight";
    case ObjectKind::kFigure:
      return "articulated-figure";
    case ObjectKind::kGroup:
      return "group";
  }
  return "?";
}

ObjectKind object_kind_from_string(std::string_view text) {
  for (const auto kind :
       {ObjectKind::kPolygon, ObjectKind::kEllipse, ObjectKind::kSpotlight, ObjectKind::kFigure, ObjectKind::kGroup}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown object kind '" + std::string(text) + "'");
}

int figure_limb_count(const SceneObject& object) {
  int limbs = 0;
  while (object.shape.contains("limb-" + std::to_string(limbs) + "-length")) ++limbs;
  return limbs;
}

void Scene::add_object(SceneObject object) {
  if (object.id.empty() || object.id.find('/') != std::string::npos || object.id == "squidget") {
    throw Error(ErrorKind::kInvalidArgument, "invalid object id '" + object.id + "'");
  }
  if (has_object(object.id)) throw Error(ErrorKind::kDuplicateId, "duplicate object id '" + object.id + "'");
  // Parents must already exist, which keeps parent links acyclic.
  if (object.parent && !has_object(*object.parent)) {
    throw Error(ErrorKind::kUnknownObject, "unknown parent '" + *object.parent + "' for '" + object.id + "'");
  }
  if (object.kind == ObjectKind::kFigure && figure_limb_count(object) == 0) {
    throw Error(ErrorKind::kInvalidArgument, "figure '" + object.id + "' has no limbs");
  }
  const auto required = required_shape_keys(object);
  for (const auto& key : required) {
    if (!object.shape.contains(key)) {
      throw Error(ErrorKind::kInvalidArgument, "object '" + object.id + "' lacks shape parameter '" + key + "'");
    }
  }
  for (const auto& [key, value] : object.shape) {
    if (std::find(required.begin(), required.end(), key) == required.end()) {
      throw Error(ErrorKind::kInvalidArgument, "object '" + object.id + "' has unexpected shape parameter '" + key + "'");
    }
  }
  if (object.kind == ObjectKind::kPolygon) {
    if (object.vertices.size() < 3) {
      throw Error(ErrorKind::kInvalidArgument, "polygon '" + object.id + "' needs at least 3 vertices");
    }
    for (const auto& v : object.vertices) {
      if (!is_finite(v)) throw Error(ErrorKind::kInvalidArgument, "polygon '" + object.id + "' has a non-finite vertex");
    }
  } else if (!object.vertices.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "only polygons carry vertices ('" + object.id + "')");
  }
  objects_.push_back(std::move(object));
}

bool Scene::has_object(std::string_view id) const {
  return std::any_of(objects_.begin(), objects_.end(), [&](const SceneObject& o) { return o.id == id; });
}

const SceneObject& Scene::object(std::string_view id) const {
  for (const auto& o : objects_) {
    if (o.id == id) return o;
  }
  throw Error(ErrorKind::kUnknownObject, "unknown object '" + std::string(id) + "'");
}

SceneObject& Scene::mutable_object(std::string_view id) {
  return const_cast<SceneObject&>(static_cast<const Scene*>(this)->object(id));
}

void Scene::set_view(const Similarity2& view) {
  if (!(view.scale > 0.0) || !std::isfinite(view.scale) || !std::isfinite(view.rotation) || !is_finite(view.translation)) {
    throw Error(ErrorKind::kRangeViolation, "range violation: view scale must be positive");
  }
  view_ = view;
  view_.rotation = wrap_angle(view_.rotation);
}

bool Scene::resolves(const AttributePath& path) const {
  const auto& seg = path.segments();
  if (seg.size() != 3 || !has_object(seg[0])) return false;
  const auto& o = object(seg[0]);
  if (seg[1] == kTransform) {
    return std::find(std::begin(kTransformNames), std::end(kTransformNames), seg[2]) != std::end(kTransformNames);
  }
  return seg[1] == kShape && o.shape.contains(seg[2]);
}

AttributeRange Scene::range_of(const AttributePath& path) const {
  using K = AttributeRange::Kind;
  if (!resolves(path)) throw Error(ErrorKind::kUnknownAttribute, "unknown attribute: '" + path.str() + "'");
  const auto& seg = path.segments();
  if (seg[1] == kShape) return shape_range(seg[2]);
  if (seg[2] == "rotation") return {K::kAngle, -std::numbers::pi, std::numbers::pi};
  if (seg[2] == "scale") return {K::kPositive, 0.0, std::numeric_limits<double>::infinity()};
  return {K::kUnbounded, 0.0, 0.0};
}

double Scene::get_attr(const AttributePath& path) const {
  if (!resolves(path)) throw Error(ErrorKind::kUnknownAttribute, "unknown attribute: '" + path.str() + "'");
  const auto& seg = path.segments();
  const auto& o = object(seg[0]);
  if (seg[1] == kShape) return o.shape.at(seg[2]);
  if (seg[2] == "tx") return o.transform.tx;
  if (seg[2] == "ty") return o.transform.ty;
  if (seg[2] == "rotation") return o.transform.rotation;
  return o.transform.scale;
}

AttributeChange Scene::set_attr(const AttributePath& path, double value) {
  const AttributeRange range = range_of(path);
  if (!range.admits(value)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "range violation: " << path.str() << " = " << value << " outside " << describe(range);
    throw Error(ErrorKind::kRangeViolation, msg.str());
  }
  const double stored = range.normalize(value);
  const double old_value = get_attr(path);
  const auto& seg = path.segments();
  auto& o = mutable_object(seg[0]);
  if (seg[1] == kShape) {
    o.shape[seg[2]] = stored;
  } else if (seg[2] == "tx") {
    o.transform.tx = stored;
  } else if (seg[2] == "ty") {
    o.transform.ty = stored;
  } else if (seg[2] == "rotation") {
    o.transform.rotation = stored;
  } else {
    o.transform.scale = stored;
  }
  return {path, old_value, stored};
}

std::vector<AttributePath> Scene::attribute_paths(std::string_view id) const {
  const auto& o = object(id);
  std::vector<AttributePath> out;
  for (const auto name : kTransformNames) out.emplace_back(std::vector<std::string>{o.id, std::string(kTransform), std::string(name)});
  for (const auto& path : shape_paths(id)) out.push_back(path);
  return out;
}

std::vector<AttributePath> Scene::shape_paths(std::string_view id) const {
  const auto& o = object(id);
  std::vector<AttributePath> out;
  for (const auto& [name, value] : o.shape) out.emplace_back(std::vector<std::string>{o.id, std::string(kShape), name});
  return out;
}

std::vector<std::string> Scene::children(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& o : objects_) {
    if (o.parent && *o.parent == id) out.push_back(o.id);
  }
  return out;
}

AttributeSnapshot Scene::collect_attributes(const std::vector<std::string>& selection) const {
  AttributeSnapshot snapshot;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    for (const auto& path : attribute_paths(id)) snapshot[path] = get_attr(path);
    for (const auto& child : children(id)) visit(child);
  };
  for (const auto& id : selection) {
    object(id);  // throws on unknown ids
    visit(id);
  }
  return snapshot;
}

Similarity2 Scene::local_to_world(std::string_view id) const {
  const SceneObject* o = &object(id);
  Similarity2 result = o->transform.as_similarity();
  while (o->parent) {
    o = &object(*o->parent);
    result = o->transform.as_similarity() * result;
  }
  return result;
}

Similarity2 Scene::local_to_screen(std::string_view id) const { return view_ * local_to_world(id); }

std::vector<Polyline> Scene::local_contour(const SceneObject& o, int samples) const {
  std::vector<Polyline> out;
  switch (o.kind) {
    case ObjectKind::kPolygon: {
      Polyline boundary = o.vertices;
      boundary.push_back(o.vertices.front());
      out.push_back(std::move(boundary));
      break;
    }
    case ObjectKind::kEllipse:
      out.push_back(sample_ellipse(Point2::Zero(), o.shape.at("radius-x"), o.shape.at("radius-y"), samples));
      break;
    case ObjectKind::kSpotlight: {
      // Cone with apex at the local origin, axis along local -y, cut by the
      // ground line y = -height. The hot-spot is the circle of radius
      // height * tan(cone-angle) on the ground plane, drawn foreshortened.
      const double height = o.shape.at("height");
      const double reach = height * std::tan(o.shape.at("cone-angle"));
      const Point2 center(0.0, -height);
      out.push_back(sample_ellipse(center, reach, kGroundForeshortening * reach, samples));
      out.push_back({Point2::Zero(), Point2(-reach, -height)});
      out.push_back({Point2::Zero(), Point2(reach, -height)});
      break;
    }
    case ObjectKind::kFigure: {
      const double radius = 0.5 * o.shape.at("width");
      Point2 joint = Point2::Zero();
      double heading = 0.0;
      const int limbs = figure_limb_count(o);
      for (int k = 0; k < limbs; ++k) {
        const std::string prefix = "limb-" + std::to_string(k);
        heading += o.shape.at(prefix + "-angle");
        const Point2 next = joint + o.shape.at(prefix + "-length") * Point2(std::cos(heading), std::sin(heading));
        out.push_back(capsule(joint, next, radius, samples));
        joint = next;
      }
      break;
    }
    case ObjectKind::kGroup:
      break;
  }
  return out;
}

std::vector<Polyline> Scene::contour(std::string_view id, int samples) const {
  if (samples < 4) throw Error(ErrorKind::kInvalidArgument, "contour sampling needs at least 4 points");
  const auto& o = object(id);
  const Similarity2 to_world = local_to_world(id);
  auto outlines = local_contour(o, samples);
  for (auto& outline : outlines) outline = transformed(outline, to_world);
  return outlines;
}

std::vector<Polyline> Scene::local_outlines(std::string_view id, int samples) const {
  if (samples < 4) throw Error(ErrorKind::kInvalidArgument, "contour sampling needs at least 4 points");
  return local_contour(object(id), samples);
}

std::vector<std::string> Scene::validate() const {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& o : objects_) {
    if (!seen.insert(o.id).second) problems.push_back("duplicate object id '" + o.id + "'");
    if (o.parent && !has_object(*o.parent)) problems.push_back("unknown parent '" + *o.parent + "' of '" + o.id + "'");
  }
  // Acyclic parent links.
  for (const auto& o : objects_) {
    const SceneObject* cur = &o;
    std::size_t steps = 0;
    while (cur->parent && has_object(*cur->parent) && steps <= objects_.size()) {
      cur = &object(*cur->parent);
      ++steps;
    }
    if (steps > objects_.size()) problems.push_back("parent cycle through '" + o.id + "'");
  }
  for (const auto& o : objects_) {
    for (const auto& path : attribute_paths(o.id)) {
      const double value = get_attr(path);
      const auto range = range_of(path);
      if (!range.admits(value)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "range violation: " << path.str() << " = " << value << " outside " << describe(range);
        problems.push_back(msg.str());
      }
    }
  }
  if (!(view_.scale > 0.0)) problems.push_back("range violation: view scale must be positive");
  return problems;
}

}  // namespace squidget
