#include "squidget/persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "squidget/error.hpp"

namespace squidget {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::kParse, "parse error at " + (where.empty() ? std::string("/") : where) + ": " + what);
}

std::string child(const std::string& where, std::string_view key) { return where + "/" + std::string(key); }
std::string child(const std::string& where, std::size_t index) { return where + "/" + std::to_string(index); }

const json& field(const json& obj, const std::string& where, std::string_view key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing field '" + std::string(key) + "'");
  return *it;
}

void only_fields(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(child(where, key), "unknown field '" + key + "'");
    }
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

json point_json(const Point2& p) { return json::array({p.x(), p.y()}); }

Point2 point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
  return {number(j[0], child(where, 0)), number(j[1], child(where, 1))};
}

json polyline_json(const Polyline& p) {
  json out = json::array();
  for (const auto& q : p) out.push_back(point_json(q));
  return out;
}

Polyline polyline(const json& j, const std::string& where) {
  Polyline out;
  for (std::size_t i = 0; i < array(j, where).size(); ++i) out.push_back(point(j[i], child(where, i)));
  return out;
}

std::vector<std::string> strings(const json& j, const std::string& where) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < array(j, where).size(); ++i) out.push_back(text(j[i], child(where, i)));
  return out;
}

AttributePath path_from(const std::string& s, const std::string& where) {
  try {
    return AttributePath::parse(s);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

json parse_json(std::string_view input) {
  try {
    return json::parse(input.begin(), input.end());
  } catch (const json::parse_error& e) {
    // e.byte counts from 1 and points just past the offending character.
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, input.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (input[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string detail = e.what();
    const auto colon = detail.rfind(": ");
    if (colon != std::string::npos) detail = detail.substr(colon + 2);
    throw Error(ErrorKind::kParse,
                "parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + detail);
  }
}

void check_version(const json& root, const std::string& where, int expected) {
  const auto version = integer(field(root, where, "version"), child(where, "version"));
  if (version != expected) {
    throw Error(ErrorKind::kVersion,
                "unsupported version " + std::to_string(version) + " (expected " + std::to_string(expected) + ")");
  }
}

json transform_json(const LocalTransform& t) {
  return {{"tx", t.tx}, {"ty", t.ty}, {"rotation", t.rotation}, {"scale", t.scale}};
}

LocalTransform transform_from(const json& j, const std::string& where) {
  only_fields(j, where, {"tx", "ty", "rotation", "scale"});
  LocalTransform t;
  t.tx = number(field(j, where, "tx"), child(where, "tx"));
  t.ty = number(field(j, where, "ty"), child(where, "ty"));
  t.rotation = number(field(j, where, "rotation"), child(where, "rotation"));
  t.scale = number(field(j, where, "scale"), child(where, "scale"));
  return t;
}

SceneObject object_from(const json& j, const std::string& where) {
  only_fields(j, where, {"id", "kind", "transform", "shape", "vertices", "parent"});
  SceneObject o;
  o.id = text(field(j, where, "id"), child(where, "id"));
  const std::string kind = text(field(j, where, "kind"), child(where, "kind"));
  try {
    o.kind = object_kind_from_string(kind);
  } catch (const Error& e) {
    fail(child(where, "kind"), e.what());
  }
  o.transform = transform_from(field(j, where, "transform"), child(where, "transform"));
  if (j.contains("shape")) {
    const std::string w = child(where, "shape");
    if (!j["shape"].is_object()) fail(w, "expected an object");
    for (const auto& [key, value] : j["shape"].items()) o.shape[key] = number(value, child(w, key));
  }
  if (j.contains("vertices")) o.vertices = polyline(j["vertices"], child(where, "vertices"));
  if (j.contains("parent")) o.parent = text(j["parent"], child(where, "parent"));
  return o;
}

}  // namespace

json config_to_json(const Config& c) {
  return {
      {"resample-n", c.resample_n},
      {"smoothing-iterations", c.smoothing_iterations},
      {"contour-samples", c.contour_samples},
      {"corner-resample-n", c.corner_resample_n},
      {"straw-window", c.straw_window},
      {"straw-threshold", c.straw_threshold},
      {"lambda", c.lambda},
      {"epsilon", c.epsilon},
      {"threshold", c.threshold},
      {"min-coverage", c.min_coverage},
      {"icp-max-iterations", c.icp_max_iterations},
      {"solver-window", c.solver_window},
      {"solver-tolerance", c.solver_tolerance},
      {"hold-ms", c.hold_ms},
      {"hold-radius", c.hold_radius},
  };
}

Config config_from_json(const json& j) {
  const std::string where = "/config";
  only_fields(j, where,
              {"resample-n", "smoothing-iterations", "contour-samples", "corner-resample-n", "straw-window",
               "straw-threshold", "lambda", "epsilon", "threshold", "min-coverage", "icp-max-iterations",
               "solver-window", "solver-tolerance", "hold-ms", "hold-radius"});
  Config c;
  auto get_int = [&](const char* key, int& out) {
    if (j.contains(key)) out = static_cast<int>(integer(j[key], child(where, key)));
  };
  auto get_double = [&](const char* key, double& out) {
    if (j.contains(key)) out = number(j[key], child(where, key));
  };
  get_int("resample-n", c.resample_n);
  get_int("smoothing-iterations", c.smoothing_iterations);
  get_int("contour-samples", c.contour_samples);
  get_int("corner-resample-n", c.corner_resample_n);
  get_int("straw-window", c.straw_window);
  get_double("straw-threshold", c.straw_threshold);
  get_double("lambda", c.lambda);
  get_double("epsilon", c.epsilon);
  get_double("threshold", c.threshold);
  get_double("min-coverage", c.min_coverage);
  get_int("icp-max-iterations", c.icp_max_iterations);
  get_double("solver-window", c.solver_window);
  get_double("solver-tolerance", c.solver_tolerance);
  get_int("hold-ms", c.hold_ms);
  get_double("hold-radius", c.hold_radius);
  return c;
}

json document_to_json(const Document& doc) {
  json objects = json::array();
  for (const auto& o : doc.scene.objects()) {
    json jo = {{"id", o.id}, {"kind", std::string(to_string(o.kind))}, {"transform", transform_json(o.transform)}};
    if (!o.shape.empty()) {
      json shape = json::object();
      for (const auto& [key, value] : o.shape) shape[key] = value;
      jo["shape"] = shape;
    }
    if (!o.vertices.empty()) jo["vertices"] = polyline_json(o.vertices);
    if (o.parent) jo["parent"] = *o.parent;
    objects.push_back(std::move(jo));
  }

  json canvases = json::array();
  for (const auto& [id, c] : doc.registry.canvases()) {
    json attrs = json::array();
    for (const auto& p : c.attributes) attrs.push_back(p.str());
    canvases.push_back({{"id", id},
                        {"region", {{"min", point_json(c.region.min)}, {"max", point_json(c.region.max)}}},
                        {"attributes", attrs},
                        {"z", c.z_order}});
  }

  json discrete = json::array();
  for (const auto& [id, d] : doc.registry.discrete()) {
    json snapshot = json::object();
    for (const auto& [path, value] : d.snapshot) snapshot[path.str()] = value;
    discrete.push_back({{"id", id}, {"canvas", d.canvas}, {"curve", polyline_json(d.curve)}, {"snapshot", snapshot}});
  }

  json continuous = json::array();
  for (const auto& [id, c] : doc.registry.continuous()) {
    continuous.push_back({{"id", id}, {"members", c.members}, {"path", polyline_json(c.path)}, {"w", c.weight}});
  }

  const Similarity2& view = doc.scene.view();
  return {
      {"version", kDocumentVersion},
      {"config", config_to_json(doc.config)},
      {"view",
       {{"tx", view.translation.x()}, {"ty", view.translation.y()}, {"rotation", view.rotation}, {"scale", view.scale}}},
      {"objects", objects},
      {"canvases", canvases},
      {"discrete", discrete},
      {"continuous", continuous},
      {"next_id", doc.registry.next_id()},
  };
}

std::string serialize_document(const Document& doc) { return document_to_json(doc).dump(2) + "\n"; }

Document parse_document(std::string_view input, bool strict) {
  const json root = parse_json(input);
  const std::string where;
  if (!root.is_object()) fail(where, "expected an object");
  check_version(root, where, kDocumentVersion);
  only_fields(root, where, {"version", "config", "view", "objects", "canvases", "discrete", "continuous", "next_id"});

  Document doc;
  if (root.contains("config")) doc.config = config_from_json(root["config"]);
  if (root.contains("view")) {
    const LocalTransform v = transform_from(root["view"], "/view");
    try {
      doc.scene.set_view(v.as_similarity());
    } catch (const Error& e) {
      fail("/view", e.what());
    }
  }

  auto list = [&](const char* key) -> const json& {
    static const json empty = json::array();
    return root.contains(key) ? array(root[key], child(where, key)) : empty;
  };

  // Structural problems (duplicate ids, dangling references) are load errors
  // in either mode; they leave nothing to validate.
  auto structural = [](const std::string& w, auto&& add) {
    try {
      add();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kParse) throw;
      throw Error(e.kind(), "at " + w + ": " + e.what());
    }
  };

  const json& objects = list("objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string w = child("/objects", i);
    SceneObject o = object_from(objects[i], w);
    structural(w, [&] { doc.scene.add_object(std::move(o)); });
  }

  const json& canvases = list("canvases");
  for (std::size_t i = 0; i < canvases.size(); ++i) {
    const std::string w = child("/canvases", i);
    const json& j = canvases[i];
    only_fields(j, w, {"id", "region", "attributes", "z"});
    Canvas c;
    c.id = text(field(j, w, "id"), child(w, "id"));
    const json& region = field(j, w, "region");
    only_fields(region, child(w, "region"), {"min", "max"});
    c.region.min = point(field(region, child(w, "region"), "min"), child(w, "region/min"));
    c.region.max = point(field(region, child(w, "region"), "max"), child(w, "region/max"));
    const auto attrs = strings(field(j, w, "attributes"), child(w, "attributes"));
    for (std::size_t k = 0; k < attrs.size(); ++k) {
      c.attributes.push_back(path_from(attrs[k], child(child(w, "attributes"), k)));
    }
    c.z_order = static_cast<int>(integer(field(j, w, "z"), child(w, "z")));
    structural(w, [&] { doc.registry.add_canvas(std::move(c)); });
  }

  const json& discrete = list("discrete");
  for (std::size_t i = 0; i < discrete.size(); ++i) {
    const std::string w = child("/discrete", i);
    const json& j = discrete[i];
    only_fields(j, w, {"id", "canvas", "curve", "snapshot"});
    DiscreteSquidget d;
    d.id = text(field(j, w, "id"), child(w, "id"));
    d.canvas = text(field(j, w, "canvas"), child(w, "canvas"));
    d.curve = polyline(field(j, w, "curve"), child(w, "curve"));
    const json& snapshot = field(j, w, "snapshot");
    if (!snapshot.is_object()) fail(child(w, "snapshot"), "expected an object");
    for (const auto& [key, value] : snapshot.items()) {
      const std::string sw = child(child(w, "snapshot"), key);
      d.snapshot[path_from(key, sw)] = number(value, sw);
    }
    structural(w, [&] { doc.registry.add_discrete(std::move(d)); });
  }

  const json& continuous = list("continuous");
  for (std::size_t i = 0; i < continuous.size(); ++i) {
    const std::string w = child("/continuous", i);
    const json& j = continuous[i];
    only_fields(j, w, {"id", "members", "path", "w"});
    ContinuousSquidget c;
    c.id = text(field(j, w, "id"), child(w, "id"));
    c.members = strings(field(j, w, "members"), child(w, "members"));
    c.path = polyline(field(j, w, "path"), child(w, "path"));
    c.weight = number(field(j, w, "w"), child(w, "w"));
    structural(w, [&] { doc.registry.add_continuous(std::move(c)); });
  }

  if (root.contains("next_id")) doc.registry.set_next_id(static_cast<int>(integer(root["next_id"], "/next_id")));

  if (strict) {
    const auto problems = doc.validate();
    if (!problems.empty()) throw Error(ErrorKind::kRangeViolation, "invalid document: " + problems.front());
  }
  return doc;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string document_hash(const Document& doc) { return fnv1a_hex(serialize_document(doc)); }

std::string config_hash(const Config& config) { return fnv1a_hex(config_to_json(config).dump()); }

EventLog make_log(const Document& recorded_against, std::vector<SessionEvent> events) {
  EventLog log;
  log.document_hash = document_hash(recorded_against);
  log.config_hash = config_hash(recorded_against.config);
  log.events = std::move(events);
  return log;
}

json event_to_json(const SessionEvent& e) {
  json j = {{"t", e.t}, {"kind", std::string(to_string(e.kind))}};
  if (e.position) j["pos"] = point_json(*e.position);
  switch (e.kind) {
    case EventKind::kModifierChange: {
      json names = json::array();
      for (std::size_t bit = 0; bit < std::size(kModifierNames); ++bit) {
        if (e.modifiers & (1u << bit)) names.push_back(std::string(kModifierNames[bit]));
      }
      j["modifiers"] = names;
      break;
    }
    case EventKind::kModeSwitch:
      if (e.mode) j["mode"] = std::string(to_string(*e.mode));
      break;
    case EventKind::kCanvasCreate:
      if (e.region) j["region"] = {{"min", point_json(e.region->min)}, {"max", point_json(e.region->max)}};
      break;
    case EventKind::kSelectionChange:
      j["selection"] = e.selection;
      break;
    case EventKind::kAttributePick:
      j["attribute"] = e.attribute.value_or("");
      break;
    default:
      break;
  }
  return j;
}

SessionEvent event_from_json(const json& j, const std::string& where) {
  only_fields(j, where, {"t", "kind", "pos", "modifiers", "mode", "region", "selection", "attribute"});
  SessionEvent e;
  e.t = integer(field(j, where, "t"), child(where, "t"));
  const std::string kind = text(field(j, where, "kind"), child(where, "kind"));
  const auto k = event_kind_from_string(kind);
  if (!k) fail(child(where, "kind"), "unknown event kind '" + kind + "'");
  e.kind = *k;
  if (j.contains("pos")) e.position = point(j["pos"], child(where, "pos"));
  if (j.contains("modifiers")) {
    const auto names = strings(j["modifiers"], child(where, "modifiers"));
    for (const auto& name : names) {
      const auto it = std::find(std::begin(kModifierNames), std::end(kModifierNames), name);
      if (it == std::end(kModifierNames)) fail(child(where, "modifiers"), "unknown modifier '" + name + "'");
      e.modifiers |= 1u << static_cast<unsigned>(it - std::begin(kModifierNames));
    }
  }
  if (j.contains("mode")) {
    const std::string mode = text(j["mode"], child(where, "mode"));
    e.mode = mode_from_string(mode);
    if (!e.mode) fail(child(where, "mode"), "unknown mode '" + mode + "'");
  }
  if (j.contains("region")) {
    const std::string w = child(where, "region");
    only_fields(j["region"], w, {"min", "max"});
    e.region = Rect{point(field(j["region"], w, "min"), child(w, "min")),
                    point(field(j["region"], w, "max"), child(w, "max"))};
  }
  if (j.contains("selection")) e.selection = strings(j["selection"], child(where, "selection"));
  if (j.contains("attribute")) e.attribute = text(j["attribute"], child(where, "attribute"));
  return e;
}

std::string serialize_event_log(const EventLog& log) {
  json header = json::object();
  if (log.document_hash) header["document_hash"] = *log.document_hash;
  if (log.config_hash) header["config_hash"] = *log.config_hash;
  json events = json::array();
  for (const auto& e : log.events) events.push_back(event_to_json(e));
  return json{{"version", kLogVersion}, {"header", header}, {"events", events}}.dump(2) + "\n";
}

EventLog parse_event_log(std::string_view input) {
  const json root = parse_json(input);
  const std::string where;
  if (!root.is_object()) fail(where, "expected an object");
  check_version(root, where, kLogVersion);
  only_fields(root, where, {"version", "header", "events"});
  EventLog log;
  if (root.contains("header")) {
    const json& h = root["header"];
    only_fields(h, "/header", {"document_hash", "config_hash"});
    if (h.contains("document_hash")) log.document_hash = text(h["document_hash"], "/header/document_hash");
    if (h.contains("config_hash")) log.config_hash = text(h["config_hash"], "/header/config_hash");
  }
  const json& events = array(field(root, where, "events"), "/events");
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = 0; i < events.size(); ++i) {
    SessionEvent e = event_from_json(events[i], child("/events", i));
    if (e.t < last) {
      throw Error(ErrorKind::kMalformedLog, "malformed log at event " + std::to_string(i) + ": timestamp goes backwards");
    }
    last = e.t;
    log.events.push_back(std::move(e));
  }
  return log;
}

void verify_log(const EventLog& log, const Document& doc) {
  if (log.document_hash != document_hash(doc)) {
    throw Error(ErrorKind::kMalformedLog, "log was recorded against a different document (hash " +
                                              log.document_hash.value_or("missing") + ", scene " +
                                              document_hash(doc) + ")");
  }
  if (log.config_hash != config_hash(doc.config)) {
    throw Error(ErrorKind::kMalformedLog, "log was recorded with a different config (hash " +
                                              log.config_hash.value_or("missing") + ", scene " +
                                              config_hash(doc.config) + ")");
  }
}

Polyline stroke_from_log(const EventLog& log) {
  const auto& ev = log.events;
  auto bad = [](std::size_t i, const std::string& why) {
    throw Error(ErrorKind::kMalformedLog, "not a stroke file at event " + std::to_string(i) + ": " + why);
  };
  if (ev.size() < 2) bad(ev.size(), "need pointer-down ... pointer-up");
  Polyline stroke;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const EventKind expected = i == 0                ? EventKind::kPointerDown
                               : i + 1 == ev.size() ? EventKind::kPointerUp
                                                    : EventKind::kPointerMove;
    if (ev[i].kind != expected) bad(i, "expected " + std::string(to_string(expected)));
    if (ev[i].position) {
      stroke.push_back(*ev[i].position);
    } else if (expected != EventKind::kPointerUp) {
      bad(i, "missing position");
    }
  }
  return stroke;
}

EventLog log_from_stroke(const Polyline& stroke, std::int64_t start_t, std::int64_t step_ms) {
  EventLog log;
  for (std::size_t i = 0; i < stroke.size(); ++i) {
    SessionEvent e;
    e.t = start_t + static_cast<std::int64_t>(i) * step_ms;
    e.kind = i == 0 ? EventKind::kPointerDown : i + 1 == stroke.size() ? EventKind::kPointerUp : EventKind::kPointerMove;
    e.position = stroke[i];
    log.events.push_back(e);
  }
  return log;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInvalidArgument, "cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

Document load_document(const std::filesystem::path& path, bool strict) { return parse_document(read_file(path), strict); }

void save_document(const std::filesystem::path& path, const Document& doc) { write_file(path, serialize_document(doc)); }

EventLog load_event_log(const std::filesystem::path& path) { return parse_event_log(read_file(path)); }

void save_event_log(const std::filesystem::path& path, const EventLog& log) {
  write_file(path, serialize_event_log(log));
}

}  // namespace squidget
