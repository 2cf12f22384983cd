#include "demo_scenes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "squidget/error.hpp"
#include "squidget/session.hpp"

namespace squidget::demos {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Polyline line(const Point2& a, const Point2& b, int n = 12) {
  Polyline out;
  for (int i = 0; i < n; ++i) out.push_back(a + (static_cast<double>(i) / (n - 1)) * (b - a));
  return out;
}

Polyline shifted(const Polyline& p, const Point2& d) { return transformed(p, Similarity2{0.0, 1.0, d}); }

/// Rotation by `degrees` about `pivot`, then translation by `d`.
Polyline moved(const Polyline& p, const Point2& pivot, double degrees, const Point2& d) {
  const Similarity2 about{degrees * kDeg, 1.0, Point2::Zero()};
  Polyline out;
  for (const auto& q : p) out.push_back(pivot + about.apply_linear(q - pivot) + d);
  return out;
}

SceneObject polygon(std::string id, Polyline vertices, double tx, double ty) {
  SceneObject o;
  o.id = std::move(id);
  o.kind = ObjectKind::kPolygon;
  o.vertices = std::move(vertices);
  o.transform.tx = tx;
  o.transform.ty = ty;
  return o;
}

SceneObject ellipse(std::string id, double rx, double ry, double tx, double ty) {
  SceneObject o;
  o.id = std::move(id);
  o.kind = ObjectKind::kEllipse;
  o.shape = {{"radius-x", rx}, {"radius-y", ry}};
  o.transform.tx = tx;
  o.transform.ty = ty;
  return o;
}

/// Drives a live session and keeps every event it sends, failing loudly when
/// the engine does not react as the script expects.
class Recorder {
 public:
  explicit Recorder(Document doc) : initial_(doc), session_(std::move(doc)) {}

  const Document& doc() const { return session_.document(); }

  std::vector<Effect> send(SessionEvent e, std::int64_t gap = 10) {
    t_ += gap;
    e.t = t_;
    auto r = session_.handle_event(e);
    if (!r.accepted) throw std::runtime_error("demo event rejected: " + r.effects.front().data.dump());
    for (const auto& effect : r.effects) {
      if (effect.kind == "error") throw std::runtime_error("demo event failed: " + effect.data.dump());
    }
    events_.push_back(std::move(e));
    return std::move(r.effects);
  }

  std::vector<Effect> stroke(const Polyline& s) {
    std::vector<Effect> all;
    for (std::size_t i = 0; i < s.size(); ++i) {
      SessionEvent e;
      e.kind = i == 0 ? EventKind::kPointerDown : i + 1 == s.size() ? EventKind::kPointerUp : EventKind::kPointerMove;
      e.position = s[i];
      for (auto& f : send(e)) all.push_back(std::move(f));
    }
    return all;
  }

  /// Draws `s`, rests 350 ms at its end, then drags through `drag`.
  std::vector<Effect> hold_drag(const Polyline& s, const Polyline& drag) {
    std::vector<Effect> all;
    for (std::size_t i = 0; i < s.size(); ++i) {
      SessionEvent e;
      e.kind = i == 0 ? EventKind::kPointerDown : EventKind::kPointerMove;
      e.position = s[i];
      for (auto& f : send(e)) all.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < drag.size(); ++i) {
      SessionEvent e;
      e.kind = i + 1 == drag.size() ? EventKind::kPointerUp : EventKind::kPointerMove;
      e.position = drag[i];
      for (auto& f : send(e, i == 0 ? 350 : 16)) all.push_back(std::move(f));
    }
    return all;
  }

  std::string created(const Polyline& s) {
    for (const auto& e : stroke(s)) {
      if (e.kind == "squidget-created") return e.data["id"];
    }
    throw std::runtime_error("demo stroke created nothing");
  }

  void selected(const std::vector<Effect>& effects, const std::string& id) {
    for (const auto& e : effects) {
      if (e.kind == "selection-highlight" && e.data["id"] == id) return;
    }
    std::string seen;
    for (const auto& e : effects) seen += " " + to_json(e).dump();
    throw std::runtime_error("demo stroke did not select '" + id + "':" + seen);
  }

  void mode(Mode m) {
    SessionEvent e;
    e.kind = EventKind::kModeSwitch;
    e.mode = m;
    send(e);
  }

  void selection(std::vector<std::string> ids) {
    SessionEvent e;
    e.kind = EventKind::kSelectionChange;
    e.selection = std::move(ids);
    send(e);
  }

  std::string canvas(const Rect& r) {
    SessionEvent e;
    e.kind = EventKind::kCanvasCreate;
    e.region = r;
    for (const auto& f : send(e)) {
      if (f.kind == "canvas-created") return f.data["id"];
    }
    throw std::runtime_error("demo canvas not created");
  }

  void modifiers(unsigned m) {
    SessionEvent e;
    e.kind = EventKind::kModifierChange;
    e.modifiers = m;
    send(e);
  }

  void pick(std::string attribute) {
    SessionEvent e;
    e.kind = EventKind::kAttributePick;
    e.attribute = std::move(attribute);
    send(e);
  }

  void plain(EventKind kind) {
    SessionEvent e;
    e.kind = kind;
    send(e);
  }

  Demo finish(std::string name) { return {std::move(name), initial_, make_log(initial_, std::move(events_))}; }

 private:
  Document initial_;
  Session session_;
  std::vector<SessionEvent> events_;
  std::int64_t t_ = 0;
};

Polyline implicit_segment(const Document& doc, const std::string& id) {
  const auto imp = find_implicit(doc, id);
  if (!imp) throw std::runtime_error("no implicit squidget '" + id + "'");
  return doc.to_screen(imp->segment);
}

Demo arrange_shapes() {
  Document doc;
  doc.scene.add_object(polygon("box", {{-20, -20}, {20, -20}, {20, 20}, {-20, 20}}, 100, 100));
  doc.scene.add_object(ellipse("ball", 15, 10, 220, 100));
  doc.scene.add_object(polygon("tri", {{0, -15}, {15, 12}, {-15, 12}}, 160, 200));
  Recorder rec(doc);

  // Redraw the ball further right and down.
  const Polyline ball = doc.to_screen(doc.scene.contour("ball", doc.config.contour_samples)[0]);
  rec.selected(rec.stroke(shifted(ball, {25, 15})), "ball#0.0");

  // Tilt one side of the box.
  rec.selected(rec.stroke(moved(implicit_segment(rec.doc(), "box#0.0"), {100, 100}, 12, {0, 0})), "box#0.0");

  // Nudge a triangle edge, hold, then drag it further.
  const Polyline edge = shifted(implicit_segment(rec.doc(), "tri#0.1"), {10, 0});
  const Point2 end = edge.back();
  rec.selected(rec.hold_drag(edge, {end + Point2(5, 0), end + Point2(10, 5), end + Point2(20, 10)}), "tri#0.1");

  // Two-stroke flow: select the ball by shape, then show where it goes.
  rec.modifiers(kSelectFirst);
  rec.selected(rec.stroke(shifted(ball, {200, 150})), "ball#0.0");
  rec.modifiers(0);
  const Polyline ball_now = rec.doc().to_screen(rec.doc().scene.contour("ball", doc.config.contour_samples)[0]);
  rec.selected(rec.stroke(shifted(ball_now, {-40, 20})), "ball#0.0");

  rec.plain(EventKind::kUndo);
  rec.plain(EventKind::kRedo);
  rec.plain(EventKind::kUndo);
  return rec.finish("arrange-shapes");
}

Demo light_switch() {
  Document doc;
  SceneObject lamp;
  lamp.id = "lamp";
  lamp.kind = ObjectKind::kSpotlight;
  lamp.shape = {{"cone-angle", 0.5}, {"height", 100.0}};
  lamp.transform.tx = 150;
  lamp.transform.ty = 160;
  doc.scene.add_object(lamp);
  doc.scene.add_object(polygon("plate", {{-15, -25}, {15, -25}, {15, 25}, {-15, 25}}, 320, 125));
  Recorder rec(doc);

  rec.mode(Mode::kCreate);
  rec.selection({"lamp"});
  rec.canvas({{290, 80}, {350, 170}});
  const std::string on = rec.created(line({320, 128}, {320, 98}));

  // Narrow the cone by redrawing its hot-spot.
  rec.mode(Mode::kControl);
  rec.pick("lamp/shape/cone-angle");
  Scene target = rec.doc().scene;
  target.set_attr(AttributePath::parse("lamp/shape/cone-angle"), 0.35);
  rec.selected(rec.stroke(rec.doc().to_screen(target.contour("lamp", doc.config.contour_samples)[0])), "lamp#0");
  rec.pick("");

  rec.mode(Mode::kCreate);
  const std::string off = rec.created(line({320, 138}, {320, 166}));

  rec.mode(Mode::kControl);
  rec.selected(rec.stroke(line({320, 99}, {320, 127})), on);
  rec.selected(rec.stroke(line({320, 165}, {320, 139})), off);
  rec.plain(EventKind::kUndo);
  return rec.finish("light-switch");
}

Demo move_rotate_path() {
  Document doc;
  doc.scene.add_object(polygon("car", {{-20, -10}, {20, -10}, {20, 10}, {-20, 10}}, 60, 200));
  Recorder rec(doc);

  rec.mode(Mode::kCreate);
  rec.selection({"car"});
  rec.canvas({{300, 20}, {460, 120}});
  rec.created(line({330, 40}, {330, 100}));

  rec.mode(Mode::kControl);
  const Polyline side = implicit_segment(rec.doc(), "car#0.0");
  rec.selected(rec.stroke(moved(side, centroid(side), 30, {120, -40})), "car#0.0");
  rec.mode(Mode::kCreate);
  rec.created(line({380, 40}, {380, 100}));

  rec.mode(Mode::kControl);
  const Polyline side2 = implicit_segment(rec.doc(), "car#0.0");
  rec.selected(rec.stroke(moved(side2, centroid(side2), 30, {120, 40})), "car#0.0");
  rec.mode(Mode::kCreate);
  rec.created(line({430, 40}, {430, 100}));

  const std::string path = rec.created(line({315, 70}, {445, 70}, 20));

  // Cross the path a quarter of the way along, then hold and slide to the end.
  rec.mode(Mode::kControl);
  rec.selected(rec.stroke(line({355, 40}, {355, 100})), path);
  rec.selected(rec.hold_drag(line({390, 40}, {390, 100}), {{400, 100}, {420, 98}, {440, 96}, {455, 95}}), path);
  return rec.finish("move-rotate-path");
}

Demo boat_moon_nested() {
  Document doc;
  doc.scene.add_object(polygon("boat", {{-25, -6}, {25, -6}, {15, 8}, {-15, 8}}, 80, 220));
  doc.scene.add_object(ellipse("moon", 12, 12, 300, 60));
  Recorder rec(doc);

  rec.mode(Mode::kCreate);
  rec.selection({"boat"});
  rec.canvas({{20, 300}, {180, 380}});
  rec.created(line({50, 310}, {50, 370}));
  rec.mode(Mode::kControl);
  rec.selected(rec.stroke(shifted(implicit_segment(rec.doc(), "boat#0.0"), {150, 0})), "boat#0.0");
  rec.mode(Mode::kCreate);
  rec.created(line({150, 310}, {150, 370}));
  const std::string boat_path = rec.created(line({30, 340}, {170, 340}, 20));

  rec.selection({"moon"});
  rec.canvas({{220, 300}, {380, 380}});
  rec.created(line({250, 310}, {250, 370}));
  rec.mode(Mode::kControl);
  const Polyline moon = rec.doc().to_screen(rec.doc().scene.contour("moon", doc.config.contour_samples)[0]);
  rec.selected(rec.stroke(shifted(moon, {40, -40})), "moon#0.0");
  rec.mode(Mode::kCreate);
  rec.created(line({350, 310}, {350, 370}));
  const std::string moon_path = rec.created(line({230, 340}, {370, 340}, 20));

  // A parent canvas bookmarking both child weights.
  rec.selection({"squidget/" + boat_path, "squidget/" + moon_path});
  rec.canvas({{400, 300}, {560, 380}});
  rec.created(line({430, 310}, {430, 370}));
  rec.mode(Mode::kControl);
  rec.selected(rec.stroke(line({150, 312}, {150, 368})), boat_path);
  rec.selected(rec.stroke(line({350, 312}, {350, 368})), moon_path);
  rec.mode(Mode::kCreate);
  rec.created(line({530, 310}, {530, 370}));
  const std::string parent = rec.created(line({410, 340}, {550, 340}, 20));

  rec.mode(Mode::kControl);
  rec.selected(rec.stroke(line({480, 312}, {480, 368})), parent);
  return rec.finish("boat-moon-nested");
}

}  // namespace

std::vector<Demo> build_all() { return {arrange_shapes(), light_switch(), move_rotate_path(), boat_moon_nested()}; }

}  // namespace squidget::demos
