#include "squidget/session.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "squidget/error.hpp"

namespace squidget {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 10> kEventNames = {{
    {EventKind::kPointerDown, "pointer-down"},
    {EventKind::kPointerMove, "pointer-move"},
    {EventKind::kPointerUp, "pointer-up"},
    {EventKind::kModifierChange, "modifier-change"},
    {EventKind::kModeSwitch, "mode-switch"},
    {EventKind::kCanvasCreate, "canvas-create"},
    {EventKind::kSelectionChange, "selection-change"},
    {EventKind::kAttributePick, "attribute-pick"},
    {EventKind::kUndo, "undo"},
    {EventKind::kRedo, "redo"},
}};

Effect error_effect(const std::string& message) { return {"error", {{"message", message}}}; }

Effect highlight(const MatchResult& m, bool pending) {
  return {"selection-highlight",
          {{"id", m.id},
           {"kind", std::string(to_string(m.kind))},
           {"distance", m.distance},
           {"dev", m.dev},
           {"score", m.score},
           {"pending", pending}}};
}

Rect world_rect(const Document& doc, const Rect& screen) {
  const Polyline corners = doc.to_world(Polyline{screen.min, Point2(screen.max.x(), screen.min.y()), screen.max,
                                                 Point2(screen.min.x(), screen.max.y())});
  Rect out{corners.front(), corners.front()};
  for (const auto& c : corners) {
    out.min = out.min.cwiseMin(c);
    out.max = out.max.cwiseMax(c);
  }
  return out;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view text) {
  for (const auto& [k, name] : kEventNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Mode mode) { return mode == Mode::kCreate ? "create" : "control"; }

std::optional<Mode> mode_from_string(std::string_view text) {
  if (text == "create") return Mode::kCreate;
  if (text == "control") return Mode::kControl;
  return std::nullopt;
}

nlohmann::json to_json(const Effect& effect) { return {{"kind", effect.kind}, {"data", effect.data}}; }

Session::Session(Document doc) : doc_(std::move(doc)) {}

HandleResult Session::reject(std::string reason) const {
  HandleResult r;
  r.accepted = false;
  r.effects.push_back({"rejected", {{"reason", std::move(reason)}}});
  return r;
}

HandleResult Session::handle_event(const SessionEvent& event) {
  if (last_t_ && event.t < *last_t_) return reject("timestamp goes backwards");
  const bool in_stroke = stroke_.has_value();
  switch (event.kind) {
    case EventKind::kPointerDown:
      if (in_stroke) return reject("pointer-down during a stroke");
      if (!event.position) return reject("pointer-down without a position");
      break;
    case EventKind::kPointerMove:
      if (!in_stroke) return reject("pointer-move outside a stroke");
      if (!event.position) return reject("pointer-move without a position");
      break;
    case EventKind::kPointerUp:
      if (!in_stroke) return reject("pointer-up without pointer-down");
      break;
    case EventKind::kModeSwitch:
      if (in_stroke) return reject("mode-switch during a stroke");
      if (!event.mode) return reject("mode-switch without a mode");
      break;
    case EventKind::kCanvasCreate:
      if (in_stroke) return reject("canvas-create during a stroke");
      if (!event.region) return reject("canvas-create without a region");
      break;
    case EventKind::kUndo:
    case EventKind::kRedo:
      if (in_stroke) return reject(std::string(to_string(event.kind)) + " during a stroke");
      break;
    case EventKind::kAttributePick:
      if (event.attribute && !event.attribute->empty()) {
        try {
          AttributePath::parse(*event.attribute);
        } catch (const Error& e) {
          return reject(e.what());
        }
      }
      break;
    case EventKind::kModifierChange:
    case EventKind::kSelectionChange:
      break;
  }
  last_t_ = event.t;

  HandleResult result;
  auto& effects = result.effects;
  switch (event.kind) {
    case EventKind::kPointerDown:
      pointer_down(event);
      break;
    case EventKind::kPointerMove:
      pointer_move(event, effects);
      break;
    case EventKind::kPointerUp:
      pointer_up(event, effects);
      break;
    case EventKind::kModifierChange:
      held_ = event.modifiers;
      if (stroke_) stroke_->modifiers |= event.modifiers;
      break;
    case EventKind::kModeSwitch:
      mode_ = *event.mode;
      pending_.reset();
      effects.push_back({"mode-changed", {{"mode", std::string(to_string(mode_))}}});
      break;
    case EventKind::kCanvasCreate:
      canvas_create(event, effects);
      break;
    case EventKind::kSelectionChange:
      selection_ = event.selection;
      break;
    case EventKind::kAttributePick:
      if (event.attribute && !event.attribute->empty()) {
        picked_ = AttributePath::parse(*event.attribute);
      } else {
        picked_.reset();
      }
      break;
    case EventKind::kUndo:
      undo(effects);
      break;
    case EventKind::kRedo:
      redo(effects);
      break;
  }
  return result;
}

void Session::pointer_down(const SessionEvent& event) {
  StrokeState s;
  s.points.push_back(*event.position);
  s.modifiers = held_;
  s.anchor = *event.position;
  s.anchor_t = event.t;
  stroke_ = std::move(s);
}

void Session::pointer_move(const SessionEvent& event, std::vector<Effect>& effects) {
  StrokeState& s = *stroke_;
  const Point2 pos = *event.position;
  if (drag_) {
    const AttributeUpdate u = drag_update(doc_, *drag_, pos);
    drag_record_ = coalesce(drag_record_, u);
    note_changes(u, effects);
    return;
  }
  if (s.held) return;
  if (mode_ == Mode::kControl && !(s.modifiers & kSelectFirst) && event.t - s.anchor_t >= doc_.config.hold_ms &&
      arc_length(s.points) > doc_.config.hold_radius) {
    // The pointer rested near the anchor until this sample arrived.
    s.held = true;
    finish_control_stroke(true, effects);
    if (drag_) {
      const AttributeUpdate u = drag_update(doc_, *drag_, pos);
      drag_record_ = coalesce(drag_record_, u);
      note_changes(u, effects);
    }
    return;
  }
  s.points.push_back(pos);
  if ((pos - s.anchor).norm() > doc_.config.hold_radius) {
    s.anchor = pos;
    s.anchor_t = event.t;
  }
}

void Session::pointer_up(const SessionEvent& event, std::vector<Effect>& effects) {
  StrokeState& s = *stroke_;
  if (s.held) {
    if (drag_ && event.position) {
      const AttributeUpdate u = drag_update(doc_, *drag_, *event.position);
      drag_record_ = coalesce(drag_record_, u);
      note_changes(u, effects);
    }
    if (!drag_record_.empty()) push({drag_record_, std::nullopt, std::nullopt});
    drag_record_ = {};
    drag_.reset();
  } else {
    if (event.position && (*event.position - s.points.back()).norm() > 0.0) s.points.push_back(*event.position);
    if (mode_ == Mode::kControl) {
      finish_control_stroke(false, effects);
    } else {
      finish_create_stroke(effects);
    }
  }
  stroke_.reset();
}

Constraint Session::constraint() const {
  const unsigned mods = stroke_ ? stroke_->modifiers : held_;
  if (mods & kScaleModifier) return Constraint::kScale;
  const bool translate = mods & kTranslate;
  const bool rotate = mods & kRotate;
  if (translate && !rotate) return Constraint::kTranslateOnly;
  if (rotate && !translate) return Constraint::kRotateOnly;
  return Constraint::kFull;
}

MatchOptions Session::options(bool shape_only) const {
  MatchOptions o;
  o.shape_only = shape_only;
  o.fit = constraint() == Constraint::kScale ? FitMode::kSimilarity : FitMode::kRigid;
  return o;
}

void Session::finish_control_stroke(bool start_drag, std::vector<Effect>& effects) {
  const StrokeState& s = *stroke_;
  ++stats_.strokes;
  try {
    if (s.modifiers & kSelectFirst) {
      const auto m = select(s.points, doc_, options(true));
      if (m) {
        pending_ = Pending{m->id, m->kind};
        ++stats_.selections;
        effects.push_back(highlight(*m, true));
      } else {
        pending_.reset();
        effects.push_back({"selection-cleared", nlohmann::json::object()});
      }
      return;
    }

    // A picked shape parameter turns the stroke into a redraw of that
    // object's outline.
    const auto& pick = picked_ ? picked_->segments() : std::vector<std::string>{};
    if (!pending_ && pick.size() == 3 && pick[1] == "shape" && doc_.scene.has_object(pick[0])) {
      const auto imp = closest_segment(doc_, s.points, pick[0]);
      if (!imp) throw Error(ErrorKind::kUnknownObject, "'" + pick[0] + "' has no contour");
      const ScalarSolution solution = solve_scalar(doc_, s.points, *imp, *picked_);
      ++stats_.selections;
      effects.push_back({"selection-highlight",
                         {{"id", imp->id},
                          {"kind", "implicit"},
                          {"attribute", picked_->str()},
                          {"residual", solution.residual},
                          {"pending", false}}});
      note_changes(solution.update, effects);
      if (start_drag) {
        drag_record_ = solution.update;
      } else if (!solution.update.empty()) {
        push({solution.update, std::nullopt, std::nullopt});
      }
      return;
    }

    std::optional<MatchResult> m;
    if (pending_) {
      const Pending p = *pending_;
      pending_.reset();
      m = match_one(s.points, doc_, p.id, p.kind, options(s.modifiers & kShapeOnly));
    } else {
      m = select(s.points, doc_, options(s.modifiers & kShapeOnly));
    }
    if (!m) {
      effects.push_back({"selection-cleared", nlohmann::json::object()});
      return;
    }
    ++stats_.selections;
    effects.push_back(highlight(*m, false));

    if (start_drag) drag_ = begin_drag(doc_, *m, s.points.back(), constraint());
    const AttributeUpdate update = apply_match(doc_, *m, constraint());
    note_changes(update, effects);
    if (start_drag) {
      drag_record_ = update;
    } else if (!update.empty()) {
      push({update, std::nullopt, std::nullopt});
    }
  } catch (const Error& e) {
    effects.push_back(error_effect(e.what()));
  }
}

void Session::finish_create_stroke(std::vector<Effect>& effects) {
  const StrokeState& s = *stroke_;
  ++stats_.strokes;
  const Registry before = doc_.registry;
  try {
    switch (classify_create_stroke(doc_, s.points)) {
      case CreateGesture::kCrossOut: {
        const auto removed = delete_by_crossout(doc_, s.points);
        stats_.deleted += static_cast<int>(removed.size());
        effects.push_back({"squidget-deleted", {{"ids", removed}}});
        break;
      }
      case CreateGesture::kConnect: {
        const auto& cs = create_continuous(doc_, s.points);
        ++stats_.created;
        effects.push_back({"squidget-created", {{"id", cs.id}, {"kind", "continuous"}, {"members", cs.members}}});
        break;
      }
      case CreateGesture::kDiscrete: {
        const auto canvas = doc_.registry.topmost_canvas_containing(doc_.to_world(sanitize_stroke(s.points)));
        if (!canvas) throw Error(ErrorKind::kOutsideCanvas, "stroke is not inside any canvas");
        const auto& d = create_discrete(doc_, s.points, *canvas);
        ++stats_.created;
        effects.push_back({"squidget-created", {{"id", d.id}, {"kind", "discrete"}, {"canvas", d.canvas}}});
        break;
      }
    }
    push({{}, before, doc_.registry});
  } catch (const Error& e) {
    doc_.registry = before;
    effects.push_back(error_effect(e.what()));
  }
}

void Session::canvas_create(const SessionEvent& event, std::vector<Effect>& effects) {
  if (mode_ != Mode::kCreate) {
    effects.push_back(error_effect("canvases are created in create mode"));
    return;
  }
  const Registry before = doc_.registry;
  try {
    const auto& canvas = create_canvas(doc_, world_rect(doc_, *event.region), selection_);
    ++stats_.created;
    std::vector<std::string> paths;
    for (const auto& p : canvas.attributes) paths.push_back(p.str());
    effects.push_back({"canvas-created", {{"id", canvas.id}, {"attributes", paths}}});
    push({{}, before, doc_.registry});
  } catch (const Error& e) {
    doc_.registry = before;
    effects.push_back(error_effect(e.what()));
  }
}

void Session::push(UndoEntry entry) {
  undo_.push_back(std::move(entry));
  redo_.clear();
}

void Session::note_changes(const AttributeUpdate& update, std::vector<Effect>& effects) {
  if (update.changes.empty() && update.warnings.empty()) return;
  stats_.attribute_changes += static_cast<int>(update.changes.size());
  nlohmann::json changes = nlohmann::json::array();
  for (const auto& c : update.changes) {
    changes.push_back({{"path", c.path.str()}, {"old", c.old_value}, {"new", c.new_value}});
  }
  effects.push_back({"attribute-changed", {{"changes", changes}, {"warnings", update.warnings}}});
}

void Session::undo(std::vector<Effect>& effects) {
  if (undo_.empty()) return;
  UndoEntry entry = std::move(undo_.back());
  undo_.pop_back();
  revert(doc_, entry.update);
  if (entry.registry_before) doc_.registry = *entry.registry_before;
  ++stats_.undos;
  effects.push_back({"undone", {{"changes", entry.update.changes.size()}, {"registry", entry.registry_before.has_value()}}});
  redo_.push_back(std::move(entry));
}

void Session::redo(std::vector<Effect>& effects) {
  if (redo_.empty()) return;
  UndoEntry entry = std::move(redo_.back());
  redo_.pop_back();
  if (entry.registry_after) doc_.registry = *entry.registry_after;
  reapply(doc_, entry.update);
  ++stats_.redos;
  effects.push_back({"redone", {{"changes", entry.update.changes.size()}, {"registry", entry.registry_after.has_value()}}});
  undo_.push_back(std::move(entry));
}

void Session::undo_all() {
  std::vector<Effect> ignored;
  while (!undo_.empty()) undo(ignored);
}

ReplayResult replay(const Document& initial, const std::vector<SessionEvent>& events) {
  Session session(initial);
  ReplayResult out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto r = session.handle_event(events[i]);
    if (!r.accepted) {
      const std::string reason = r.effects.empty() ? "rejected" : r.effects.front().data.value("reason", "rejected");
      throw Error(ErrorKind::kMalformedLog, "malformed log at event " + std::to_string(i) + ": " + reason);
    }
    for (auto& e : r.effects) out.effects.push_back(std::move(e));
  }
  out.document = session.document();
  out.stats = session.stats();
  return out;
}

}  // namespace squidget
