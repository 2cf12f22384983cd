#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "squidget/document.hpp"
#include "squidget/matching.hpp"
#include "squidget/solver.hpp"

namespace squidget {

enum class EventKind {
  kPointerDown,
  kPointerMove,
  kPointerUp,
  kModifierChange,
  kModeSwitch,
  kCanvasCreate,
  kSelectionChange,
  kAttributePick,
  kUndo,
  kRedo,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view text);

/// Held-key bit set.
enum Modifier : unsigned {
  kSelectFirst = 1u << 0,
  kTranslate = 1u << 1,
  kRotate = 1u << 2,
  kScaleModifier = 1u << 3,
  kShapeOnly = 1u << 4,
};

inline constexpr std::string_view kModifierNames[] = {"select-first", "translate", "rotate", "scale", "shape-only"};

enum class Mode { kCreate, kControl };

std::string_view to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view text);

/// One input record. Which optional fields are meaningful depends on `kind`:
/// pointer events carry `position` (screen units; optional on pointer-up),
/// modifier-change carries the full held set in `modifiers`, mode-switch
/// carries `mode`, canvas-create carries `region` (screen corners),
/// selection-change carries `selection`, attribute-pick carries `attribute`
/// (empty to clear the pick).
struct SessionEvent {
  std::int64_t t = 0;  ///< milliseconds, non-decreasing
  EventKind kind = EventKind::kPointerMove;
  std::optional<Point2> position;
  unsigned modifiers = 0;
  std::optional<Mode> mode;
  std::optional<Rect> region;
  std::vector<std::string> selection;
  std::optional<std::string> attribute;

  bool operator==(const SessionEvent&) const = default;
};

/// Notification for the UI: `kind` is one of selection-highlight,
/// selection-cleared, attribute-changed, squidget-created, squidget-deleted,
/// canvas-created, mode-changed, undone, redone, rejected, error.
struct Effect {
  std::string kind;
  nlohmann::json data = nlohmann::json::object();
};

struct HandleResult {
  bool accepted = true;
  std::vector<Effect> effects;
};

struct Pending {
  std::string id;
  SquidgetKind kind = SquidgetKind::kDiscrete;
};

struct UndoEntry {
  AttributeUpdate update;
  std::optional<Registry> registry_before;
  std::optional<Registry> registry_after;
};

struct SessionStats {
  int strokes = 0;
  int selections = 0;
  int attribute_changes = 0;
  int created = 0;
  int deleted = 0;
  int undos = 0;
  int redos = 0;

  bool operator==(const SessionStats&) const = default;
};

struct StrokeState {
  Polyline points;
  unsigned modifiers = 0;  ///< union of modifiers held during the stroke
  Point2 anchor = Point2::Zero();
  std::int64_t anchor_t = 0;
  bool held = false;
};

/// Deterministic create/control state machine. All document mutation happens
/// inside handle_event.
class Session {
 public:
  explicit Session(Document doc);

  HandleResult handle_event(const SessionEvent& event);

  const Document& document() const { return doc_; }
  Mode mode() const { return mode_; }
  const std::optional<Pending>& pending() const { return pending_; }
  bool dragging() const { return drag_.has_value(); }
  bool stroke_active() const { return stroke_.has_value(); }
  unsigned held_modifiers() const { return held_; }
  std::size_t undo_depth() const { return undo_.size(); }
  std::size_t redo_depth() const { return redo_.size(); }
  const SessionStats& stats() const { return stats_; }

  /// Steps back through every undo record.
  void undo_all();

 private:
  HandleResult reject(std::string reason) const;
  void pointer_down(const SessionEvent& event);
  void pointer_move(const SessionEvent& event, std::vector<Effect>& effects);
  void pointer_up(const SessionEvent& event, std::vector<Effect>& effects);
  void finish_control_stroke(bool start_drag, std::vector<Effect>& effects);
  void finish_create_stroke(std::vector<Effect>& effects);
  void canvas_create(const SessionEvent& event, std::vector<Effect>& effects);
  void undo(std::vector<Effect>& effects);
  void redo(std::vector<Effect>& effects);
  void push(UndoEntry entry);
  void note_changes(const AttributeUpdate& update, std::vector<Effect>& effects);
  Constraint constraint() const;
  MatchOptions options(bool shape_only) const;

  Document doc_;
  Mode mode_ = Mode::kControl;
  unsigned held_ = 0;
  std::vector<std::string> selection_;
  std::optional<AttributePath> picked_;
  std::optional<Pending> pending_;
  std::optional<StrokeState> stroke_;
  std::optional<DragState> drag_;
  AttributeUpdate drag_record_;
  std::optional<std::int64_t> last_t_;
  std::vector<UndoEntry> undo_;
  std::vector<UndoEntry> redo_;
  SessionStats stats_;
};

struct ReplayResult {
  Document document;
  SessionStats stats;
  std::vector<Effect> effects;
};

/// Runs every event through a fresh session. Error(kMalformedLog) naming the
/// offending index if any event is rejected.
ReplayResult replay(const Document& initial, const std::vector<SessionEvent>& events);

nlohmann::json to_json(const Effect& effect);

}  // namespace squidget
