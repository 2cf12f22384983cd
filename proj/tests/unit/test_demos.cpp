#include <filesystem>
#include <numbers>

#include "demo_scenes.hpp"
#include "doctest.h"
#include "squidget/persistence.hpp"

using namespace squidget;

namespace {

const std::filesystem::path kDir = SQUIDGET_DEMO_DIR;

double get(const Document& d, std::string_view path) { return d.get_attr(AttributePath::parse(path)); }

const demos::Demo& demo(std::string_view name) {
  static const auto all = demos::build_all();
  for (const auto& d : all) {
    if (d.name == name) return d;
  }
  FAIL("no demo " << name);
  return all.front();
}

}  // namespace

TEST_CASE("committed demo files match the generator") {
  for (const auto& d : demos::build_all()) {
    CAPTURE(d.name);
    CHECK(read_file(kDir / (d.name + ".scene.json")) == serialize_document(d.initial));
    CHECK(read_file(kDir / (d.name + ".log.json")) == serialize_event_log(d.log));
  }
}

TEST_CASE("demos replay deterministically and undo to the start") {
  for (const auto& d : demos::build_all()) {
    CAPTURE(d.name);
    const Document doc = load_document(kDir / (d.name + ".scene.json"));
    const EventLog log = load_event_log(kDir / (d.name + ".log.json"));
    REQUIRE_NOTHROW(verify_log(log, doc));
    const auto first = replay(doc, log.events);
    const auto second = replay(doc, log.events);
    CHECK(serialize_document(first.document) == serialize_document(second.document));
    CHECK(first.stats == second.stats);
    CHECK(first.stats.strokes > 0);

    Session s(doc);
    for (const auto& e : log.events) REQUIRE(s.handle_event(e).accepted);
    CHECK(s.document() == first.document);
    s.undo_all();
    CHECK(serialize_document(s.document()) == serialize_document(doc));
  }
}

TEST_CASE("arrange-shapes") {
  const auto& d = demo("arrange-shapes");
  const Document end = replay(d.initial, d.log.events).document;
  // Box: one side tilted by 12 degrees about its centre.
  CHECK(get(end, "box/transform/rotation") == doctest::Approx(12 * std::numbers::pi / 180).epsilon(1e-9));
  CHECK(get(end, "box/transform/tx") == doctest::Approx(100).epsilon(1e-9));
  // Ball: the second redraw was undone, redone, undone.
  CHECK(get(end, "ball/transform/tx") == doctest::Approx(245).epsilon(1e-9));
  CHECK(get(end, "ball/transform/ty") == doctest::Approx(115).epsilon(1e-9));
  // Triangle: shifted 10, then dragged a further (20, 10).
  CHECK(get(end, "tri/transform/tx") == doctest::Approx(190).epsilon(1e-9));
  CHECK(get(end, "tri/transform/ty") == doctest::Approx(210).epsilon(1e-9));
}

TEST_CASE("light-switch") {
  const auto& d = demo("light-switch");
  Session s(d.initial);
  double lowest = get(d.initial, "lamp/shape/cone-angle");
  for (const auto& e : d.log.events) {
    REQUIRE(s.handle_event(e).accepted);
    lowest = std::min(lowest, get(s.document(), "lamp/shape/cone-angle"));
  }
  CHECK(lowest == doctest::Approx(0.35).epsilon(1e-4));
  // Ends on the "on" squidget after undoing "off".
  CHECK(get(s.document(), "lamp/shape/cone-angle") == 0.5);
  CHECK(s.document().registry.discrete().size() == 2);
}

TEST_CASE("move-rotate-path") {
  const auto& d = demo("move-rotate-path");
  const Document end = replay(d.initial, d.log.events).document;
  REQUIRE(end.registry.continuous().size() == 1);
  const auto& [id, path] = *end.registry.continuous().begin();
  CHECK(path.weight == 1.0);
  CHECK(get(end, "car/transform/rotation") == doctest::Approx(std::numbers::pi / 3).epsilon(1e-9));
  // At w = 1 the car sits exactly at the last member's snapshot.
  const auto& last = end.registry.discrete().at(path.members.back());
  for (const auto& [attr, v] : last.snapshot) CHECK(end.get_attr(attr) == v);
}

TEST_CASE("boat-moon-nested") {
  const auto& d = demo("boat-moon-nested");
  const Document end = replay(d.initial, d.log.events).document;
  CHECK(end.registry.continuous().size() == 3);
  for (const auto& [id, c] : end.registry.continuous()) CHECK(c.weight == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(get(end, "boat/transform/tx") == doctest::Approx(155).epsilon(1e-9));
  CHECK(get(end, "moon/transform/tx") == doctest::Approx(320).epsilon(1e-9));
  CHECK(get(end, "moon/transform/ty") == doctest::Approx(40).epsilon(1e-9));
}
