#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "squidget/error.hpp"
#include "squidget/persistence.hpp"

using namespace squidget;
using namespace squidget::testing;
using nlohmann::json;

namespace {

AttributePath P(std::string_view s) { return AttributePath::parse(s); }

std::pair<ErrorKind, std::string> error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.kind(), e.what()};
  }
  FAIL("no error raised");
  return {ErrorKind::kParse, ""};
}

Document full_doc() {
  Document doc;
  doc.config.lambda = 0.6;
  doc.scene.set_view({0.1, 1.25, Point2(3, -4)});
  SceneObject g;
  g.id = "g";
  g.kind = ObjectKind::kGroup;
  doc.scene.add_object(g);
  SceneObject e = ellipse("e", 3.0, 1.0 / 3.0, 0.1, 0.2);
  e.parent = "g";
  doc.scene.add_object(e);
  doc.scene.add_object(polygon("p", {{0, 0}, {1, 0}, {0.5, 1}}, 10, 10));
  doc.scene.add_object(spotlight("lamp", 0.3, 50.0, 100, 100));
  doc.registry.add_canvas({"k", {{0, 0}, {100, 100}}, {P("e/transform/tx"), P("lamp/shape/cone-angle")}, 0});
  doc.registry.add_discrete({"a", line({20, 20}, {20, 80}, 7), "k", {{P("e/transform/tx"), 0.1}}});
  doc.registry.add_discrete({"b", line({80, 20}, {80, 80}, 7), "k",
                             {{P("e/transform/tx"), 5.0}, {P("lamp/shape/cone-angle"), 0.5}}});
  doc.registry.add_continuous({"c", {"a", "b"}, {{20, 50}, {80, 50}}, 0.3});
  doc.registry.set_next_id(4);
  return doc;
}

Document random_doc(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_real_distribution<double> pos(0.01, 10);
  Document doc;
  const int n = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) {
    const std::string id = "o" + std::to_string(i);
    switch (rng() % 3) {
      case 0: doc.scene.add_object(ellipse(id, pos(rng), pos(rng), u(rng), u(rng))); break;
      case 1: doc.scene.add_object(polygon(id, random_curve(rng, 6, 40, {u(rng), u(rng)}), u(rng), u(rng))); break;
      default: doc.scene.add_object(spotlight(id, 0.3, pos(rng), u(rng), u(rng))); break;
    }
    doc.scene.set_attr(P(id + "/transform/rotation"), u(rng) / 500);
  }
  doc.registry.add_canvas({"k", {{0, 0}, {100, 100}}, {P("o0/transform/tx")}, 0});
  for (int i = 0; i < 3; ++i) {
    doc.registry.add_discrete({"d" + std::to_string(i), random_curve(rng, 20, 30, {50, 50}), "k",
                               {{P("o0/transform/tx"), u(rng)}}});
  }
  doc.registry.add_continuous({"c", {"d0", "d1", "d2"}, {{10, 10}, {50, 60}, {90, 10}}, 0.5});
  doc.registry.set_next_id(10);
  return doc;
}

}  // namespace

TEST_CASE("document round trip") {
  const Document doc = full_doc();
  const std::string text = serialize_document(doc);
  CHECK(text.back() == '\n');
  const Document back = parse_document(text);
  CHECK(back == doc);
  CHECK(serialize_document(back) == text);
}

TEST_CASE("random documents round trip byte for byte") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Document doc = random_doc(rng);
    const std::string text = serialize_document(doc);
    const Document back = parse_document(text);
    CHECK(back == doc);
    CHECK(serialize_document(back) == text);
    CHECK(document_hash(back) == document_hash(doc));
  }
}

TEST_CASE("canonical output does not depend on input layout") {
  const std::string text = serialize_document(full_doc());
  // Compact, reordered keys.
  json j = json::parse(text);
  const std::string compact = j.dump();
  CHECK(serialize_document(parse_document(compact)) == text);
  // Missing optional sections default.
  const Document minimal = parse_document(R"({"version": 1})");
  CHECK(minimal == Document{});
}

TEST_CASE("syntax errors carry line and column") {
  const std::string text = serialize_document(full_doc());
  const auto [kind, msg] = error_of([&] { parse_document(text.substr(0, text.size() / 2)); });
  CHECK(kind == ErrorKind::kParse);
  CHECK(msg.find("line ") != std::string::npos);
  CHECK(msg.find("column ") != std::string::npos);

  const auto [k2, m2] = error_of([] { parse_document("{\n  \"version\": 1,\n  x\n}"); });
  CHECK(k2 == ErrorKind::kParse);
  CHECK(m2.find("line 3, column 3") != std::string::npos);
}

TEST_CASE("schema errors carry a pointer") {
  json j = document_to_json(full_doc());
  j["objects"][1]["colour"] = "red";
  auto [kind, msg] = error_of([&] { parse_document(j.dump()); });
  CHECK(kind == ErrorKind::kParse);
  CHECK(msg.find("/objects/1/colour") != std::string::npos);

  j = document_to_json(full_doc());
  j["discrete"][0]["curve"][2] = {1.0};
  std::tie(kind, msg) = error_of([&] { parse_document(j.dump()); });
  CHECK(kind == ErrorKind::kParse);
  CHECK(msg.find("/discrete/0/curve/2") != std::string::npos);

  j = document_to_json(full_doc());
  j["objects"][0]["transform"]["tx"] = "zero";
  std::tie(kind, msg) = error_of([&] { parse_document(j.dump()); });
  CHECK(msg.find("/objects/0/transform/tx") != std::string::npos);

  j = document_to_json(full_doc());
  j.erase("next_id");
  j["extra"] = 1;
  std::tie(kind, msg) = error_of([&] { parse_document(j.dump()); });
  CHECK(msg.find("/extra") != std::string::npos);

  j = document_to_json(full_doc());
  j["canvases"][0]["attributes"][0] = "e//tx";
  std::tie(kind, msg) = error_of([&] { parse_document(j.dump()); });
  CHECK(kind == ErrorKind::kParse);
  CHECK(msg.find("/canvases/0/attributes/0") != std::string::npos);
}

TEST_CASE("version") {
  json j = document_to_json(full_doc());
  j["version"] = 2;
  CHECK(error_of([&] { parse_document(j.dump()); }).first == ErrorKind::kVersion);
  j.erase("version");
  CHECK(error_of([&] { parse_document(j.dump()); }).first == ErrorKind::kParse);

  json log = json::parse(serialize_event_log(EventLog{}));
  log["version"] = 0;
  CHECK(error_of([&] { parse_event_log(log.dump()); }).first == ErrorKind::kVersion);
}

TEST_CASE("structural errors") {
  json j = document_to_json(full_doc());
  j["objects"].push_back(j["objects"][0]);
  CHECK(error_of([&] { parse_document(j.dump()); }).first == ErrorKind::kDuplicateId);

  j = document_to_json(full_doc());
  j["discrete"][0]["canvas"] = "nowhere";
  const auto [kind, msg] = error_of([&] { parse_document(j.dump()); });
  CHECK(kind != ErrorKind::kParse);
  CHECK(msg.find("/discrete/0") != std::string::npos);
}

TEST_CASE("strict and lenient loading") {
  json j = document_to_json(full_doc());
  j["objects"][2]["transform"]["scale"] = -1.0;
  const auto [kind, msg] = error_of([&] { parse_document(j.dump()); });
  CHECK(kind == ErrorKind::kRangeViolation);
  CHECK(msg.find("p/transform/scale") != std::string::npos);

  const Document loose = parse_document(j.dump(), false);
  const auto problems = loose.validate();
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find("p/transform/scale") != std::string::npos);
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");

  Document a = full_doc();
  Document b = full_doc();
  CHECK(document_hash(a) == document_hash(b));
  b.scene.set_attr(P("e/transform/tx"), 0.1000000001);
  CHECK(document_hash(a) != document_hash(b));
}

TEST_CASE("event log round trip") {
  std::vector<SessionEvent> events;
  SessionEvent m = plain_event(EventKind::kModeSwitch, 1);
  m.mode = Mode::kCreate;
  events.push_back(m);
  SessionEvent sel = plain_event(EventKind::kSelectionChange, 2);
  sel.selection = {"e", "squidget/c"};
  events.push_back(sel);
  SessionEvent cc = plain_event(EventKind::kCanvasCreate, 3);
  cc.region = Rect{{1, 2}, {30, 40}};
  events.push_back(cc);
  SessionEvent mod = plain_event(EventKind::kModifierChange, 4);
  mod.modifiers = 0b11;
  events.push_back(mod);
  SessionEvent pick = plain_event(EventKind::kAttributePick, 5);
  pick.attribute = "lamp/shape/cone-angle";
  events.push_back(pick);
  stroke_events(events, line({0, 0}, {0.1, 1.0 / 7.0}, 5), 6);
  events.push_back(plain_event(EventKind::kUndo, 200));
  events.push_back(plain_event(EventKind::kRedo, 200));

  const Document doc = full_doc();
  const EventLog log = make_log(doc, events);
  const std::string text = serialize_event_log(log);
  const EventLog back = parse_event_log(text);
  CHECK(back == log);
  CHECK(serialize_event_log(back) == text);
  CHECK_NOTHROW(verify_log(back, doc));
}

TEST_CASE("event log rejects bad records") {
  const EventLog log = log_from_stroke(line({0, 0}, {10, 10}, 4));
  json j = json::parse(serialize_event_log(log));
  j["events"][2]["t"] = 0;
  auto [kind, msg] = error_of([&] { parse_event_log(j.dump()); });
  CHECK(kind == ErrorKind::kMalformedLog);
  CHECK(msg.find("event 2") != std::string::npos);

  j = json::parse(serialize_event_log(log));
  j["events"][1]["kind"] = "pointer-wiggle";
  std::tie(kind, msg) = error_of([&] { parse_event_log(j.dump()); });
  CHECK(kind == ErrorKind::kParse);
  CHECK(msg.find("/events/1/kind") != std::string::npos);

  j = json::parse(serialize_event_log(log));
  j["events"][0]["modifiers"] = {"hyper"};
  CHECK(error_of([&] { parse_event_log(j.dump()); }).first == ErrorKind::kParse);

  j = json::parse(serialize_event_log(log));
  j.erase("events");
  CHECK(error_of([&] { parse_event_log(j.dump()); }).first == ErrorKind::kParse);

  // Equal timestamps are allowed.
  j = json::parse(serialize_event_log(log));
  j["events"][1]["t"] = j["events"][0]["t"];
  CHECK_NOTHROW(parse_event_log(j.dump()));
}

TEST_CASE("verify log") {
  const Document doc = full_doc();
  EventLog log = make_log(doc, {});
  Document other = doc;
  other.scene.set_attr(P("e/transform/ty"), 1.0);
  CHECK(error_of([&] { verify_log(log, other); }).first == ErrorKind::kMalformedLog);

  other = doc;
  other.config.lambda = 0.5;
  CHECK(error_of([&] { verify_log(log, other); }).first == ErrorKind::kMalformedLog);

  log.document_hash.reset();
  CHECK(error_of([&] { verify_log(log, doc); }).first == ErrorKind::kMalformedLog);
}

TEST_CASE("stroke files") {
  const Polyline s = line({1, 2}, {3.5, -7.25}, 9);
  const EventLog log = log_from_stroke(s, 100, 16);
  REQUIRE(log.events.size() == s.size());
  CHECK(log.events.front().kind == EventKind::kPointerDown);
  CHECK(log.events.back().kind == EventKind::kPointerUp);
  CHECK(log.events.back().t == 100 + 16 * 8);
  CHECK(stroke_from_log(log) == s);
  CHECK(stroke_from_log(parse_event_log(serialize_event_log(log))) == s);

  EventLog bad = log;
  bad.events[3].kind = EventKind::kPointerUp;
  CHECK(error_of([&] { stroke_from_log(bad); }).first == ErrorKind::kMalformedLog);
  bad = log;
  bad.events.pop_back();
  CHECK(error_of([&] { stroke_from_log(bad); }).first == ErrorKind::kMalformedLog);
  bad = log;
  bad.events[0].position.reset();
  CHECK(error_of([&] { stroke_from_log(bad); }).first == ErrorKind::kMalformedLog);
  CHECK(error_of([] { stroke_from_log(EventLog{}); }).first == ErrorKind::kMalformedLog);
}

TEST_CASE("files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("squidget_persist_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const Document doc = full_doc();
  save_document(dir / "a.scene.json", doc);
  CHECK(load_document(dir / "a.scene.json") == doc);
  CHECK(read_file(dir / "a.scene.json") == serialize_document(doc));

  // Overwrite leaves no temporaries behind.
  save_document(dir / "a.scene.json", doc);
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);

  const EventLog log = make_log(doc, {});
  save_event_log(dir / "a.log.json", log);
  CHECK(load_event_log(dir / "a.log.json") == log);

  CHECK_THROWS_AS(read_file(dir / "missing.json"), Error);
  fs::remove_all(dir);
}
