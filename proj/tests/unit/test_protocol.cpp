#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "squidget/protocol.hpp"

using namespace squidget;
using namespace squidget::testing;
using nlohmann::json;

namespace {

AttributePath P(std::string_view s) { return AttributePath::parse(s); }

Document bars_doc() {
  Document doc;
  doc.scene.add_object(polygon("box", {{-10, -10}, {10, -10}, {10, 10}, {-10, 10}}, 0, 300));
  doc.registry.add_canvas({"k", {{0, 0}, {100, 100}}, {P("box/transform/tx")}, 0});
  doc.registry.add_discrete({"a", line({20, 20}, {20, 80}, 30), "k", {{P("box/transform/tx"), 0.0}}});
  doc.registry.add_discrete({"b", line({80, 20}, {80, 80}, 30), "k", {{P("box/transform/tx"), 10.0}}});
  doc.registry.set_next_id(10);
  return doc;
}

json event_message(std::int64_t seq, const SessionEvent& e) {
  return {{"seq", seq}, {"type", "event"}, {"event", event_to_json(e)}};
}

/// Checks the reply framing for one inbound message and returns its replies.
struct Channel {
  Endpoint endpoint;
  std::int64_t last_out = 0;

  explicit Channel(Document doc) : endpoint(std::move(doc)) {}

  std::vector<json> send_line(const std::string& line, const json& expected_ack) {
    std::vector<json> replies;
    for (const auto& text : endpoint.handle_line(line)) {
      CHECK(text.find('\n') == std::string::npos);
      replies.push_back(json::parse(text));
    }
    REQUIRE(!replies.empty());
    int terminal = 0;
    for (std::size_t i = 0; i < replies.size(); ++i) {
      const json& r = replies[i];
      CHECK(r["seq"].get<std::int64_t>() > last_out);
      last_out = r["seq"].get<std::int64_t>();
      CHECK(r["ack"] == expected_ack);
      const std::string type = r["type"];
      if (type == "done" || type == "error") {
        ++terminal;
        CHECK(i + 1 == replies.size());
      }
    }
    CHECK(terminal == 1);
    return replies;
  }
  std::vector<json> send(const json& message) { return send_line(message.dump(), message["seq"]); }
};

}  // namespace

TEST_CASE("a stroke over the channel selects and records") {
  Channel ch(bars_doc());
  std::vector<SessionEvent> events;
  stroke_events(events, line({80, 25}, {80, 75}), 10);
  std::int64_t seq = 1;
  std::vector<json> all;
  for (const auto& e : events) {
    const auto replies = ch.send(event_message(seq++, e));
    CHECK(replies.back()["type"] == "done");
    CHECK(replies.back()["accepted"] == true);
    all.insert(all.end(), replies.begin(), replies.end());
  }
  bool highlighted = false;
  for (const auto& r : all) {
    if (r["type"] == "effect" && r["effect"]["kind"] == "selection-highlight") {
      highlighted = true;
      CHECK(r["effect"]["data"]["id"] == "b");
    }
  }
  CHECK(highlighted);
  CHECK(ch.endpoint.session().document().get_attr(P("box/transform/tx")) == 10.0);

  const auto snap = ch.send({{"seq", seq++}, {"type", "snapshot"}});
  REQUIRE(snap.size() == 2);
  CHECK(snap[0]["type"] == "snapshot");
  CHECK(snap[0]["document"] == document_to_json(ch.endpoint.session().document()));
  CHECK(snap[0]["mode"] == "control");

  const EventLog rec = ch.endpoint.recording();
  CHECK(rec.events == events);
  CHECK_NOTHROW(verify_log(rec, bars_doc()));
  CHECK(replay(bars_doc(), rec.events).document == ch.endpoint.session().document());
}

TEST_CASE("rejected events are answered but not recorded") {
  Channel ch(bars_doc());
  const auto r = ch.send(event_message(1, plain_event(EventKind::kPointerUp, 5)));
  CHECK(r.back()["type"] == "done");
  CHECK(r.back()["accepted"] == false);
  CHECK(ch.endpoint.recording().events.empty());
}

TEST_CASE("malformed and out-of-order messages") {
  Channel ch(bars_doc());
  auto r = ch.send_line("{\"seq\": 1, \"type\": ", nullptr);
  REQUIRE(r.size() == 1);
  CHECK(r[0]["type"] == "error");
  CHECK(r[0]["message"].get<std::string>().find("malformed") != std::string::npos);

  r = ch.send_line("[1, 2]", nullptr);
  CHECK(r[0]["type"] == "error");
  r = ch.send_line(R"({"type": "snapshot"})", nullptr);
  CHECK(r[0]["type"] == "error");

  ch.send({{"seq", 5}, {"type", "snapshot"}});
  r = ch.send({{"seq", 5}, {"type", "snapshot"}});
  CHECK(r[0]["type"] == "error");
  r = ch.send({{"seq", 3}, {"type", "snapshot"}});
  CHECK(r[0]["type"] == "error");

  r = ch.send({{"seq", 6}, {"type", "launch"}});
  CHECK(r[0]["type"] == "error");
  r = ch.send({{"seq", 7}, {"type", "event"}});
  CHECK(r[0]["type"] == "error");
  r = ch.send({{"seq", 8}, {"type", "event"}, {"event", {{"t", 1}, {"kind", "teleport"}}}});
  CHECK(r[0]["type"] == "error");
  CHECK(r[0]["message"].get<std::string>().find("/event/kind") != std::string::npos);
  r = ch.send({{"seq", 9}, {"type", "snapshot"}, {"extra", true}});
  CHECK(r[0]["type"] == "error");

  // The channel keeps working afterwards.
  r = ch.send({{"seq", 10}, {"type", "snapshot"}});
  CHECK(r.back()["type"] == "done");
  CHECK(ch.endpoint.recording().events.empty());
}

TEST_CASE("random traffic keeps the framing invariants") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 20; ++trial) {
    Channel ch(bars_doc());
    std::int64_t seq = 0;
    std::int64_t t = 0;
    for (int i = 0; i < 60; ++i) {
      const int pick = static_cast<int>(rng() % 10);
      seq += 1 + static_cast<std::int64_t>(rng() % 3);
      t += static_cast<std::int64_t>(rng() % 40);
      if (pick == 0) {
        ch.send({{"seq", seq}, {"type", "snapshot"}});
      } else if (pick == 1) {
        ch.send_line("not json", nullptr);
      } else {
        static constexpr EventKind kinds[] = {EventKind::kPointerDown, EventKind::kPointerMove,
                                              EventKind::kPointerMove, EventKind::kPointerUp,
                                              EventKind::kUndo,        EventKind::kRedo};
        SessionEvent e = plain_event(kinds[rng() % std::size(kinds)], t);
        if (e.kind != EventKind::kUndo && e.kind != EventKind::kRedo) e.position = Point2(u(rng), u(rng));
        ch.send(event_message(seq, e));
      }
    }
    // Whatever was accepted replays to the live document.
    const EventLog rec = ch.endpoint.recording();
    CHECK(replay(ch.endpoint.initial(), rec.events).document == ch.endpoint.session().document());
  }
}
