#include "squidget/protocol.hpp"

#include "squidget/error.hpp"

namespace squidget {

using nlohmann::json;

Endpoint::Endpoint(Document doc) : initial_(doc), session_(std::move(doc)) {}

json Endpoint::reply(std::optional<std::int64_t> ack, std::string type) {
  json out = {{"seq", next_outbound_++}, {"type", std::move(type)}};
  out["ack"] = ack ? json(*ack) : json(nullptr);
  return out;
}

std::vector<json> Endpoint::handle(const json& message) {
  std::vector<json> out;
  auto error = [&](std::optional<std::int64_t> ack, const std::string& text) {
    json r = reply(ack, "error");
    r["message"] = text;
    out.push_back(std::move(r));
    return out;
  };

  if (!message.is_object()) return error(std::nullopt, "message must be an object");
  const auto seq_it = message.find("seq");
  if (seq_it == message.end() || !seq_it->is_number_integer()) return error(std::nullopt, "message needs an integer seq");
  const std::int64_t seq = seq_it->get<std::int64_t>();
  if (last_inbound_ && seq <= *last_inbound_) {
    return error(seq, "seq " + std::to_string(seq) + " does not follow " + std::to_string(*last_inbound_));
  }
  last_inbound_ = seq;

  const auto type_it = message.find("type");
  if (type_it == message.end() || !type_it->is_string()) return error(seq, "message needs a type");
  const std::string type = type_it->get<std::string>();
  for (const auto& [key, value] : message.items()) {
    if (key != "seq" && key != "type" && key != "event") return error(seq, "unknown field '" + key + "'");
  }

  if (type == "snapshot") {
    json r = reply(seq, "snapshot");
    r["document"] = document_to_json(session_.document());
    r["mode"] = std::string(to_string(session_.mode()));
    out.push_back(std::move(r));
    json done = reply(seq, "done");
    done["accepted"] = true;
    out.push_back(std::move(done));
    return out;
  }
  if (type != "event") return error(seq, "unknown message type '" + type + "'");
  if (!message.contains("event")) return error(seq, "event message without an event");

  SessionEvent event;
  try {
    event = event_from_json(message["event"], "/event");
  } catch (const Error& e) {
    return error(seq, e.what());
  }
  HandleResult result = session_.handle_event(event);
  if (result.accepted) accepted_.push_back(event);
  for (const auto& effect : result.effects) {
    json r = reply(seq, "effect");
    r["effect"] = to_json(effect);
    out.push_back(std::move(r));
  }
  json done = reply(seq, "done");
  done["accepted"] = result.accepted;
  out.push_back(std::move(done));
  return out;
}

std::vector<std::string> Endpoint::handle_line(std::string_view line) {
  json message;
  try {
    message = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    json r = reply(std::nullopt, "error");
    r["message"] = std::string("malformed message: ") + e.what();
    return {r.dump()};
  }
  std::vector<std::string> lines;
  for (const auto& r : handle(message)) lines.push_back(r.dump());
  return lines;
}

EventLog Endpoint::recording() const { return make_log(initial_, accepted_); }

}  // namespace squidget
