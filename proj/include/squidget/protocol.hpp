#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "squidget/persistence.hpp"
#include "squidget/session.hpp"

namespace squidget {

/// Engine side of the UI channel. One JSON object per line in each direction.
///
/// Inbound:  {"seq": n, "type": "event", "event": <event record>}
///           {"seq": n, "type": "snapshot"}
/// Outbound: {"seq": m, "ack": n, "type": "effect", "effect": {...}}
///           {"seq": m, "ack": n, "type": "snapshot", "document": {...}}
///           {"seq": m, "ack": n, "type": "done", "accepted": bool}
///           {"seq": m, "ack": n|null, "type": "error", "message": "..."}
///
/// Inbound seq must increase strictly. Outbound seq increases strictly across
/// everything the endpoint sends; `ack` names the inbound message being
/// answered. Every inbound message ends with exactly one done or error reply.
class Endpoint {
 public:
  explicit Endpoint(Document doc);

  std::vector<nlohmann::json> handle(const nlohmann::json& message);
  /// Parses one line; malformed JSON yields a single error reply.
  std::vector<std::string> handle_line(std::string_view line);

  const Session& session() const { return session_; }
  const Document& initial() const { return initial_; }
  /// Accepted events in arrival order, ready to be saved as a log.
  EventLog recording() const;

 private:
  nlohmann::json reply(std::optional<std::int64_t> ack, std::string type);

  Document initial_;
  Session session_;
  std::vector<SessionEvent> accepted_;
  std::optional<std::int64_t> last_inbound_;
  std::int64_t next_outbound_ = 1;
};

}  // namespace squidget
