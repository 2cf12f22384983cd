#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "squidget/document.hpp"
#include "squidget/session.hpp"

namespace squidget {

inline constexpr int kDocumentVersion = 1;
inline constexpr int kLogVersion = 1;

/// Canonical form: sorted keys, two-space indent, trailing newline, shortest
/// round-trip decimals. Equal documents serialize to identical bytes.
std::string serialize_document(const Document& doc);
nlohmann::json document_to_json(const Document& doc);

/// Throws Error(kParse) with line/column for malformed text or a JSON-pointer
/// location for unknown or mistyped fields, Error(kVersion) for other versions.
/// With `strict`, a document violating scene or registry invariants is
/// rejected; otherwise it is loaded as-is so validate() can report on it.
Document parse_document(std::string_view text, bool strict = true);

nlohmann::json config_to_json(const Config& config);
Config config_from_json(const nlohmann::json& j);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string document_hash(const Document& doc);
std::string config_hash(const Config& config);

/// Recorded session: hashes of the document and config it was recorded
/// against, then the events. A stroke file is a log holding exactly one
/// pointer-down, any pointer-moves and one pointer-up.
struct EventLog {
  std::optional<std::string> document_hash;
  std::optional<std::string> config_hash;
  std::vector<SessionEvent> events;

  bool operator==(const EventLog&) const = default;
};

EventLog make_log(const Document& recorded_against, std::vector<SessionEvent> events);

nlohmann::json event_to_json(const SessionEvent& event);
/// `where` is the JSON pointer of the record, used in error messages.
SessionEvent event_from_json(const nlohmann::json& j, const std::string& where);

std::string serialize_event_log(const EventLog& log);
EventLog parse_event_log(std::string_view text);

/// Error(kMalformedLog) when the header hashes differ from `doc`.
void verify_log(const EventLog& log, const Document& doc);

/// Error(kMalformedLog) unless the log is a single down/move*/up sequence.
Polyline stroke_from_log(const EventLog& log);
EventLog log_from_stroke(const Polyline& stroke, std::int64_t start_t = 0, std::int64_t step_ms = 10);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file in the same directory, then renames.
void write_file(const std::filesystem::path& path, std::string_view contents);

Document load_document(const std::filesystem::path& path, bool strict = true);
void save_document(const std::filesystem::path& path, const Document& doc);
EventLog load_event_log(const std::filesystem::path& path);
void save_event_log(const std::filesystem::path& path, const EventLog& log);

}  // namespace squidget
