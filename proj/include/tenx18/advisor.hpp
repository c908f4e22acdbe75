#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tenx18/exact_table.hpp"
#include "tenx18/expectation_table.hpp"
#include "tenx18/spec_file.hpp"

struct sqlite3;

namespace httplib {
class Server;
}

namespace tenx18::advisor {

// Service reply: HTTP status plus JSON body. Errors carry
// {"error": {"code": ..., "message": ...}}.
struct Response {
  int status = 200;
  nlohmann::json body;
};

// Key-value store for sessions on top of SQLite. ":memory:" keeps
// everything in process.
class SessionStore {
 public:
  explicit SessionStore(const std::string& path);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  std::optional<nlohmann::json> get(const std::string& id);
  void put(const std::string& id, const nlohmann::json& body);

 private:
  std::mutex mutex_;
  sqlite3* db_ = nullptr;
};

// Everything derived from one game spec, shared read-only between sessions.
struct GameTables {
  GameTables(GameSpec s, ExactTable e, ExpectationTable p)
      : spec(std::move(s)), exact(std::move(e)), poly(std::move(p)) {}

  GameSpec spec;
  ExactTable exact;
  ExpectationTable poly;

  // Sorted optimal-play scores (over the score scale) used for percentiles;
  // simulated on first use.
  const std::vector<std::int64_t>& reference_scores() const;
  std::int64_t score_scale() const;

  std::uint64_t reference_games = 100'000;
  std::uint64_t reference_seed = 1;

 private:
  mutable std::once_flag reference_once_;
  mutable std::vector<std::int64_t> reference_;
  mutable std::int64_t scale_ = 1;
};

// Tables keyed by spec key, kept in memory and optionally mirrored to disk
// as exact-table binary caches.
class TableCache {
 public:
  TableCache(std::optional<std::filesystem::path> disk_dir, ExactTableOptions options,
             std::uint64_t reference_games);
  std::shared_ptr<const GameTables> get(const GameSpec& spec);

 private:
  std::mutex mutex_;
  std::map<std::uint64_t, std::shared_ptr<const GameTables>> tables_;
  std::optional<std::filesystem::path> disk_dir_;
  ExactTableOptions options_;
  std::uint64_t reference_games_;
};

struct ServiceOptions {
  std::string db_path = ":memory:";
  std::optional<std::filesystem::path> cache_dir;
  int precision = 5;
  std::uint64_t reference_games = 100'000;
  ExactTableOptions exact;
};

class AdvisorService {
 public:
  explicit AdvisorService(ServiceOptions options = {});

  // Body: {} or {"spec": {...}, "precision": n}.
  Response create_session(const nlohmann::json& body);
  Response get_session(const std::string& id);
  // Body: {"roll": x}. Records the pending roll, never touches the board.
  Response submit_roll(const std::string& id, const nlohmann::json& body);
  // Body: {"roll": x, "slot": i}; roll must equal the pending roll.
  Response commit_placement(const std::string& id, const nlohmann::json& body);
  Response finish_session(const std::string& id);

  // Registers the HTTP routes on `server`.
  void mount(httplib::Server& server);

 private:
  std::shared_ptr<std::mutex> session_lock(const std::string& id);

  ServiceOptions options_;
  SessionStore store_;
  TableCache tables_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

// Blocks serving `service` on host:port until the server is stopped.
// Returns false when binding fails.
bool serve(AdvisorService& service, const std::string& host, int port);

}  // namespace tenx18::advisor
