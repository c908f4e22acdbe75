#include "tenx18/advisor.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <random>

#include <httplib.h>

#include "tenx18/errors.hpp"
#include "tenx18/omniscient.hpp"
#include "tenx18/simulator.hpp"

namespace tenx18::advisor {

using nlohmann::json;

namespace {

Response error(int status, std::string code, std::string message) {
  return {status, json{{"error", {{"code", std::move(code)}, {"message", std::move(message)}}}}};
}

std::string now_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string new_session_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

struct Move {
  int roll;
  int recommended;
  int chosen;
  Rational expected_recommended;  // remaining-game value of the recommendation
  Rational expected_chosen;       // same for the slot actually chosen
};

struct Session {
  std::string id;
  json spec;
  int precision = 5;
  std::vector<Move> log;
  std::optional<int> pending_roll;
  std::string created;
  std::string updated;
  bool finished = false;
  json summary;

  json to_json() const {
    json moves = json::array();
    for (const auto& m : log) {
      moves.push_back({{"roll", m.roll},
                       {"recommended", m.recommended},
                       {"chosen", m.chosen},
                       {"expected_recommended", to_fraction_string(m.expected_recommended)},
                       {"expected_chosen", to_fraction_string(m.expected_chosen)}});
    }
    return {{"id", id},
            {"spec", spec},
            {"precision", precision},
            {"log", moves},
            {"pending_roll", pending_roll ? json(*pending_roll) : json(nullptr)},
            {"created", created},
            {"updated", updated},
            {"finished", finished},
            {"summary", summary}};
  }

  static Session from_json(const json& j) {
    Session s;
    s.id = j.at("id").get<std::string>();
    s.spec = j.at("spec");
    s.precision = j.at("precision").get<int>();
    for (const auto& m : j.at("log")) {
      s.log.push_back({m.at("roll").get<int>(), m.at("recommended").get<int>(),
                       m.at("chosen").get<int>(),
                       parse_rational(m.at("expected_recommended").get<std::string>()),
                       parse_rational(m.at("expected_chosen").get<std::string>())});
    }
    if (!j.at("pending_roll").is_null()) s.pending_roll = j.at("pending_roll").get<int>();
    s.created = j.at("created").get<std::string>();
    s.updated = j.at("updated").get<std::string>();
    s.finished = j.at("finished").get<bool>();
    s.summary = j.value("summary", json());
    return s;
  }
};

// The board is never stored; it is rebuilt from the move log.
GameState replay(const GameTables& tables, const std::vector<Move>& log) {
  GameState state(tables.spec.config, tables.spec.pmf);
  for (const auto& m : log) state = apply_move(state, m.chosen, m.roll);
  return state;
}

json session_view(const Session& s, const GameTables& tables, const GameState& state) {
  const int p = s.precision;
  json slots = json::array();
  for (int slot = 1; slot <= state.config().size(); ++slot) {
    const auto v = state.value(slot);
    slots.push_back({{"slot", slot},
                     {"multiplier", to_fraction_string(state.config().multiplier(slot))},
                     {"value", v ? json(*v) : json(nullptr)}});
  }
  json moves = json::array();
  for (const auto& m : s.log) {
    moves.push_back({{"roll", m.roll},
                     {"recommended_slot", m.recommended},
                     {"chosen_slot", m.chosen},
                     {"overridden", m.chosen != m.recommended},
                     {"suboptimal", m.expected_chosen < m.expected_recommended},
                     {"expected_recommended", to_decimal(m.expected_recommended, p)},
                     {"expected_chosen", to_decimal(m.expected_chosen, p)}});
  }
  return {{"id", s.id},
          {"label", tables.spec.label},
          {"precision", p},
          {"roll_range", {{"min", tables.spec.pmf.xmin()}, {"max", tables.spec.pmf.xmax()}}},
          {"slots", slots},
          {"free_slots", slots_of(state.free_slots())},
          {"rolls_played", state.rolls_played()},
          {"complete", state.complete()},
          {"pending_roll", s.pending_roll ? json(*s.pending_roll) : json(nullptr)},
          {"running_score", to_decimal(state.partial_score(), p)},
          {"running_score_exact", to_fraction_string(state.partial_score())},
          {"optimal_expected", to_decimal(tables.exact.game_value(), p)},
          {"moves", moves},
          {"finished", s.finished},
          {"created", s.created},
          {"updated", s.updated}};
}

std::optional<int> int_member(const json& body, const char* name) {
  if (!body.is_object() || !body.contains(name) || !body[name].is_number_integer()) {
    return std::nullopt;
  }
  return body[name].get<int>();
}

}  // namespace

SessionStore::SessionStore(const std::string& path) {
  if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
    const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error("cannot open session store " + path + ": " + msg);
  }
  char* err = nullptr;
  if (sqlite3_exec(db_,
                   "CREATE TABLE IF NOT EXISTS sessions ("
                   "id TEXT PRIMARY KEY, body TEXT NOT NULL)",
                   nullptr, nullptr, &err) != SQLITE_OK) {
    const std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    sqlite3_close(db_);
    throw Error("cannot initialize session store: " + msg);
  }
}

SessionStore::~SessionStore() { sqlite3_close(db_); }

std::optional<json> SessionStore::get(const std::string& id) {
  std::lock_guard lock(mutex_);
  sqlite3_stmt* stmt = nullptr;
  sqlite3_prepare_v2(db_, "SELECT body FROM sessions WHERE id = ?", -1, &stmt, nullptr);
  sqlite3_bind_text(stmt, 1, id.c_str(), -1, SQLITE_TRANSIENT);
  std::optional<json> result;
  if (sqlite3_step(stmt) == SQLITE_ROW) {
    result = json::parse(reinterpret_cast<const char*>(sqlite3_column_text(stmt, 0)));
  }
  sqlite3_finalize(stmt);
  return result;
}

void SessionStore::put(const std::string& id, const json& body) {
  std::lock_guard lock(mutex_);
  sqlite3_stmt* stmt = nullptr;
  sqlite3_prepare_v2(db_, "INSERT OR REPLACE INTO sessions (id, body) VALUES (?, ?)", -1,
                     &stmt, nullptr);
  const std::string text = body.dump();
  sqlite3_bind_text(stmt, 1, id.c_str(), -1, SQLITE_TRANSIENT);
  sqlite3_bind_text(stmt, 2, text.c_str(), -1, SQLITE_TRANSIENT);
  const int rc = sqlite3_step(stmt);
  sqlite3_finalize(stmt);
  if (rc != SQLITE_DONE) throw Error(std::string("session store write failed: ") +
                                     sqlite3_errmsg(db_));
}

const std::vector<std::int64_t>& GameTables::reference_scores() const {
  std::call_once(reference_once_, [this] {
    const ExactStrategy strategy(exact);
    auto report = simulate(strategy, spec.pmf, spec.config, reference_games, reference_seed);
    reference_ = std::move(report.scores);
    scale_ = report.score_scale;
    std::sort(reference_.begin(), reference_.end());
  });
  return reference_;
}

std::int64_t GameTables::score_scale() const {
  reference_scores();
  return scale_;
}

TableCache::TableCache(std::optional<std::filesystem::path> disk_dir,
                       ExactTableOptions options, std::uint64_t reference_games)
    : disk_dir_(std::move(disk_dir)), options_(options), reference_games_(reference_games) {}

std::shared_ptr<const GameTables> TableCache::get(const GameSpec& spec) {
  std::lock_guard lock(mutex_);
  const auto key = game_spec_key(spec);
  if (auto it = tables_.find(key); it != tables_.end()) return it->second;

  std::optional<ExactTable> exact;
  if (disk_dir_) exact = load_exact_cache(spec.pmf, spec.config, *disk_dir_);
  if (!exact) {
    exact = build_exact_table(spec.pmf, spec.config, options_);
    if (disk_dir_) save_exact_cache(*exact, *disk_dir_);
  }
  auto tables = std::make_shared<GameTables>(
      spec, std::move(*exact), build_expectation_table(spec.pmf, spec.config.size()));
  tables->reference_games = reference_games_;
  tables_.emplace(key, tables);
  return tables;
}

AdvisorService::AdvisorService(ServiceOptions options)
    : options_(std::move(options)),
      store_(options_.db_path),
      tables_(options_.cache_dir, options_.exact, options_.reference_games) {}

std::shared_ptr<std::mutex> AdvisorService::session_lock(const std::string& id) {
  std::lock_guard lock(locks_mutex_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

Response AdvisorService::create_session(const json& body) {
  if (!body.is_null() && !body.is_object()) {
    return error(400, "validation", "request body must be a JSON object");
  }
  GameSpec spec = standard_game_spec();
  int precision = options_.precision;
  try {
    if (body.is_object() && body.contains("spec")) spec = game_spec_from_json(body["spec"]);
    if (body.is_object() && body.contains("precision")) {
      const auto p = int_member(body, "precision");
      if (!p || *p < 0 || *p > 40) {
        return error(400, "validation", "precision must be an integer in 0..40");
      }
      precision = *p;
    }
    const auto tables = tables_.get(spec);

    Session s;
    s.id = new_session_id();
    s.spec = spec.source;
    s.precision = precision;
    s.created = s.updated = now_utc();
    store_.put(s.id, s.to_json());
    return {201, session_view(s, *tables, replay(*tables, s.log))};
  } catch (const CapacityError& e) {
    return error(422, "capacity", e.what());
  } catch (const InvalidInput& e) {
    return error(400, "validation", e.what());
  }
}

Response AdvisorService::get_session(const std::string& id) {
  const auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  const auto stored = store_.get(id);
  if (!stored) return error(404, "session_not_found", "no session " + id);
  const Session s = Session::from_json(*stored);
  const auto tables = tables_.get(game_spec_from_json(s.spec));
  return {200, session_view(s, *tables, replay(*tables, s.log))};
}

Response AdvisorService::submit_roll(const std::string& id, const json& body) {
  const auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  const auto stored = store_.get(id);
  if (!stored) return error(404, "session_not_found", "no session " + id);
  Session s = Session::from_json(*stored);
  const auto tables = tables_.get(game_spec_from_json(s.spec));
  const GameState state = replay(*tables, s.log);

  if (s.finished) return error(409, "session_finished", "session is finished");
  if (state.complete()) return error(409, "game_complete", "every slot is already filled");
  const auto roll = int_member(body, "roll");
  if (!roll) return error(400, "validation", "body must contain an integer \"roll\"");
  if (!tables->spec.pmf.contains(*roll)) {
    return error(400, "validation",
                 "roll " + std::to_string(*roll) + " outside [" +
                     std::to_string(tables->spec.pmf.xmin()) + ", " +
                     std::to_string(tables->spec.pmf.xmax()) + "]");
  }

  const auto evals = move_evaluations(tables->exact, state.free_slots(), *roll);
  const Rational running = state.partial_score();
  const int p = s.precision;
  json list = json::array();
  for (const auto& e : evals) {
    list.push_back({{"slot", e.slot},
                    {"expected", to_decimal(running + e.expected, p)},
                    {"expected_exact", to_fraction_string(running + e.expected)},
                    {"gap_to_best", to_decimal(evals.front().expected - e.expected, p)}});
  }

  if (s.pending_roll != *roll) {
    s.pending_roll = *roll;
    s.updated = now_utc();
    store_.put(s.id, s.to_json());
  }
  return {200,
          {{"roll", *roll},
           {"recommended_slot", evals.front().slot},
           {"expected", to_decimal(running + evals.front().expected, p)},
           {"evaluations", list},
           {"gap_to_runner_up", evals.size() > 1
                                    ? json(to_decimal(evals[0].expected - evals[1].expected, p))
                                    : json(nullptr)},
           {"precision", p}}};
}

Response AdvisorService::commit_placement(const std::string& id, const json& body) {
  const auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  const auto stored = store_.get(id);
  if (!stored) return error(404, "session_not_found", "no session " + id);
  Session s = Session::from_json(*stored);
  const auto tables = tables_.get(game_spec_from_json(s.spec));
  const GameState state = replay(*tables, s.log);

  if (s.finished) return error(409, "session_finished", "session is finished");
  if (state.complete()) return error(409, "game_complete", "every slot is already filled");
  const auto roll = int_member(body, "roll");
  const auto slot = int_member(body, "slot");
  if (!roll || !slot) {
    return error(400, "validation", "body must contain integer \"roll\" and \"slot\"");
  }
  if (!s.pending_roll) {
    return error(409, "no_pending_roll", "submit the roll before placing it");
  }
  if (*s.pending_roll != *roll) {
    return error(409, "roll_mismatch",
                 "pending roll is " + std::to_string(*s.pending_roll) + ", not " +
                     std::to_string(*roll));
  }
  if (*slot < 1 || *slot > state.config().size()) {
    return error(400, "validation", "slot " + std::to_string(*slot) + " does not exist");
  }
  if (state.value(*slot)) {
    return error(409, "slot_occupied", "slot " + std::to_string(*slot) + " is already filled");
  }

  const SlotMask free = state.free_slots();
  const auto evals = move_evaluations(tables->exact, free, *roll);
  const auto chosen = std::find_if(evals.begin(), evals.end(),
                                   [&](const MoveEvaluation& e) { return e.slot == *slot; });
  s.log.push_back({*roll, evals.front().slot, *slot, evals.front().expected, chosen->expected});
  s.pending_roll.reset();
  s.updated = now_utc();
  store_.put(s.id, s.to_json());

  const GameState next = apply_move(state, *slot, *roll);
  json view = session_view(s, *tables, next);
  view["move"] = view["moves"].back();
  return {200, view};
}

Response AdvisorService::finish_session(const std::string& id) {
  const auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  const auto stored = store_.get(id);
  if (!stored) return error(404, "session_not_found", "no session " + id);
  Session s = Session::from_json(*stored);
  if (s.finished) return {200, s.summary};

  const auto tables = tables_.get(game_spec_from_json(s.spec));
  const GameState state = replay(*tables, s.log);
  if (!state.complete()) {
    return error(409, "game_incomplete",
                 std::to_string(slot_count(state.free_slots())) + " slot(s) still free");
  }

  std::vector<int> rolls;
  int overridden = 0, suboptimal = 0;
  for (const auto& m : s.log) {
    rolls.push_back(m.roll);
    if (m.chosen != m.recommended) ++overridden;
    if (m.expected_chosen < m.expected_recommended) ++suboptimal;
  }
  const Rational final_score = score(state);
  const Rational hindsight = score(omniscient_play(rolls, state.config(), tables->spec.pmf));

  // Share of simulated optimal-play games scoring at or below this game.
  const auto& reference = tables->reference_scores();
  const Rational scaled = final_score * tables->score_scale();
  BigInt threshold;
  mpz_fdiv_q(threshold.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  const auto at_or_below = std::upper_bound(reference.begin(), reference.end(),
                                            threshold.get_si()) - reference.begin();
  Rational percentile(BigInt(100 * static_cast<long>(at_or_below)),
                      BigInt(static_cast<long>(reference.size())));
  percentile.canonicalize();

  const int p = s.precision;
  s.summary = {{"final_score", to_decimal(final_score, p)},
               {"final_score_exact", to_fraction_string(final_score)},
               {"optimal_expected", to_decimal(tables->exact.game_value(), p)},
               {"optimal_expected_exact", to_fraction_string(tables->exact.game_value())},
               {"omniscient_retrospective", to_decimal(hindsight, p)},
               {"omniscient_retrospective_exact", to_fraction_string(hindsight)},
               {"overridden_moves", overridden},
               {"suboptimal_moves", suboptimal},
               {"percentile", to_decimal(percentile, 2)},
               {"reference_games", reference.size()},
               {"precision", p}};
  s.finished = true;
  s.updated = now_utc();
  store_.put(s.id, s.to_json());
  return {200, s.summary};
}

void AdvisorService::mount(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto parse_body = [](const httplib::Request& req, json& out) {
    if (req.body.empty()) {
      out = json::object();
      return true;
    }
    out = json::parse(req.body, nullptr, false);
    return !out.is_discarded();
  };
  auto guarded = [reply](auto&& handler) {
    return [reply, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        reply(res, handler(req));
      } catch (const std::exception& e) {
        reply(res, error(500, "internal", e.what()));
      }
    };
  };
  auto with_body = [parse_body](auto&& fn) {
    return [parse_body, fn](const httplib::Request& req) {
      json body;
      if (!parse_body(req, body)) return error(400, "validation", "malformed JSON body");
      return fn(req, body);
    };
  };

  server.Post("/sessions", guarded(with_body([this](const httplib::Request&, const json& b) {
                return create_session(b);
              })));
  server.Get(R"(/sessions/([0-9a-f]+))", guarded([this](const httplib::Request& req) {
               return get_session(req.matches[1]);
             }));
  server.Post(R"(/sessions/([0-9a-f]+)/roll)",
              guarded(with_body([this](const httplib::Request& req, const json& b) {
                return submit_roll(req.matches[1], b);
              })));
  server.Post(R"(/sessions/([0-9a-f]+)/placement)",
              guarded(with_body([this](const httplib::Request& req, const json& b) {
                return commit_placement(req.matches[1], b);
              })));
  server.Post(R"(/sessions/([0-9a-f]+)/finish)", guarded([this](const httplib::Request& req) {
                return finish_session(req.matches[1]);
              }));
  server.set_error_handler([reply](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) reply(res, error(res.status, "not_found", "no such endpoint"));
  });
}

bool serve(AdvisorService& service, const std::string& host, int port) {
  httplib::Server server;
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
               sizeof(yes));
  });
  service.mount(server);
  return server.listen(host, port);
}

}  // namespace tenx18::advisor
