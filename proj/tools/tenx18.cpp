// Command-line front end: tables, advice, simulation, closest-call analysis
// and the advisor HTTP service.
//
// Exit codes: 0 success, 2 invalid input, 3 capacity exceeded, 4 internal
// error, 5 cannot bind the service address.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "tenx18/advisor.hpp"
#include "tenx18/errors.hpp"
#include "tenx18/exact_table.hpp"
#include "tenx18/expectation_table.hpp"
#include "tenx18/omniscient.hpp"
#include "tenx18/simulator.hpp"
#include "tenx18/spec_file.hpp"

namespace {

using namespace tenx18;

enum ExitCode { kOk = 0, kInvalid = 2, kCapacity = 3, kInternal = 4, kUnavailable = 5 };

constexpr const char* kSpecEnv = "TENX18_SPEC";

GameSpec resolve_spec(const std::string& path) {
  if (!path.empty()) return load_game_spec(path);
  if (const char* env = std::getenv(kSpecEnv); env && *env) return load_game_spec(env);
  return standard_game_spec();
}

// Writes to `path`, or stdout when empty.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  fn(out);
}

GameState parse_state(const std::string& text, const GameSpec& spec) {
  GameState state(spec.config, spec.pmf);
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("state entry '" + item + "' is not SLOT=VALUE");
    }
    int slot = 0, value = 0;
    try {
      slot = std::stoi(item.substr(0, eq));
      value = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InvalidInput("state entry '" + item + "' is not SLOT=VALUE");
    }
    state = apply_move(state, slot, value);
  }
  return state;
}

std::string mask_text(SlotMask mask) {
  std::string out = "{";
  for (int slot : slots_of(mask)) {
    if (out.size() > 1) out += ',';
    out += std::to_string(slot);
  }
  return out + "}";
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const GameSpec& spec,
                                        std::optional<ExactTable>& exact) {
  if (name == "random") return std::make_unique<RandomStrategy>();
  if (name == "omniscient") return std::make_unique<OmniscientStrategy>();
  if (name == "poly") {
    return std::make_unique<PolyStrategy>(
        build_expectation_table(spec.pmf, spec.config.size()));
  }
  if (name == "exact") {
    if (!exact) exact = build_exact_table(spec.pmf, spec.config);
    return std::make_unique<ExactStrategy>(*exact);
  }
  throw InvalidInput("unknown strategy '" + name + "' (random, exact, poly, omniscient)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal play for the ten slots, three dice placement game"};
  app.require_subcommand(1);

  std::string spec_path;
  app.add_option("--spec", spec_path,
                 std::string("Game spec file (default: $") + kSpecEnv +
                     ", else three fair d6 on slots 1..10)");

  // tables
  auto* tables = app.add_subcommand("tables", "Write the exact, poly or omniscient table");
  std::string which;
  int table_precision = -1;
  std::string table_out;
  tables->add_option("which", which, "exact | poly | omniscient")
      ->required()
      ->check(CLI::IsMember({"exact", "poly", "omniscient"}));
  tables->add_option("--precision", table_precision,
                     "Decimal places (default 5, or 3 for poly)");
  tables->add_option("--out", table_out, "Output file (default stdout)");

  // advise
  auto* advise = app.add_subcommand("advise", "Recommend a slot for a roll");
  std::string state_text;
  int roll = 0;
  int advise_precision = 5;
  advise->add_option("roll", roll, "The roll to place")->required();
  advise->add_option("--state", state_text, "Filled slots as SLOT=VALUE,...");
  advise->add_option("--precision", advise_precision, "Decimal places");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of strategies");
  std::vector<std::string> strategies{"random", "exact", "omniscient"};
  std::uint64_t games = 1'000'000;
  std::uint64_t seed = 1;
  bool shared_rolls = false;
  int sim_precision = 5;
  std::string sim_out;
  sim->add_option("--strategies", strategies, "random, exact, poly, omniscient")
      ->delimiter(',');
  sim->add_option("--games", games, "Games per strategy")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Base seed");
  sim->add_flag("--shared-rolls", shared_rolls, "Every strategy sees the same rolls");
  sim->add_option("--precision", sim_precision, "Decimal places for means");
  sim->add_option("--out", sim_out,
                  "Directory for <strategy>.json and <strategy>_histogram.csv");

  // closest-call
  auto* closest = app.add_subcommand("closest-call", "Smallest gap between best and runner-up");
  std::string scope = "full";
  int closest_precision = 5;
  closest->add_option("--scope", scope, "first | full")
      ->check(CLI::IsMember({"first", "full"}));
  closest->add_option("--precision", closest_precision, "Decimal places");

  // scores
  auto* scores = app.add_subcommand("scores", "Expected scores of the analysed strategies");
  int scores_precision = 5;
  scores->add_option("--precision", scores_precision, "Decimal places");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the advisor HTTP service");
  std::string bind = "127.0.0.1:8080";
  std::string db_path = "tenx18_sessions.db";
  std::string cache_dir;
  serve->add_option("--bind", bind, "ADDR:PORT");
  serve->add_option("--db", db_path, "Session database file (\":memory:\" for none)");
  serve->add_option("--cache-dir", cache_dir, "Directory for exact-table caches");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    const GameSpec spec = resolve_spec(spec_path);

    if (*tables) {
      if (which == "exact") {
        const auto table = build_exact_table(spec.pmf, spec.config);
        with_output(table_out, [&](std::ostream& out) {
          write_exact_table(table, out, table_precision < 0 ? 5 : table_precision);
        });
      } else if (which == "poly") {
        const auto table = build_expectation_table(spec.pmf, spec.config.size());
        with_output(table_out, [&](std::ostream& out) {
          write_expectation_table(table, out, table_precision < 0 ? 3 : table_precision);
        });
      } else {
        const auto table = build_omniscient(spec.pmf, spec.config);
        with_output(table_out, [&](std::ostream& out) {
          write_omniscient_table(table, out, table_precision < 0 ? 5 : table_precision);
        });
      }
    } else if (*advise) {
      const GameState state = parse_state(state_text, spec);
      if (state.complete()) throw InvalidInput("the board is already full");
      const auto table = build_exact_table(spec.pmf, spec.config);
      const auto evals = move_evaluations(table, state.free_slots(), roll);
      const Rational running = state.partial_score();
      std::cout << "slot " << evals.front().slot << ", expected "
                << to_decimal(running + evals.front().expected, advise_precision) << '\n';
      for (const auto& e : evals) {
        std::cout << "  slot " << e.slot << ": "
                  << to_decimal(running + e.expected, advise_precision) << '\n';
      }
    } else if (*sim) {
      std::optional<ExactTable> exact;
      std::vector<std::unique_ptr<Strategy>> owned;
      std::vector<const Strategy*> list;
      for (const auto& name : strategies) {
        owned.push_back(make_strategy(name, spec, exact));
        list.push_back(owned.back().get());
      }
      const auto reports =
          compare_strategies(list, spec.pmf, spec.config, shared_rolls, games, seed);
      write_report_table(reports, std::cout, sim_precision);
      if (!sim_out.empty()) {
        std::filesystem::create_directories(sim_out);
        for (const auto& r : reports) {
          const auto base = std::filesystem::path(sim_out) / r.strategy;
          with_output(base.string() + ".json", [&](std::ostream& out) {
            out << report_json(r, sim_precision) << '\n';
          });
          with_output(base.string() + "_histogram.csv",
                      [&](std::ostream& out) { write_histogram_csv(r, out); });
        }
      }
    } else if (*closest) {
      const auto table = build_exact_table(spec.pmf, spec.config);
      const auto call = closest_call(
          table, scope == "first" ? CallScope::kFirstMove : CallScope::kFullGame);
      if (!call) {
        std::cout << "no state offers a runner-up placement\n";
      } else {
        std::cout << "free " << mask_text(call->free) << ", roll " << call->roll
                  << ": slot " << call->best_slot << " vs slot " << call->runner_up_slot
                  << ", gap " << to_decimal(call->gap, closest_precision) << '\n';
      }
    } else if (*scores) {
      const int p = scores_precision;
      const auto exact = build_exact_table(spec.pmf, spec.config);
      const auto omni = build_omniscient(spec.pmf, spec.config);
      std::cout << "minimum possible   " << to_decimal(spec.config.total() * spec.pmf.xmin(), p)
                << "\nrandom strategy    "
                << to_decimal(random_strategy_expected_score(spec.pmf, spec.config), p)
                << "\noptimal strategy   " << to_decimal(exact.game_value(), p)
                << "\nall-knowing        " << to_decimal(omni.expected_score(), p)
                << "\nmaximum possible   " << to_decimal(spec.config.total() * spec.pmf.xmax(), p)
                << '\n';
    } else if (*serve) {
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw InvalidInput("--bind expects ADDR:PORT");
      int port = 0;
      try {
        port = std::stoi(bind.substr(colon + 1));
      } catch (const std::exception&) {
        throw InvalidInput("--bind expects ADDR:PORT");
      }
      advisor::ServiceOptions options;
      options.db_path = db_path;
      if (!cache_dir.empty()) options.cache_dir = cache_dir;
      advisor::AdvisorService service(options);
      std::cerr << "advisor listening on " << bind << '\n';
      if (!advisor::serve(service, bind.substr(0, colon), port)) {
        std::cerr << "error: cannot bind " << bind << '\n';
        return kUnavailable;
      }
    }
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCapacity;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const IllegalMove& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
