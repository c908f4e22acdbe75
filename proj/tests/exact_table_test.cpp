#include <doctest.h>

#include <algorithm>
#include <bit>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tenx18/errors.hpp"
#include "tenx18/exact_table.hpp"
#include "tenx18/expectation_table.hpp"

using namespace tenx18;

namespace {

const ExactTable& standard_table() {
  static const ExactTable table = build_exact_table(standard_pmf(), SlotConfig::standard());
  return table;
}

// Board with every slot outside `free` filled with xmin.
GameState board_with_free(const SlotConfig& config, const Pmf& pmf, SlotMask free) {
  GameState s(config, pmf);
  for (int slot = 1; slot <= config.size(); ++slot) {
    if ((free & slot_bit(slot)) == 0) s = apply_move(s, slot, pmf.xmin());
  }
  return s;
}

}  // namespace

TEST_SUITE("exact_table") {
  TEST_CASE("game value of the standard game") {
    const auto& t = standard_table();
    CHECK(to_decimal(t.game_value(), 10) == "642.2393504256");
    CHECK(t.size() == 1024);
    CHECK(t.value(0) == 0);
  }

  TEST_CASE("cardinality nine entries") {
    const auto& t = standard_table();
    const char* expected[] = {"618.32001", "611.45000", "603.39355", "594.42809",
                              "584.66842", "574.16842", "562.92809", "550.89355",
                              "537.95000", "523.82001"};
    for (int i = 1; i <= 10; ++i) {
      CHECK(to_decimal(t.value(full_mask(10) & ~slot_bit(i)), 5) == expected[i - 1]);
    }
  }

  TEST_CASE("singletons are multiplier times expectation") {
    const auto& t = standard_table();
    for (int i = 1; i <= 10; ++i) CHECK(t.value(slot_bit(i)) == Rational(21, 2) * i);
  }

  TEST_CASE("first move strategy") {
    const auto& t = standard_table();
    const int slot[] = {1, 1, 1, 1, 2, 2, 4, 5, 6, 7, 9, 9, 10, 10, 10, 10};
    const char* value[] = {"621.32001", "622.32001", "623.32001", "624.32001",
                           "625.45000", "627.45000", "630.42809", "634.66842",
                           "640.16842", "646.92809", "654.95000", "663.95000",
                           "673.82001", "683.82001", "693.82001", "703.82001"};
    for (int roll = 3; roll <= 18; ++roll) {
      CAPTURE(roll);
      CHECK(best_move(t, full_mask(10), roll) == slot[roll - 3]);
      CHECK(to_decimal(move_evaluations(t, full_mask(10), roll).front().expected, 5) ==
            value[roll - 3]);
      const int chosen = best_move(t, full_mask(10), roll);
      CHECK(chosen != 3);
      CHECK(chosen != 8);
    }
  }

  TEST_CASE("move evaluations") {
    const auto& t = standard_table();
    const auto evals = move_evaluations(t, full_mask(10), 9);
    REQUIRE(evals.size() == 10);
    CHECK(evals[0].slot == 4);
    CHECK(to_decimal(evals[0].expected, 5) == "630.42809");
    CHECK(evals[1].slot == 3);
    CHECK(to_decimal(evals[1].expected, 5) == "630.39355");
    for (std::size_t i = 1; i < evals.size(); ++i) CHECK(evals[i - 1].expected >= evals[i].expected);
    CHECK(to_decimal(move_evaluations(t, full_mask(10), 18).front().expected, 5) == "703.82001");

    const auto single = move_evaluations(t, slot_bit(6), 11);
    REQUIRE(single.size() == 1);
    CHECK(single[0].slot == 6);
    CHECK(single[0].expected == 66);
    CHECK(best_move(t, slot_bit(2), 18) == 2);
  }

  TEST_CASE("query errors") {
    const auto& t = standard_table();
    CHECK_THROWS_AS(best_move(t, 0, 9), NoMoves);
    CHECK_THROWS_AS(move_evaluations(t, 0, 9), NoMoves);
    CHECK_THROWS_AS(best_move(t, full_mask(10), 2), RangeError);
    CHECK_THROWS_AS(best_move(t, full_mask(10), 19), RangeError);
    CHECK_THROWS_AS(best_move(t, full_mask(11), 9), InvalidInput);
  }

  TEST_CASE("ties break toward the smallest slot") {
    // With a degenerate roll every placement of the last two slots is worth
    // the same, so the lower slot must win.
    const Pmf one(5, {Rational(1)});
    const auto t = build_exact_table(one, SlotConfig::standard(3));
    const auto evals = move_evaluations(t, full_mask(3), 5);
    CHECK(evals[0].expected == evals[2].expected);
    CHECK(best_move(t, full_mask(3), 5) == 1);
    CHECK(evals[1].slot == 2);
  }

  TEST_CASE("closest calls") {
    const auto& t = standard_table();
    const auto first = closest_call(t, CallScope::kFirstMove);
    REQUIRE(first);
    CHECK(first->roll == 9);
    CHECK(first->free == full_mask(10));
    CHECK(first->best_slot == 4);
    CHECK(first->runner_up_slot == 3);
    CHECK(to_decimal(first->gap, 5) == "0.03455");

    // Same gap for roll 12, slot 7 against slot 8.
    const auto twelve = move_evaluations(t, full_mask(10), 12);
    CHECK(twelve[0].slot == 7);
    CHECK(twelve[1].slot == 8);
    CHECK(twelve[0].expected - twelve[1].expected == first->gap);

    const auto full = closest_call(t, CallScope::kFullGame);
    REQUIRE(full);
    CHECK(full->roll == 10);
    CHECK(slot_count(full->free) == 7);
    const SlotMask normalized = full->free >> std::countr_zero(full->free);
    CHECK(normalized == full_mask(7));  // seven consecutive slots
    CHECK(to_decimal(full->gap, 5) == "0.02989");
    CHECK(full->gap <= first->gap);

    const auto single = build_exact_table(standard_pmf(), SlotConfig::standard(1));
    CHECK_FALSE(closest_call(single, CallScope::kFirstMove));
    CHECK_FALSE(closest_call(single, CallScope::kFullGame));
  }

  TEST_CASE("coin game closest call against brute force") {
    const Pmf coin(1, {Rational(1, 2), Rational(1, 2)});
    const auto config = SlotConfig::standard(4);
    const auto t = build_exact_table(coin, config);

    std::optional<Rational> min_gap;
    for (SlotMask free = 1; free <= full_mask(4); ++free) {
      const GameState board = board_with_free(config, coin, free);
      for (int roll = 1; roll <= 2; ++roll) {
        std::vector<std::pair<Rational, int>> values;
        for (int slot : slots_of(free)) {
          values.emplace_back(oracle::expectimax(coin, apply_move(board, slot, roll)), slot);
        }
        std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
          return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        if (roll == 1) CHECK(best_move(t, free, roll) == slots_of(free).front());
        if (roll == 2) CHECK(best_move(t, free, roll) == slots_of(free).back());
        CHECK(best_move(t, free, roll) == values.front().second);
        if (values.size() >= 2) {
          const Rational gap = values[0].first - values[1].first;
          if (gap > 0 && (!min_gap || gap < *min_gap)) min_gap = gap;
        }
      }
    }
    const auto call = closest_call(t, CallScope::kFullGame);
    REQUIRE(call);
    REQUIRE(min_gap);
    CHECK(call->gap > 0);
    CHECK(call->gap == *min_gap);
  }

  TEST_CASE("property: expectimax oracle equals the table") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
      const int k = std::uniform_int_distribution<int>(1, 4)(rng);
      const Pmf pmf = oracle::random_pmf(rng, 6, trial % 3 == 0);
      const auto config = trial % 2 ? oracle::random_config(rng, k) : SlotConfig::standard(k);
      const auto t = build_exact_table(pmf, config);
      CAPTURE(pmf.canonical_string());
      CHECK(t.game_value() == oracle::expectimax(pmf, GameState(config, pmf)));
      if (k <= 3) {
        for (SlotMask free = 0; free <= full_mask(k); ++free) {
          const GameState board = board_with_free(config, pmf, free);
          CHECK(t.value(free) == oracle::expectimax(pmf, board) - board.partial_score());
        }
      }
    }
  }

  TEST_CASE("recurrence consistency and singleton initialization") {
    const auto& t = standard_table();
    const Pmf& pmf = t.pmf();
    const auto& config = t.config();
    std::vector<Rational> alt(1024);
    for (int i = 1; i <= 10; ++i) alt[slot_bit(i)] = config.multiplier(i) * expectation(pmf);
    for (SlotMask s = 1; s < 1024; ++s) {
      Rational from_stored(0);
      Rational from_alt(0);
      for (int x = pmf.xmin(); x <= pmf.xmax(); ++x) {
        std::optional<Rational> best, best_alt;
        for (int i : slots_of(s)) {
          const Rational v = config.multiplier(i) * x + t.value(s & ~slot_bit(i));
          if (!best || v > *best) best = v;
          const Rational w = config.multiplier(i) * x + alt[s & ~slot_bit(i)];
          if (!best_alt || w > *best_alt) best_alt = w;
        }
        from_stored += pmf.prob(x) * *best;
        from_alt += pmf.prob(x) * *best_alt;
      }
      CHECK(t.value(s) == from_stored);
      if (slot_count(s) >= 2) alt[s] = from_alt;
      CHECK(alt[s] == t.value(s));
    }
  }

  TEST_CASE("M grows strictly under inclusion for positive supports") {
    const auto& t = standard_table();
    for (SlotMask s = 0; s < 1024; ++s) {
      for (int i = 1; i <= 10; ++i) {
        if ((s & slot_bit(i)) == 0) CHECK(t.value(s | slot_bit(i)) > t.value(s));
      }
    }
  }

  TEST_CASE("property: first move slot is non-decreasing in the roll") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const int k = std::uniform_int_distribution<int>(1, 7)(rng);
      const Pmf pmf = oracle::random_pmf(rng, 8);
      const auto t = build_exact_table(pmf, oracle::random_config(rng, k));
      int previous = 0;
      for (int x = pmf.xmin(); x <= pmf.xmax(); ++x) {
        const int slot = best_move(t, full_mask(k), x);
        CHECK(slot >= previous);
        previous = slot;
      }
    }
  }

  TEST_CASE("roll 7 with even or odd slots taken") {
    const auto& t = standard_table();
    const SlotMask odd = 0b0101010101;   // slots 1,3,5,7,9 free
    const SlotMask even = 0b1010101010;  // slots 2,4,6,8,10 free
    const auto poly = build_expectation_table(standard_pmf(), 10);
    const int rank = choose_free_rank(poly, 5, 7);
    auto rank_of = [](SlotMask free, int slot) {
      const auto s = slots_of(free);
      return static_cast<int>(std::find(s.begin(), s.end(), slot) - s.begin()) + 1;
    };
    CHECK(rank_of(odd, best_move(t, odd, 7)) == rank);
    CHECK(rank_of(even, best_move(t, even, 7)) == rank);
  }

  TEST_CASE("capacity guard") {
    std::vector<Rational> m;
    for (int i = 1; i <= 31; ++i) m.emplace_back(i);
    const SlotConfig big(m);
    try {
      build_exact_table(standard_pmf(), big);
      FAIL("expected CapacityError");
    } catch (const CapacityError& e) {
      CHECK(std::string(e.what()).find("2^31") != std::string::npos);
    }
    ExactTableOptions small;
    small.max_slots = 5;
    CHECK_THROWS_AS(build_exact_table(standard_pmf(), SlotConfig::standard(6), small),
                    CapacityError);
  }

  TEST_CASE("thread count does not change the table") {
    ExactTableOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto config = SlotConfig::standard(8);
    CHECK(build_exact_table(loaded_d12_pmf(), config, one).values() ==
          build_exact_table(loaded_d12_pmf(), config, four).values());
  }

  TEST_CASE("text export") {
    std::ostringstream out;
    write_exact_table(standard_table(), out, 5);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "mask,slots,cardinality,exact,decimal");
    int rows = 0, nines = 0;
    while (std::getline(in, line)) {
      ++rows;
      std::stringstream fields(line);
      std::string mask, slots, cardinality;
      std::getline(fields, mask, ',');
      std::getline(fields, slots, ',');
      std::getline(fields, cardinality, ',');
      if (cardinality == "9") ++nines;
    }
    CHECK(rows == 1024);
    CHECK(nines == 10);
    CHECK(out.str().find("\n1022,2 3 4 5 6 7 8 9 10,9,") != std::string::npos);
    CHECK(out.str().find(",618.32001\n") != std::string::npos);
  }

  TEST_CASE("binary cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "tenx18_cache_test";
    std::filesystem::remove_all(dir);
    const auto config = SlotConfig::standard(6);
    CHECK_FALSE(load_exact_cache(loaded_d12_pmf(), config, dir));

    const auto table = build_exact_table(loaded_d12_pmf(), config);
    save_exact_cache(table, dir);
    const auto loaded = load_exact_cache(loaded_d12_pmf(), config, dir);
    REQUIRE(loaded);
    CHECK(loaded->values() == table.values());
    CHECK(loaded->config() == config);

    CHECK_FALSE(load_exact_cache(standard_pmf(), config, dir));

    const auto path = exact_cache_path(dir, loaded_d12_pmf(), config);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
    CHECK_FALSE(load_exact_cache(loaded_d12_pmf(), config, dir));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("policy table agrees with best_move") {
    const auto t = build_exact_table(standard_pmf(), SlotConfig::standard(6));
    const auto policy = exact_policy(t);
    for (SlotMask free = 1; free <= full_mask(6); ++free) {
      for (int x = 3; x <= 18; ++x) {
        CHECK(policy[free * 16 + static_cast<std::size_t>(x - 3)] == best_move(t, free, x));
      }
    }
  }
}
