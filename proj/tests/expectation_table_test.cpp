#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tenx18/errors.hpp"
#include "tenx18/exact_table.hpp"
#include "tenx18/expectation_table.hpp"

using namespace tenx18;

namespace {

const std::vector<std::vector<const char*>> kStandardRows = {
    {"10.500"},
    {"9.292", "11.708"},
    {"8.599", "10.500", "12.401"},
    {"8.120", "9.771", "11.229", "12.880"},
    {"7.765", "9.254", "10.500", "11.746", "13.235"},
    {"7.479", "8.861", "9.970", "11.030", "12.139", "13.521"},
    {"7.239", "8.553", "9.570", "10.500", "11.430", "12.447", "13.761"},
    {"7.038", "8.287", "9.241", "10.089", "10.911", "11.759", "12.713", "13.962"},
    {"6.870", "8.056", "8.965", "9.760", "10.500", "11.240", "12.035", "12.944", "14.130"},
    {"6.720", "7.868", "8.730", "9.466", "10.160", "10.840", "11.534", "12.270", "13.132",
     "14.280"},
};

// E_5[2] is 11.71365..., so it rounds to 11.714.
const std::vector<std::vector<const char*>> kLoadedRows = {
    {"13.846"},
    {"11.753", "15.939"},
    {"10.532", "13.861", "17.146"},
    {"9.680", "12.613", "15.113", "17.978"},
    {"9.038", "11.714", "13.868", "16.012", "18.599"},
};

// E_k[i] recovered from exact game values: raising the multipliers of slots
// i..k by one adds sum_{m >= i} E_k[m] to the game value.
std::vector<Rational> expectations_from_exact(const Pmf& pmf, const SlotConfig& config) {
  const int k = config.size();
  const Rational base = build_exact_table(pmf, config).game_value();
  std::vector<Rational> tail(static_cast<std::size_t>(k) + 2, Rational(0));
  for (int i = 1; i <= k; ++i) {
    std::vector<Rational> m = config.multipliers();
    for (int s = i; s <= k; ++s) m[static_cast<std::size_t>(s - 1)] += 1;
    tail[static_cast<std::size_t>(i)] =
        build_exact_table(pmf, SlotConfig(m)).game_value() - base;
  }
  std::vector<Rational> e;
  for (int i = 1; i <= k; ++i) {
    e.push_back(tail[static_cast<std::size_t>(i)] - tail[static_cast<std::size_t>(i) + 1]);
  }
  return e;
}

void check_rows(const ExpectationTable& t, const std::vector<std::vector<const char*>>& rows) {
  for (std::size_t j = 1; j <= rows.size(); ++j) {
    for (std::size_t i = 1; i <= j; ++i) {
      CAPTURE(j);
      CAPTURE(i);
      CHECK(to_decimal(t.at(static_cast<int>(j), static_cast<int>(i)), 3) == rows[j - 1][i - 1]);
    }
  }
}

}  // namespace

TEST_SUITE("expectation_table") {
  TEST_CASE("standard game thresholds") {
    const auto t = build_expectation_table(standard_pmf(), 10);
    CHECK(t.slots() == 10);
    check_rows(t, kStandardRows);
    CHECK(t.at(1, 1) == Rational(21, 2));
  }

  TEST_CASE("loaded dice thresholds") {
    const auto t = build_expectation_table(loaded_d12_pmf(), 5);
    check_rows(t, kLoadedRows);
    CHECK(to_decimal(t.at(5, 2), 8) == "11.71365753");
    CHECK(t.at(1, 1) == Rational(180, 13));
  }

  TEST_CASE("recovered from exact game values") {
    const auto loaded = build_expectation_table(loaded_d12_pmf(), 5);
    CHECK(expectations_from_exact(loaded_d12_pmf(), SlotConfig::standard(5)) == loaded.row(5));

    const auto standard = build_expectation_table(standard_pmf(), 10);
    CHECK(expectations_from_exact(standard_pmf(), SlotConfig::standard(10)) == standard.row(10));

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const int k = std::uniform_int_distribution<int>(1, 6)(rng);
      const Pmf pmf = oracle::random_pmf(rng, 7, true);
      const auto config = oracle::random_config(rng, k);
      CHECK(expectations_from_exact(pmf, config) == build_expectation_table(pmf, k).row(k));
    }
  }

  TEST_CASE("rank lookup") {
    const auto t = build_expectation_table(standard_pmf(), 10);
    CHECK(choose_free_rank(t, 5, 9) == 2);
    CHECK(choose_free_rank(t, 5, 13) == 5);
    CHECK(choose_free_rank(t, 5, 3) == 1);
    CHECK(choose_free_rank(t, 1, 18) == 1);
    CHECK(choose_free_rank(t, 10, 6) == 1);
    CHECK(choose_free_rank(t, 10, 18) == 10);
    CHECK_THROWS_AS(choose_free_rank(t, 5, 2), RangeError);
    CHECK_THROWS_AS(choose_free_rank(t, 0, 9), RangeError);
    CHECK_THROWS_AS(choose_free_rank(t, 11, 9), RangeError);

    const Pmf coin(1, {Rational(1, 2), Rational(1, 2)});
    const auto c = build_expectation_table(coin, 6);
    for (int free = 1; free <= 6; ++free) {
      CHECK(choose_free_rank(c, free, 1) == 1);
      CHECK(choose_free_rank(c, free, 2) == free);
    }

    CHECK(slot_for_rank(0b1011010, 1) == 2);
    CHECK(slot_for_rank(0b1011010, 4) == 7);
    CHECK_THROWS_AS(slot_for_rank(0b1011010, 5), RangeError);
  }

  TEST_CASE("property: rows increase and conserve mass") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      const int k = std::uniform_int_distribution<int>(1, 12)(rng);
      const Pmf pmf = oracle::random_pmf(rng, 10, trial % 2 == 0);
      const auto t = build_expectation_table(pmf, k);
      const Rational mu = expectation(pmf);
      for (int j = 1; j <= k; ++j) {
        Rational total(0);
        for (int i = 1; i <= j; ++i) {
          if (i > 1) CHECK(t.at(j, i - 1) <= t.at(j, i));
          CHECK(t.at(j, i) >= pmf.xmin());
          CHECK(t.at(j, i) <= pmf.xmax());
          total += t.at(j, i);
        }
        CHECK(total == mu * j);
      }
    }
  }

  TEST_CASE("symmetric pmf gives mirrored rows") {
    const auto t = build_expectation_table(standard_pmf(), 10);
    for (int j = 1; j <= 10; ++j) {
      for (int i = 1; i <= j; ++i) CHECK(t.at(j, i) + t.at(j, j + 1 - i) == 21);
    }
  }

  TEST_CASE("threshold play matches the exact table at k = 12") {
    const auto poly = build_expectation_table(standard_pmf(), 12);
    const auto exact = build_exact_table(standard_pmf(), SlotConfig::standard(12));
    for (SlotMask free = 1; free <= full_mask(12); ++free) {
      const int n = slot_count(free);
      for (int x = 3; x <= 18; ++x) {
        const int slot = slot_for_rank(free, choose_free_rank(poly, n, x));
        const auto evals = move_evaluations(exact, free, x);
        const Rational chosen = Rational(slot * x) + exact.value(free & ~slot_bit(slot));
        if (chosen != evals.front().expected) {
          FAIL("threshold move is not optimal at mask " << free << ", roll " << x);
        }
      }
    }
  }

  TEST_CASE("property: closed-form score equals the exact game value") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const int k = std::uniform_int_distribution<int>(1, 8)(rng);
      const Pmf pmf = oracle::random_pmf(rng, 8, trial % 3 == 0);
      const auto config = oracle::random_config(rng, k);
      CHECK(poly_strategy_expected_score(build_expectation_table(pmf, k), config) ==
            build_exact_table(pmf, config).game_value());
    }
    CHECK(poly_strategy_expected_score(build_expectation_table(standard_pmf(), 10),
                                       SlotConfig::standard()) ==
          build_exact_table(standard_pmf(), SlotConfig::standard()).game_value());
  }

  TEST_CASE("errors and export") {
    const auto t = build_expectation_table(standard_pmf(), 4);
    CHECK_THROWS_AS(poly_strategy_expected_score(t, SlotConfig::standard(5)), InvalidInput);
    CHECK_THROWS_AS(build_expectation_table(standard_pmf(), 0), InvalidInput);
    CHECK_THROWS_AS(t.at(5, 1), RangeError);
    CHECK_THROWS_AS(t.at(2, 3), RangeError);

    std::ostringstream out;
    write_expectation_table(t, out, 3);
    CHECK(out.str().find("4 8.120 9.771 11.229 12.880") != std::string::npos);
    CHECK(out.str().find("1 10.500") != std::string::npos);
  }
}
