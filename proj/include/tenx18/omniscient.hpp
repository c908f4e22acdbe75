#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "tenx18/dice.hpp"
#include "tenx18/game.hpp"
#include "tenx18/rational.hpp"

namespace tenx18 {

// Sum of the multipliers of slots i..j; 0 for the empty range i = j + 1.
// Throws RangeError for i < 1, j > k or i > j + 1.
Rational multiplier_range_sum(const SlotConfig& config, int i, int j);

// Q[y, l]: expected partial score of the all-knowing player once every roll
// >= y+1 is placed, with l rolls (all <= y) still to place on the l cheapest
// slots. y runs over [xmin - 1, xmax] and l over [0, k].
class OmniscientTable {
 public:
  const Pmf& pmf() const { return pmf_; }
  const SlotConfig& config() const { return config_; }

  const Rational& value(int y, int l) const;
  // Q[xmax, k].
  const Rational& expected_score() const;

 private:
  OmniscientTable(Pmf pmf, SlotConfig config, std::vector<std::vector<Rational>> q)
      : pmf_(std::move(pmf)), config_(std::move(config)), q_(std::move(q)) {}
  friend OmniscientTable build_omniscient(const Pmf&, const SlotConfig&);

  Pmf pmf_;
  SlotConfig config_;
  std::vector<std::vector<Rational>> q_;  // q_[y - xmin + 1][l]
};

OmniscientTable build_omniscient(const Pmf& pmf, const SlotConfig& config);

// Sorts the rolls and places them on ascending multipliers, which maximizes
// the score for this roll vector. Throws InvalidInput unless there is exactly
// one roll per slot, RangeError for rolls outside the support.
GameState omniscient_play(std::span<const int> rolls, const SlotConfig& config,
                          const Pmf& pmf);

struct BruteforceOptions {
  std::uint64_t max_multisets = 10'000'000;
};

// Expected all-knowing score by enumerating every multiset of k rolls with
// its multinomial weight. Independent of build_omniscient; used as its
// oracle. Throws CapacityError when the multiset count exceeds the budget.
Rational omniscient_bruteforce(const Pmf& pmf, const SlotConfig& config,
                               const BruteforceOptions& options = {});

// CSV grid: y,l,exact,decimal.
void write_omniscient_table(const OmniscientTable& table, std::ostream& out,
                            int precision);

}  // namespace tenx18
