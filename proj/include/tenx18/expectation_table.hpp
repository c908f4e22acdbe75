#pragma once

#include <ostream>
#include <vector>

#include "tenx18/dice.hpp"
#include "tenx18/game.hpp"
#include "tenx18/rational.hpp"

namespace tenx18 {

// Triangular table of E_j[i] (j = 1..k, i = 1..j): the expected roll that
// optimal play ends up placing on the i-th cheapest of j free slots. The
// rows double as placement thresholds and do not depend on multipliers.
class ExpectationTable {
 public:
  const Pmf& pmf() const { return pmf_; }
  int slots() const { return static_cast<int>(rows_.size()); }

  // Row j (1-based), entries for ranks 1..j.
  const std::vector<Rational>& row(int j) const;
  const Rational& at(int j, int i) const;

 private:
  ExpectationTable(Pmf pmf, std::vector<std::vector<Rational>> rows)
      : pmf_(std::move(pmf)), rows_(std::move(rows)) {}
  friend ExpectationTable build_expectation_table(const Pmf&, int);

  Pmf pmf_;
  std::vector<std::vector<Rational>> rows_;
};

ExpectationTable build_expectation_table(const Pmf& pmf, int k);

// Rank (1-based, ascending multiplier) among `free_count` free slots at which
// `roll` is placed: the smallest i with E[i-1] <= roll <= E[i] in row
// free_count - 1. Throws RangeError for a roll outside the support or a
// free count outside 1..slots().
int choose_free_rank(const ExpectationTable& table, int free_count, int roll);

// Maps a rank to the actual slot: the rank-th smallest member of `free`.
int slot_for_rank(SlotMask free, int rank);

// Sum over i of multiplier(i) * E_k[i]. Throws InvalidInput when the table
// and board sizes differ.
Rational poly_strategy_expected_score(const ExpectationTable& table,
                                      const SlotConfig& config);

// Rows j = k..1, one per line, decimals then the exact fractions.
void write_expectation_table(const ExpectationTable& table, std::ostream& out,
                             int precision);

}  // namespace tenx18
