#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "tenx18/dice.hpp"
#include "tenx18/game.hpp"
#include "tenx18/rational.hpp"

namespace tenx18 {

struct ExactTableOptions {
  // Largest slot count accepted; the table holds 2^k exact rationals.
  int max_slots = 30;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

// M[S] for every subset S of slots: the maximum expected score obtainable by
// optimally filling exactly the slots in S with future rolls. Indexed by the
// set of slots still to fill, so M[0] = 0 and M[all] is the game value.
class ExactTable {
 public:
  const Pmf& pmf() const { return pmf_; }
  const SlotConfig& config() const { return config_; }

  const Rational& value(SlotMask remaining) const;
  const Rational& game_value() const { return values_.back(); }
  const std::vector<Rational>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  ExactTable(Pmf pmf, SlotConfig config, std::vector<Rational> values)
      : pmf_(std::move(pmf)), config_(std::move(config)), values_(std::move(values)) {}

  friend ExactTable build_exact_table(const Pmf&, const SlotConfig&,
                                      const ExactTableOptions&);
  friend std::optional<ExactTable> load_exact_cache(const Pmf&, const SlotConfig&,
                                                    const std::filesystem::path&);

  Pmf pmf_;
  SlotConfig config_;
  std::vector<Rational> values_;
};

// Bottom-up over subset cardinality. Throws CapacityError when the slot
// count exceeds options.max_slots.
ExactTable build_exact_table(const Pmf& pmf, const SlotConfig& config,
                             const ExactTableOptions& options = {});

struct MoveEvaluation {
  int slot;
  Rational expected;  // multiplier * roll + M[free - {slot}]
};

// Every free slot with its expected final score from this point, best first;
// equal values are ordered by slot index.
std::vector<MoveEvaluation> move_evaluations(const ExactTable& table, SlotMask free,
                                             int roll);

// The evaluation maximizer; ties go to the smallest slot index.
// Throws NoMoves for an empty free set and RangeError for a bad roll.
int best_move(const ExactTable& table, SlotMask free, int roll);

enum class CallScope { kFirstMove, kFullGame };

struct ClosestCall {
  SlotMask free;
  int roll;
  int best_slot;
  int runner_up_slot;
  Rational gap;
};

// The (free set, roll) with the smallest positive difference between the
// best and the second-best placement. The first-move scope only looks at the
// empty board; the full-game scope scans every free set with two or more
// slots. Ties keep the first witness in (mask, roll) ascending order.
// Returns nullopt when no state has a runner-up.
std::optional<ClosestCall> closest_call(const ExactTable& table, CallScope scope);

// Slot chosen by best_move for every (free mask, roll), flattened as
// policy[mask * width + (roll - xmin)]. Entry 0 for the empty mask.
std::vector<std::uint8_t> exact_policy(const ExactTable& table);

// CSV dump: mask,slots,cardinality,exact,decimal.
void write_exact_table(const ExactTable& table, std::ostream& out, int precision);

// Stable key over (pmf, multipliers), used to name cache files.
std::uint64_t table_key(const Pmf& pmf, const SlotConfig& config);

std::filesystem::path exact_cache_path(const std::filesystem::path& dir,
                                       const Pmf& pmf, const SlotConfig& config);

// Binary cache of the table values. load returns nullopt on a missing,
// truncated or mismatching file.
void save_exact_cache(const ExactTable& table, const std::filesystem::path& dir);
std::optional<ExactTable> load_exact_cache(const Pmf& pmf, const SlotConfig& config,
                                           const std::filesystem::path& dir);

}  // namespace tenx18
