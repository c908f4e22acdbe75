#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tenx18/dice.hpp"
#include "tenx18/rational.hpp"

namespace tenx18 {

// Bit (i - 1) set means slot i is in the set. Slots are 1-based.
using SlotMask = std::uint64_t;

inline constexpr int kMaxSlots = 64;

inline constexpr SlotMask slot_bit(int slot) { return SlotMask{1} << (slot - 1); }

inline constexpr SlotMask full_mask(int k) {
  return k >= 64 ? ~SlotMask{0} : (SlotMask{1} << k) - 1;
}

inline int slot_count(SlotMask mask) { return std::popcount(mask); }

// Slots of `mask` in ascending order.
std::vector<int> slots_of(SlotMask mask);

// Strictly increasing positive slot multipliers.
class SlotConfig {
 public:
  // Throws InvalidInput when empty, longer than kMaxSlots, non-positive or
  // not strictly increasing.
  explicit SlotConfig(std::vector<Rational> multipliers);

  // Multipliers 1..k.
  static SlotConfig standard(int k = 10);

  int size() const { return static_cast<int>(multipliers_.size()); }
  const Rational& multiplier(int slot) const;
  const std::vector<Rational>& multipliers() const { return multipliers_; }
  Rational total() const;
  SlotMask all_slots() const { return full_mask(size()); }
  std::string canonical_string() const;

  friend bool operator==(const SlotConfig&, const SlotConfig&) = default;

 private:
  std::vector<Rational> multipliers_;
};

// A partially filled board. Immutable: moves produce new states.
class GameState {
 public:
  GameState(SlotConfig config, int xmin, int xmax);
  GameState(SlotConfig config, const Pmf& pmf)
      : GameState(std::move(config), pmf.xmin(), pmf.xmax()) {}

  const SlotConfig& config() const { return *config_; }
  int xmin() const { return xmin_; }
  int xmax() const { return xmax_; }

  std::optional<int> value(int slot) const;
  const std::vector<std::optional<int>>& placements() const { return placements_; }
  SlotMask free_slots() const;
  int rolls_played() const { return rolls_played_; }
  bool complete() const { return rolls_played_ == config_->size(); }

  // Sum of multiplier * value over filled slots.
  Rational partial_score() const;

  friend bool operator==(const GameState& a, const GameState& b) {
    return *a.config_ == *b.config_ && a.xmin_ == b.xmin_ &&
           a.xmax_ == b.xmax_ && a.placements_ == b.placements_;
  }

 private:
  friend GameState apply_move(const GameState&, int, int);

  std::shared_ptr<const SlotConfig> config_;
  int xmin_;
  int xmax_;
  std::vector<std::optional<int>> placements_;
  int rolls_played_ = 0;
};

// Throws IllegalMove for an occupied slot, RangeError for a slot index or
// roll outside the board or support.
GameState apply_move(const GameState& state, int slot, int roll);

// Final score; throws IncompleteGame unless every slot is filled.
Rational score(const GameState& state);

// Expected score when each roll goes to a uniformly random free slot.
Rational random_strategy_expected_score(const Pmf& pmf, const SlotConfig& config);

}  // namespace tenx18
