#include "tenx18/game.hpp"

#include <sstream>

#include "tenx18/errors.hpp"

namespace tenx18 {

std::vector<int> slots_of(SlotMask mask) {
  std::vector<int> slots;
  slots.reserve(static_cast<std::size_t>(slot_count(mask)));
  while (mask != 0) {
    slots.push_back(std::countr_zero(mask) + 1);
    mask &= mask - 1;
  }
  return slots;
}

SlotConfig::SlotConfig(std::vector<Rational> multipliers)
    : multipliers_(std::move(multipliers)) {
  if (multipliers_.empty()) throw InvalidInput("at least one slot is required");
  if (multipliers_.size() > static_cast<std::size_t>(kMaxSlots)) {
    throw InvalidInput("at most " + std::to_string(kMaxSlots) + " slots supported");
  }
  if (sgn(multipliers_.front()) <= 0) {
    throw InvalidInput("multipliers must be positive");
  }
  for (std::size_t i = 1; i < multipliers_.size(); ++i) {
    if (multipliers_[i] <= multipliers_[i - 1]) {
      throw InvalidInput("multipliers must be strictly increasing (slot " +
                         std::to_string(i + 1) + ")");
    }
  }
}

SlotConfig SlotConfig::standard(int k) {
  std::vector<Rational> m;
  for (int i = 1; i <= k; ++i) m.emplace_back(i);
  return SlotConfig(std::move(m));
}

const Rational& SlotConfig::multiplier(int slot) const {
  if (slot < 1 || slot > size()) {
    throw RangeError("slot " + std::to_string(slot) + " does not exist");
  }
  return multipliers_[static_cast<std::size_t>(slot - 1)];
}

Rational SlotConfig::total() const {
  Rational sum(0);
  for (const auto& m : multipliers_) sum += m;
  return sum;
}

std::string SlotConfig::canonical_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < multipliers_.size(); ++i) {
    if (i != 0) out << ',';
    out << to_fraction_string(multipliers_[i]);
  }
  return out.str();
}

GameState::GameState(SlotConfig config, int xmin, int xmax)
    : config_(std::make_shared<const SlotConfig>(std::move(config))),
      xmin_(xmin),
      xmax_(xmax),
      placements_(static_cast<std::size_t>(config_->size())) {
  if (xmin > xmax) throw InvalidInput("empty roll range");
}

std::optional<int> GameState::value(int slot) const {
  if (slot < 1 || slot > config_->size()) {
    throw RangeError("slot " + std::to_string(slot) + " does not exist");
  }
  return placements_[static_cast<std::size_t>(slot - 1)];
}

SlotMask GameState::free_slots() const {
  SlotMask mask = 0;
  for (int slot = 1; slot <= config_->size(); ++slot) {
    if (!placements_[static_cast<std::size_t>(slot - 1)]) mask |= slot_bit(slot);
  }
  return mask;
}

Rational GameState::partial_score() const {
  Rational sum(0);
  for (int slot = 1; slot <= config_->size(); ++slot) {
    if (const auto& v = placements_[static_cast<std::size_t>(slot - 1)]) {
      sum += config_->multiplier(slot) * *v;
    }
  }
  return sum;
}

GameState apply_move(const GameState& state, int slot, int roll) {
  if (slot < 1 || slot > state.config().size()) {
    throw RangeError("slot " + std::to_string(slot) + " does not exist");
  }
  if (roll < state.xmin() || roll > state.xmax()) {
    throw RangeError("roll " + std::to_string(roll) + " outside [" +
                     std::to_string(state.xmin()) + ", " +
                     std::to_string(state.xmax()) + "]");
  }
  if (state.value(slot)) {
    throw IllegalMove("slot " + std::to_string(slot) + " is already filled");
  }
  GameState next = state;
  next.placements_[static_cast<std::size_t>(slot - 1)] = roll;
  ++next.rolls_played_;
  return next;
}

Rational score(const GameState& state) {
  if (!state.complete()) {
    throw IncompleteGame(std::to_string(slot_count(state.free_slots())) +
                         " slot(s) still free");
  }
  return state.partial_score();
}

Rational random_strategy_expected_score(const Pmf& pmf, const SlotConfig& config) {
  return config.total() * expectation(pmf);
}

}  // namespace tenx18
