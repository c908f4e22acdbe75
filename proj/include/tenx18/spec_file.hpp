#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tenx18/dice.hpp"
#include "tenx18/errors.hpp"
#include "tenx18/game.hpp"

namespace tenx18 {

// A parsed game description: roll distribution plus board.
//
// File format (JSON):
//
//   {
//     "label": "two loaded d12",
//     "dice": [ {"sides": 12, "count": 2, "weights": {"12": 2}} ],
//     "multipliers": [1, 2, 3, 4, 5]
//   }
//
// A die is either {"sides": s} (faces 1..s, weight 1, optionally overridden
// per face in "weights") or {"faces": [...]} where each face is an integer
// (weight 1) or {"value": v, "weight": w}. "count" repeats a die. Instead of
// "dice" a direct table "pmf": {"3": "1/216", ...} may be given. Weights,
// probabilities and multipliers are integers or "n/d" strings. Omitted
// "multipliers" default to 1..slots with "slots" defaulting to 10; omitted
// dice default to three fair six-sided dice.
struct GameSpec {
  std::string label;
  Pmf pmf;
  SlotConfig config;
  nlohmann::json source;  // the document this spec was parsed from
};

// Raised for malformed or inconsistent spec files; the message carries the
// line and column (syntax errors) or the JSON path (semantic errors).
class SpecError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

GameSpec standard_game_spec();
GameSpec parse_game_spec(std::string_view text);
GameSpec game_spec_from_json(const nlohmann::json& document);
GameSpec load_game_spec(const std::filesystem::path& path);

// Stable identifier of the (pmf, multipliers) pair.
std::uint64_t game_spec_key(const GameSpec& spec);

}  // namespace tenx18
