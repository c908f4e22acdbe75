#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tenx18/dice.hpp"
#include "tenx18/exact_table.hpp"
#include "tenx18/expectation_table.hpp"
#include "tenx18/game.hpp"
#include "tenx18/rational.hpp"

namespace tenx18 {

// SplitMix64 generator. Small state, so one instance per game is cheap.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, bound) without modulo bias. bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

// Seed of the substream for one game: a fixed mix of (seed, index). Games
// can therefore be played in any order or on any thread.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

// Inverse-CDF sampling on the exact cumulative weights. All probabilities
// are brought to a common denominator, which must fit in 64 bits
// (CapacityError otherwise).
class RollSampler {
 public:
  explicit RollSampler(const Pmf& pmf);
  int sample(SplitMix64& rng) const;

 private:
  int xmin_;
  std::uint64_t total_;
  std::vector<std::uint64_t> cumulative_;
};

// Per-game scratch handed to a strategy on every turn.
struct PlayContext {
  std::span<const int> rolls;  // the whole game, for the all-knowing player
  int turn = 0;
  SplitMix64* aux = nullptr;   // private stream for randomized strategies
  std::vector<int> plan;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  // Must return a slot that is in `free`.
  virtual int choose_slot(SlotMask free, int roll, PlayContext& ctx) const = 0;
};

class RandomStrategy final : public Strategy {
 public:
  std::string name() const override { return "random"; }
  int choose_slot(SlotMask free, int roll, PlayContext& ctx) const override;
};

class ExactStrategy final : public Strategy {
 public:
  explicit ExactStrategy(const ExactTable& table);
  std::string name() const override { return "exact"; }
  int choose_slot(SlotMask free, int roll, PlayContext& ctx) const override;

 private:
  int xmin_;
  int width_;
  std::vector<std::uint8_t> policy_;
};

class PolyStrategy final : public Strategy {
 public:
  explicit PolyStrategy(const ExpectationTable& table);
  std::string name() const override { return "poly"; }
  int choose_slot(SlotMask free, int roll, PlayContext& ctx) const override;

 private:
  int xmin_;
  int width_;
  std::vector<std::uint8_t> rank_;  // rank_[free_count * width + roll - xmin]
};

class OmniscientStrategy final : public Strategy {
 public:
  std::string name() const override { return "omniscient"; }
  int choose_slot(SlotMask free, int roll, PlayContext& ctx) const override;
};

struct HistogramRow {
  std::int64_t bin_start;
  std::uint64_t count;
  double frequency;
};

struct SimulationReport {
  std::string strategy;
  std::uint64_t games = 0;
  std::uint64_t seed = 0;
  Rational mean;
  Rational median;  // lower median
  Rational min;
  Rational max;
  double variance = 0;  // sample variance
  // bin start (multiple of 10) -> number of games with score in [start, start+10)
  std::map<std::int64_t, std::uint64_t> histogram;
  Rational min_possible;
  Rational max_possible;
  // Per-game scores in game order, as integers over score_scale.
  std::int64_t score_scale = 1;
  std::vector<std::int64_t> scores;
};

struct SimulationOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

SimulationReport simulate(const Strategy& strategy, const Pmf& pmf,
                          const SlotConfig& config, std::uint64_t games,
                          std::uint64_t seed, const SimulationOptions& options = {});

// One report per strategy, in input order. With shared_rolls every strategy
// plays the same roll sequence in every game; otherwise strategy s draws
// from its own stream (strategy 0 matches simulate()).
std::vector<SimulationReport> compare_strategies(
    std::span<const Strategy* const> strategies, const Pmf& pmf,
    const SlotConfig& config, bool shared_rolls, std::uint64_t games,
    std::uint64_t seed, const SimulationOptions& options = {});

// Bins from one empty bin below the smallest possible score up to the bin of
// the largest possible score; frequency is count / games.
std::vector<HistogramRow> histogram_export(const SimulationReport& report);

void write_histogram_csv(const SimulationReport& report, std::ostream& out);
// Machine-readable report (JSON), without the per-game scores.
std::string report_json(const SimulationReport& report, int precision);
// Aligned human-readable table, one row per report.
void write_report_table(std::span<const SimulationReport> reports, std::ostream& out,
                        int precision);

}  // namespace tenx18
