#include "tenx18/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tenx18/detail/parallel.hpp"
#include "tenx18/errors.hpp"

namespace tenx18 {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kAuxSalt = 0xa0761d6478bd642fULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t to_int64(const BigInt& z, const char* what) {
  if (!z.fits_slong_p()) {
    throw CapacityError(std::string(what) + " does not fit in 64 bits");
  }
  return z.get_si();
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state_ += kGolden;
  return mix64(state_);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  // Reject the top 2^64 mod bound values so every residue is equally likely.
  const std::uint64_t excess = (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  const std::uint64_t accept_max = std::numeric_limits<std::uint64_t>::max() - excess;
  std::uint64_t r;
  do {
    r = next();
  } while (r > accept_max);
  return r % bound;
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index * kGolden + kAuxSalt));
}

RollSampler::RollSampler(const Pmf& pmf) : xmin_(pmf.xmin()) {
  BigInt common(1);
  for (const auto& p : pmf.probs()) {
    mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), p.get_den_mpz_t());
  }
  if (!common.fits_ulong_p()) {
    throw CapacityError("pmf common denominator " + common.get_str() +
                        " exceeds 64 bits; cannot sample exactly");
  }
  total_ = common.get_ui();
  std::uint64_t running = 0;
  for (const auto& p : pmf.probs()) {
    const Rational scaled = p * common;
    running += scaled.get_num().get_ui();
    cumulative_.push_back(running);
  }
}

int RollSampler::sample(SplitMix64& rng) const {
  const std::uint64_t u = rng.below(total_);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return xmin_ + static_cast<int>(it - cumulative_.begin());
}

int RandomStrategy::choose_slot(SlotMask free, int, PlayContext& ctx) const {
  const auto pick = ctx.aux->below(static_cast<std::uint64_t>(slot_count(free)));
  return slot_for_rank(free, static_cast<int>(pick) + 1);
}

ExactStrategy::ExactStrategy(const ExactTable& table)
    : xmin_(table.pmf().xmin()), width_(table.pmf().width()), policy_(exact_policy(table)) {}

int ExactStrategy::choose_slot(SlotMask free, int roll, PlayContext&) const {
  return policy_[free * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(roll - xmin_)];
}

PolyStrategy::PolyStrategy(const ExpectationTable& table)
    : xmin_(table.pmf().xmin()), width_(table.pmf().width()) {
  rank_.assign(static_cast<std::size_t>((table.slots() + 1) * width_), 0);
  for (int free_count = 1; free_count <= table.slots(); ++free_count) {
    for (int d = 0; d < width_; ++d) {
      rank_[static_cast<std::size_t>(free_count * width_ + d)] =
          static_cast<std::uint8_t>(choose_free_rank(table, free_count, xmin_ + d));
    }
  }
}

int PolyStrategy::choose_slot(SlotMask free, int roll, PlayContext&) const {
  const int rank = rank_[static_cast<std::size_t>(slot_count(free) * width_ + roll - xmin_)];
  return slot_for_rank(free, rank);
}

int OmniscientStrategy::choose_slot(SlotMask, int, PlayContext& ctx) const {
  if (ctx.turn == 0) {
    // plan[t] = slot for the t-th roll: its position in ascending order.
    const auto n = ctx.rolls.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ctx.rolls[a] < ctx.rolls[b]; });
    ctx.plan.assign(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
      ctx.plan[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos) + 1;
    }
  }
  return ctx.plan[static_cast<std::size_t>(ctx.turn)];
}

namespace {

SimulationReport summarize(std::string name, std::vector<std::int64_t> scores,
                           std::int64_t scale, std::uint64_t seed,
                           const Pmf& pmf, const SlotConfig& config) {
  SimulationReport report;
  report.strategy = std::move(name);
  report.games = scores.size();
  report.seed = seed;
  report.score_scale = scale;
  report.min_possible = config.total() * pmf.xmin();
  report.max_possible = config.total() * pmf.xmax();

  BigInt sum(0);
  double dsum = 0;
  for (auto s : scores) {
    sum += BigInt(static_cast<long>(s));
    dsum += static_cast<double>(s);
    ++report.histogram[floor_div(s, 10 * scale) * 10];
  }
  const double games = static_cast<double>(scores.size());
  report.mean = Rational(sum, BigInt(std::to_string(scores.size())) * scale);
  report.mean.canonicalize();

  const double dmean = dsum / games;
  double squares = 0;
  for (auto s : scores) {
    const double dev = static_cast<double>(s) - dmean;
    squares += dev * dev;
  }
  const double dscale = static_cast<double>(scale);
  report.variance = scores.size() > 1 ? squares / (games - 1) / (dscale * dscale) : 0.0;

  auto as_rational = [scale](std::int64_t s) {
    Rational r(BigInt(static_cast<long>(s)), BigInt(static_cast<long>(scale)));
    r.canonicalize();
    return r;
  };
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  report.min = as_rational(*lo);
  report.max = as_rational(*hi);

  std::vector<std::int64_t> sorted = scores;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>((sorted.size() - 1) / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  report.median = as_rational(*mid);

  report.scores = std::move(scores);
  return report;
}

}  // namespace

std::vector<SimulationReport> compare_strategies(
    std::span<const Strategy* const> strategies, const Pmf& pmf,
    const SlotConfig& config, bool shared_rolls, std::uint64_t games,
    std::uint64_t seed, const SimulationOptions& options) {
  if (strategies.empty()) throw InvalidInput("at least one strategy is required");
  if (games == 0) throw InvalidInput("at least one game is required");

  BigInt scale_big(1);
  for (const auto& m : config.multipliers()) {
    mpz_lcm(scale_big.get_mpz_t(), scale_big.get_mpz_t(), m.get_den_mpz_t());
  }
  const std::int64_t scale = to_int64(scale_big, "multiplier common denominator");
  std::vector<std::int64_t> weights;
  for (const auto& m : config.multipliers()) {
    const Rational scaled = m * scale_big;
    weights.push_back(to_int64(scaled.get_num(), "scaled multiplier"));
  }
  const BigInt bound = BigInt(std::to_string(weights.back())) *
                       std::max(std::abs(pmf.xmin()), std::abs(pmf.xmax())) *
                       config.size();
  to_int64(bound, "scaled score");

  const RollSampler sampler(pmf);
  const int k = config.size();
  const std::size_t count = strategies.size();

  std::vector<std::vector<std::int64_t>> scores(count, std::vector<std::int64_t>(games));
  detail::parallel_for(
      games,
      [&](std::size_t g) {
        std::vector<int> rolls(static_cast<std::size_t>(k));
        PlayContext ctx;
        for (std::size_t s = 0; s < count; ++s) {
          const std::uint64_t stream_seed = shared_rolls ? seed : seed ^ (s * kGolden);
          SplitMix64 roll_rng(derive_stream_seed(stream_seed, g));
          SplitMix64 aux_rng(derive_stream_seed(stream_seed ^ kAuxSalt, g));
          for (auto& r : rolls) r = sampler.sample(roll_rng);

          ctx.rolls = rolls;
          ctx.aux = &aux_rng;
          SlotMask free = full_mask(k);
          std::int64_t total = 0;
          for (int t = 0; t < k; ++t) {
            ctx.turn = t;
            const int roll = rolls[static_cast<std::size_t>(t)];
            const int slot = strategies[s]->choose_slot(free, roll, ctx);
            if (slot < 1 || slot > k || (free & slot_bit(slot)) == 0) {
              throw Error("strategy " + strategies[s]->name() +
                          " chose unavailable slot " + std::to_string(slot));
            }
            free &= ~slot_bit(slot);
            total += weights[static_cast<std::size_t>(slot - 1)] * roll;
          }
          scores[s][g] = total;
        }
      },
      options.threads);

  std::vector<SimulationReport> reports;
  reports.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    reports.push_back(summarize(strategies[s]->name(), std::move(scores[s]), scale,
                                seed, pmf, config));
  }
  return reports;
}

SimulationReport simulate(const Strategy& strategy, const Pmf& pmf,
                          const SlotConfig& config, std::uint64_t games,
                          std::uint64_t seed, const SimulationOptions& options) {
  const Strategy* one[] = {&strategy};
  return std::move(compare_strategies(one, pmf, config, false, games, seed, options).front());
}

std::vector<HistogramRow> histogram_export(const SimulationReport& report) {
  auto bin_of = [](const Rational& score) {
    BigInt q;
    const BigInt den = score.get_den() * 10;
    mpz_fdiv_q(q.get_mpz_t(), score.get_num_mpz_t(), den.get_mpz_t());
    return q.get_si() * 10;
  };
  std::int64_t first = bin_of(report.min_possible) - 10;
  std::int64_t last = bin_of(report.max_possible);
  if (!report.histogram.empty()) {
    first = std::min(first, report.histogram.begin()->first);
    last = std::max(last, report.histogram.rbegin()->first);
  }

  std::vector<HistogramRow> rows;
  for (std::int64_t bin = first; bin <= last; bin += 10) {
    const auto it = report.histogram.find(bin);
    const std::uint64_t count = it == report.histogram.end() ? 0 : it->second;
    rows.push_back({bin, count,
                    static_cast<double>(count) / static_cast<double>(report.games)});
  }
  return rows;
}

void write_histogram_csv(const SimulationReport& report, std::ostream& out) {
  out << "bin_start,count,frequency\n";
  for (const auto& row : histogram_export(report)) {
    out << row.bin_start << ',' << row.count << ',' << std::setprecision(8)
        << row.frequency << '\n';
  }
}

std::string report_json(const SimulationReport& report, int precision) {
  nlohmann::ordered_json j;
  j["strategy"] = report.strategy;
  j["games"] = report.games;
  j["seed"] = report.seed;
  j["precision"] = precision;
  j["mean"] = to_decimal(report.mean, precision);
  j["mean_exact"] = to_fraction_string(report.mean);
  j["median"] = to_fraction_string(report.median);
  j["min"] = to_fraction_string(report.min);
  j["max"] = to_fraction_string(report.max);
  j["variance"] = report.variance;
  auto& bins = j["histogram"] = nlohmann::ordered_json::array();
  for (const auto& row : histogram_export(report)) {
    bins.push_back({{"bin_start", row.bin_start}, {"count", row.count}});
  }
  return j.dump(2);
}

void write_report_table(std::span<const SimulationReport> reports, std::ostream& out,
                        int precision) {
  out << std::left << std::setw(12) << "strategy" << std::right << std::setw(10)
      << "games" << std::setw(16) << "mean" << std::setw(10) << "median"
      << std::setw(8) << "min" << std::setw(8) << "max" << std::setw(14) << "std.dev"
      << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(12) << r.strategy << std::right << std::setw(10)
        << r.games << std::setw(16) << to_decimal(r.mean, precision) << std::setw(10)
        << to_fraction_string(r.median) << std::setw(8) << to_fraction_string(r.min)
        << std::setw(8) << to_fraction_string(r.max) << std::setw(14) << std::fixed
        << std::setprecision(3) << std::sqrt(r.variance) << '\n';
    out.unsetf(std::ios::fixed);
  }
}

}  // namespace tenx18
