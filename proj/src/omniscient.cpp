#include "tenx18/omniscient.hpp"

#include <algorithm>

#include "tenx18/errors.hpp"

namespace tenx18 {

Rational multiplier_range_sum(const SlotConfig& config, int i, int j) {
  if (i < 1 || j > config.size() || i > j + 1) {
    throw RangeError("multiplier range [" + std::to_string(i) + ", " +
                     std::to_string(j) + "] invalid for " +
                     std::to_string(config.size()) + " slots");
  }
  Rational sum(0);
  for (int m = i; m <= j; ++m) sum += config.multiplier(m);
  return sum;
}

const Rational& OmniscientTable::value(int y, int l) const {
  if (y < pmf_.xmin() - 1 || y > pmf_.xmax() || l < 0 || l > config_.size()) {
    throw RangeError("omniscient table index (" + std::to_string(y) + ", " +
                     std::to_string(l) + ") out of range");
  }
  return q_[static_cast<std::size_t>(y - pmf_.xmin() + 1)][static_cast<std::size_t>(l)];
}

const Rational& OmniscientTable::expected_score() const {
  return value(pmf_.xmax(), config_.size());
}

OmniscientTable build_omniscient(const Pmf& pmf, const SlotConfig& config) {
  const int slots = config.size();
  const auto columns = static_cast<std::size_t>(slots + 1);

  // prefix[n] = multiplier(1) + ... + multiplier(n)
  std::vector<Rational> prefix(columns, Rational(0));
  for (int n = 1; n <= slots; ++n) {
    prefix[static_cast<std::size_t>(n)] = prefix[static_cast<std::size_t>(n - 1)] +
                                          config.multiplier(n);
  }

  std::vector<std::vector<Rational>> q;
  q.reserve(static_cast<std::size_t>(pmf.width() + 1));
  q.emplace_back(columns, Rational(0));  // y = xmin - 1

  for (int y = pmf.xmin(); y <= pmf.xmax(); ++y) {
    const Rational p = conditional_at_most(pmf, y);
    const Rational miss = 1 - p;
    std::vector<Rational> p_pow(columns), miss_pow(columns);
    for (std::size_t n = 0; n < columns; ++n) {
      p_pow[n] = power(p, static_cast<unsigned>(n));
      miss_pow[n] = power(miss, static_cast<unsigned>(n));
    }

    const auto& below = q.back();
    std::vector<Rational> row(columns, Rational(0));
    for (int l = 1; l <= slots; ++l) {
      Rational sum(0);
      for (int c = 0; c <= l; ++c) {
        // c of the l open rolls equal y and take the top c of the l cheapest
        // slots; the rest are all below y.
        const Rational weight =
            Rational(binomial(static_cast<unsigned>(l), static_cast<unsigned>(c))) *
            p_pow[static_cast<std::size_t>(c)] * miss_pow[static_cast<std::size_t>(l - c)];
        if (sgn(weight) == 0) continue;
        const Rational top = prefix[static_cast<std::size_t>(l)] -
                             prefix[static_cast<std::size_t>(l - c)];
        sum += weight * (y * top + below[static_cast<std::size_t>(l - c)]);
      }
      row[static_cast<std::size_t>(l)] = sum;
    }
    q.push_back(std::move(row));
  }
  return OmniscientTable(pmf, config, std::move(q));
}

GameState omniscient_play(std::span<const int> rolls, const SlotConfig& config,
                          const Pmf& pmf) {
  if (rolls.size() != static_cast<std::size_t>(config.size())) {
    throw InvalidInput("expected " + std::to_string(config.size()) + " rolls, got " +
                       std::to_string(rolls.size()));
  }
  std::vector<int> sorted(rolls.begin(), rolls.end());
  std::sort(sorted.begin(), sorted.end());
  GameState state(config, pmf);
  for (int slot = 1; slot <= config.size(); ++slot) {
    state = apply_move(state, slot, sorted[static_cast<std::size_t>(slot - 1)]);
  }
  return state;
}

namespace {

BigInt lcm_of_denominators(std::span<const Rational> values) {
  BigInt result(1);
  for (const auto& v : values) {
    mpz_lcm(result.get_mpz_t(), result.get_mpz_t(), v.get_den_mpz_t());
  }
  return result;
}

struct MultisetWalk {
  int slots;
  int width;
  int xmin;
  std::vector<BigInt> weight;                  // integer roll weights
  std::vector<std::vector<BigInt>> weight_pow;  // weight[d]^m
  std::vector<std::vector<BigInt>> choose;      // C(r, m)
  std::vector<BigInt> prefix;                   // scaled multiplier prefix sums
  BigInt total;

  // Place the rolls equal to xmin + d onto slots pos+1.. in ascending order.
  void walk(int d, int pos, const BigInt& coef, const BigInt& score) {
    const int remaining = slots - pos;
    if (remaining == 0) {
      total += coef * score;
      return;
    }
    if (d == width) return;
    const int x = xmin + d;
    const int lo = d == width - 1 ? remaining : 0;
    for (int m = lo; m <= remaining; ++m) {
      if (m > 0 && weight[static_cast<std::size_t>(d)] == 0) break;
      const BigInt next_coef =
          coef * choose[static_cast<std::size_t>(remaining)][static_cast<std::size_t>(m)] *
          weight_pow[static_cast<std::size_t>(d)][static_cast<std::size_t>(m)];
      const BigInt next_score =
          score + x * (prefix[static_cast<std::size_t>(pos + m)] -
                       prefix[static_cast<std::size_t>(pos)]);
      walk(d + 1, pos + m, next_coef, next_score);
    }
  }
};

}  // namespace

Rational omniscient_bruteforce(const Pmf& pmf, const SlotConfig& config,
                               const BruteforceOptions& options) {
  const int slots = config.size();
  const int width = pmf.width();

  const BigInt count = binomial(static_cast<unsigned>(slots + width - 1),
                                static_cast<unsigned>(slots));
  if (count > BigInt(std::to_string(options.max_multisets))) {
    throw CapacityError("brute force needs " + count.get_str() +
                        " roll multisets; budget is " +
                        std::to_string(options.max_multisets));
  }

  const BigInt roll_scale = lcm_of_denominators(pmf.probs());
  const BigInt mult_scale = lcm_of_denominators(config.multipliers());

  MultisetWalk w{slots, width, pmf.xmin(), {}, {}, {}, {}, BigInt(0)};
  for (const auto& p : pmf.probs()) {
    const Rational scaled = p * roll_scale;
    w.weight.push_back(scaled.get_num());
    std::vector<BigInt> pows{BigInt(1)};
    for (int m = 1; m <= slots; ++m) pows.push_back(pows.back() * w.weight.back());
    w.weight_pow.push_back(std::move(pows));
  }
  for (int r = 0; r <= slots; ++r) {
    std::vector<BigInt> row;
    for (int m = 0; m <= r; ++m) {
      row.push_back(binomial(static_cast<unsigned>(r), static_cast<unsigned>(m)));
    }
    w.choose.push_back(std::move(row));
  }
  w.prefix.push_back(BigInt(0));
  for (const auto& m : config.multipliers()) {
    const Rational scaled = m * mult_scale;
    w.prefix.push_back(w.prefix.back() + scaled.get_num());
  }

  w.walk(0, 0, BigInt(1), BigInt(0));

  BigInt denominator;
  mpz_pow_ui(denominator.get_mpz_t(), roll_scale.get_mpz_t(),
             static_cast<unsigned long>(slots));
  denominator *= mult_scale;
  Rational result(w.total, denominator);
  result.canonicalize();
  return result;
}

void write_omniscient_table(const OmniscientTable& table, std::ostream& out,
                            int precision) {
  out << "y,l,exact,decimal\n";
  for (int y = table.pmf().xmin() - 1; y <= table.pmf().xmax(); ++y) {
    for (int l = 0; l <= table.config().size(); ++l) {
      out << y << ',' << l << ',' << to_fraction_string(table.value(y, l)) << ','
          << to_decimal(table.value(y, l), precision) << '\n';
    }
  }
}

}  // namespace tenx18
