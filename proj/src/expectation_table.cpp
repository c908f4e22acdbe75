#include "tenx18/expectation_table.hpp"

#include "tenx18/errors.hpp"

namespace tenx18 {

namespace {

// 1-based insertion rank of x into a non-decreasing row, sentinels implied.
int insertion_rank(const std::vector<Rational>& row, int x) {
  int rank = 1;
  for (const auto& e : row) {
    if (x <= e) break;
    ++rank;
  }
  return rank;
}

}  // namespace

const std::vector<Rational>& ExpectationTable::row(int j) const {
  if (j < 1 || j > slots()) {
    throw RangeError("row " + std::to_string(j) + " outside 1.." +
                     std::to_string(slots()));
  }
  return rows_[static_cast<std::size_t>(j - 1)];
}

const Rational& ExpectationTable::at(int j, int i) const {
  const auto& r = row(j);
  if (i < 1 || i > j) {
    throw RangeError("column " + std::to_string(i) + " outside row " +
                     std::to_string(j));
  }
  return r[static_cast<std::size_t>(i - 1)];
}

ExpectationTable build_expectation_table(const Pmf& pmf, int k) {
  if (k < 1) throw InvalidInput("at least one slot is required");

  std::vector<std::vector<Rational>> rows;
  rows.reserve(static_cast<std::size_t>(k));
  std::vector<Rational> previous;  // row j - 1; empty for j = 1
  for (int j = 1; j <= k; ++j) {
    std::vector<Rational> current(static_cast<std::size_t>(j), Rational(0));
    for (int x = pmf.xmin(); x <= pmf.xmax(); ++x) {
      const Rational p = pmf.prob(x);
      if (sgn(p) == 0) continue;
      const int rank = insertion_rank(previous, x);
      for (int i = 1; i <= j; ++i) {
        const auto idx = static_cast<std::size_t>(i - 1);
        if (i < rank) {
          current[idx] += p * previous[idx];
        } else if (i == rank) {
          current[idx] += p * x;
        } else {
          current[idx] += p * previous[idx - 1];
        }
      }
    }
    rows.push_back(current);
    previous = std::move(current);
  }
  return ExpectationTable(pmf, std::move(rows));
}

int choose_free_rank(const ExpectationTable& table, int free_count, int roll) {
  if (!table.pmf().contains(roll)) {
    throw RangeError("roll " + std::to_string(roll) + " outside [" +
                     std::to_string(table.pmf().xmin()) + ", " +
                     std::to_string(table.pmf().xmax()) + "]");
  }
  if (free_count < 1 || free_count > table.slots()) {
    throw RangeError("free slot count " + std::to_string(free_count) +
                     " outside 1.." + std::to_string(table.slots()));
  }
  if (free_count == 1) return 1;
  return insertion_rank(table.row(free_count - 1), roll);
}

int slot_for_rank(SlotMask free, int rank) {
  if (rank < 1 || rank > slot_count(free)) {
    throw RangeError("rank " + std::to_string(rank) + " exceeds free slots");
  }
  for (int r = 1; r < rank; ++r) free &= free - 1;
  return std::countr_zero(free) + 1;
}

Rational poly_strategy_expected_score(const ExpectationTable& table,
                                      const SlotConfig& config) {
  if (table.slots() != config.size()) {
    throw InvalidInput("expectation table has " + std::to_string(table.slots()) +
                       " rows but the board has " + std::to_string(config.size()) +
                       " slots");
  }
  Rational sum(0);
  const auto& last = table.row(table.slots());
  for (int i = 1; i <= config.size(); ++i) {
    sum += config.multiplier(i) * last[static_cast<std::size_t>(i - 1)];
  }
  return sum;
}

void write_expectation_table(const ExpectationTable& table, std::ostream& out,
                             int precision) {
  out << "# E_j[i]: rows j = " << table.slots() << "..1, columns i = 1..j\n";
  for (int j = table.slots(); j >= 1; --j) {
    out << j;
    for (const auto& e : table.row(j)) out << ' ' << to_decimal(e, precision);
    out << '\n';
  }
  out << "# exact\n";
  for (int j = table.slots(); j >= 1; --j) {
    out << j;
    for (const auto& e : table.row(j)) out << ' ' << to_fraction_string(e);
    out << '\n';
  }
}

}  // namespace tenx18
