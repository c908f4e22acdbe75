#include "tenx18/dice.hpp"

#include <algorithm>
#include <sstream>

#include "tenx18/errors.hpp"

namespace tenx18 {

DieSpec::DieSpec(std::vector<Face> faces) : faces_(std::move(faces)) {
  if (faces_.empty()) throw InvalidInput("die has no faces");
  for (const auto& f : faces_) {
    if (sgn(f.weight) <= 0) {
      throw InvalidInput("face " + std::to_string(f.value) +
                         " has non-positive weight");
    }
  }
  std::sort(faces_.begin(), faces_.end(),
            [](const Face& a, const Face& b) { return a.value < b.value; });
  const auto dup = std::adjacent_find(
      faces_.begin(), faces_.end(),
      [](const Face& a, const Face& b) { return a.value == b.value; });
  if (dup != faces_.end()) {
    throw InvalidInput("face value " + std::to_string(dup->value) +
                       " appears twice");
  }
}

DieSpec DieSpec::fair(int sides) {
  if (sides < 1) throw InvalidInput("a die needs at least one side");
  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>(sides));
  for (int v = 1; v <= sides; ++v) faces.push_back({v, Rational(1)});
  return DieSpec(std::move(faces));
}

Rational DieSpec::total_weight() const {
  Rational total(0);
  for (const auto& f : faces_) total += f.weight;
  return total;
}

Rational DieSpec::expectation() const {
  Rational sum(0);
  for (const auto& f : faces_) sum += f.weight * f.value;
  return sum / total_weight();
}

Pmf::Pmf(int xmin, std::vector<Rational> probs)
    : xmin_(xmin), probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("pmf has empty support");
  Rational total(0);
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (sgn(probs_[i]) < 0) {
      throw InvalidInput("negative probability at x = " +
                         std::to_string(xmin_ + static_cast<int>(i)));
    }
    total += probs_[i];
  }
  if (total != 1) {
    throw InvalidInput("probabilities sum to " + to_fraction_string(total) +
                       ", not 1");
  }
  if (sgn(probs_.front()) == 0 || sgn(probs_.back()) == 0) {
    throw InvalidInput("pmf support is not tight at its bounds");
  }
}

Pmf Pmf::from_map(const std::map<int, Rational>& table) {
  if (table.empty()) throw InvalidInput("pmf table is empty");
  const int lo = table.begin()->first;
  const int hi = table.rbegin()->first;
  std::vector<Rational> probs(static_cast<std::size_t>(hi - lo + 1), Rational(0));
  for (const auto& [x, p] : table) probs[static_cast<std::size_t>(x - lo)] = p;
  return Pmf(lo, std::move(probs));
}

Rational Pmf::prob(int x) const {
  if (!contains(x)) return Rational(0);
  return probs_[static_cast<std::size_t>(x - xmin_)];
}

std::string Pmf::canonical_string() const {
  std::ostringstream out;
  for (int x = xmin(); x <= xmax(); ++x) {
    if (x != xmin()) out << ',';
    out << x << ':' << to_fraction_string(prob(x));
  }
  return out.str();
}

Pmf pmf_from_dice(std::span<const DieSpec> dice) {
  if (dice.empty()) throw InvalidInput("at least one die is required");

  int lo = 0;
  std::vector<Rational> acc{Rational(1)};  // point mass at 0
  for (const auto& die : dice) {
    const Rational total = die.total_weight();
    const int die_lo = die.faces().front().value;
    const int die_hi = die.faces().back().value;
    std::vector<Rational> next(acc.size() + static_cast<std::size_t>(die_hi - die_lo),
                               Rational(0));
    for (const auto& face : die.faces()) {
      const Rational p = face.weight / total;
      const auto shift = static_cast<std::size_t>(face.value - die_lo);
      for (std::size_t i = 0; i < acc.size(); ++i) {
        if (sgn(acc[i]) != 0) next[i + shift] += acc[i] * p;
      }
    }
    acc = std::move(next);
    lo += die_lo;
  }
  return Pmf(lo, std::move(acc));
}

Pmf standard_pmf() {
  const std::vector<DieSpec> dice(3, DieSpec::fair(6));
  return pmf_from_dice(dice);
}

Pmf loaded_d12_pmf() {
  std::vector<Face> faces;
  for (int v = 1; v <= 12; ++v) faces.push_back({v, Rational(v == 12 ? 2 : 1)});
  const std::vector<DieSpec> dice(2, DieSpec(faces));
  return pmf_from_dice(dice);
}

Rational expectation(const Pmf& pmf) {
  Rational sum(0);
  for (int x = pmf.xmin(); x <= pmf.xmax(); ++x) sum += pmf.prob(x) * x;
  return sum;
}

Rational conditional_at_most(const Pmf& pmf, int y) {
  if (!pmf.contains(y)) {
    throw RangeError("value " + std::to_string(y) + " outside support [" +
                     std::to_string(pmf.xmin()) + ", " +
                     std::to_string(pmf.xmax()) + "]");
  }
  Rational below(0);
  for (int x = pmf.xmin(); x <= y; ++x) below += pmf.prob(x);
  return pmf.prob(y) / below;
}

Rational iid_all_equal_probability(const Pmf& pmf, int x, unsigned n) {
  if (!pmf.contains(x)) {
    throw RangeError("value " + std::to_string(x) + " outside support");
  }
  return power(pmf.prob(x), n);
}

}  // namespace tenx18
