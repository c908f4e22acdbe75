#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tenx18/rational.hpp"

namespace tenx18 {

struct Face {
  int value;
  Rational weight;  // any positive rational, need not be normalized
};

// One die. Faces are stored sorted by value.
class DieSpec {
 public:
  // Throws InvalidInput when there are no faces, a weight is not strictly
  // positive, or a face value repeats.
  explicit DieSpec(std::vector<Face> faces);

  // Fair die with faces 1..sides.
  static DieSpec fair(int sides);

  const std::vector<Face>& faces() const { return faces_; }
  Rational total_weight() const;
  Rational expectation() const;

 private:
  std::vector<Face> faces_;
};

// Exact distribution of one roll over the integer range [xmin, xmax].
// Both endpoints carry positive mass; interior holes are allowed.
class Pmf {
 public:
  // probs[i] is Prob(X = xmin + i). Throws InvalidInput unless every entry
  // is non-negative, the total is exactly 1 and both ends are positive.
  Pmf(int xmin, std::vector<Rational> probs);

  static Pmf from_map(const std::map<int, Rational>& table);

  int xmin() const { return xmin_; }
  int xmax() const { return xmin_ + static_cast<int>(probs_.size()) - 1; }
  int width() const { return static_cast<int>(probs_.size()); }
  bool contains(int x) const { return x >= xmin() && x <= xmax(); }

  // Prob(X = x); zero outside the support.
  Rational prob(int x) const;
  std::span<const Rational> probs() const { return probs_; }

  // Deterministic text form, e.g. "3:1/216,4:1/72,...". Used as a cache key.
  std::string canonical_string() const;

  friend bool operator==(const Pmf& a, const Pmf& b) {
    return a.xmin_ == b.xmin_ && a.probs_ == b.probs_;
  }

 private:
  int xmin_;
  std::vector<Rational> probs_;
};

// Exact convolution of the normalized per-die distributions.
Pmf pmf_from_dice(std::span<const DieSpec> dice);

// Three fair six-sided dice.
Pmf standard_pmf();

// Two twelve-sided dice, each with face 12 weighted twice as heavily.
Pmf loaded_d12_pmf();

Rational expectation(const Pmf& pmf);

// Prob(X = y | X <= y). Throws RangeError outside [xmin, xmax].
Rational conditional_at_most(const Pmf& pmf, int y);

// Prob(X = x)^n: every one of n independent rolls shows x.
Rational iid_all_equal_probability(const Pmf& pmf, int x, unsigned n);

}  // namespace tenx18
