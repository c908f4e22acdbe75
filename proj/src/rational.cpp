#include "tenx18/rational.hpp"

#include <cctype>

#include "tenx18/errors.hpp"

namespace tenx18 {

namespace {

bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return BigInt(std::string(s), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);

  const auto slash = text.find('/');
  const auto num_text = text.substr(0, slash);
  const auto den_text =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_integer_literal(num_text) || !is_integer_literal(den_text)) {
    throw InvalidInput("malformed rational '" + std::string(text) + "'");
  }
  BigInt den = parse_integer(den_text);
  if (den == 0) {
    throw InvalidInput("zero denominator in '" + std::string(text) + "'");
  }
  Rational r(parse_integer(num_text), den);
  r.canonicalize();
  return r;
}

std::string to_fraction_string(const Rational& value) {
  return value.get_str(10);
}

std::string to_decimal(const Rational& value, int places) {
  if (places < 0) throw InvalidInput("negative decimal precision");

  const bool negative = sgn(value) < 0;
  const Rational magnitude = abs(value);

  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));
  const BigInt num = magnitude.get_num() * scale;
  const BigInt& den = magnitude.get_den();

  BigInt quotient, remainder;
  mpz_fdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), num.get_mpz_t(),
              den.get_mpz_t());
  const int half = cmp(BigInt(remainder * 2), den);
  if (half > 0 || (half == 0 && mpz_odd_p(quotient.get_mpz_t()))) ++quotient;

  std::string digits = quotient.get_str(10);
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places)) {
      digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), 1, '.');
  }
  if (negative && quotient != 0) digits.insert(0, 1, '-');
  return digits;
}

double to_double(const Rational& value) { return value.get_d(); }

Rational power(const Rational& base, unsigned exponent) {
  Rational result(1);
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  result = Rational(num, den);
  result.canonicalize();
  return result;
}

BigInt binomial(unsigned n, unsigned k) {
  BigInt result;
  mpz_bin_uiui(result.get_mpz_t(), n, k);
  return result;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t hash = seed;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace tenx18
