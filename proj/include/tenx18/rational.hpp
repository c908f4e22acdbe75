#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace tenx18 {

// Exact arbitrary-precision rational, always kept in canonical form.
using Rational = mpq_class;
using BigInt = mpz_class;

// Parses "n", "-n" or "n/d". Throws InvalidInput on malformed text or a
// zero denominator.
Rational parse_rational(std::string_view text);

// "n/d" (or "n" for integers), canonical.
std::string to_fraction_string(const Rational& value);

// Decimal rendering with exactly `places` digits after the point,
// rounded half to even.
std::string to_decimal(const Rational& value, int places);

// Nearest double; for display and statistics only.
double to_double(const Rational& value);

// base^exponent, with 0^0 = 1.
Rational power(const Rational& base, unsigned exponent);

BigInt binomial(unsigned n, unsigned k);

// Stable 64-bit FNV-1a, used to key caches on disk.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace tenx18
