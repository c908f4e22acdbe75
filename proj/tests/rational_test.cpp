#include <doctest.h>

#include "tenx18/errors.hpp"
#include "tenx18/rational.hpp"

using namespace tenx18;

TEST_SUITE("rational") {
  TEST_CASE("parse and print") {
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational(" -4 ") == Rational(-4));
    CHECK(parse_rational("+7/1") == Rational(7));
    CHECK(to_fraction_string(parse_rational("10/4")) == "5/2");
    CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
    CHECK_THROWS_AS(parse_rational("abc"), InvalidInput);
    CHECK_THROWS_AS(parse_rational("1.5"), InvalidInput);
    CHECK_THROWS_AS(parse_rational(""), InvalidInput);
  }

  TEST_CASE("decimal rendering rounds half to even") {
    CHECK(to_decimal(Rational(1, 8), 2) == "0.12");   // 0.125
    CHECK(to_decimal(Rational(3, 8), 2) == "0.38");   // 0.375
    CHECK(to_decimal(Rational(5, 2), 0) == "2");
    CHECK(to_decimal(Rational(7, 2), 0) == "4");
    CHECK(to_decimal(Rational(-1, 8), 2) == "-0.12");
    CHECK(to_decimal(Rational(-1, 1000), 2) == "0.00");
    CHECK(to_decimal(Rational(1, 3), 5) == "0.33333");
    CHECK(to_decimal(Rational(2, 3), 5) == "0.66667");
    CHECK(to_decimal(Rational(21, 2), 3) == "10.500");
    CHECK(to_decimal(Rational(1, 16), 1) == "0.1");
    CHECK(to_decimal(Rational(12345), 2) == "12345.00");
  }

  TEST_CASE("power and binomial") {
    CHECK(power(Rational(0), 0) == 1);
    CHECK(power(Rational(2, 3), 3) == Rational(8, 27));
    CHECK(binomial(25, 10) == 3268760);
    CHECK(binomial(5, 0) == 1);
  }

  TEST_CASE("fnv1a is stable") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  }
}
