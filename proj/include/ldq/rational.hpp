#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace ldq {

// Exact rational number; every metric value and unit factor is one of these.
using Rational = mpq_class;
using BigInt = mpz_class;

// n/d in lowest terms. mpq_class(n, d) does not reduce, and comparisons on
// unreduced values are wrong, so every two-part construction goes through here.
inline Rational ratio(const BigInt& n, const BigInt& d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

// Parses an xsd:decimal / xsd:integer / xsd:double lexical form into an exact
// rational. Exponent notation is accepted; INF/NaN are not numbers here.
std::optional<Rational> parse_decimal(std::string_view text);

// Shortest exact decimal rendering when the expansion terminates within
// `max_fraction_digits`, otherwise rounded half-to-even at that many digits.
// Integral values render without a fractional part ("12600000").
std::string format_decimal(const Rational& value, int max_fraction_digits = 12);

// Exactly `fraction_digits` fractional digits, rounded half-to-even.
std::string format_fixed(const Rational& value, int fraction_digits);

// Rounds to the nearest integer, ties to even.
BigInt round_half_even(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

// "n/d" (or "n" when d == 1).
std::string to_fraction_string(const Rational& value);

}  // namespace ldq
