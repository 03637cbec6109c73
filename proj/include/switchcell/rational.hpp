#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "switchcell/error.hpp"

namespace switchcell {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses a plain decimal literal ("2", "-0.125", "1.5e-3") into an exact rational.
inline Rational parse_decimal(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorKind::MalformedParameter, "not a decimal number: '" + std::string(text) + "'");
  };
  std::size_t pos = 0;
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  std::size_t end = text.size();
  while (end > pos && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  if (pos == end) throw fail();

  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  BigInt digits = 0;
  long scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < end; ++pos) {
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw fail();

  long exponent = 0;
  if (pos < end) {
    if (text[pos] != 'e' && text[pos] != 'E') throw fail();
    ++pos;
    bool exp_negative = false;
    if (pos < end && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    if (pos == end) throw fail();
    for (; pos < end; ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) throw fail();
      exponent = exponent * 10 + (text[pos] - '0');
      if (exponent > 4000) throw fail();
    }
    if (exp_negative) exponent = -exponent;
  }

  long shift = exponent - scale;
  BigInt power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(shift < 0 ? -shift : shift));
  Rational value = shift >= 0 ? Rational(digits * power) : Rational(digits, power);
  return negative ? Rational(-value) : value;
}

inline int sign(const Rational& value) { return value.sign(); }

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

/// Exact decimal rendering when the denominator is 2^a 5^b, otherwise "p/q".
inline std::string to_string(const Rational& value) {
  BigInt num = boost::multiprecision::numerator(value);
  BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  BigInt rest = den;
  unsigned twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return num.str() + "/" + den.str();
  unsigned places = twos > fives ? twos : fives;
  BigInt scaled = num * boost::multiprecision::pow(BigInt(10), places) / den;
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  return negative ? "-" + digits : digits;
}

}  // namespace switchcell
