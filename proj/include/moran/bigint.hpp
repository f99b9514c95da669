#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace moran {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Thrown when an input violates a structural requirement (bad sequence,
/// broken divisibility, out-of-range parameter).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::string to_string(const BigInt& v) { return v.str(); }

namespace detail {

/// BigInt from plain decimal digits. Leading zeros are dropped first, since the
/// string constructor would read them as an octal prefix.
inline BigInt decimal_digits(std::string_view digits, bool negative = false) {
  std::size_t z = 0;
  while (z + 1 < digits.size() && digits[z] == '0') ++z;
  BigInt v(std::string(digits.substr(z)));
  return negative ? BigInt(-v) : v;
}

}  // namespace detail

inline BigInt parse_bigint(std::string_view text) {
  if (text.empty()) throw ValidationError("empty integer literal");
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) throw ValidationError("bad integer literal: " + std::string(text));
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] < '0' || text[j] > '9') {
      throw ValidationError("bad integer literal: " + std::string(text));
    }
  }
  return detail::decimal_digits(text.substr(i), text[0] == '-');
}

inline std::size_t bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
}

/// Natural log of |v| for v != 0; safe for values far beyond double range.
inline double log_abs(const BigInt& v) {
  BigInt a = boost::multiprecision::abs(v);
  if (a == 0) throw std::domain_error("log of zero");
  std::size_t bits = bit_length(a);
  if (bits <= 1000) return std::log(a.convert_to<double>());
  std::size_t shift = bits - 64;
  BigInt top = a >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

/// Nearest double to a rational, also when numerator and denominator are huge.
inline double to_double(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (num == 0) return 0.0;
  std::size_t nb = bit_length(num);
  std::size_t db = bit_length(den);
  if (nb < 1000 && db < 1000) return num.convert_to<double>() / den.convert_to<double>();
  // keep ~120 significant bits of each side
  long long shift_n = static_cast<long long>(nb) - 120;
  long long shift_d = static_cast<long long>(db) - 120;
  if (shift_n < 0) shift_n = 0;
  if (shift_d < 0) shift_d = 0;
  double n = (num >> static_cast<unsigned>(shift_n)).convert_to<double>();
  double d = (den >> static_cast<unsigned>(shift_d)).convert_to<double>();
  return std::ldexp(n / d, static_cast<int>(shift_n - shift_d));
}

inline BigInt pow_big(const BigInt& base, unsigned exponent) {
  return boost::multiprecision::pow(base, exponent);
}

/// Floor-style modulus: result in [0, m) for m > 0.
inline BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

/// Fractional part of a rational, in [0, 1).
inline Rational frac(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  return Rational(mod_floor(num, den), den);
}

/// Exact rational parsed from a plain decimal literal such as "0.25" or "1e-3"
/// is not supported; only [-]digits[.digits].
inline Rational parse_decimal(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ValidationError("empty decimal literal");
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  std::string digits;
  std::size_t frac_digits = 0;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw ValidationError("bad decimal literal: " + s);
    }
  }
  if (digits.empty()) throw ValidationError("bad decimal literal: " + s);
  Rational r(detail::decimal_digits(digits), pow_big(BigInt(10), static_cast<unsigned>(frac_digits)));
  return neg ? Rational(-r) : r;
}

}  // namespace moran
