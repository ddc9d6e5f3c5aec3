#include "freeprob/scalar.hpp"

#include <cctype>
#include <cstdlib>

#include "freeprob/error.hpp"

namespace freeprob {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ParseError("not a rational number: \"" + std::string(whole) + "\"");
  BigInt value{std::string(s)};
  return negative ? BigInt(-value) : value;
}

BigInt pow10(unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("cannot represent a non-finite value exactly");
  return Rational(x);
}

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), whole);
    BigInt den = parse_integer(text.substr(slash + 1), whole);
    if (den == 0) throw ParseError("zero denominator in \"" + std::string(whole) + "\"");
    return Rational(num, den);
  }

  // Decimal with optional fraction and exponent, read exactly.
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    BigInt exp_value = parse_integer(text.substr(e + 1), whole);
    if (abs(exp_value) > 4000) throw ParseError("exponent out of range in \"" + std::string(whole) + "\"");
    exponent = exp_value.convert_to<long>();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long fraction_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    auto int_part = mantissa.substr(0, dot);
    auto frac_part = mantissa.substr(dot + 1);
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
        (int_part.empty() && frac_part.empty())) {
      throw ParseError("not a rational number: \"" + std::string(whole) + "\"");
    }
    digits = std::string(int_part) + std::string(frac_part);
    fraction_digits = static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(mantissa)) throw ParseError("not a rational number: \"" + std::string(whole) + "\"");
    digits = std::string(mantissa);
  }
  BigInt num(digits);
  if (negative) num = -num;
  const long shift = exponent - fraction_digits;
  if (shift >= 0) return Rational(BigInt(num * pow10(static_cast<unsigned>(shift))));
  return Rational(num, pow10(static_cast<unsigned>(-shift)));
}

std::string to_string(const Rational& q) {
  const BigInt num = numerator(q);
  const BigInt den = denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace freeprob
