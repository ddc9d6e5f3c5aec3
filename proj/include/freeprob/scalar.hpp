#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

namespace freeprob {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Number types every transform is instantiated for: exact rationals (the
/// test oracle) and IEEE doubles (the simulation interface).
template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

enum class Mode { exact, floating };

template <Scalar T>
inline constexpr Mode mode_of = std::same_as<T, Rational> ? Mode::exact : Mode::floating;

inline const char* mode_name(Mode m) { return m == Mode::exact ? "exact" : "float"; }

/// Exact conversion: every finite double is a dyadic rational.
Rational rational_from_double(double x);

/// Accepts "p/q", "p", and plain decimals such as "-0.125" or "1e-3"; the
/// decimal forms are read exactly (so "0.1" is 1/10, not the nearest double).
Rational parse_rational(std::string_view text);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <Scalar T>
T from_rational(const Rational& q) {
  if constexpr (std::same_as<T, Rational>) {
    return q;
  } else {
    return to_double(q);
  }
}

template <Scalar T>
T from_double(double x) {
  if constexpr (std::same_as<T, Rational>) {
    return rational_from_double(x);
  } else {
    return x;
  }
}

template <Scalar T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}

template <Scalar T>
T ipow(const T& base, unsigned exponent) {
  T result(1);
  T b = base;
  while (exponent != 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1U;
    if (exponent != 0) b *= b;
  }
  return result;
}

}  // namespace freeprob
