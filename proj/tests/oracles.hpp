#pragma once

// Independent brute-force reference implementations.  Nothing here calls
// into the library's combinatorics; the tests compare the two routes.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "freeprob/scalar.hpp"

namespace oracle {

using freeprob::BigInt;
using freeprob::Rational;
using Labels = std::vector<int>;

// Every set partition of {1..n} as a restricted growth string.
inline std::vector<Labels> all_set_partitions(int n) {
  std::vector<Labels> out;
  Labels cur(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int max_label) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      cur[i] = l;
      rec(i + 1, std::max(max_label, l));
    }
  };
  if (n > 0) {
    cur[0] = 0;
    rec(1, 0);
  }
  return out;
}

// Crossing iff some a < b < c < d has a ~ c, b ~ d and a !~ b.
inline bool crosses(const Labels& l) {
  const int n = static_cast<int>(l.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d)
          if (l[a] == l[c] && l[b] == l[d] && l[a] != l[b]) return true;
  return false;
}

inline std::vector<Labels> all_noncrossing(int n) {
  std::vector<Labels> out;
  for (auto& l : all_set_partitions(n))
    if (!crosses(l)) out.push_back(l);
  return out;
}

inline bool refines(const Labels& p, const Labels& q) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p[i] == p[j] && q[i] != q[j]) return false;
  return true;
}

// mu(p, q) on NC(n) by the forward recursion mu(p, r) = -sum_{p <= s < r} mu(p, s).
inline BigInt mobius(const Labels& p, const Labels& q) {
  const auto nc = all_noncrossing(static_cast<int>(p.size()));
  std::vector<Labels> interval;
  for (const auto& r : nc)
    if (refines(p, r) && refines(r, q)) interval.push_back(r);
  // Sorting by block count descending puts every s < r before r.
  auto blocks = [](const Labels& l) { return *std::max_element(l.begin(), l.end()) + 1; };
  std::sort(interval.begin(), interval.end(), [&](const Labels& a, const Labels& b) { return blocks(a) > blocks(b); });
  std::map<Labels, BigInt> mu;
  for (const auto& r : interval) {
    if (r == p) {
      mu[r] = 1;
      continue;
    }
    BigInt sum = 0;
    for (const auto& [s, v] : mu)
      if (s != r && refines(s, r)) sum += v;
    mu[r] = -sum;
  }
  return mu.at(q);
}

// Cumulants from moments via the functional relation
// m_n = sum_{s=1}^n kappa_s * sum_{i_1+...+i_s = n-s} m_{i_1} ... m_{i_s}, m_0 = 1.
template <class T>
std::vector<T> recursive_cumulants(const std::vector<T>& m) {
  const int N = static_cast<int>(m.size());
  auto mom = [&](int i) { return i == 0 ? T(1) : m[static_cast<std::size_t>(i - 1)]; };
  // conv[s][k] = sum over compositions of k into s non-negative parts of prod m.
  std::vector<std::vector<T>> conv(static_cast<std::size_t>(N + 1), std::vector<T>(static_cast<std::size_t>(N + 1), T(0)));
  conv[0][0] = T(1);
  for (int s = 1; s <= N; ++s)
    for (int k = 0; k <= N; ++k)
      for (int i = 0; i <= k; ++i) conv[s][k] += mom(i) * conv[s - 1][k - i];
  std::vector<T> kappa;
  for (int n = 1; n <= N; ++n) {
    T rest(0);
    for (int s = 1; s < n; ++s) rest += kappa[static_cast<std::size_t>(s - 1)] * conv[s][n - s];
    kappa.push_back(mom(n) - rest);
  }
  return kappa;
}

// Moments from cumulants by solving the same relation forwards.
template <class T>
std::vector<T> recursive_moments(const std::vector<T>& kappa) {
  const int N = static_cast<int>(kappa.size());
  std::vector<T> m;
  for (int n = 1; n <= N; ++n) {
    // Build compositions with the moments known so far plus m_n = 0 placeholder.
    std::vector<T> partial = m;
    partial.push_back(T(0));
    std::vector<T> probe = recursive_cumulants(partial);
    // kappa_n is affine in m_n with unit slope.
    m.push_back(kappa[static_cast<std::size_t>(n - 1)] - probe.back());
  }
  return m;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// m_n of FP(lambda, alpha) through Narayana numbers.
inline Rational free_poisson_moment(const Rational& lambda, const Rational& alpha, int n) {
  Rational sum = 0;
  for (int k = 1; k <= n; ++k) {
    const Rational narayana = Rational(binomial(n, k) * binomial(n, k - 1), BigInt(n));
    sum += narayana * freeprob::ipow(lambda, static_cast<unsigned>(k));
  }
  return sum * freeprob::ipow(alpha, static_cast<unsigned>(n));
}

inline BigInt catalan(int m) { return binomial(2 * m, m) / (m + 1); }

// Small random rationals p/q, |p| <= span, 1 <= q <= den.
struct RationalGen {
  std::mt19937_64 rng;
  explicit RationalGen(std::uint64_t seed) : rng(seed) {}
  Rational next(int span = 9, int den = 6) {
    std::uniform_int_distribution<int> p(-span, span);
    std::uniform_int_distribution<int> q(1, den);
    return Rational(p(rng), q(rng));
  }
  Rational positive(int span = 9, int den = 6) {
    std::uniform_int_distribution<int> p(1, span);
    std::uniform_int_distribution<int> q(1, den);
    return Rational(p(rng), q(rng));
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
};

}  // namespace oracle
