#pragma once

#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "freeprob/error.hpp"
#include "freeprob/scalar.hpp"

namespace freeprob {

/// Transforms sum over NC(n); NC(12) already has 208,012 terms.
inline constexpr int kDefaultMaxOrder = 12;

/// Truncated sequence (x_1, ..., x_N) indexed from 1.  The scalar type fixes
/// the arithmetic mode for everything computed from it.
template <class Tag, Scalar T>
class Sequence {
 public:
  using value_type = T;
  static constexpr Mode mode = mode_of<T>;

  explicit Sequence(std::vector<T> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("sequence order must be positive");
  }

  int order() const { return static_cast<int>(values_.size()); }
  const T& operator[](int n) const { return values_[static_cast<std::size_t>(n - 1)]; }
  std::span<const T> values() const { return values_; }

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<T> values_;
};

struct MomentTag {};
struct CumulantTag {};

template <Scalar T>
using MomentSequence = Sequence<MomentTag, T>;
template <Scalar T>
using CumulantSequence = Sequence<CumulantTag, T>;

template <class Tag>
Sequence<Tag, double> to_floating(const Sequence<Tag, Rational>& s) {
  std::vector<double> out;
  out.reserve(s.values().size());
  for (const auto& v : s.values()) out.push_back(to_double(v));
  return Sequence<Tag, double>(std::move(out));
}

/// kappa_n = sum over pi in NC(n) of mu(pi, 1_n) * prod_{V in pi} m_{|V|}.
template <Scalar T>
CumulantSequence<T> moments_to_cumulants(const MomentSequence<T>& m, int max_order = kDefaultMaxOrder);

/// m_n = sum over pi in NC(n) of prod_{V in pi} kappa_{|V|}.
template <Scalar T>
MomentSequence<T> cumulants_to_moments(const CumulantSequence<T>& k, int max_order = kDefaultMaxOrder);

/// Cumulants of a sum of free variables add.  Orders must agree.
template <Scalar T>
CumulantSequence<T> free_convolve(const CumulantSequence<T>& a, const CumulantSequence<T>& b);

using Letter = int;
using Word = std::vector<Letter>;

/// "xyx" -> {'x', 'y', 'x'}.
Word word_from_string(std::string_view letters);

/// Joint moments phi(a_{w_1} ... a_{w_n}) of a finite family, available for
/// every non-empty word up to `order`.
template <Scalar T>
class WordMomentOracle {
 public:
  using Eval = std::function<T(std::span<const Letter>)>;

  WordMomentOracle(std::vector<Letter> alphabet, int order, Eval eval);

  const std::vector<Letter>& alphabet() const { return alphabet_; }
  int order() const { return order_; }

  /// Throws DomainError for an empty word, a word longer than order(), or a
  /// letter outside the alphabet.
  T operator()(std::span<const Letter> word) const;

 private:
  std::vector<Letter> alphabet_;
  int order_;
  Eval eval_;
};

/// kappa_n(a_{w_1}, ..., a_{w_n}) by the Moebius sum over NC(n); each block
/// is evaluated on its order-preserving subword.
template <Scalar T>
T multivariate_cumulant(const WordMomentOracle<T>& oracle, std::span<const Letter> word,
                        int max_order = kDefaultMaxOrder);

/// Largest |kappa| over words of length 2..order that use two or more
/// distinct letters.  Zero exactly when the family is free up to `order`.
template <Scalar T>
T max_mixed_cumulant(const WordMomentOracle<T>& oracle, int order, int max_order = kDefaultMaxOrder);

/// Joint moments of a free family with the given marginal cumulants: mixed
/// cumulants vanish, so phi(w) = sum_{pi in NC(n)} prod_V kappa_V where a
/// block contributes only when all its letters agree.
template <Scalar T>
WordMomentOracle<T> free_family_oracle(const std::map<Letter, CumulantSequence<T>>& marginals,
                                       int max_order = kDefaultMaxOrder);

}  // namespace freeprob
